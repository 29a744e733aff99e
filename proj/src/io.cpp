#include "flexplore/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace flexplore {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Vec3 vec3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError("expected a 3-element array");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json vec3_to_json(const Vec3& v) {
    return Json::array({v.x(), v.y(), v.z()});
}

Vec6 vec6_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 6) {
        throw ConfigError("expected a 6-element array");
    }
    Vec6 v;
    for (int i = 0; i < 6; ++i) v(i) = j[i].get<double>();
    return v;
}

Json vec6_to_json(const Vec6& v) {
    Json out = Json::array();
    for (int i = 0; i < 6; ++i) out.push_back(v(i));
    return out;
}

Json axis_line_to_json(const AxisLine& line) {
    return Json{{"direction", vec3_to_json(line.direction)}, {"point", vec3_to_json(line.point)}};
}

}  // namespace

Pose pose_from_json(const Json& j) {
    if (!j.is_array()) {
        throw ConfigError("pose must be an array");
    }
    Pose z;
    if (j.size() == 7) {
        z.r = Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
        z.q = Quat(j[3].get<double>(), j[4].get<double>(), j[5].get<double>(), j[6].get<double>());
        if (std::abs(z.q.norm() - 1.0) > 1e-6) {
            throw ConfigError("pose quaternion off unit norm");
        }
        z.q.normalize();
        return z;
    }
    if (j.size() == 3) {  // planar [x, y, theta]
        z.r = Vec3(j[0].get<double>(), j[1].get<double>(), 0.0);
        z.q = quat_exp(Vec3(0.0, 0.0, j[2].get<double>()));
        return z;
    }
    throw ConfigError("pose must have 7 entries ([x y z qw qx qy qz]) or 3 ([x y theta])");
}

Json pose_to_json(const Pose& z) {
    return Json::array({z.r.x(), z.r.y(), z.r.z(), z.q.w(), z.q.x(), z.q.y(), z.q.z()});
}

Scene scene_from_json(const Json& j) {
    Scene scene;
    scene.name = j.value("name", std::string("custom"));
    for (const auto& sj : j.value("springs", Json::array())) {
        SpringElement s;
        s.anchor = vec3_from_json(sj.at("anchor"));
        s.attach = vec3_from_json(sj.at("attach"));
        s.k = sj.at("k").get<double>();
        s.rest_len = sj.at("rest_len").get<double>();
        if (!(s.k > 0.0) || s.rest_len < 0.0) {
            throw ConfigError("spring requires k > 0 and rest_len >= 0");
        }
        scene.springs.push_back(s);
    }
    for (const auto& tj : j.value("torsions", Json::array())) {
        TorsionElement t;
        t.axis_dir = vec3_from_json(tj.at("axis_dir"));
        if (t.axis_dir.norm() < 1e-12) {
            throw ConfigError("torsion axis direction must be nonzero");
        }
        t.axis_dir.normalize();
        t.axis_point = vec3_from_json(tj.value("axis_point", Json::array({0.0, 0.0, 0.0})));
        t.k_t = tj.at("k_t").get<double>();
        t.rest_angle = tj.value("rest_angle", 0.0);
        if (!(t.k_t > 0.0)) {
            throw ConfigError("torsion requires k_t > 0");
        }
        scene.torsions.push_back(t);
    }
    if (j.contains("equilibrium_pose")) {
        scene.equilibrium_pose = pose_from_json(j["equilibrium_pose"]);
    }
    if (j.contains("contact")) {
        const auto& cj = j["contact"];
        const std::string rule = cj.value("rule", std::string("always"));
        if (rule == "always") {
            scene.contact.kind = ContactRule::Kind::Always;
        } else if (rule == "release_above_z") {
            scene.contact.kind = ContactRule::Kind::ReleaseAboveZ;
            scene.contact.z_threshold = cj.at("z_threshold").get<double>();
        } else {
            throw ConfigError("unknown contact rule: " + rule);
        }
    }
    scene.validate();
    return scene;
}

Json scene_to_json(const Scene& scene) {
    Json j;
    j["name"] = scene.name;
    j["springs"] = Json::array();
    for (const auto& s : scene.springs) {
        j["springs"].push_back({{"anchor", vec3_to_json(s.anchor)},
                                {"attach", vec3_to_json(s.attach)},
                                {"k", s.k},
                                {"rest_len", s.rest_len}});
    }
    j["torsions"] = Json::array();
    for (const auto& t : scene.torsions) {
        j["torsions"].push_back({{"axis_dir", vec3_to_json(t.axis_dir)},
                                 {"axis_point", vec3_to_json(t.axis_point)},
                                 {"k_t", t.k_t},
                                 {"rest_angle", t.rest_angle}});
    }
    j["equilibrium_pose"] = pose_to_json(scene.equilibrium_pose);
    if (scene.contact.kind == ContactRule::Kind::ReleaseAboveZ) {
        j["contact"] = {{"rule", "release_above_z"}, {"z_threshold", scene.contact.z_threshold}};
    } else {
        j["contact"] = {{"rule", "always"}};
    }
    return j;
}

namespace {

Scene builtin_scenario(const std::string& name, const Json& params) {
    const ScenarioKind kind = scenario_kind_from_name(name);
    switch (kind) {
        case ScenarioKind::PlanarTriangle: {
            TriangleParams p;
            p.k = params.value("k", p.k);
            p.pretension = params.value("pretension", p.pretension);
            p.vertex_radius = params.value("vertex_radius", p.vertex_radius);
            p.anchor_radius = params.value("anchor_radius", p.anchor_radius);
            p.k_virtual_z = params.value("k_virtual_z", p.k_virtual_z);
            p.k_virtual_rot = params.value("k_virtual_rot", p.k_virtual_rot);
            return make_planar_triangle(p);
        }
        case ScenarioKind::LineSpring: {
            LineSpringParams p;
            if (params.contains("direction")) p.direction = vec3_from_json(params["direction"]);
            p.k = params.value("k", p.k);
            p.half_length = params.value("half_length", p.half_length);
            p.pretension = params.value("pretension", p.pretension);
            p.k_patch_rot = params.value("k_patch_rot", p.k_patch_rot);
            return make_line_spring(p);
        }
        case ScenarioKind::FlexibleHinge: {
            HingeParams p;
            if (params.contains("hinge_axis")) p.hinge_axis = vec3_from_json(params["hinge_axis"]);
            p.k_hinge = params.value("k_hinge", p.k_hinge);
            p.arm = params.value("arm", p.arm);
            p.k_stiff_trans = params.value("k_stiff_trans", p.k_stiff_trans);
            p.k_stiff_rot = params.value("k_stiff_rot", p.k_stiff_rot);
            return make_flexible_hinge(p);
        }
        case ScenarioKind::Membrane: {
            MembraneParams p;
            p.spring_count = params.value("spring_count", p.spring_count);
            p.k = params.value("k", p.k);
            p.anisotropy = params.value("anisotropy", p.anisotropy);
            p.pretension = params.value("pretension", p.pretension);
            p.radius = params.value("radius", p.radius);
            p.release_z = params.value("release_z", p.release_z);
            p.k_patch_rot = params.value("k_patch_rot", p.k_patch_rot);
            return make_membrane(p);
        }
    }
    throw ConfigError("unknown scenario: " + name);
}

}  // namespace

Scene resolve_scenario(const Json& ref, const std::string& base_dir) {
    if (ref.is_string()) {
        return builtin_scenario(ref.get<std::string>(), Json::object());
    }
    if (ref.is_object()) {
        if (ref.contains("file")) {
            std::filesystem::path p = ref["file"].get<std::string>();
            if (p.is_relative() && !base_dir.empty()) {
                p = std::filesystem::path(base_dir) / p;
            }
            return scene_from_json(load_json_file(p.string()));
        }
        if (ref.contains("name")) {
            return builtin_scenario(ref["name"].get<std::string>(),
                                    ref.value("params", Json::object()));
        }
        if (ref.contains("springs") || ref.contains("torsions")) {
            return scene_from_json(ref);
        }
    }
    throw ConfigError("scenario must be a builtin name, {name, params}, {file} or inline scene");
}

PlannerConfig planner_config_from_json(const Json& j) {
    PlannerConfig c;
    c.kappa = j.value("kappa", c.kappa);
    c.rho = j.value("rho", c.rho);
    c.w_max = j.value("w_max", c.w_max);
    c.dt = j.value("dt", c.dt);
    c.step_size = j.value("step_size", c.step_size);
    c.gain = j.value("gain", c.gain);
    c.grad_step = j.value("grad_step", c.grad_step);
    c.eps_task = j.value("eps_task", c.eps_task);
    c.reprobe_period = j.value("reprobe_period", c.reprobe_period);
    c.reprobe_error = j.value("reprobe_error", c.reprobe_error);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.divergence_window = j.value("divergence_window", c.divergence_window);
    if (j.contains("probe")) {
        const auto& pj = j["probe"];
        c.probe.eps = pj.value("eps", c.probe.eps);
        c.probe.dt = pj.value("dt", c.probe.dt);
        c.probe.repeats = pj.value("repeats", c.probe.repeats);
        c.probe.noise_floor = pj.value("noise_floor", c.probe.noise_floor);
    }
    c.validate();
    return c;
}

ClassifierThresholds thresholds_from_json(const Json& j) {
    ClassifierThresholds t;
    t.gamma_theta = j.value("gamma_theta", t.gamma_theta);
    t.gamma_x = j.value("gamma_x", t.gamma_x);
    t.gamma_c_trans = j.value("gamma_c_trans", t.gamma_c_trans);
    t.gamma_r_trans = j.value("gamma_r_trans", t.gamma_r_trans);
    t.gamma_c_rot = j.value("gamma_c_rot", t.gamma_c_rot);
    t.gamma_r_rot = j.value("gamma_r_rot", t.gamma_r_rot);
    t.dominance_ratio = j.value("dominance_ratio", t.dominance_ratio);
    t.similarity_band = j.value("similarity_band", t.similarity_band);
    t.perp_tol_deg = j.value("perp_tol_deg", t.perp_tol_deg);
    t.r_min = j.value("r_min", t.r_min);
    t.r_max = j.value("r_max", t.r_max);
    t.validate();
    return t;
}

ExplorerConfig explorer_config_from_json(const Json& j) {
    ExplorerConfig c;
    c.gamma = j.value("gamma", c.gamma);
    c.ema_weight = j.value("ema_weight", c.ema_weight);
    c.mismatch_patience = j.value("mismatch_patience", c.mismatch_patience);
    c.store_all_screws = j.value("store_all_screws", c.store_all_screws);
    if (j.contains("thresholds")) {
        c.thresholds = thresholds_from_json(j["thresholds"]);
    }
    c.validate();
    return c;
}

SensorModel sensor_model_from_json(const Json& j) {
    SensorModel m;
    if (j.contains("noise_std")) {
        const auto& nj = j["noise_std"];
        if (nj.is_number()) {
            m.noise_std.setConstant(nj.get<double>());
        } else {
            m.noise_std = vec6_from_json(nj);
        }
    }
    m.filter_window = j.value("filter_window", m.filter_window);
    m.rng_seed = j.value("seed", m.rng_seed);
    if (m.filter_window < 1) {
        throw ConfigError("sensor filter_window must be >= 1");
    }
    return m;
}

RunConfig run_config_from_json(const Json& j, const std::string& base_dir) {
    RunConfig cfg;
    if (!j.contains("scenario")) {
        throw ConfigError("config requires a scenario");
    }
    cfg.scene = resolve_scenario(j["scenario"], base_dir);
    cfg.start = j.contains("start") ? pose_from_json(j["start"]) : cfg.scene.equilibrium_pose;
    cfg.goal = j.contains("goal") ? pose_from_json(j["goal"]) : cfg.scene.equilibrium_pose;
    if (j.contains("planner")) cfg.planner = planner_config_from_json(j["planner"]);
    if (j.contains("explorer")) cfg.explorer = explorer_config_from_json(j["explorer"]);
    if (j.contains("thresholds")) cfg.explorer.thresholds = thresholds_from_json(j["thresholds"]);
    if (j.contains("sensor")) cfg.sensor = sensor_model_from_json(j["sensor"]);
    for (const auto& pj : j.value("script", Json::array())) {
        cfg.script.push_back(pose_from_json(pj));
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.explore_during_plan = j.value("explore_during_plan", cfg.explore_during_plan);
    if (j.contains("seed")) {
        cfg.sensor.rng_seed = cfg.seed;
    }
    if (j.contains("max_steps")) {
        cfg.planner.max_steps = j["max_steps"].get<int>();
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    const std::string base = std::filesystem::path(path).parent_path().string();
    return run_config_from_json(load_json_file(path), base);
}

Constraint constraint_from_identify_json(const Json& j) {
    Constraint c;
    if (j.contains("K")) {
        const auto& kj = j["K"];
        if (!kj.is_array() || kj.size() != 6) {
            throw ConfigError("K must be a 6x6 array of rows");
        }
        Mat6 k;
        for (int r = 0; r < 6; ++r) {
            k.row(r) = vec6_from_json(kj[r]).transpose();
        }
        c.screws = eigenscrew_decompose(k);
        c.sample_count = 1;
        return c;
    }
    if (!j.contains("screws") || !j.contains("lambdas")) {
        throw ConfigError("identification input needs either K or screws + lambdas");
    }
    const auto& sj = j["screws"];
    const auto& lj = j["lambdas"];
    if (!sj.is_array() || !lj.is_array() || sj.size() != lj.size() || sj.empty()) {
        throw ConfigError("screws and lambdas must be equal-length nonempty arrays");
    }
    for (std::size_t i = 0; i < sj.size(); ++i) {
        c.screws.emplace_back(ScrewVector(vec6_from_json(sj[i])), lj[i].get<double>());
    }
    c.sample_count = 1;
    return c;
}

Json label_to_json(const ConstraintLabel& label) {
    Json j;
    j["label"] = to_string(label.kind);
    Json params = Json::object();
    if (label.hinge_axis) {
        params["hinge_axis"] = axis_line_to_json(*label.hinge_axis);
    }
    if (label.lever_arm_m) {
        params["lever_arm_m"] = *label.lever_arm_m;
    }
    if (label.spring_axis) {
        params["spring_axis"] = axis_line_to_json(*label.spring_axis);
    }
    if (label.membrane_normal) {
        params["membrane_normal"] = vec3_to_json(*label.membrane_normal);
    }
    j["params"] = params;
    if (!label.diagnostic.empty()) {
        j["diagnostic"] = label.diagnostic;
    }
    return j;
}

Json constraint_to_json(const Constraint& c) {
    Json j;
    j["sample_count"] = c.sample_count;
    j["screws"] = Json::array();
    for (const auto& s : c.screws) {
        Json sj;
        sj["e"] = vec6_to_json(s.e.vec());
        sj["lambda"] = s.lambda;
        sj["pitch_raw"] = s.pitch_raw;
        if (std::isinf(s.pitch_w)) {
            sj["pitch_w"] = nullptr;  // couple-dominant axis
        } else {
            sj["pitch_w"] = s.pitch_w;
        }
        j["screws"].push_back(sj);
    }
    return j;
}

Json atlas_to_json(const Explorer& explorer) {
    Json j;
    j["region_count"] = explorer.regions().size();
    j["regions"] = Json::array();
    for (const auto& region : explorer.regions()) {
        Json rj;
        rj["id"] = region.id;
        rj["label"] = label_to_json(region.label);
        rj["constraint"] = constraint_to_json(region.constraint);
        rj["poses"] = Json::array();
        for (const auto& z : region.poses) {
            rj["poses"].push_back(pose_to_json(z));
        }
        j["regions"].push_back(rj);
    }
    return j;
}

void write_steps_csv(const std::string& path, const std::vector<StepLog>& log) {
    std::ostringstream out;
    out << "step,time,x,y,z,qw,qx,qy,qz,fx,fy,fz,mx,my,mz,E,J,task,c1,c2,region\n";
    for (const auto& row : log) {
        out << row.step << ',' << fmt(row.time) << ',' << fmt(row.z.r.x()) << ','
            << fmt(row.z.r.y()) << ',' << fmt(row.z.r.z()) << ',' << fmt(row.z.q.w()) << ','
            << fmt(row.z.q.x()) << ',' << fmt(row.z.q.y()) << ',' << fmt(row.z.q.z()) << ','
            << fmt(row.w.f.x()) << ',' << fmt(row.w.f.y()) << ',' << fmt(row.w.f.z()) << ','
            << fmt(row.w.m.x()) << ',' << fmt(row.w.m.y()) << ',' << fmt(row.w.m.z()) << ','
            << fmt(row.energy) << ',' << fmt(row.objective) << ',' << fmt(row.task) << ','
            << fmt(row.c1) << ',' << fmt(row.c2) << ',' << row.region << '\n';
    }
    write_text_file(path, out.str());
}

Json summary_to_json(const RunResult& result, const RunConfig& cfg) {
    Json j;
    j["scenario"] = cfg.scene.name;
    j["termination"] = to_string(result.termination);
    j["reached"] = result.reached;
    j["steps"] = result.log.size();
    j["final_pose"] = pose_to_json(result.final_state.z);
    j["final_task"] = result.log.empty() ? 0.0 : result.log.back().task;
    j["final_energy"] = result.final_state.energy;
    j["alpha"] = result.final_state.alpha_w;
    j["peak_gamma_wrench"] = result.peak_gamma_wrench;
    j["peak_spring_force"] = result.peak_spring_force;
    j["probe_count"] = result.probe_count;
    j["emergency_count"] = result.emergency_count;
    j["energy_drift_flagged"] = result.energy_drift_flagged;
    j["w_max"] = cfg.planner.w_max;
    j["rho"] = cfg.planner.rho;
    j["kappa"] = cfg.planner.kappa;
    j["seed"] = cfg.seed;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    f << content;
}

Json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open: " + path);
    }
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

}  // namespace flexplore
