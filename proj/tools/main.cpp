#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flexplore/io.hpp"

namespace fs = std::filesystem;
using namespace flexplore;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_steps;
};

RunConfig load_with_overrides(const CommonOpts& opts) {
    RunConfig cfg = load_run_config(opts.config_path);
    if (!opts.out_dir.empty()) {
        cfg.out_dir = opts.out_dir;
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.sensor.rng_seed = *opts.seed;
    }
    if (opts.max_steps) {
        cfg.planner.max_steps = *opts.max_steps;
    }
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_plot_series(const RunConfig& cfg, const RunResult& result) {
    std::ostringstream pos, wn;
    pos << "step,time,position_error\n";
    wn << "step,time,normalized_wrench\n";
    for (const auto& row : result.log) {
        pos << row.step << ',' << fmt(row.time) << ',' << fmt((cfg.goal.r - row.z.r).norm())
            << '\n';
        // Recover the weighted magnitude each row carried in its barrier
        // value; it used the alpha active at that step.
        const double n = row.c2 > 0.0 && std::isfinite(row.c2)
                             ? cfg.planner.w_max - cfg.planner.rho / row.c2
                             : cfg.planner.w_max;
        wn << row.step << ',' << fmt(row.time) << ',' << fmt(n / cfg.planner.w_max) << '\n';
    }
    write_text_file((fs::path(cfg.out_dir) / "position_error.csv").string(), pos.str());
    write_text_file((fs::path(cfg.out_dir) / "wrench_norm.csv").string(), wn.str());
}

int cmd_plan(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    Explorer explorer(cfg.explorer);
    Explorer* explorer_ptr = cfg.explore_during_plan ? &explorer : nullptr;

    const RunResult result =
        run(cfg.scene, cfg.sensor, cfg.start, cfg.goal, cfg.planner, explorer_ptr);

    write_steps_csv((fs::path(cfg.out_dir) / "steps.csv").string(), result.log);
    Json summary = summary_to_json(result, cfg);
    if (explorer_ptr) {
        explorer.label_regions();
        write_text_file((fs::path(cfg.out_dir) / "atlas.json").string(),
                        atlas_to_json(explorer).dump(2) + "\n");
        summary["regions"] = Json::array();
        for (const auto& region : explorer.regions()) {
            summary["regions"].push_back(
                {{"id", region.id}, {"label", to_string(region.label.kind)}});
        }
    }
    write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    write_plot_series(cfg, result);
    if (result.termination == Termination::Diverged) {
        std::cerr << "plan: diverged after " << result.log.size() << " steps\n";
        return 1;
    }
    std::cout << "plan: " << to_string(result.termination) << " in " << result.log.size()
              << " steps, final task " << (result.log.empty() ? 0.0 : result.log.back().task)
              << "\n";
    return 0;
}

int cmd_explore(const CommonOpts& opts) {
    const RunConfig cfg = load_with_overrides(opts);
    std::vector<Pose> script = cfg.script;
    if (script.empty()) {
        script.push_back(cfg.start);
    }
    Explorer explorer(cfg.explorer);
    WrenchSensor sensor(cfg.sensor);
    const auto settled_read = [&](const Pose& p) {
        Wrench out;
        const Wrench raw = reaction_wrench(cfg.scene, p);
        for (int i = 0; i < cfg.sensor.filter_window; ++i) {
            out = sensor.sense(raw);
        }
        return out;
    };
    for (const auto& z : script) {
        const Mat6 k = probe_stiffness(settled_read, z, cfg.planner.probe);
        explorer.step(z, k);
    }
    explorer.label_regions();
    write_text_file((fs::path(cfg.out_dir) / "atlas.json").string(),
                    atlas_to_json(explorer).dump(2) + "\n");
    std::cout << "explore: " << explorer.regions().size() << " region(s) over " << script.size()
              << " pose(s)\n";
    return 0;
}

int cmd_identify(const std::string& input_path, const std::string& thresholds_path) {
    const Json input = load_json_file(input_path);
    ClassifierThresholds th;
    if (!thresholds_path.empty()) {
        th = thresholds_from_json(load_json_file(thresholds_path));
    } else if (input.contains("thresholds")) {
        th = thresholds_from_json(input["thresholds"]);
    }
    const Constraint c = constraint_from_identify_json(input);
    const ConstraintLabel label = identify_constraint(c, th);

    Json out = label_to_json(label);
    out["axes"] = Json::array();
    for (const auto& s : c.screws) {
        const AxisClass cls = classify_axis(s, th);
        Json aj;
        aj["lambda"] = s.lambda;
        aj["pitch_raw"] = s.pitch_raw;
        aj["pitch_w"] = std::isinf(s.pitch_w) ? Json(nullptr) : Json(s.pitch_w);
        aj["motion"] = to_string(cls.motion);
        aj["stiffness"] = to_string(cls.stiffness);
        out["axes"].push_back(aj);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // region column parsed as double
};

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open: " + path);
    }
    CsvTable t;
    std::string line;
    if (!std::getline(f, line)) {
        throw ConfigError("empty CSV: " + path);
    }
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        t.header.push_back(cell);
    }
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        if (row.size() != t.header.size()) {
            throw ConfigError("ragged CSV row in " + path);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

int cmd_verify(const std::string& dir) {
    const fs::path base(dir);
    const Json summary = load_json_file((base / "summary.json").string());
    const double w_max = summary.at("w_max").get<double>();
    const CsvTable steps = read_csv((base / "steps.csv").string());

    const auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < steps.header.size(); ++i) {
            if (steps.header[i] == name) return i;
        }
        throw ConfigError("missing CSV column: " + name);
    };
    const std::size_t c2 = col("c2");
    const std::size_t fx = col("fx");
    const std::size_t e_col = col("E");

    int violations = 0;
    for (std::size_t r = 0; r < steps.rows.size(); ++r) {
        const auto& row = steps.rows[r];
        bool ok = true;
        for (double v : row) {
            if (!std::isfinite(v)) ok = false;
        }
        // Finite positive barrier certifies |Gamma6 w| < w_max for the row.
        if (!(row[c2] > 0.0) || !std::isfinite(row[c2])) ok = false;
        const double fnorm =
            std::sqrt(row[fx] * row[fx] + row[fx + 1] * row[fx + 1] + row[fx + 2] * row[fx + 2]);
        if (fnorm >= w_max) ok = false;
        if (row[e_col] < -1e-3) ok = false;
        if (!ok) {
            std::cerr << "verify: violation at row " << r << "\n";
            ++violations;
        }
    }
    if (static_cast<std::size_t>(summary.at("steps").get<int>()) != steps.rows.size()) {
        std::cerr << "verify: summary step count does not match CSV\n";
        ++violations;
    }
    if (violations > 0) {
        std::cerr << "verify: " << violations << " violation(s)\n";
        return 1;
    }
    std::cout << "verify: " << steps.rows.size() << " rows ok, peak |f| within " << w_max << " N\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exploration, identification and safe manipulation in elastic environments"};
    app.require_subcommand(1);

    CommonOpts plan_opts, explore_opts;
    std::string identify_input, identify_thresholds, verify_dir;

    auto* plan = app.add_subcommand("plan", "run the manipulation planner on a scenario");
    plan->add_option("--config", plan_opts.config_path, "run configuration JSON")->required();
    plan->add_option("--out", plan_opts.out_dir, "output directory");
    plan->add_option("--seed", plan_opts.seed, "sensor noise seed");
    plan->add_option("--max-steps", plan_opts.max_steps, "step limit");

    auto* explore = app.add_subcommand("explore", "probe a pose script and build the region atlas");
    explore->add_option("--config", explore_opts.config_path, "run configuration JSON")->required();
    explore->add_option("--out", explore_opts.out_dir, "output directory");
    explore->add_option("--seed", explore_opts.seed, "sensor noise seed");
    explore->add_option("--max-steps", explore_opts.max_steps, "step limit");

    auto* identify = app.add_subcommand("identify", "classify eigendata or a stiffness matrix");
    identify->add_option("input", identify_input, "eigendata/K JSON file")->required();
    identify->add_option("--thresholds", identify_thresholds, "classifier thresholds JSON");

    auto* verify = app.add_subcommand("verify", "check emitted logs against the run invariants");
    verify->add_option("--out", verify_dir, "run output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed()) return cmd_plan(plan_opts);
        if (explore->parsed()) return cmd_explore(explore_opts);
        if (identify->parsed()) return cmd_identify(identify_input, identify_thresholds);
        if (verify->parsed()) return cmd_verify(verify_dir);
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
