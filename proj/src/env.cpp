#include "flexplore/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flexplore {

namespace {

struct SpringState {
    Vec3 attach_world;
    Vec3 dir;       // unit, attach -> anchor
    double length;
    double tension;  // k * (length - rest_len)
};

SpringState eval_spring(const SpringElement& s, const Pose& z) {
    SpringState st;
    st.attach_world = z.r + z.q * s.attach;
    const Vec3 l = s.anchor - st.attach_world;
    st.length = l.norm();
    if (st.length < 1e-12) {
        throw std::runtime_error("reaction_wrench: spring anchor coincides with attach point");
    }
    st.dir = l / st.length;
    st.tension = s.k * (st.length - s.rest_len);
    return st;
}

/// Signed rotation of orientation q about the world axis, via
/// swing-twist split. Zero at identity orientation.
double twist_angle_about(const Quat& q_in, const Vec3& axis) {
    Quat q = q_in;
    if (q.w() < 0.0) {
        q.coeffs() *= -1.0;
    }
    const double proj = Vec3(q.x(), q.y(), q.z()).dot(axis);
    return 2.0 * std::atan2(proj, q.w());
}

/// d(theta)/d(phi) for a world-frame rotation increment phi applied on
/// the left of q. Reduces to the axis itself at identity; the full
/// Jacobian keeps the torsion couple the exact gradient of its energy.
Vec3 twist_angle_gradient(const Quat& q_in, const Vec3& axis) {
    Quat q = q_in;
    if (q.w() < 0.0) {
        q.coeffs() *= -1.0;
    }
    const Vec3 v(q.x(), q.y(), q.z());
    const double w = q.w();
    const double p = v.dot(axis);
    const double denom = w * w + p * p;
    return (w * w * axis + w * v.cross(axis) + p * v) / denom;
}

double energy_raw(const Scene& scene, const Pose& z) {
    double e = 0.0;
    if (scene.contact.engaged(z)) {
        for (const auto& s : scene.springs) {
            const SpringState st = eval_spring(s, z);
            const double x = st.length - s.rest_len;
            e += 0.5 * s.k * x * x;
        }
        for (const auto& t : scene.torsions) {
            const double d = twist_angle_about(z.q, t.axis_dir) - t.rest_angle;
            e += 0.5 * t.k_t * d * d;
        }
    }
    return e;
}

Vec3 perpendicular_unit(const Vec3& axis) {
    int least = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(axis(i)) < std::abs(axis(least))) least = i;
    }
    return axis.cross(Vec3::Unit(least)).normalized();
}

}  // namespace

void Scene::validate() const {
    Scene all_engaged = *this;
    all_engaged.contact = ContactRule{};
    const Wrench w = reaction_wrench(all_engaged, equilibrium_pose);
    if (w.vec().norm() >= 1e-9) {
        throw std::runtime_error("Scene: nonzero wrench at equilibrium pose (" +
                                 std::to_string(w.vec().norm()) + ")");
    }
}

Wrench reaction_wrench(const Scene& scene, const Pose& z) {
    Wrench w;
    if (!scene.contact.engaged(z)) {
        return w;
    }
    for (const auto& s : scene.springs) {
        const SpringState st = eval_spring(s, z);
        const Vec3 f = st.tension * st.dir;
        w.f += f;
        w.m += (st.attach_world - z.r).cross(f);
    }
    for (const auto& t : scene.torsions) {
        const double d = twist_angle_about(z.q, t.axis_dir) - t.rest_angle;
        w.m += -t.k_t * d * twist_angle_gradient(z.q, t.axis_dir);
    }
    return w;
}

std::vector<double> spring_forces(const Scene& scene, const Pose& z) {
    std::vector<double> out(scene.springs.size(), 0.0);
    if (!scene.contact.engaged(z)) {
        return out;
    }
    for (std::size_t i = 0; i < scene.springs.size(); ++i) {
        out[i] = eval_spring(scene.springs[i], z).tension;
    }
    return out;
}

double elastic_energy(const Scene& scene, const Pose& z) {
    return energy_raw(scene, z) - energy_raw(scene, scene.equilibrium_pose);
}

Mat6 finite_difference_stiffness(const Scene& scene, const Pose& z, double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("finite_difference_stiffness: step must be positive");
    }
    Mat6 k;
    for (int j = 0; j < 6; ++j) {
        Vec6 d = Vec6::Zero();
        d(j) = step;
        const Wrench wp = reaction_wrench(scene, z.perturbed(d));
        const Wrench wm = reaction_wrench(scene, z.perturbed(-d));
        const Vec6 dw = wp.vec() - wm.vec();
        if (!dw.allFinite()) {
            throw std::runtime_error("finite_difference_stiffness: non-finite wrench");
        }
        k.col(j) = -dw / (2.0 * step);
    }
    return 0.5 * (k + k.transpose());
}

ScenarioKind scenario_kind_from_name(const std::string& name) {
    if (name == "planar_triangle") return ScenarioKind::PlanarTriangle;
    if (name == "line_spring") return ScenarioKind::LineSpring;
    if (name == "flexible_hinge") return ScenarioKind::FlexibleHinge;
    if (name == "membrane") return ScenarioKind::Membrane;
    throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::PlanarTriangle: return "planar_triangle";
        case ScenarioKind::LineSpring: return "line_spring";
        case ScenarioKind::FlexibleHinge: return "flexible_hinge";
        case ScenarioKind::Membrane: return "membrane";
    }
    throw std::invalid_argument("unknown scenario kind");
}

Scene make_planar_triangle(const TriangleParams& p) {
    if (p.k <= 0.0 || p.vertex_radius <= 0.0 || p.anchor_radius <= p.vertex_radius) {
        throw std::invalid_argument("make_planar_triangle: invalid geometry");
    }
    Scene scene;
    scene.name = "planar_triangle";
    const double angles[3] = {90.0, 210.0, 330.0};
    const double len = p.anchor_radius - p.vertex_radius;
    for (double deg : angles) {
        const double a = deg * std::numbers::pi / 180.0;
        const Vec3 dir(std::cos(a), std::sin(a), 0.0);
        SpringElement s;
        s.attach = p.vertex_radius * dir;
        s.anchor = p.anchor_radius * dir;
        s.k = p.k;
        s.rest_len = len - p.pretension / p.k;
        scene.springs.push_back(s);
    }
    // Rigid embedding of the planar rig: long virtual spring on z keeps
    // the axial stiffness clean of lateral coupling; torsions lock
    // roll and pitch.
    SpringElement vz;
    vz.attach = Vec3::Zero();
    vz.anchor = Vec3(0.0, 0.0, -100.0);
    vz.k = p.k_virtual_z;
    vz.rest_len = 100.0;
    scene.springs.push_back(vz);
    scene.torsions.push_back({Vec3::UnitX(), Vec3::Zero(), p.k_virtual_rot, 0.0});
    scene.torsions.push_back({Vec3::UnitY(), Vec3::Zero(), p.k_virtual_rot, 0.0});
    scene.validate();
    return scene;
}

Scene make_line_spring(const LineSpringParams& p) {
    if (p.k <= 0.0 || p.half_length <= 0.0 || p.direction.norm() < 1e-12) {
        throw std::invalid_argument("make_line_spring: invalid parameters");
    }
    Scene scene;
    scene.name = "line_spring";
    const Vec3 d = p.direction.normalized();
    for (double sgn : {1.0, -1.0}) {
        SpringElement s;
        s.attach = Vec3::Zero();
        s.anchor = sgn * p.half_length * d;
        s.k = p.k;
        s.rest_len = p.half_length - p.pretension / p.k;
        scene.springs.push_back(s);
    }
    for (int i = 0; i < 3; ++i) {
        scene.torsions.push_back(
            {Vec3::Unit(i), Vec3::Zero(), p.k_patch_rot * (0.8 + 0.2 * i), 0.0});
    }
    scene.validate();
    return scene;
}

Scene make_flexible_hinge(const HingeParams& p) {
    if (p.k_hinge <= 0.0 || p.arm <= 0.0 || p.hinge_axis.norm() < 1e-12) {
        throw std::invalid_argument("make_flexible_hinge: invalid parameters");
    }
    Scene scene;
    scene.name = "flexible_hinge";
    const Vec3 a = p.hinge_axis.normalized();
    const Vec3 u = perpendicular_unit(a);  // compliant translation
    const Vec3 w = a.cross(u);
    const double arm_len = 50.0;
    auto axial_spring = [&](const Vec3& dir, double k) {
        SpringElement s;
        s.attach = Vec3::Zero();
        s.anchor = arm_len * dir;
        s.k = k;
        s.rest_len = arm_len;
        return s;
    };
    scene.springs.push_back(axial_spring(a, p.k_stiff_trans));
    scene.springs.push_back(axial_spring(w, p.k_stiff_trans));
    scene.springs.push_back(axial_spring(u, p.k_hinge / (p.arm * p.arm)));
    scene.torsions.push_back({a, Vec3::Zero(), p.k_hinge, 0.0});
    scene.torsions.push_back({u, Vec3::Zero(), p.k_stiff_rot, 0.0});
    scene.torsions.push_back({w, Vec3::Zero(), p.k_stiff_rot, 0.0});
    scene.validate();
    return scene;
}

Scene make_membrane(const MembraneParams& p) {
    if (p.spring_count < 8 || p.k <= 0.0 || p.pretension <= 0.0) {
        throw std::invalid_argument("make_membrane: needs >= 8 pretensioned springs");
    }
    if (std::abs(p.anisotropy) >= 1.0) {
        throw std::invalid_argument("make_membrane: |anisotropy| must stay below 1");
    }
    Scene scene;
    scene.name = "membrane";
    for (int i = 0; i < p.spring_count; ++i) {
        const double a = 2.0 * std::numbers::pi * i / p.spring_count;
        SpringElement s;
        s.attach = Vec3::Zero();
        s.anchor = Vec3(p.radius * std::cos(a), p.radius * std::sin(a), 0.0);
        // Directional sheet stiffness; splits the in-plane eigenvalues
        // so the eigenscrews are well separated at every pose. Equal
        // pretension keeps the ring in equilibrium.
        s.k = p.k * (1.0 + p.anisotropy * std::cos(2.0 * a));
        s.rest_len = p.radius - p.pretension / s.k;
        scene.springs.push_back(s);
    }
    // The gripped patch carries a small torsional coupling; keeps the
    // stiffness full-rank while staying negligible next to the
    // translational terms. Slightly distinct per axis.
    for (int i = 0; i < 3; ++i) {
        scene.torsions.push_back(
            {Vec3::Unit(i), Vec3::Zero(), p.k_patch_rot * (0.8 + 0.2 * i), 0.0});
    }
    scene.contact.kind = ContactRule::Kind::ReleaseAboveZ;
    scene.contact.z_threshold = p.release_z;
    scene.validate();
    return scene;
}

Scene make_scenario(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::PlanarTriangle: return make_planar_triangle();
        case ScenarioKind::LineSpring: return make_line_spring();
        case ScenarioKind::FlexibleHinge: return make_flexible_hinge();
        case ScenarioKind::Membrane: return make_membrane();
    }
    throw std::invalid_argument("unknown scenario kind");
}

WrenchSensor::WrenchSensor(const SensorModel& model) : model_(model), rng_(model.rng_seed) {
    if (model_.filter_window < 1) {
        throw std::invalid_argument("SensorModel: filter_window must be >= 1");
    }
}

Wrench WrenchSensor::sense(const Wrench& raw) {
    Vec6 sample = raw.vec();
    if (model_.noise_std.norm() > 0.0) {
        std::normal_distribution<double> n(0.0, 1.0);
        for (int i = 0; i < 6; ++i) {
            sample(i) += model_.noise_std(i) * n(rng_);
        }
    }
    window_.push_back(sample);
    window_sum_ += sample;
    if (static_cast<int>(window_.size()) > model_.filter_window) {
        window_sum_ -= window_.front();
        window_.pop_front();
    }
    return Wrench::from_vec(window_sum_ / static_cast<double>(window_.size()));
}

void WrenchSensor::reset() {
    rng_.seed(model_.rng_seed);
    window_.clear();
    window_sum_.setZero();
}

}  // namespace flexplore
