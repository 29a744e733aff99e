#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "flexplore/screw.hpp"

namespace flexplore {

/// Linear spring between a fixed world anchor and a body-frame attach
/// point. rest_len shorter than the mounted length encodes pretension.
struct SpringElement {
    Vec3 anchor{Vec3::Zero()};  // world [m]
    Vec3 attach{Vec3::Zero()};  // body frame [m]
    double k = 0.0;             // [N/m]
    double rest_len = 0.0;      // [m]
};

/// Pure torsional coupling about a fixed world axis.
struct TorsionElement {
    Vec3 axis_dir{Vec3::UnitZ()};    // unit
    Vec3 axis_point{Vec3::Zero()};   // world [m]
    double k_t = 0.0;                // [N·m/rad]
    double rest_angle = 0.0;         // [rad]
};

/// Pose-dependent element activity (contact/detach).
struct ContactRule {
    enum class Kind { Always, ReleaseAboveZ };
    Kind kind = Kind::Always;
    double z_threshold = 0.0;

    bool engaged(const Pose& z) const {
        return kind == Kind::Always || z.r.z() <= z_threshold;
    }
};

struct Scene {
    std::string name;
    std::vector<SpringElement> springs;
    std::vector<TorsionElement> torsions;
    Pose equilibrium_pose;
    ContactRule contact;

    /// Throws std::runtime_error if the net wrench at the equilibrium
    /// pose (all elements engaged) exceeds 1e-9.
    void validate() const;
};

/// Elastic reaction wrench on the gripper, reduced about the gripper
/// origin in world axes. Restoring: opposes displacement from
/// equilibrium. Throws on zero-length spring geometry.
Wrench reaction_wrench(const Scene& scene, const Pose& z);

/// Scalar tension in each spring at pose z (0 when disengaged).
std::vector<double> spring_forces(const Scene& scene, const Pose& z);

/// Stored elastic energy relative to the equilibrium pose [J].
double elastic_energy(const Scene& scene, const Pose& z);

/// Ground-truth stiffness by central differences over the 6 pose
/// perturbation directions, symmetrized.
Mat6 finite_difference_stiffness(const Scene& scene, const Pose& z, double step);

enum class ScenarioKind { PlanarTriangle, LineSpring, FlexibleHinge, Membrane };

ScenarioKind scenario_kind_from_name(const std::string& name);
std::string scenario_name(ScenarioKind kind);

struct TriangleParams {
    double k = 360.0;              // per spring [N/m]
    double pretension = 4.5;       // per spring at equilibrium [N]
    double vertex_radius = 0.08;   // body triangle [m]
    double anchor_radius = 0.28;   // base ring [m]
    double k_virtual_z = 5000.0;   // rigid embedding, translation [N/m]
    double k_virtual_rot = 500.0;  // rigid embedding, roll/pitch [N·m/rad]
};

struct LineSpringParams {
    Vec3 direction{1.0, 0.0, 0.0};
    double k = 800.0;          // per spring [N/m]
    double half_length = 0.3;  // anchor distance [m]
    double pretension = 9.0;   // per spring [N]
    double k_patch_rot = 0.1;  // grip-patch torsion [N·m/rad]
};

struct HingeParams {
    Vec3 hinge_axis{1.0, 0.0, 0.0};
    double k_hinge = 0.5;       // compliant torsion [N·m/rad]
    double arm = 0.05;          // lever arm realized by the stiffness ratio [m]
    double k_stiff_trans = 2000.0;
    double k_stiff_rot = 50.0;
};

struct MembraneParams {
    int spring_count = 8;
    double k = 150.0;           // per spring [N/m]
    double anisotropy = 0.25;   // directional stiffness variation
    double pretension = 3.0;    // per spring [N]
    double radius = 0.15;       // anchor ring [m]
    double release_z = 0.02;    // detach height [m]
    double k_patch_rot = 0.1;   // grip-patch torsion [N·m/rad]
};

Scene make_planar_triangle(const TriangleParams& p = {});
Scene make_line_spring(const LineSpringParams& p = {});
Scene make_flexible_hinge(const HingeParams& p = {});
Scene make_membrane(const MembraneParams& p = {});

/// Build a scenario by name with default parameters.
Scene make_scenario(ScenarioKind kind);

/// Force-sensor channel: per-axis Gaussian noise followed by a moving
/// average whose window grows from 1 during warm-up. Single-owner state.
struct SensorModel {
    Vec6 noise_std{Vec6::Zero()};  // [N, N, N, N·m, N·m, N·m]
    int filter_window = 1;
    std::uint64_t rng_seed = 0;
};

class WrenchSensor {
  public:
    explicit WrenchSensor(const SensorModel& model);

    /// One noisy, filtered sample.
    Wrench sense(const Wrench& raw);

    void reset();
    const SensorModel& model() const { return model_; }

  private:
    SensorModel model_;
    std::mt19937_64 rng_;
    std::deque<Vec6> window_;
    Vec6 window_sum_{Vec6::Zero()};
};

}  // namespace flexplore
