#pragma once

#include <optional>
#include <string>

#include "flexplore/stiffness.hpp"

namespace flexplore {

/// Critical values separating rotational from translational axes and
/// compliant from rigid magnitudes. Workspace-dependent; the defaults
/// are calibrated for decimeter-scale rigs.
struct ClassifierThresholds {
    double gamma_theta = 0.1;     // |pitch| below -> translational [m]
    double gamma_x = 1.0;         // |pitch| above -> rotational [m]
    double gamma_c_trans = 10.0;  // |lambda| below -> free [N/m]
    double gamma_r_trans = 5e3;   // |lambda| above -> rigid [N/m]
    double gamma_c_rot = 0.05;    // [N·m/rad]
    double gamma_r_rot = 75.0;    // [N·m/rad]
    double dominance_ratio = 2.0; // "much greater/less" cutoff
    double similarity_band = 0.35;// "approximately equal" relative width
    double perp_tol_deg = 15.0;
    double r_min = 0.01;          // lever arm acceptance band [m]
    double r_max = 0.5;

    void validate() const;
};

enum class MotionClass { Rotational, Screw, Translational };
enum class StiffnessClass { Free, Compliant, Rigid };

struct AxisClass {
    MotionClass motion;
    StiffnessClass stiffness;
};

enum class ConstraintKind { FlexibleHinge, LinearSpringConstraint, Membrane, Unknown };

std::string to_string(ConstraintKind kind);
std::string to_string(MotionClass m);
std::string to_string(StiffnessClass s);

struct ConstraintLabel {
    ConstraintKind kind = ConstraintKind::Unknown;
    // FlexibleHinge
    std::optional<AxisLine> hinge_axis;
    std::optional<double> lever_arm_m;
    // LinearSpringConstraint
    std::optional<AxisLine> spring_axis;
    // Membrane
    std::optional<Vec3> membrane_normal;
    std::string diagnostic;
};

/// Per-axis cell of the motion/stiffness classification table.
AxisClass classify_axis(const Eigenscrew& s, const ClassifierThresholds& th);

/// Effective arm at which the hinge torsion reproduces the observed
/// translational compliance.
double lever_arm(const Eigenscrew& rot_min, const Eigenscrew& trans_min);

/// Rule-library identification: flexible hinge, then linear spring,
/// then membrane; first rule that fires wins.
ConstraintLabel identify_constraint(const Constraint& c, const ClassifierThresholds& th);

}  // namespace flexplore
