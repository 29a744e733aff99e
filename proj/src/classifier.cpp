#include "flexplore/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flexplore {

void ClassifierThresholds::validate() const {
    if (!(gamma_theta < gamma_x) || !(gamma_c_trans < gamma_r_trans) ||
        !(gamma_c_rot < gamma_r_rot) || !(dominance_ratio > 1.0)) {
        throw std::invalid_argument("ClassifierThresholds: inconsistent bounds");
    }
}

std::string to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::FlexibleHinge: return "FlexibleHinge";
        case ConstraintKind::LinearSpringConstraint: return "LinearSpringConstraint";
        case ConstraintKind::Membrane: return "Membrane";
        case ConstraintKind::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string to_string(MotionClass m) {
    switch (m) {
        case MotionClass::Rotational: return "Rotational";
        case MotionClass::Screw: return "Screw";
        case MotionClass::Translational: return "Translational";
    }
    return "Screw";
}

std::string to_string(StiffnessClass s) {
    switch (s) {
        case StiffnessClass::Free: return "Free";
        case StiffnessClass::Compliant: return "Compliant";
        case StiffnessClass::Rigid: return "Rigid";
    }
    return "Compliant";
}

AxisClass classify_axis(const Eigenscrew& s, const ClassifierThresholds& th) {
    AxisClass out{MotionClass::Screw, StiffnessClass::Compliant};
    const double h = std::abs(s.pitch_w);
    if (h < th.gamma_theta) {
        out.motion = MotionClass::Translational;
    } else if (h > th.gamma_x) {
        out.motion = MotionClass::Rotational;
    }
    double gamma_c = 0.0;
    double gamma_r = 0.0;
    switch (out.motion) {
        case MotionClass::Translational:
            gamma_c = th.gamma_c_trans;
            gamma_r = th.gamma_r_trans;
            break;
        case MotionClass::Rotational:
            gamma_c = th.gamma_c_rot;
            gamma_r = th.gamma_r_rot;
            break;
        case MotionClass::Screw:
            // Mixed units: geometric mean of the two threshold pairs.
            gamma_c = std::sqrt(th.gamma_c_trans * th.gamma_c_rot);
            gamma_r = std::sqrt(th.gamma_r_trans * th.gamma_r_rot);
            break;
    }
    const double lam = std::abs(s.lambda);
    if (lam < gamma_c) {
        out.stiffness = StiffnessClass::Free;
    } else if (lam > gamma_r) {
        out.stiffness = StiffnessClass::Rigid;
    } else {
        out.stiffness = StiffnessClass::Compliant;
    }
    return out;
}

double lever_arm(const Eigenscrew& rot_min, const Eigenscrew& trans_min) {
    const double lt = std::abs(trans_min.lambda);
    if (!(lt > 0.0)) {
        throw std::invalid_argument("lever_arm: zero translational eigenvalue");
    }
    return std::sqrt(std::abs(rot_min.lambda) / lt);
}

namespace {

double mean_excluding(const std::vector<const Eigenscrew*>& set, const Eigenscrew* skip) {
    double sum = 0.0;
    int n = 0;
    for (const auto* s : set) {
        if (s == skip) continue;
        sum += std::abs(s->lambda);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

const Eigenscrew* extremal(const std::vector<const Eigenscrew*>& set, bool want_max) {
    const Eigenscrew* best = nullptr;
    for (const auto* s : set) {
        if (!best || (want_max ? std::abs(s->lambda) > std::abs(best->lambda)
                               : std::abs(s->lambda) < std::abs(best->lambda))) {
            best = s;
        }
    }
    return best;
}

bool approx_equal(double a, double b, double band) {
    const double m = 0.5 * (a + b);
    return m > 0.0 && std::abs(a - b) / m <= band;
}

}  // namespace

ConstraintLabel identify_constraint(const Constraint& c, const ClassifierThresholds& th) {
    th.validate();
    ConstraintLabel label;
    if (c.screws.size() < 3) {
        label.diagnostic = "fewer than 3 usable screws";
        return label;
    }

    std::vector<const Eigenscrew*> rot, trans;
    for (const auto& s : c.screws) {
        switch (classify_axis(s, th).motion) {
            case MotionClass::Rotational: rot.push_back(&s); break;
            case MotionClass::Translational: trans.push_back(&s); break;
            case MotionClass::Screw: break;  // neither set
        }
    }

    // Flexible hinge: one dominant-compliance axis in each set, the two
    // axes perpendicular, lever arm inside the acceptance band.
    if (rot.size() >= 2 && trans.size() >= 2) {
        const Eigenscrew* rmin = extremal(rot, false);
        const Eigenscrew* tmin = extremal(trans, false);
        const double ravg = mean_excluding(rot, rmin);
        const double tavg = mean_excluding(trans, tmin);
        if (std::abs(rmin->lambda) * th.dominance_ratio <= ravg &&
            std::abs(tmin->lambda) * th.dominance_ratio <= tavg) {
            const AxisLine raxis = screw_axis_line(rmin->e);
            const AxisLine taxis = screw_axis_line(tmin->e);
            const double cosang = std::abs(raxis.direction.dot(taxis.direction));
            const double dev_deg =
                std::abs(90.0 - std::acos(std::clamp(cosang, 0.0, 1.0)) * 180.0 / std::numbers::pi);
            if (dev_deg <= th.perp_tol_deg) {
                const double rl = lever_arm(*rmin, *tmin);
                if (th.r_min < rl && rl < th.r_max) {
                    label.kind = ConstraintKind::FlexibleHinge;
                    label.hinge_axis = raxis;
                    label.lever_arm_m = rl;
                    return label;
                }
            }
        }
    }

    if (trans.size() == 3) {
        std::vector<const Eigenscrew*> sorted = trans;
        std::sort(sorted.begin(), sorted.end(), [](const Eigenscrew* a, const Eigenscrew* b) {
            return std::abs(a->lambda) < std::abs(b->lambda);
        });
        const double lo = std::abs(sorted[0]->lambda);
        const double mid = std::abs(sorted[1]->lambda);
        const double hi = std::abs(sorted[2]->lambda);

        // Linear spring: one stiff translational axis, the other two
        // comparable and much softer.
        if (hi >= th.dominance_ratio * 0.5 * (lo + mid) && approx_equal(lo, mid, th.similarity_band) &&
            hi >= th.dominance_ratio * mid) {
            label.kind = ConstraintKind::LinearSpringConstraint;
            label.spring_axis = screw_axis_line(sorted[2]->e);
            return label;
        }

        // Membrane: one soft translational axis, the other two
        // comparable and much stiffer.
        if (0.5 * (mid + hi) >= th.dominance_ratio * lo && approx_equal(mid, hi, th.similarity_band) &&
            mid >= th.dominance_ratio * lo) {
            label.kind = ConstraintKind::Membrane;
            label.membrane_normal = screw_axis_line(sorted[0]->e).direction;
            return label;
        }
    }

    label.diagnostic = "no rule fired";
    return label;
}

}  // namespace flexplore
