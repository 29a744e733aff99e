#include "flexplore/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexplore {

namespace {
constexpr double kZeroGrad = 1e-12;
constexpr int kStallWindow = 20;
constexpr double kEnergyDriftTol = 1e-3;
}  // namespace

void PlannerConfig::validate() const {
    if (!(w_max > 0.0) || !(dt > 0.0) || !(step_size > 0.0) || !(gain > 0.0) ||
        !(grad_step > 0.0) || !(eps_task > 0.0) || reprobe_period < 1 || max_steps < 1 ||
        divergence_window < 1) {
        throw std::invalid_argument("PlannerConfig: all gains and steps must be positive");
    }
}

double task_term(const Pose& z, const Pose& z_g, double alpha_w) {
    const Quat dq = quat_error(z.q, z_g.q);
    const Vec3 dv(dq.x(), dq.y(), dq.z());
    return (z_g.r - z.r).squaredNorm() + alpha_w * alpha_w * dv.squaredNorm();
}

double energy_penalty(double energy, double kappa) {
    return kappa * energy;
}

double gamma6_norm(const Wrench& w, double alpha_w) {
    return std::sqrt(w.f.squaredNorm() + alpha_w * alpha_w * w.m.squaredNorm());
}

double force_barrier(const Wrench& w, double alpha_w, double w_max, double rho) {
    const double n = gamma6_norm(w, alpha_w);
    if (n >= w_max) {
        return std::numeric_limits<double>::infinity();
    }
    return rho / (w_max - n);
}

double objective(const PlannerState& s, const Pose& z_probe, const Pose& goal,
                 const PlannerConfig& cfg) {
    const Vec6 d = s.z.displacement_to(z_probe);
    const Wrench w_pred = Wrench::from_vec(s.w.vec() - s.k * d);
    const double e_pred = s.energy - s.w.vec().dot(d) + 0.5 * d.dot(s.k * d);
    return task_term(z_probe, goal, s.alpha_w) + energy_penalty(e_pred, cfg.kappa) +
           force_barrier(w_pred, s.alpha_w, cfg.w_max, cfg.rho);
}

namespace {

double predicted_barrier(const PlannerState& s, const Vec6& d, const PlannerConfig& cfg) {
    const Wrench w_pred = Wrench::from_vec(s.w.vec() - s.k * d);
    return force_barrier(w_pred, s.alpha_w, cfg.w_max, cfg.rho);
}

}  // namespace

GradientStep gradient_step(const PlannerState& s, const Pose& goal, const PlannerConfig& cfg) {
    GradientStep out;
    const double j_center = objective(s, s.z, goal, cfg);

    if (std::isinf(j_center)) {
        // Already past the barrier: back off along the sensed reaction
        // wrench, the unloading direction. Size the retreat from the
        // local model so a stiff axis is not overshot.
        out.emergency = true;
        const Vec6 w = s.w.vec();
        if (w.norm() > kZeroGrad) {
            const Vec6 dir = w.normalized();
            const double unload_rate = std::max((s.k * dir).norm(), 1e-9);
            const double overshoot = gamma6_norm(s.w, s.alpha_w) - cfg.w_max;
            const double disp =
                std::min(cfg.step_size, (overshoot + 0.05 * cfg.w_max) / unload_rate);
            out.twist = Twist::from_vec(dir * (disp / cfg.dt));
        }
        return out;
    }

    const double h = cfg.grad_step;
    for (int j = 0; j < 6; ++j) {
        Vec6 d = Vec6::Zero();
        d(j) = h;
        const Pose zp = s.z.perturbed(d);
        const Pose zm = s.z.perturbed(-d);
        const double jp = objective(s, zp, goal, cfg);
        const double jm = objective(s, zm, goal, cfg);
        const bool pinf = std::isinf(jp);
        const bool minf = std::isinf(jm);
        if (pinf && minf) {
            out.grad(j) = 0.0;  // pinched dimension
        } else if (pinf || minf) {
            out.grad(j) = pinf ? (j_center - jm) / h : (jp - j_center) / h;
        } else {
            out.grad(j) = (jp - jm) / (2.0 * h);
        }
        out.grad_task(j) =
            (task_term(zp, goal, s.alpha_w) - task_term(zm, goal, s.alpha_w)) / (2.0 * h);
    }

    const double gnorm = out.grad.norm();
    if (gnorm < kZeroGrad) {
        return out;
    }
    const Vec6 dir = -out.grad / gnorm;
    double disp = std::min(cfg.step_size, cfg.gain * gnorm);

    // Accept the displacement only where the local model improves; halve
    // otherwise. A candidate rejected by a blowing-up barrier marks the
    // step as barrier limited.
    const double center_barrier = force_barrier(s.w, s.alpha_w, cfg.w_max, cfg.rho);
    const double floor = 1e-6 * cfg.step_size;
    for (int iter = 0; iter < 40; ++iter) {
        const double j_cand = objective(s, s.z.perturbed(disp * dir), goal, cfg);
        if (j_cand < j_center) {
            break;
        }
        const double b_cand = predicted_barrier(s, disp * dir, cfg);
        if (std::isinf(b_cand) || b_cand > 10.0 * center_barrier) {
            out.barrier_limited = true;
        }
        disp *= 0.5;
        if (disp < floor) {
            disp = 0.0;
            break;
        }
    }
    if (disp > 0.0) {
        out.twist = Twist::from_vec(dir * (disp / cfg.dt));
    }
    return out;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::GoalReached: return "goal_reached";
        case Termination::BoundaryStall: return "boundary_stall";
        case Termination::MaxSteps: return "max_steps";
        case Termination::Diverged: return "diverged";
        case Termination::Stalled: return "stalled";
    }
    return "unknown";
}

RunResult run(const Scene& scene, const SensorModel& sensor_model, const Pose& z0,
              const Pose& goal, const PlannerConfig& cfg, Explorer* explorer) {
    cfg.validate();
    RunResult result;
    WrenchSensor sensor(sensor_model);

    // Quasi-static hold: feed the filter a full window at the pose, read
    // the settled value.
    const auto settled_read = [&](const Pose& p) {
        Wrench out;
        const Wrench raw = reaction_wrench(scene, p);
        for (int i = 0; i < sensor_model.filter_window; ++i) {
            out = sensor.sense(raw);
        }
        return out;
    };

    PlannerState s;
    s.z = z0;
    s.w = settled_read(z0);
    s.energy = 0.0;

    int region = -1;
    const auto refresh_stiffness = [&]() {
        s.k = probe_stiffness(settled_read, s.z, cfg.probe);
        const auto cs = characteristic_stiffness(s.k);
        s.alpha_w = alpha(cs.k_x, cs.k_th);
        ++result.probe_count;
        if (explorer) {
            region = explorer->step(s.z, s.k).value_or(-1);
        }
    };
    refresh_stiffness();

    const double free_space_barrier = cfg.rho / cfg.w_max;
    int quiet_steps = 0;
    int rising_j = 0;
    double prev_j = std::numeric_limits<double>::infinity();
    Vec6 last_grad_task = Vec6::Zero();
    Vec6 last_grad = Vec6::Zero();
    bool last_barrier_limited = false;

    for (int step = 0;; ++step) {
        s.step_index = step;
        const double task = task_term(s.z, goal, s.alpha_w);
        const double j0 = objective(s, s.z, goal, cfg);

        StepLog row;
        row.step = step;
        row.time = step * cfg.dt;
        row.z = s.z;
        row.w = s.w;
        row.energy = s.energy;
        row.objective = j0;
        row.task = task;
        row.c1 = energy_penalty(s.energy, cfg.kappa);
        row.c2 = force_barrier(s.w, s.alpha_w, cfg.w_max, cfg.rho);
        row.region = region;

        result.peak_gamma_wrench = std::max(result.peak_gamma_wrench, gamma6_norm(s.w, s.alpha_w));
        for (double tau : spring_forces(scene, s.z)) {
            result.peak_spring_force = std::max(result.peak_spring_force, std::abs(tau));
        }

        if (task < cfg.eps_task) {
            result.log.push_back(row);
            result.termination = Termination::GoalReached;
            result.reached = true;
            break;
        }
        if (step >= cfg.max_steps) {
            result.log.push_back(row);
            result.termination = Termination::MaxSteps;
            break;
        }
        if (j0 > prev_j) {
            if (++rising_j >= cfg.divergence_window) {
                result.log.push_back(row);
                result.termination = Termination::Diverged;
                break;
            }
        } else {
            rising_j = 0;
        }
        prev_j = j0;

        const GradientStep gs = gradient_step(s, goal, cfg);
        if (gs.emergency) {
            ++result.emergency_count;
        }
        last_grad = gs.grad;
        last_grad_task = gs.grad_task;
        last_barrier_limited = gs.barrier_limited;
        row.twist = gs.twist;
        result.log.push_back(row);

        const double disp_norm = gs.twist.vec().norm() * cfg.dt;
        quiet_steps = (disp_norm < 1e-4 * cfg.step_size) ? quiet_steps + 1 : 0;
        if (quiet_steps >= kStallWindow) {
            const bool barrier_loaded = row.c2 > 10.0 * free_space_barrier;
            const bool constraint_dominated =
                (last_grad - last_grad_task).norm() >= last_grad_task.norm();
            result.termination = (barrier_loaded || constraint_dominated || last_barrier_limited)
                                     ? Termination::BoundaryStall
                                     : Termination::Stalled;
            break;
        }

        const Vec6 d = gs.twist.vec() * cfg.dt;
        const Pose z_next = s.z.perturbed(d);
        const Wrench w_next = settled_read(z_next);
        s.energy += -0.5 * (s.w.vec() + w_next.vec()).dot(d);
        if (s.energy < -kEnergyDriftTol) {
            result.energy_drift_flagged = true;
        }

        const Wrench w_pred = Wrench::from_vec(s.w.vec() - s.k * d);
        s.z = z_next;
        s.w = w_next;

        const double pred_err = gamma6_norm(w_next - w_pred, s.alpha_w);
        if ((step + 1) % cfg.reprobe_period == 0 || pred_err > cfg.reprobe_error) {
            refresh_stiffness();
        }
    }

    result.final_state = s;
    return result;
}

}  // namespace flexplore
