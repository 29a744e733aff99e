#pragma once

#include <string>
#include <vector>

#include "flexplore/env.hpp"
#include "flexplore/explorer.hpp"
#include "flexplore/stiffness.hpp"

namespace flexplore {

struct PlannerConfig {
    double kappa = 1e-5;       // stored-energy penalty gain
    double rho = 5e-5;         // barrier radius of influence
    double w_max = 25.0;       // wrench magnitude limit [N]
    double dt = 0.4;           // control/probe interval [s]
    double step_size = 5e-4;   // per-step displacement cap [m]
    double gain = 0.02;        // displacement per unit objective gradient
    double grad_step = 1e-6;   // finite-difference pose step [m]
    double eps_task = 1e-6;    // termination threshold on the task value [m^2]
    int reprobe_period = 50;   // steps between stiffness refreshes
    double reprobe_error = 2.5;// prediction error [N] triggering a refresh
    int max_steps = 10000;
    int divergence_window = 30;// consecutive objective rises before aborting
    ProbeOptions probe;

    void validate() const;
};

struct PlannerState {
    Pose z;
    Wrench w;              // sensed
    Mat6 k = Mat6::Zero(); // last probed stiffness
    double energy = 0.0;   // accumulated work estimate [J]
    double alpha_w = 1.0;  // rotation weight from the current K
    int step_index = 0;
};

struct StepLog {
    int step = 0;
    double time = 0.0;
    Pose z;
    Wrench w;
    double energy = 0.0;
    double objective = 0.0;
    double task = 0.0;
    double c1 = 0.0;  // energy penalty
    double c2 = 0.0;  // force barrier
    Twist twist;      // command issued after this sample
    int region = -1;  // explorer region id, -1 when unassigned
};

/// Squared weighted pose distance: |r_g - r|^2 + alpha^2 |vec(dq)|^2.
double task_term(const Pose& z, const Pose& z_g, double alpha_w);

double energy_penalty(double energy, double kappa);

/// Weighted wrench magnitude |(f, alpha m)|.
double gamma6_norm(const Wrench& w, double alpha_w);

/// Barrier rho / (w_max - |Gamma6 w|); +inf once the limit is reached.
double force_barrier(const Wrench& w, double alpha_w, double w_max, double rho);

/// Objective at a hypothetical pose under the local linear model:
/// w(z') = w - K d, E(z') = E - w.d + d^T K d / 2.
double objective(const PlannerState& s, const Pose& z_probe, const Pose& goal,
                 const PlannerConfig& cfg);

struct GradientStep {
    Twist twist;
    Vec6 grad = Vec6::Zero();       // full objective gradient
    Vec6 grad_task = Vec6::Zero();  // task-only part
    bool emergency = false;         // current state past the barrier: retreat issued
    bool barrier_limited = false;   // descent step collapsed against the barrier
};

/// Central-difference gradient of the objective; twist along the
/// negative gradient with displacement min(step_size, gain |grad|),
/// halved until the local model predicts improvement.
GradientStep gradient_step(const PlannerState& s, const Pose& goal, const PlannerConfig& cfg);

enum class Termination { GoalReached, BoundaryStall, MaxSteps, Diverged, Stalled };
std::string to_string(Termination t);

struct RunResult {
    PlannerState final_state;
    std::vector<StepLog> log;
    Termination termination = Termination::MaxSteps;
    bool reached = false;
    double peak_gamma_wrench = 0.0;  // over logged steps
    double peak_spring_force = 0.0;  // over logged steps
    int probe_count = 0;
    int emergency_count = 0;
    bool energy_drift_flagged = false;
};

/// Autonomous manipulation loop: sense, evaluate the objective gradient
/// under the local model, command a twist, integrate the work estimate,
/// refresh the stiffness periodically or when prediction degrades.
/// An attached Explorer is stepped at every stiffness refresh.
RunResult run(const Scene& scene, const SensorModel& sensor_model, const Pose& z0,
              const Pose& goal, const PlannerConfig& cfg, Explorer* explorer = nullptr);

}  // namespace flexplore
