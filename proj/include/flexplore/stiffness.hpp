#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "flexplore/screw.hpp"

namespace flexplore {

/// Probe signal too weak to rise above the configured noise floor.
class LowSignalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One axis of the stiffness decomposition: unit spring wrench with its
/// eigenvalue and both pitch conventions.
struct Eigenscrew {
    ScrewVector e;
    double lambda = 0.0;
    double pitch_raw = 0.0;
    double pitch_w = 0.0;  // infinite for couple-dominant axes

    Eigenscrew(const ScrewVector& screw, double lam);
};

/// Set of eigenscrews characterizing one mechanical coupling.
struct Constraint {
    std::vector<Eigenscrew> screws;
    int sample_count = 0;
};

using WrenchSource = std::function<Wrench(const Pose&)>;

struct ProbeOptions {
    double eps = 2e-4;        // displacement per probe [m or rad]
    double dt = 0.4;          // probe interval [s]; twist magnitude is eps/dt
    int repeats = 1;          // averaged probe cycles (noise rejection)
    double noise_floor = 0.0; // when > 0, max |dw| below it raises LowSignalError
};

/// Estimate the local stiffness from wrench measurements at +-eps
/// perturbations along the 6 basis twists. Restoring sign convention:
/// a stable elastic suspension yields a positive definite matrix.
Mat6 probe_stiffness(const WrenchSource& source, const Pose& z, const ProbeOptions& opt = {});

/// Solve K e = lambda * Delta * e. Requires K symmetric within 1e-8
/// (relative) and positive semidefinite. Null-space directions are
/// reported as lambda = 0 "free" screws on a canonicalized basis; the
/// rest come from the reduced definite pencil. Sorted by |lambda|
/// descending, ties broken lexicographically on the screw.
std::vector<Eigenscrew> eigenscrew_decompose(const Mat6& k);

/// Frobenius norms of the translational and rotational 3x3 quadrants.
struct CharacteristicStiffness {
    double k_x = 0.0;   // [N/m]
    double k_th = 0.0;  // [N·m/rad]
};
CharacteristicStiffness characteristic_stiffness(const Mat6& k);

/// Translation-per-rotation weight sqrt(k_th / k_x). A rotationally
/// free system (k_th = 0) returns the floor instead of zero so
/// orientation goals never vanish from the objective.
double alpha(double k_x, double k_th, double alpha_min = 1e-3);

}  // namespace flexplore
