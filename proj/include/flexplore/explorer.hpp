#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flexplore/classifier.hpp"
#include "flexplore/stiffness.hpp"

namespace flexplore {

/// Poses sharing one active mechanical constraint.
struct StiffnessRegion {
    int id = 0;
    std::vector<Pose> poses;
    Constraint constraint;
    ConstraintLabel label;
};

struct ExplorerConfig {
    double gamma = 0.25;        // similarity threshold on |de|/|e|
    double ema_weight = 0.2;    // constraint update smoothing, in (0, 1]
    int mismatch_patience = 3;  // consecutive misses before a new region
    bool store_all_screws = false;  // keep rigid axes in stored constraints
    ClassifierThresholds thresholds;

    void validate() const;
};

/// Sign-aligned normalized squared distance between unit screws.
struct SimilarityResult {
    bool is_similar = false;
    double d2 = 0.0;
};
SimilarityResult screw_similarity(const ScrewVector& e_i, const ScrewVector& e_k, double gamma);

/// One-to-one pairing of every constraint screw with a similar observed
/// screw (greedy by ascending distance); nullopt when any screw of the
/// constraint lacks a partner.
using Matching = std::vector<std::pair<int, int>>;  // (constraint idx, observed idx)
std::optional<Matching> match_constraint(const Constraint& c,
                                         const std::vector<Eigenscrew>& observed,
                                         const ExplorerConfig& cfg);

/// Region atlas maintained across an exploration run.
class Explorer {
  public:
    explicit Explorer(const ExplorerConfig& cfg);

    /// Decompose K, match against known regions in id order, extend the
    /// first full match (EMA-updating its constraint) or mint a new
    /// region after `mismatch_patience` consecutive misses. Returns the
    /// assigned region id, or nullopt while patience is running out.
    std::optional<int> step(const Pose& z, const Mat6& k);

    const std::vector<StiffnessRegion>& regions() const { return regions_; }
    const ExplorerConfig& config() const { return cfg_; }

    /// Re-run identification on every region's constraint.
    void label_regions();

  private:
    Constraint build_constraint(const std::vector<Eigenscrew>& screws) const;

    ExplorerConfig cfg_;
    std::vector<StiffnessRegion> regions_;
    int mismatch_streak_ = 0;
};

}  // namespace flexplore
