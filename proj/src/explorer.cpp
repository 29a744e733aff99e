#include "flexplore/explorer.hpp"

#include <algorithm>
#include <cmath>

namespace flexplore {

void ExplorerConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("ExplorerConfig: gamma must be in (0, 1)");
    }
    if (!(ema_weight > 0.0 && ema_weight <= 1.0) || mismatch_patience < 1) {
        throw std::invalid_argument("ExplorerConfig: invalid smoothing or patience");
    }
}

SimilarityResult screw_similarity(const ScrewVector& e_i, const ScrewVector& e_k, double gamma) {
    const Vec6 a = e_i.vec() / e_i.norm();
    const Vec6 b = e_k.vec() / e_k.norm();
    const double dplus = (a - b).squaredNorm();
    const double dminus = (a + b).squaredNorm();
    SimilarityResult r;
    r.d2 = std::min(dplus, dminus);
    r.is_similar = r.d2 < gamma * gamma;
    return r;
}

std::optional<Matching> match_constraint(const Constraint& c,
                                         const std::vector<Eigenscrew>& observed,
                                         const ExplorerConfig& cfg) {
    if (observed.empty() || c.screws.empty()) {
        return std::nullopt;
    }
    struct Cand {
        double d2;
        int ci;
        int oi;
    };
    std::vector<Cand> cands;
    for (int ci = 0; ci < static_cast<int>(c.screws.size()); ++ci) {
        for (int oi = 0; oi < static_cast<int>(observed.size()); ++oi) {
            const auto r = screw_similarity(c.screws[ci].e, observed[oi].e, cfg.gamma);
            if (r.is_similar) {
                cands.push_back({r.d2, ci, oi});
            }
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.ci != b.ci) return a.ci < b.ci;
        return a.oi < b.oi;
    });
    std::vector<bool> c_used(c.screws.size(), false);
    std::vector<bool> o_used(observed.size(), false);
    Matching pairs;
    for (const auto& cand : cands) {
        if (c_used[cand.ci] || o_used[cand.oi]) continue;
        c_used[cand.ci] = true;
        o_used[cand.oi] = true;
        pairs.emplace_back(cand.ci, cand.oi);
    }
    if (pairs.size() != c.screws.size()) {
        return std::nullopt;
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

Explorer::Explorer(const ExplorerConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
}

Constraint Explorer::build_constraint(const std::vector<Eigenscrew>& screws) const {
    Constraint c;
    if (!cfg_.store_all_screws) {
        for (const auto& s : screws) {
            if (classify_axis(s, cfg_.thresholds).stiffness != StiffnessClass::Rigid) {
                c.screws.push_back(s);
            }
        }
    }
    if (c.screws.empty()) {
        c.screws = screws;  // fully rigid signature: keep everything
    }
    c.sample_count = 1;
    return c;
}

std::optional<int> Explorer::step(const Pose& z, const Mat6& k) {
    const std::vector<Eigenscrew> observed = eigenscrew_decompose(k);

    for (auto& region : regions_) {
        const auto matching = match_constraint(region.constraint, observed, cfg_);
        if (!matching) continue;

        region.poses.push_back(z);
        for (const auto& [ci, oi] : *matching) {
            Eigenscrew& stored = region.constraint.screws[ci];
            const Eigenscrew& obs = observed[oi];
            Vec6 aligned = obs.e.vec();
            if (stored.e.vec().dot(aligned) < 0.0) {
                aligned = -aligned;
            }
            const Vec6 blended =
                (1.0 - cfg_.ema_weight) * stored.e.vec() + cfg_.ema_weight * aligned;
            const double lam =
                (1.0 - cfg_.ema_weight) * stored.lambda + cfg_.ema_weight * obs.lambda;
            stored = Eigenscrew(ScrewVector(blended.normalized()), lam);
        }
        region.constraint.sample_count += 1;
        mismatch_streak_ = 0;
        return region.id;
    }

    ++mismatch_streak_;
    if (regions_.empty() || mismatch_streak_ >= cfg_.mismatch_patience) {
        StiffnessRegion region;
        region.id = static_cast<int>(regions_.size()) + 1;
        region.poses.push_back(z);
        region.constraint = build_constraint(observed);
        region.label = identify_constraint(region.constraint, cfg_.thresholds);
        regions_.push_back(std::move(region));
        mismatch_streak_ = 0;
        return regions_.back().id;
    }
    return std::nullopt;
}

void Explorer::label_regions() {
    for (auto& region : regions_) {
        region.label = identify_constraint(region.constraint, cfg_.thresholds);
    }
}

}  // namespace flexplore
