#include "flexplore/stiffness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace flexplore {

Eigenscrew::Eigenscrew(const ScrewVector& screw, double lam)
    : e(screw.normalized()), lambda(lam), pitch_raw(raw_pitch(e)), pitch_w(wrench_pitch(e)) {}

Mat6 probe_stiffness(const WrenchSource& source, const Pose& z, const ProbeOptions& opt) {
    if (!(opt.eps > 0.0) || opt.repeats < 1) {
        throw std::invalid_argument("probe_stiffness: eps must be positive, repeats >= 1");
    }
    Mat6 k = Mat6::Zero();
    double max_dw = 0.0;
    for (int rep = 0; rep < opt.repeats; ++rep) {
        for (int j = 0; j < 6; ++j) {
            Vec6 d = Vec6::Zero();
            d(j) = opt.eps;
            const Wrench wp = source(z.perturbed(d));
            const Wrench wm = source(z.perturbed(-d));
            const Vec6 dw = wp.vec() - wm.vec();
            if (!dw.allFinite()) {
                throw std::runtime_error("probe_stiffness: non-finite wrench from source");
            }
            max_dw = std::max(max_dw, dw.cwiseAbs().maxCoeff());
            k.col(j) += -dw / (2.0 * opt.eps);
        }
    }
    if (opt.noise_floor > 0.0 && max_dw < opt.noise_floor) {
        throw LowSignalError("probe_stiffness: wrench deltas below noise floor");
    }
    k /= static_cast<double>(opt.repeats);
    return 0.5 * (k + k.transpose());
}

namespace {

bool screw_less(const Vec6& a, const Vec6& b) {
    for (int i = 0; i < 6; ++i) {
        if (a(i) != b(i)) return a(i) < b(i);
    }
    return false;
}

/// Deterministic orthonormal basis of a subspace: greedy projection of
/// the standard basis onto it. Stable whenever the subspace itself is.
std::vector<Vec6> canonical_subspace_basis(const Eigen::Matrix<double, 6, Eigen::Dynamic>& span) {
    const Eigen::Matrix<double, 6, 6> proj = span * span.transpose();
    std::vector<Vec6> basis;
    for (int j = 0; j < 6 && static_cast<int>(basis.size()) < span.cols(); ++j) {
        Vec6 v = proj * Vec6::Unit(j);
        for (const auto& b : basis) {
            v -= b.dot(v) * b;
        }
        if (v.norm() > 1e-6) {
            basis.push_back(v.normalized());
        }
    }
    // Fall back to the raw span columns if the greedy sweep missed
    // directions (nearly diagonal projector assumed otherwise).
    for (int c = 0; c < span.cols() && static_cast<int>(basis.size()) < span.cols(); ++c) {
        Vec6 v = span.col(c);
        for (const auto& b : basis) {
            v -= b.dot(v) * b;
        }
        if (v.norm() > 1e-9) {
            basis.push_back(v.normalized());
        }
    }
    return basis;
}

}  // namespace

std::vector<Eigenscrew> eigenscrew_decompose(const Mat6& k) {
    const double knorm = k.norm();
    if ((k - k.transpose()).norm() > 1e-8 * std::max(1.0, knorm)) {
        throw std::invalid_argument("eigenscrew_decompose: matrix not symmetric");
    }
    const Mat6 ks = 0.5 * (k + k.transpose());

    std::vector<Eigenscrew> out;
    if (knorm == 0.0) {
        for (int j = 0; j < 6; ++j) {
            out.emplace_back(ScrewVector(Vec6::Unit(j)), 0.0);
        }
        return out;
    }

    Eigen::SelfAdjointEigenSolver<Mat6> es(ks);
    const Vec6 evals = es.eigenvalues();
    const Mat6 evecs = es.eigenvectors();
    const double rank_tol = 1e-9 * evals.cwiseAbs().maxCoeff();

    std::vector<int> null_idx, range_idx;
    for (int i = 0; i < 6; ++i) {
        if (std::abs(evals(i)) <= rank_tol) {
            null_idx.push_back(i);
        } else if (evals(i) < 0.0) {
            throw std::invalid_argument("eigenscrew_decompose: matrix not positive semidefinite");
        } else {
            range_idx.push_back(i);
        }
    }

    if (!null_idx.empty()) {
        Eigen::Matrix<double, 6, Eigen::Dynamic> nullspan(6, null_idx.size());
        for (std::size_t c = 0; c < null_idx.size(); ++c) {
            nullspan.col(c) = evecs.col(null_idx[c]);
        }
        for (const Vec6& v : canonical_subspace_basis(nullspan)) {
            out.emplace_back(ScrewVector(v), 0.0);
        }
    }

    const int r = static_cast<int>(range_idx.size());
    if (r > 0) {
        // Restrict to the range: with B the eigenbasis and S the positive
        // eigenvalues, K e = lambda Delta e reduces to the symmetric
        // problem H u = lambda u, H = S^{1/2} B^T Delta B S^{1/2}, with
        // e = Delta B S^{1/2} u.
        Eigen::MatrixXd b(6, r);
        Eigen::VectorXd s_sqrt(r);
        for (int c = 0; c < r; ++c) {
            b.col(c) = evecs.col(range_idx[c]);
            s_sqrt(c) = std::sqrt(evals(range_idx[c]));
        }
        const Mat6 delta = delta_matrix();
        const Eigen::MatrixXd g = b.transpose() * delta * b;
        const Eigen::MatrixXd h = s_sqrt.asDiagonal() * g * s_sqrt.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esh(h);
        for (int i = 0; i < r; ++i) {
            const Eigen::VectorXd y = s_sqrt.asDiagonal() * esh.eigenvectors().col(i);
            const Vec6 e = delta * (b * y);
            out.emplace_back(ScrewVector(e.normalized()), esh.eigenvalues()(i));
        }
    }

    std::sort(out.begin(), out.end(), [](const Eigenscrew& a, const Eigenscrew& b) {
        const double ma = std::abs(a.lambda);
        const double mb = std::abs(b.lambda);
        const double tie = 1e-9 * std::max({ma, mb, 1e-300});
        if (std::abs(ma - mb) > tie) return ma > mb;
        return screw_less(a.e.vec(), b.e.vec());
    });
    return out;
}

CharacteristicStiffness characteristic_stiffness(const Mat6& k) {
    CharacteristicStiffness c;
    c.k_x = k.topLeftCorner<3, 3>().norm();
    c.k_th = k.bottomRightCorner<3, 3>().norm();
    return c;
}

double alpha(double k_x, double k_th, double alpha_min) {
    if (!(k_x > 0.0)) {
        throw std::invalid_argument("alpha: k_x must be positive");
    }
    if (k_th == 0.0) {
        return alpha_min;
    }
    return std::sqrt(k_th / k_x);
}

}  // namespace flexplore
