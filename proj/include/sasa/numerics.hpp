// Differentiable primitives: simplex projection, MMD, gradient checking.
// Tape-integrated variants of these live in sasa/tape.hpp; the functions here
// are the plain numerical cores plus diagnostics built on top of the tape.
#ifndef SASA_NUMERICS_HPP
#define SASA_NUMERICS_HPP

#include "sasa/common.hpp"
#include "sasa/tape.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace sasa {

/// Euclidean projection of z onto the probability simplex (sort-based
/// threshold algorithm). Entries >= 0 and sum to 1 within 1e-9.
Vec sparsemax(const Vec& z);

/// Vector-Jacobian product upstream * J at z, where on the support S
/// J = diag(s) - s s^T / |S| with s the indicator of S. Exact away from
/// support-change boundaries.
Vec sparsemax_jvp(const Vec& z, const Vec& upstream);

struct BandwidthChoice {
    double sigma = 1.0;
    bool degenerate = false; // all points coincide; fell back to 1.0
};

/// Median pairwise Euclidean distance over the pooled rows of xs and xt.
BandwidthChoice median_bandwidth(const Mat& xs, const Mat& xt);

/// Biased V-statistic estimate of squared MMD under an RBF kernel.
/// bandwidth = nullopt selects the median heuristic; a degenerate pool
/// falls back to bandwidth 1.0 with a warning on stderr.
double mmd(const Mat& xs, const Mat& xt,
           std::optional<double> bandwidth = std::nullopt);

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    Eigen::Index worst_row = -1;
    Eigen::Index worst_col = -1;
    double analytic = 0.0;
    double numeric = 0.0;
    long checked = 0;
};

/// Central-difference check of analytic gradients.
///
/// `eval(true)` must run forward + backward, leaving gradients in the
/// parameters' grad buffers (which this function zeroes first) and return the
/// loss; `eval(false)` must return the loss only. `exclude` marks coordinates
/// whose analytic gradient is intentionally not the true derivative
/// (gradient-stopped branches, straight-through estimators).
///
/// Relative error uses max(|analytic|, |numeric|, denom_floor) as the
/// denominator so near-zero gradients are compared on an absolute scale.
GradCheckReport check_gradients(
    const std::function<double(bool with_grad)>& eval,
    std::span<ad::Parameter* const> params,
    double eps = 1e-4,
    double denom_floor = 1e-4,
    const std::function<bool(const ad::Parameter&, Eigen::Index row,
                             Eigen::Index col)>& exclude = {});

} // namespace sasa

#endif
