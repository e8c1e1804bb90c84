#include "sasa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

namespace sasa {

Vec sparsemax(const Vec& z) {
    const Eigen::Index k = z.size();
    if (k < 1) throw NumericError("sparsemax: empty input");
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!std::isfinite(z(i))) {
            std::ostringstream os;
            os << "sparsemax: non-finite entry at index " << i;
            throw NumericError(os.str());
        }
    }
    std::vector<double> s(z.data(), z.data() + k);
    std::sort(s.begin(), s.end(), std::greater<>());
    // The set { j : 1 + j*s_j > sum of the j largest } is a prefix; tau comes
    // from its largest element.
    double cumsum = 0.0;
    double tau = 0.0;
    for (int j = 1; j <= static_cast<int>(k); ++j) {
        cumsum += s[j - 1];
        if (1.0 + j * s[j - 1] > cumsum) {
            tau = (cumsum - 1.0) / j;
        }
    }
    return (z.array() - tau).max(0.0);
}

Vec sparsemax_jvp(const Vec& z, const Vec& upstream) {
    if (z.size() != upstream.size()) {
        throw NumericError("sparsemax_jvp: size mismatch");
    }
    Vec p = sparsemax(z);
    Eigen::ArrayXd s = (p.array() > 0.0).cast<double>();
    double card = s.sum();
    double m = (s * upstream.array()).sum() / card;
    return (s * (upstream.array() - m)).matrix();
}

namespace {

Mat pairwise_sq_dists(const Mat& a, const Mat& b) {
    Vec sa = a.rowwise().squaredNorm();
    Vec sb = b.rowwise().squaredNorm();
    Mat d2 = -2.0 * a * b.transpose();
    d2.colwise() += sa;
    d2.rowwise() += sb.transpose();
    return d2.cwiseMax(0.0);
}

} // namespace

BandwidthChoice median_bandwidth(const Mat& xs, const Mat& xt) {
    Mat pool(xs.rows() + xt.rows(), xs.cols());
    pool << xs, xt;
    const Eigen::Index n = pool.rows();
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    Mat d2 = pairwise_sq_dists(pool, pool);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d.push_back(std::sqrt(d2(i, j)));
        }
    }
    if (d.empty()) return {1.0, true};
    auto mid = d.begin() + d.size() / 2;
    std::nth_element(d.begin(), mid, d.end());
    double med = *mid;
    if (d.size() % 2 == 0) {
        double lo = *std::max_element(d.begin(), mid);
        med = 0.5 * (med + lo);
    }
    if (!(med > 1e-12)) return {1.0, true};
    return {med, false};
}

double mmd(const Mat& xs, const Mat& xt, std::optional<double> bandwidth) {
    if (xs.rows() < 1 || xt.rows() < 1) {
        throw NumericError("mmd: each sample set needs at least one row");
    }
    if (xs.cols() != xt.cols()) {
        throw NumericError("mmd: feature dimensions differ");
    }
    double sigma;
    if (bandwidth) {
        if (*bandwidth <= 0.0) throw NumericError("mmd: bandwidth must be positive");
        sigma = *bandwidth;
    } else {
        BandwidthChoice bc = median_bandwidth(xs, xt);
        if (bc.degenerate) {
            std::cerr << "warning: mmd bandwidth heuristic degenerate "
                         "(all points identical); using 1.0\n";
        }
        sigma = bc.sigma;
    }
    const double inv = -0.5 / (sigma * sigma);
    auto ksum = [&](const Mat& a, const Mat& b) {
        return (pairwise_sq_dists(a, b).array() * inv).exp().sum();
    };
    const double b1 = static_cast<double>(xs.rows());
    const double b2 = static_cast<double>(xt.rows());
    double v = ksum(xs, xs) / (b1 * b1) + ksum(xt, xt) / (b2 * b2) -
               2.0 * ksum(xs, xt) / (b1 * b2);
    return std::max(v, 0.0);
}

GradCheckReport check_gradients(
    const std::function<double(bool)>& eval,
    std::span<ad::Parameter* const> params,
    double eps, double denom_floor,
    const std::function<bool(const ad::Parameter&, Eigen::Index,
                             Eigen::Index)>& exclude) {
    for (ad::Parameter* p : params) p->zero_grad();
    eval(true);

    std::vector<Mat> analytic;
    analytic.reserve(params.size());
    for (ad::Parameter* p : params) analytic.push_back(p->grad);

    GradCheckReport rep;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        ad::Parameter& p = *params[pi];
        for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
            for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
                if (exclude && exclude(p, r, c)) continue;
                const double saved = p.value(r, c);
                p.value(r, c) = saved + eps;
                const double fp = eval(false);
                p.value(r, c) = saved - eps;
                const double fm = eval(false);
                p.value(r, c) = saved;
                const double numeric = (fp - fm) / (2.0 * eps);
                const double a = analytic[pi](r, c);
                const double denom =
                    std::max({std::abs(a), std::abs(numeric), denom_floor});
                const double rel = std::abs(a - numeric) / denom;
                ++rep.checked;
                if (rel > rep.max_rel_err) {
                    rep.max_rel_err = rel;
                    rep.worst_param = p.name;
                    rep.worst_row = r;
                    rep.worst_col = c;
                    rep.analytic = a;
                    rep.numeric = numeric;
                }
            }
        }
    }
    return rep;
}

} // namespace sasa
