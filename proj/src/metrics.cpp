#include "sasa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sasa {

namespace {

double normal_pdf(double x, double m, double s) {
    const double z = (x - m) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
}

std::vector<double> average_ranks(const Vec& v) {
    const Eigen::Index n = v.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return v(a) < v(b); });
    std::vector<double> ranks(static_cast<std::size_t>(n));
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v(order[j + 1]) == v(order[i])) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[static_cast<std::size_t>(order[k])] = r;
        }
        i = j + 1;
    }
    return ranks;
}

void check_binary_square(const Mat& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw SemanticError(std::string(what) + " must be square");
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0.0 && a(i, j) != 1.0) {
                throw SemanticError(std::string(what) +
                                    " must be 0/1-valued");
            }
            if (i == j && a(i, j) != 0.0) {
                throw SemanticError(std::string(what) +
                                    " must have a zero diagonal");
            }
        }
    }
}

} // namespace

double gaussian_tv(double m1, double s1, double m2, double s2) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw SemanticError("gaussian_tv: standard deviations must be positive");
    }
    const double spread = 6.0 * (s1 + s2);
    const double lo = std::min(m1, m2) - spread;
    const double hi = std::max(m1, m2) + spread;
    const double step = 1e-3;
    const long cells = static_cast<long>(std::ceil((hi - lo) / step));
    auto f = [&](double x) {
        return 0.5 * std::abs(normal_pdf(x, m1, s1) - normal_pdf(x, m2, s2));
    };
    double acc = 0.0;
    double prev = f(lo);
    for (long k = 1; k <= cells; ++k) {
        const double x = lo + step * static_cast<double>(k);
        const double cur = f(std::min(x, hi));
        acc += 0.5 * (prev + cur) * step;
        prev = cur;
    }
    return std::min(acc, 1.0);
}

SDReport structural_distance(const DomainSpec& s1, const DomainSpec& s2) {
    if (s1.m != s2.m) {
        throw SemanticError(
            "structural_distance: domains have different variable counts");
    }
    SDReport r;
    for (int i = 0; i < s1.m; ++i) {
        r.tv_start +=
            gaussian_tv(s1.x0_mean(i), s1.x0_std(i), s2.x0_mean(i), s2.x0_std(i));
    }
    r.tv_start /= static_cast<double>(s1.m);
    r.structure_term = (s1.a - s2.a).cwiseAbs().sum();
    r.strength_term = (s1.w - s2.w).cwiseAbs().sum();
    r.total = r.tv_start + r.structure_term + r.strength_term;
    return r;
}

AxiomCheck check_metric_axioms(const std::vector<DomainSpec>& specs,
                               int trials, std::uint64_t seed) {
    if (specs.size() < 3) {
        throw SemanticError("check_metric_axioms: need at least three specs");
    }
    Rng rng(seed);
    AxiomCheck report;
    const int last = static_cast<int>(specs.size()) - 1;
    for (int t = 0; t < trials; ++t) {
        const DomainSpec& a = specs[static_cast<std::size_t>(rng.uniform_int(0, last))];
        const DomainSpec& b = specs[static_cast<std::size_t>(rng.uniform_int(0, last))];
        const DomainSpec& c = specs[static_cast<std::size_t>(rng.uniform_int(0, last))];
        ++report.triples;

        const SDReport ab = structural_distance(a, b);
        const SDReport ba = structural_distance(b, a);
        const SDReport ac = structural_distance(a, c);
        const SDReport cb = structural_distance(c, b);

        auto complain = [&](const char* what) {
            std::ostringstream os;
            os << "trial " << t << ": " << what;
            report.violations.push_back(os.str());
        };
        if (ab.total < 0.0) complain("negative distance");
        if (ab.tv_start != ba.tv_start ||
            ab.structure_term != ba.structure_term ||
            ab.strength_term != ba.strength_term) {
            complain("asymmetric report");
        }
        const double slack = 1e-6 + 1e-9;
        if (ab.total > ac.total + cb.total + slack) {
            complain("triangle inequality violated");
        }
    }
    return report;
}

double rmse(const Vec& predictions, const Vec& labels) {
    if (predictions.size() != labels.size() || predictions.size() == 0) {
        throw SemanticError("rmse: prediction and label lengths differ");
    }
    return std::sqrt((predictions - labels).squaredNorm() /
                     static_cast<double>(labels.size()));
}

double auc(const Vec& scores, const Vec& labels) {
    if (scores.size() != labels.size() || scores.size() == 0) {
        throw SemanticError("auc: score and label lengths differ");
    }
    long pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels(i) == 1.0) ++pos;
        else if (labels(i) == 0.0) ++neg;
        else throw SemanticError("auc: labels must be 0 or 1");
    }
    if (pos == 0 || neg == 0) {
        throw SemanticError("auc: need both classes present, got " +
                            std::to_string(pos) + " positives and " +
                            std::to_string(neg) + " negatives");
    }
    std::vector<double> ranks = average_ranks(scores);
    double rank_sum = 0.0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels(i) == 1.0) rank_sum += ranks[static_cast<std::size_t>(i)];
    }
    const double p = static_cast<double>(pos), q = static_cast<double>(neg);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double evaluate(const Vec& predictions, const Vec& labels, Task task) {
    return task == Task::regression ? rmse(predictions, labels)
                                    : auc(predictions, labels);
}

double spearman(const Vec& a, const Vec& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw SemanticError("spearman: need two equally long vectors");
    }
    std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

ScoreTriple structure_score(const Mat& recovered, const Mat& truth) {
    check_binary_square(recovered, "structure_score: recovered adjacency");
    check_binary_square(truth, "structure_score: true adjacency");
    if (recovered.rows() != truth.rows()) {
        throw SemanticError("structure_score: adjacency sizes differ");
    }
    long tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
        for (Eigen::Index j = 0; j < truth.cols(); ++j) {
            if (i == j) continue;
            const bool rec = recovered(i, j) == 1.0;
            const bool tru = truth(i, j) == 1.0;
            tp += rec && tru;
            fp += rec && !tru;
            fn += !rec && tru;
        }
    }
    ScoreTriple s;
    if (tp + fp == 0) {
        s.precision = fn == 0 ? 1.0 : 0.0;
    } else {
        s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    s.recall = tp + fn == 0
                   ? 1.0
                   : static_cast<double>(tp) / static_cast<double>(tp + fn);
    s.f1 = s.precision + s.recall == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

BoundDiagnostic
bound_diagnostic(const std::vector<std::pair<DomainSpec, DomainSpec>>& pairs,
                 const std::vector<std::pair<double, double>>& risks) {
    if (pairs.size() < 3) {
        throw SemanticError("bound_diagnostic: need at least three pairs");
    }
    if (pairs.size() != risks.size()) {
        throw SemanticError(
            "bound_diagnostic: pair and risk counts differ");
    }
    BoundDiagnostic d;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        d.distances.push_back(
            structural_distance(pairs[i].first, pairs[i].second).total);
        d.gaps.push_back(risks[i].second - risks[i].first);
    }
    Vec dv = Eigen::Map<Vec>(d.distances.data(),
                             static_cast<Eigen::Index>(d.distances.size()));
    Vec gv = Eigen::Map<Vec>(d.gaps.data(),
                             static_cast<Eigen::Index>(d.gaps.size()));
    d.rank_correlation = spearman(dv, gv);
    return d;
}

} // namespace sasa
