#pragma once

#include "sasa/synth.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sasa {

/// Total variation between Normal(m1, s1) and Normal(m2, s2), by trapezoid
/// integration of 0.5*|p - q| on a grid of step 1e-3 spanning both means
/// plus or minus six combined standard deviations. Lies in [0, 1].
double gaussian_tv(double m1, double s1, double m2, double s2);

struct SDReport {
    double tv_start = 0.0;       // mean per-variable start-distribution TV
    double structure_term = 0.0; // entrywise L1 of the adjacencies
    double strength_term = 0.0;  // entrywise L1 of the strengths
    double total = 0.0;          // sum of the three
};

/// Distance between two generative domains. Requires matching variable
/// counts.
SDReport structural_distance(const DomainSpec& s1, const DomainSpec& s2);

struct AxiomCheck {
    long triples = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Draws random (S, D, T) triples from the pool and verifies nonnegativity,
/// exact symmetry, and the triangle inequality (slack 1e-9 on the additive
/// terms, 1e-6 on the integrated TV term). Needs at least three specs.
AxiomCheck check_metric_axioms(const std::vector<DomainSpec>& specs,
                               int trials, std::uint64_t seed);

double rmse(const Vec& predictions, const Vec& labels);

/// Rank-statistic area under the ROC curve; ties between scores split their
/// credit. Labels must be binary with both classes present.
double auc(const Vec& scores, const Vec& labels);

/// Task dispatch: RMSE for regression, AUC for classification.
double evaluate(const Vec& predictions, const Vec& labels, Task task);

/// Spearman rank correlation with average ranks on ties; 0 when either side
/// has no rank variation.
double spearman(const Vec& a, const Vec& b);

struct ScoreTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision/recall/F1 over off-diagonal entries of binary adjacencies.
/// An empty recovered set scores precision 1 only against an empty truth.
ScoreTriple structure_score(const Mat& recovered, const Mat& truth);

struct BoundDiagnostic {
    std::vector<double> distances;
    std::vector<double> gaps; // target risk minus source risk, per pair
    double rank_correlation = 0.0;
};

/// Descriptive check of the generalization-bound story: how the structural
/// distance of each domain pair ranks against its measured risk gap.
BoundDiagnostic
bound_diagnostic(const std::vector<std::pair<DomainSpec, DomainSpec>>& pairs,
                 const std::vector<std::pair<double, double>>& risks);

} // namespace sasa
