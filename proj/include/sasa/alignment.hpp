// Structure-alignment losses between a source and a target domain.
//
// Attention weights are first aggregated over each domain's batch (one
// structure per domain by default, since batches are unpaired), binarized by
// the indicator, and compared by entrywise L1. In the default unidirectional
// mode the source side sits behind a gradient stop: alignment pulls the
// target structure toward the source, never the reverse. The mmd mode skips
// binarization entirely and matches the raw weight distributions.
#ifndef SASA_ALIGNMENT_HPP
#define SASA_ALIGNMENT_HPP

#include "sasa/tape.hpp"

#include <string>
#include <vector>

namespace sasa {

enum class AlignMode { unidirectional, bidirectional, mmd };
enum class IndicatorEstimator { straight_through, sigmoid };
enum class Aggregate { batch_mean, per_sample };

AlignMode parse_align_mode(const std::string& s);
std::string align_mode_name(AlignMode m);
IndicatorEstimator parse_estimator(const std::string& s);
std::string estimator_name(IndicatorEstimator e);
Aggregate parse_aggregate(const std::string& s);
std::string aggregate_name(Aggregate a);

struct AlignmentConfig {
    AlignMode mode = AlignMode::unidirectional;
    double mu = 0.08;
    IndicatorEstimator estimator = IndicatorEstimator::straight_through;
    Aggregate aggregate = Aggregate::batch_mean;
    double st_band = 1.0;              // straight-through gradient window
    double sigmoid_temperature = 0.1;  // sigmoid estimator sharpness

    void validate() const; // throws SemanticError
};

/// L1 structure disagreement (or MMD) between the per-variable association
/// weights of the two domains. Inputs are per-variable [B x slots] rows on
/// the simplex; source and target may have different batch sizes except under
/// per-sample aggregation.
ad::Var align_beta(const std::vector<ad::Var>& beta_s,
                   const std::vector<ad::Var>& beta_t,
                   const AlignmentConfig& cfg);

/// Same loss family over the per-variable segment-length weights [B x N].
ad::Var align_alpha(const std::vector<ad::Var>& alpha_s,
                    const std::vector<ad::Var>& alpha_t,
                    const AlignmentConfig& cfg);

} // namespace sasa

#endif
