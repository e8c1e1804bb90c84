// Synthetic domain-pair generator: a linear-Gaussian structural causal model
// whose domains share one causal adjacency while strengths, lags, offsets, or
// start distributions vary. Ground truth is carried in a JSON manifest so
// recovery experiments can be scored exactly.
#ifndef SASA_SYNTH_HPP
#define SASA_SYNTH_HPP

#include "sasa/common.hpp"
#include "sasa/timeseries.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace sasa {

enum class Task { regression, classification };

enum class Variation { strengths, lags, offsets, start, all };

Task parse_task(const std::string& s);
std::string task_name(Task t);
Variation parse_variation(const std::string& s);
std::string variation_name(Variation v);

/// Full generative description of one domain.
///
/// The data process, per sample: draw x0_i ~ Normal(x0_mean_i, x0_std_i) per
/// variable, then for t = 1..N
///   x^i_t = x0_i                                    while t <= offsets_i
///   x^i_t = x0_i + noise                            if variable i has no parents
///   x^i_t = sum_j a_ij * w_ij * x^j_{t-lags_ij} + noise   otherwise
/// with pre-window values x^j_{s<=0} read as the start draw x0_j. Parentless
/// variables stay anchored at their start draw so an empty adjacency yields
/// constant series.
struct DomainSpec {
    int m = 0;       // variables
    int n = 0;       // window length
    int l_max = 3;   // largest admissible lag
    Mat a;           // m x m binary adjacency, a(i, j) = 1 means j -> i, zero diagonal
    Mat w;           // strengths, supported on a; max absolute row sum < 1
    Eigen::MatrixXi lags;    // m x m, every entry in [1, l_max]
    Eigen::VectorXi offsets; // per-variable activation delay, >= 0
    Vec x0_mean, x0_std;     // start distribution per variable
    double noise_std = 0.1;
    Vec label_weights;
    Task task = Task::regression;
    std::uint64_t seed = 0; // provenance only

    void validate() const; // throws SemanticError

    bool operator==(const DomainSpec& o) const;
};

struct SyntheticDataset {
    TimeSeriesBatch batch;
    DomainSpec spec;
};

/// Binary adjacency with zero diagonal; each off-diagonal entry is an
/// independent Bernoulli(density) draw.
Mat random_adjacency(int m, double density, Rng& rng);

/// Domain pair sharing `shared_a` exactly; only the factors named by
/// `variation` differ between the two returned specs. Strength resampling
/// retries up to 100 times before rejecting a draw that cannot satisfy the
/// stability bound.
std::pair<DomainSpec, DomainSpec> sample_pair(
    const Mat& shared_a, Variation variation, std::uint64_t seed,
    int n = 16, int l_max = 3, Task task = Task::regression,
    double noise_std = 0.1);

/// `count` windows drawn from the spec's process; labels are
/// label_weights . x_N plus label noise (sign thereof for classification).
SyntheticDataset generate(const DomainSpec& spec, int count,
                          std::uint64_t seed);

/// The oracle adjacency for structural-recovery scoring.
Mat ground_truth_adjacency(const DomainSpec& spec);

/// Manifest round-trip. Serialization is lossless for every field.
std::string spec_to_manifest(const DomainSpec& spec);
DomainSpec spec_from_manifest(const std::string& text);

} // namespace sasa

#endif
