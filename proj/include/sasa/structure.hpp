// Sparse associative structure recovery on top of the segment bank.
//
// Stage one picks segment lengths per variable: each segment representation
// queries the (averaged) keys of its own variable and sparsemax turns the
// scores into a sparse weighting over the N candidate lengths. Stage two
// relates variables: each variable's weighted summary is compared against
// every other variable's segment encodings by cosine, and one sparsemax per
// target variable over all (neighbor, length) slots produces the sparse
// association weights that induce the recovered adjacency.
#ifndef SASA_STRUCTURE_HPP
#define SASA_STRUCTURE_HPP

#include "sasa/segments.hpp"
#include "sasa/tape.hpp"

#include <utility>
#include <vector>

namespace sasa {

struct AttentionParams {
    ad::Parameter wq, wk, wv; // each [d_h x d_h]

    AttentionParams() = default;
    AttentionParams(int d_h, Rng& rng);

    std::vector<ad::Parameter*> all() { return {&wq, &wk, &wv}; }
};

/// Batched structure estimate. Per variable i:
///   alpha[i]: [B x N], rows on the simplex (segment-length weights)
///   beta[i]:  [B x (M-1)*N], rows on the simplex (association weights,
///             self-edges excluded by construction)
///   z[i], u[i]: [B x d_h] (weighted summary / structure representation)
/// beta slots iterate neighbors j != i in increasing j, each contributing N
/// consecutive lag slots.
struct StructureEstimate {
    int m = 0;
    int n = 0;
    int d_h = 0;
    std::vector<ad::Var> alpha;
    std::vector<ad::Var> beta;
    std::vector<ad::Var> z;
    std::vector<ad::Var> u;
};

/// Maps a flattened beta slot of target variable i to (source variable j,
/// segment length tau in 1..N).
std::pair<int, int> beta_slot(int i, int slot, int m, int n);

std::vector<ad::Var> intra_attention(const SegmentBank& bank, ad::Var wq,
                                     ad::Var wk);

std::vector<ad::Var> summarize(const SegmentBank& bank,
                               const std::vector<ad::Var>& alpha, ad::Var wv);

std::vector<ad::Var> inter_attention(const std::vector<ad::Var>& z,
                                     const SegmentBank& bank);

std::vector<ad::Var> structure_representation(const std::vector<ad::Var>& beta,
                                              const SegmentBank& bank);

/// Runs the full pipeline over one bank.
StructureEstimate structure_forward(ad::Tape& tape, const SegmentBank& bank,
                                    AttentionParams& params,
                                    std::vector<ad::LeafRecord>* trace = nullptr);

/// Batch-mean of the attention weights: one structure per domain.
struct StructureSummary {
    Mat alpha; // M x N
    Mat beta;  // M x (M-1)*N, slot layout as in StructureEstimate
};

StructureSummary summarize_batch(const StructureEstimate& est);

struct BinarizedStructure {
    Mat alpha_bin; // M x N
    Mat beta_bin;  // M x (M-1)*N
    Mat adjacency; // M x M; (i, j) = 1 means an edge j -> i at some lag
};

/// Hard-thresholds the batch-mean structure at mu; adjacency is the
/// any-lag aggregation of the thresholded beta with a zero diagonal.
BinarizedStructure binarize_structure(const StructureSummary& s, double mu);
BinarizedStructure binarize_structure(const StructureEstimate& est, double mu);

} // namespace sasa

#endif
