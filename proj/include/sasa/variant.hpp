#pragma once

#include "sasa/segments.hpp"
#include "sasa/tape.hpp"
#include "sasa/timeseries.hpp"

#include <string>
#include <vector>

namespace sasa {

// How per-node embeddings combine into the domain-variant code g_v.
enum class VariantPool { concat, mean };

VariantPool parse_variant_pool(const std::string& s);
std::string variant_pool_name(VariantPool p);

// Graph-attention autoregressive autoencoder. Each variable gets its own
// recurrent encoder over steps 1..N-1; one attention layer mixes node
// features along the (fixed, data-valued) adjacency plus self-loops; the
// decoder predicts the final-step values from the pooled code.
struct VariantParams {
    int m = 0;
    int d_e = 0; // recurrent feature width per variable
    int d_n = 0; // node embedding width after the graph layer
    VariantPool pool = VariantPool::concat;
    std::vector<LstmParams> enc;
    ad::Parameter wp;           // node features -> d_n projection
    ad::Parameter wa, wb, va;   // additive attention scoring
    ad::Parameter wd1, bd1, wd2, bd2;

    VariantParams() = default;
    // d_g is the width of g_v. concat pooling requires m | d_g.
    VariantParams(int m, int n, int d_g, VariantPool pool, Rng& rng,
                  int d_e = 16);
    std::vector<ad::Parameter*> all();
    int d_g() const { return pool == VariantPool::concat ? m * d_n : d_n; }
};

struct VariantState {
    ad::Var g_v;
    ad::Var x_hat;
    // Per node: attention over its in-neighborhood (self-loop included),
    // rows sum to 1.
    std::vector<ad::Var> att;
};

// adjacency(i, j) = 1 reads "j feeds i"; entries must be 0/1 with a zero
// diagonal. The graph is consumed as data, so no gradient reaches whatever
// produced it. An all-zero adjacency degrades to self-loops only (warned
// once per process).
VariantState encode_variant(ad::Tape& tape, const TimeSeriesBatch& x,
                            const Mat& adjacency, VariantParams& params,
                            std::vector<ad::LeafRecord>* trace = nullptr);

ad::Var decode_variant(ad::Tape& tape, ad::Var g_v, VariantParams& params,
                       std::vector<ad::LeafRecord>* trace = nullptr);

// Mean over batch and variables of the squared residual.
ad::Var reconstruction_loss(ad::Var x_hat, ad::Var x_t);

// Final-step values of every sample, [B x M].
Mat final_step(const TimeSeriesBatch& x);

} // namespace sasa
