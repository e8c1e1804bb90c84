#include "sasa/structure.hpp"

#include <cmath>

namespace sasa {

using ad::Var;

AttentionParams::AttentionParams(int d_h, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_h));
    auto init = [&](const char* name) {
        Mat m(d_h, d_h);
        for (int i = 0; i < d_h; ++i) {
            for (int j = 0; j < d_h; ++j) m(i, j) = rng.uniform(-bound, bound);
        }
        return ad::Parameter(name, std::move(m));
    };
    wq = init("attn.wq");
    wk = init("attn.wk");
    wv = init("attn.wv");
}

std::pair<int, int> beta_slot(int i, int slot, int m, int n) {
    if (slot < 0 || slot >= (m - 1) * n) {
        throw NumericError("beta_slot: slot out of range");
    }
    int j = slot / n;
    if (j >= i) ++j; // self-column skipped
    return {j, slot % n + 1};
}

std::vector<Var> intra_attention(const SegmentBank& bank, Var wq, Var wk) {
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(bank.d_h));
    std::vector<Var> alpha;
    alpha.reserve(bank.m);
    for (int i = 0; i < bank.m; ++i) {
        // Keys enter only through their mean over segment lengths; projecting
        // the mean equals averaging the projections.
        std::vector<Var> reps(bank.reps[i].begin(), bank.reps[i].end());
        Var key_mean = ad::matmul(ad::scale(ad::sum(reps), 1.0 / bank.n), wk);
        std::vector<Var> scores;
        scores.reserve(bank.n);
        for (int tau = 0; tau < bank.n; ++tau) {
            Var q = ad::matmul(bank.reps[i][tau], wq);
            scores.push_back(ad::scale(ad::row_dot(q, key_mean), inv_sqrt_d));
        }
        alpha.push_back(ad::sparsemax_rows(ad::concat_cols(scores)));
    }
    return alpha;
}

std::vector<Var> summarize(const SegmentBank& bank,
                           const std::vector<Var>& alpha, Var wv) {
    if (static_cast<int>(alpha.size()) != bank.m) {
        throw NumericError("summarize: alpha count does not match bank");
    }
    std::vector<Var> z;
    z.reserve(bank.m);
    for (int i = 0; i < bank.m; ++i) {
        std::vector<Var> terms;
        terms.reserve(bank.n);
        for (int tau = 0; tau < bank.n; ++tau) {
            Var v = ad::matmul(bank.reps[i][tau], wv);
            terms.push_back(ad::col_scale(v, ad::slice_cols(alpha[i], tau, 1)));
        }
        z.push_back(ad::sum(terms));
    }
    return z;
}

std::vector<Var> inter_attention(const std::vector<Var>& z,
                                 const SegmentBank& bank) {
    if (static_cast<int>(z.size()) != bank.m) {
        throw NumericError("inter_attention: summary count does not match bank");
    }
    std::vector<Var> beta;
    beta.reserve(bank.m);
    for (int i = 0; i < bank.m; ++i) {
        std::vector<Var> scores;
        scores.reserve((bank.m - 1) * bank.n);
        for (int j = 0; j < bank.m; ++j) {
            if (j == i) continue;
            for (int tau = 0; tau < bank.n; ++tau) {
                scores.push_back(ad::row_cosine(z[i], bank.reps[j][tau]));
            }
        }
        beta.push_back(ad::sparsemax_rows(ad::concat_cols(scores)));
    }
    return beta;
}

std::vector<Var> structure_representation(const std::vector<Var>& beta,
                                          const SegmentBank& bank) {
    if (static_cast<int>(beta.size()) != bank.m) {
        throw NumericError(
            "structure_representation: beta count does not match bank");
    }
    std::vector<Var> u;
    u.reserve(bank.m);
    for (int i = 0; i < bank.m; ++i) {
        std::vector<Var> terms;
        terms.reserve((bank.m - 1) * bank.n);
        int slot = 0;
        for (int j = 0; j < bank.m; ++j) {
            if (j == i) continue;
            for (int tau = 0; tau < bank.n; ++tau, ++slot) {
                terms.push_back(ad::col_scale(
                    bank.reps[j][tau], ad::slice_cols(beta[i], slot, 1)));
            }
        }
        u.push_back(ad::sum(terms));
    }
    return u;
}

StructureEstimate structure_forward(ad::Tape& tape, const SegmentBank& bank,
                                    AttentionParams& params,
                                    std::vector<ad::LeafRecord>* trace) {
    StructureEstimate est;
    est.m = bank.m;
    est.n = bank.n;
    est.d_h = bank.d_h;
    Var wq = tape.leaf(params.wq, trace);
    Var wk = tape.leaf(params.wk, trace);
    Var wv = tape.leaf(params.wv, trace);
    est.alpha = intra_attention(bank, wq, wk);
    est.z = summarize(bank, est.alpha, wv);
    est.beta = inter_attention(est.z, bank);
    est.u = structure_representation(est.beta, bank);
    return est;
}

StructureSummary summarize_batch(const StructureEstimate& est) {
    StructureSummary s;
    s.alpha.resize(est.m, est.n);
    s.beta.resize(est.m, (est.m - 1) * est.n);
    for (int i = 0; i < est.m; ++i) {
        s.alpha.row(i) = est.alpha[i].value().colwise().mean();
        s.beta.row(i) = est.beta[i].value().colwise().mean();
    }
    return s;
}

BinarizedStructure binarize_structure(const StructureSummary& s, double mu) {
    if (mu < 0.0 || mu >= 1.0) {
        throw SemanticError("binarize_structure: mu must lie in [0, 1)");
    }
    const int m = static_cast<int>(s.alpha.rows());
    const int n = static_cast<int>(s.alpha.cols());
    BinarizedStructure out;
    out.alpha_bin = (s.alpha.array() > mu).cast<double>();
    out.beta_bin = (s.beta.array() > mu).cast<double>();
    out.adjacency = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int slot = 0; slot < (m - 1) * n; ++slot) {
            if (out.beta_bin(i, slot) != 0.0) {
                out.adjacency(i, beta_slot(i, slot, m, n).first) = 1.0;
            }
        }
    }
    return out;
}

BinarizedStructure binarize_structure(const StructureEstimate& est, double mu) {
    return binarize_structure(summarize_batch(est), mu);
}

} // namespace sasa
