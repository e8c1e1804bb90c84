#include "sasa/variant.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace sasa {

namespace {

Mat uniform_init(Rng& rng, Eigen::Index r, Eigen::Index c) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(r));
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rng.uniform(-bound, bound);
        }
    }
    return m;
}

void check_adjacency(const Mat& a, int m) {
    if (a.rows() != m || a.cols() != m) {
        throw SemanticError("variant encoder: adjacency must be MxM");
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double v = a(i, j);
            if (v != 0.0 && v != 1.0) {
                throw SemanticError(
                    "variant encoder: adjacency entries must be 0 or 1");
            }
            if (i == j && v != 0.0) {
                throw SemanticError(
                    "variant encoder: adjacency diagonal must be zero");
            }
        }
    }
}

} // namespace

VariantPool parse_variant_pool(const std::string& s) {
    if (s == "concat") return VariantPool::concat;
    if (s == "mean") return VariantPool::mean;
    throw SchemaError("unknown variant pooling '" + s +
                      "' (expected concat or mean)");
}

std::string variant_pool_name(VariantPool p) {
    return p == VariantPool::concat ? "concat" : "mean";
}

VariantParams::VariantParams(int m_, int n, int d_g, VariantPool pool_,
                             Rng& rng, int d_e_)
    : m(m_), d_e(d_e_), pool(pool_) {
    if (m < 1 || n < 2 || d_g < 1 || d_e < 1) {
        throw SemanticError("variant encoder: m >= 1, n >= 2, widths >= 1");
    }
    if (pool == VariantPool::concat) {
        if (d_g % m != 0) {
            throw SemanticError("variant encoder: concat pooling needs the "
                                "code width to be a multiple of the variable "
                                "count");
        }
        d_n = d_g / m;
    } else {
        d_n = d_g;
    }
    enc.reserve(m);
    for (int i = 0; i < m; ++i) {
        enc.emplace_back("var_enc" + std::to_string(i), 1, d_e, rng);
    }
    const int d_f = d_e + (n - 1); // recurrent feature plus raw history
    wp = ad::Parameter("variant.wp", uniform_init(rng, d_f, d_n));
    wa = ad::Parameter("variant.wa", uniform_init(rng, d_n, d_n));
    wb = ad::Parameter("variant.wb", uniform_init(rng, d_n, d_n));
    va = ad::Parameter("variant.va", uniform_init(rng, d_n, 1));
    const int dg = this->d_g();
    wd1 = ad::Parameter("variant.wd1", uniform_init(rng, dg, dg));
    bd1 = ad::Parameter("variant.bd1", Mat::Zero(1, dg));
    wd2 = ad::Parameter("variant.wd2", uniform_init(rng, dg, m));
    bd2 = ad::Parameter("variant.bd2", Mat::Zero(1, m));
}

std::vector<ad::Parameter*> VariantParams::all() {
    std::vector<ad::Parameter*> ps;
    for (LstmParams& e : enc) {
        for (ad::Parameter* p : e.all()) ps.push_back(p);
    }
    for (ad::Parameter* p : {&wp, &wa, &wb, &va, &wd1, &bd1, &wd2, &bd2}) {
        ps.push_back(p);
    }
    return ps;
}

VariantState encode_variant(ad::Tape& tape, const TimeSeriesBatch& x,
                            const Mat& adjacency, VariantParams& params,
                            std::vector<ad::LeafRecord>* trace) {
    x.validate();
    if (x.vars() != params.m) {
        throw SemanticError("variant encoder: batch has a different variable "
                            "count than the parameters");
    }
    if (x.steps() < 2) {
        throw SemanticError(
            "variant encoder: need at least two steps to predict the last");
    }
    check_adjacency(adjacency, params.m);
    if ((adjacency.array() == 0.0).all()) {
        static bool warned = false;
        if (!warned) {
            warned = true;
            std::cerr << "warning: all-zero adjacency, variant encoder "
                         "propagates along self-loops only\n";
        }
    }

    const Eigen::Index b = x.batch_size();
    const Eigen::Index n = x.steps();
    const int m = params.m;
    const int de = params.d_e;

    try {
        ad::Var wp = tape.leaf(params.wp, trace);
        ad::Var wa = tape.leaf(params.wa, trace);
        ad::Var wb = tape.leaf(params.wb, trace);
        ad::Var va = tape.leaf(params.va, trace);

        // Per-node projected features p_i, [B x d_n] each.
        std::vector<ad::Var> proj(m);
        for (int i = 0; i < m; ++i) {
            std::vector<ad::Var> steps(n - 1);
            for (Eigen::Index s = 0; s + 1 < n; ++s) {
                Mat col(b, 1);
                for (Eigen::Index r = 0; r < b; ++r) {
                    col(r, 0) = x.values[r](s, i);
                }
                steps[s] = tape.constant(std::move(col));
            }
            ad::Var ewx = tape.leaf(params.enc[i].wx, trace);
            ad::Var ewh = tape.leaf(params.enc[i].wh, trace);
            ad::Var eb = tape.leaf(params.enc[i].b, trace);
            ad::Var h = tape.constant(Mat::Zero(b, de));
            ad::Var c = tape.constant(Mat::Zero(b, de));
            for (ad::Var& step : steps) {
                ad::Var hc = ad::lstm_step(step, h, c, ewx, ewh, eb);
                h = ad::slice_cols(hc, 0, de);
                c = ad::slice_cols(hc, de, de);
            }
            std::vector<ad::Var> feat;
            feat.reserve(n);
            feat.push_back(h);
            for (ad::Var& step : steps) feat.push_back(step);
            proj[i] = ad::matmul(ad::concat_cols(feat), wp);
        }

        // Score halves are node-independent, so compute them once.
        std::vector<ad::Var> qa(m), qb(m);
        for (int i = 0; i < m; ++i) {
            qa[i] = ad::matmul(proj[i], wa);
            qb[i] = ad::matmul(proj[i], wb);
        }

        std::vector<ad::Var> nodes(m);
        std::vector<ad::Var> atts(m);
        for (int i = 0; i < m; ++i) {
            std::vector<int> nbrs;
            for (int j = 0; j < m; ++j) {
                if (j == i || adjacency(i, j) != 0.0) nbrs.push_back(j);
            }
            std::vector<ad::Var> scores;
            scores.reserve(nbrs.size());
            for (int j : nbrs) {
                scores.push_back(
                    ad::matmul(ad::tanh(ad::add(qa[i], qb[j])), va));
            }
            ad::Var att = ad::softmax_rows(ad::concat_cols(scores));
            atts[i] = att;
            ad::Var mixed;
            for (std::size_t k = 0; k < nbrs.size(); ++k) {
                ad::Var piece = ad::col_scale(
                    proj[nbrs[k]],
                    ad::slice_cols(att, static_cast<Eigen::Index>(k), 1));
                mixed = (k == 0) ? piece : ad::add(mixed, piece);
            }
            nodes[i] = ad::tanh(mixed);
        }

        VariantState st;
        st.att = std::move(atts);
        if (params.pool == VariantPool::concat) {
            st.g_v = ad::concat_cols(nodes);
        } else {
            ad::Var acc = nodes[0];
            for (int i = 1; i < m; ++i) acc = ad::add(acc, nodes[i]);
            st.g_v = ad::scale(acc, 1.0 / static_cast<double>(m));
        }
        st.x_hat = decode_variant(tape, st.g_v, params, trace);
        return st;
    } catch (const NumericError& e) {
        std::ostringstream os;
        os << "variant encoder: " << e.what();
        throw NumericError(os.str());
    }
}

ad::Var decode_variant(ad::Tape& tape, ad::Var g_v, VariantParams& params,
                       std::vector<ad::LeafRecord>* trace) {
    ad::Var wd1 = tape.leaf(params.wd1, trace);
    ad::Var bd1 = tape.leaf(params.bd1, trace);
    ad::Var wd2 = tape.leaf(params.wd2, trace);
    ad::Var bd2 = tape.leaf(params.bd2, trace);
    ad::Var hidden = ad::tanh(ad::add_rowvec(ad::matmul(g_v, wd1), bd1));
    return ad::add_rowvec(ad::matmul(hidden, wd2), bd2);
}

ad::Var reconstruction_loss(ad::Var x_hat, ad::Var x_t) {
    return ad::mse(x_hat, x_t);
}

Mat final_step(const TimeSeriesBatch& x) {
    x.validate();
    Mat out(x.batch_size(), x.vars());
    for (Eigen::Index r = 0; r < x.batch_size(); ++r) {
        out.row(r) = x.values[r].row(x.steps() - 1);
    }
    return out;
}

} // namespace sasa
