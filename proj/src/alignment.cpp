#include "sasa/alignment.hpp"

#include "sasa/numerics.hpp"

namespace sasa {

using ad::Var;

AlignMode parse_align_mode(const std::string& s) {
    if (s == "unidirectional") return AlignMode::unidirectional;
    if (s == "bidirectional") return AlignMode::bidirectional;
    if (s == "mmd") return AlignMode::mmd;
    throw SchemaError("unknown alignment mode '" + s +
                      "' (expected unidirectional|bidirectional|mmd)");
}

std::string align_mode_name(AlignMode m) {
    switch (m) {
        case AlignMode::unidirectional: return "unidirectional";
        case AlignMode::bidirectional: return "bidirectional";
        case AlignMode::mmd: return "mmd";
    }
    return "?";
}

IndicatorEstimator parse_estimator(const std::string& s) {
    if (s == "straight-through") return IndicatorEstimator::straight_through;
    if (s == "sigmoid") return IndicatorEstimator::sigmoid;
    throw SchemaError("unknown indicator estimator '" + s +
                      "' (expected straight-through|sigmoid)");
}

std::string estimator_name(IndicatorEstimator e) {
    return e == IndicatorEstimator::straight_through ? "straight-through"
                                                     : "sigmoid";
}

Aggregate parse_aggregate(const std::string& s) {
    if (s == "batch-mean") return Aggregate::batch_mean;
    if (s == "per-sample") return Aggregate::per_sample;
    throw SchemaError("unknown aggregate '" + s +
                      "' (expected batch-mean|per-sample)");
}

std::string aggregate_name(Aggregate a) {
    return a == Aggregate::batch_mean ? "batch-mean" : "per-sample";
}

void AlignmentConfig::validate() const {
    if (mu < 0.0 || mu >= 1.0) {
        throw SemanticError("alignment: mu must lie in [0, 1)");
    }
    if (st_band <= 0.0) {
        throw SemanticError("alignment: straight-through band must be positive");
    }
    if (sigmoid_temperature <= 0.0) {
        throw SemanticError("alignment: sigmoid temperature must be positive");
    }
}

namespace {

Var indicator(Var x, const AlignmentConfig& cfg) {
    if (cfg.estimator == IndicatorEstimator::straight_through) {
        return ad::st_indicator(x, cfg.mu, cfg.st_band);
    }
    return ad::sigmoid_indicator(x, cfg.mu, cfg.sigmoid_temperature);
}

Var align_rows(const std::vector<Var>& side_s, const std::vector<Var>& side_t,
               const AlignmentConfig& cfg, const char* what) {
    cfg.validate();
    if (side_s.empty() || side_s.size() != side_t.size()) {
        throw SemanticError(std::string("alignment: ") + what +
                            " variable counts differ between domains");
    }
    for (std::size_t i = 0; i < side_s.size(); ++i) {
        if (side_s[i].cols() != side_t[i].cols()) {
            throw SemanticError(std::string("alignment: ") + what +
                                " slot counts differ between domains");
        }
    }
    ad::Tape& t = *side_s[0].tape;

    if (cfg.mode == AlignMode::mmd) {
        // Distribution match over per-sample flattened weights.
        Var xs = ad::concat_cols(side_s);
        Var xt = ad::concat_cols(side_t);
        BandwidthChoice bw = median_bandwidth(xs.value(), xt.value());
        return ad::mmd_rbf(xs, xt, bw.sigma);
    }

    std::vector<Var> pieces;
    pieces.reserve(side_s.size());
    for (std::size_t i = 0; i < side_s.size(); ++i) {
        Var s = side_s[i];
        Var tt = side_t[i];
        double inv_b = 1.0;
        if (cfg.aggregate == Aggregate::batch_mean) {
            s = ad::mean_rows(s);
            tt = ad::mean_rows(tt);
        } else {
            if (s.rows() != tt.rows()) {
                throw SemanticError(std::string("alignment: per-sample ") +
                                    what +
                                    " needs equal batch sizes in both domains");
            }
            inv_b = 1.0 / static_cast<double>(s.rows());
        }
        Var is = indicator(s, cfg);
        Var it = indicator(tt, cfg);
        if (cfg.mode == AlignMode::unidirectional) {
            is = ad::grad_stop(is);
        }
        Var l1 = ad::sum_all(ad::abs(ad::sub(is, it)));
        pieces.push_back(inv_b == 1.0 ? l1 : ad::scale(l1, inv_b));
    }
    (void)t;
    return ad::sum(pieces);
}

} // namespace

Var align_beta(const std::vector<Var>& beta_s, const std::vector<Var>& beta_t,
               const AlignmentConfig& cfg) {
    return align_rows(beta_s, beta_t, cfg, "beta");
}

Var align_alpha(const std::vector<Var>& alpha_s,
                const std::vector<Var>& alpha_t, const AlignmentConfig& cfg) {
    return align_rows(alpha_s, alpha_t, cfg, "alpha");
}

} // namespace sasa
