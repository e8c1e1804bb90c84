#include "sasa/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
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

void shuffle_indices(std::vector<int>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const int j = rng.uniform_int(0, static_cast<int>(i) - 1);
        std::swap(v[i - 1], v[static_cast<std::size_t>(j)]);
    }
}

std::vector<int> iota_indices(Eigen::Index n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const char* what) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError(std::string("checkpoint: bad number in ") + what +
                          ": '" + s + "'");
    }
    return x;
}

long parse_long(const std::string& s, const char* what) {
    long x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError(std::string("checkpoint: bad integer in ") + what +
                          ": '" + s + "'");
    }
    return x;
}

} // namespace

ModelVariant parse_model_variant(const std::string& s) {
    if (s == "sasa-iv") return ModelVariant::sasa_iv;
    if (s == "sasa-iv-alpha") return ModelVariant::sasa_iv_alpha;
    if (s == "sasa-iv-beta") return ModelVariant::sasa_iv_beta;
    if (s == "sasa-iv-gamma") return ModelVariant::sasa_iv_gamma;
    if (s == "sasa-iv-c") return ModelVariant::sasa_iv_c;
    if (s == "sasa") return ModelVariant::sasa;
    if (s == "sasa-alpha") return ModelVariant::sasa_alpha;
    if (s == "sasa-beta") return ModelVariant::sasa_beta;
    if (s == "source-only") return ModelVariant::source_only;
    throw SchemaError("unknown model variant '" + s + "'");
}

std::string model_variant_name(ModelVariant v) {
    switch (v) {
    case ModelVariant::sasa_iv: return "sasa-iv";
    case ModelVariant::sasa_iv_alpha: return "sasa-iv-alpha";
    case ModelVariant::sasa_iv_beta: return "sasa-iv-beta";
    case ModelVariant::sasa_iv_gamma: return "sasa-iv-gamma";
    case ModelVariant::sasa_iv_c: return "sasa-iv-c";
    case ModelVariant::sasa: return "sasa";
    case ModelVariant::sasa_alpha: return "sasa-alpha";
    case ModelVariant::sasa_beta: return "sasa-beta";
    case ModelVariant::source_only: return "source-only";
    }
    throw SemanticError("unreachable model variant");
}

bool variant_uses_code(ModelVariant v) {
    switch (v) {
    case ModelVariant::sasa_iv:
    case ModelVariant::sasa_iv_alpha:
    case ModelVariant::sasa_iv_beta:
    case ModelVariant::sasa_iv_gamma:
    case ModelVariant::sasa_iv_c: return true;
    default: return false;
    }
}

bool variant_aligns_alpha(ModelVariant v) {
    switch (v) {
    case ModelVariant::sasa_iv_alpha:
    case ModelVariant::sasa_alpha:
    case ModelVariant::source_only: return false;
    default: return true;
    }
}

bool variant_aligns_beta(ModelVariant v) {
    switch (v) {
    case ModelVariant::sasa_iv_beta:
    case ModelVariant::sasa_beta:
    case ModelVariant::source_only: return false;
    default: return true;
    }
}

bool variant_reconstructs(ModelVariant v) {
    return variant_uses_code(v) && v != ModelVariant::sasa_iv_gamma;
}

AlignMode variant_align_mode(ModelVariant v) {
    switch (v) {
    case ModelVariant::sasa:
    case ModelVariant::sasa_alpha:
    case ModelVariant::sasa_beta: return AlignMode::mmd;
    case ModelVariant::sasa_iv_c: return AlignMode::bidirectional;
    default: return AlignMode::unidirectional;
    }
}

void ModelConfig::validate() const {
    if (omega < 0.0 || gamma < 0.0) {
        throw SemanticError("model config: loss weights must be nonnegative");
    }
    if (!(mu >= 0.0 && mu < 1.0)) {
        throw SemanticError("model config: mu must lie in [0, 1)");
    }
    if (d_h < 1 || d_e < 1 || head_hidden < 1 || d_g < 0) {
        throw SemanticError("model config: widths must be positive");
    }
    if (num_classes < 2) {
        throw SemanticError("model config: need at least two classes");
    }
    if (!(lr > 0.0)) {
        throw SemanticError("model config: step size must be positive");
    }
    if (batch_size < 1 || epochs < 0) {
        throw SemanticError("model config: batch size >= 1, epochs >= 0");
    }
    if (!(st_band > 0.0) || !(sigmoid_temperature > 0.0)) {
        throw SemanticError(
            "model config: indicator band and temperature must be positive");
    }
}

SasaModel::SasaModel(ModelConfig cfg_, int m_, int n_)
    : cfg(cfg_), m(m_), n(n_), rng_(cfg_.seed) {
    cfg.validate();
    if (m < 2 || n < 2) {
        throw SemanticError("model: need at least two variables and two steps");
    }
    if (cfg.d_g == 0) {
        cfg.d_g = cfg.pool == VariantPool::concat ? m * 16 : 16;
    }
    seg = SegmentEncoderParams(m, cfg.d_h, rng_);
    attn = AttentionParams(cfg.d_h, rng_);
    if (variant_uses_code(cfg.variant)) {
        code = VariantParams(m, n, cfg.d_g, cfg.pool, rng_, cfg.d_e);
    }
    const int in_w =
        2 * m * cfg.d_h + (variant_uses_code(cfg.variant) ? cfg.d_g : 0);
    const int out_w = cfg.task == Task::classification ? cfg.num_classes : 1;
    head_w1 = ad::Parameter("head.w1", uniform_init(rng_, in_w, cfg.head_hidden));
    head_b1 = ad::Parameter("head.b1", Mat::Zero(1, cfg.head_hidden));
    head_w2 = ad::Parameter("head.w2", uniform_init(rng_, cfg.head_hidden, out_w));
    head_b2 = ad::Parameter("head.b2", Mat::Zero(1, out_w));
}

std::vector<ad::Parameter*> SasaModel::params() {
    std::vector<ad::Parameter*> ps = seg.all();
    for (ad::Parameter* p : attn.all()) ps.push_back(p);
    if (variant_uses_code(cfg.variant)) {
        for (ad::Parameter* p : code.all()) ps.push_back(p);
    }
    for (ad::Parameter* p : {&head_w1, &head_b1, &head_w2, &head_b2}) {
        ps.push_back(p);
    }
    return ps;
}

AlignmentConfig SasaModel::alignment_config() const {
    AlignmentConfig a;
    a.mode = variant_align_mode(cfg.variant);
    a.mu = cfg.mu;
    a.estimator = cfg.estimator;
    a.aggregate = cfg.aggregate;
    a.st_band = cfg.st_band;
    a.sigmoid_temperature = cfg.sigmoid_temperature;
    return a;
}

ForwardResult SasaModel::forward(ad::Tape& tape, const TimeSeriesBatch& x,
                                 std::vector<ad::LeafRecord>* trace,
                                 bool with_code) {
    SegmentBank bank = encode_bank(tape, x, seg, trace);
    ForwardResult r;
    r.est = structure_forward(tape, bank, attn, trace);
    std::vector<ad::Var> pieces;
    pieces.reserve(static_cast<std::size_t>(2 * m) + 1);
    for (int i = 0; i < m; ++i) {
        pieces.push_back(r.est.z[static_cast<std::size_t>(i)]);
        pieces.push_back(r.est.u[static_cast<std::size_t>(i)]);
    }
    if (variant_uses_code(cfg.variant) && with_code) {
        BinarizedStructure bs = binarize_structure(r.est, cfg.mu);
        r.vst = encode_variant(tape, x, bs.adjacency, code, trace);
        r.has_code = true;
        pieces.push_back(r.vst.g_v);
    }
    r.h = ad::concat_cols(pieces);
    return r;
}

ad::Var SasaModel::predict(ad::Tape& tape, ad::Var h,
                           std::vector<ad::LeafRecord>* trace) {
    ad::Var w1 = tape.leaf(head_w1, trace);
    ad::Var b1 = tape.leaf(head_b1, trace);
    ad::Var w2 = tape.leaf(head_w2, trace);
    ad::Var b2 = tape.leaf(head_b2, trace);
    ad::Var hidden = ad::tanh(ad::add_rowvec(ad::matmul(h, w1), b1));
    return ad::add_rowvec(ad::matmul(hidden, w2), b2);
}

ad::Var SasaModel::label_loss(ad::Tape& tape, ad::Var out,
                              const TimeSeriesBatch& x) {
    if (!x.labels) {
        throw SemanticError("label loss: batch carries no labels");
    }
    const Vec& y = *x.labels;
    if (cfg.task == Task::classification) {
        std::vector<int> labels(static_cast<std::size_t>(y.size()));
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const long yr = std::lround(y(i));
            if (std::abs(y(i) - static_cast<double>(yr)) > 1e-9 || yr < 0 ||
                yr >= cfg.num_classes) {
                throw SemanticError("label loss: class labels must be whole "
                                    "numbers below the class count");
            }
            labels[static_cast<std::size_t>(i)] = static_cast<int>(yr);
        }
        return ad::softmax_xent(out, labels);
    }
    Mat target(y.size(), 1);
    target.col(0) = y;
    return ad::sqrt(ad::mse(out, tape.constant(std::move(target))));
}

LossBreakdown SasaModel::train_step(const TimeSeriesBatch& src,
                                    const TimeSeriesBatch& tgt) {
    if (!src.labels) {
        throw SemanticError("train step: source batch must be labeled");
    }
    for (ad::Parameter* p : params()) p->zero_grad();

    ad::Tape tape;
    ForwardResult fs = forward(tape, src);
    ad::Var ly = label_loss(tape, predict(tape, fs.h), src);

    LossBreakdown bd;
    bd.l_y = ly.value()(0, 0);
    ad::Var total = ly;

    const bool align_a = variant_aligns_alpha(cfg.variant) && cfg.omega > 0.0;
    const bool align_b = variant_aligns_beta(cfg.variant) && cfg.omega > 0.0;
    const bool recon = variant_reconstructs(cfg.variant) && cfg.gamma > 0.0;
    if (align_a || align_b || recon) {
        ForwardResult ft = forward(tape, tgt, nullptr, recon);
        const AlignmentConfig acfg = alignment_config();
        if (align_a || align_b) {
            ad::Var asum;
            bool first = true;
            if (align_a) {
                ad::Var la = align_alpha(fs.est.alpha, ft.est.alpha, acfg);
                bd.l_alpha = la.value()(0, 0);
                asum = la;
                first = false;
            }
            if (align_b) {
                ad::Var lb = align_beta(fs.est.beta, ft.est.beta, acfg);
                bd.l_beta = lb.value()(0, 0);
                asum = first ? lb : ad::add(asum, lb);
            }
            total = ad::add(total, ad::scale(asum, cfg.omega));
        }
        if (recon) {
            ad::Var lr_s = reconstruction_loss(
                fs.vst.x_hat, tape.constant(final_step(src)));
            ad::Var lr_t = reconstruction_loss(
                ft.vst.x_hat, tape.constant(final_step(tgt)));
            ad::Var lr = ad::scale(ad::add(lr_s, lr_t), 0.5);
            bd.l_r = lr.value()(0, 0);
            total = ad::add(total, ad::scale(lr, cfg.gamma));
        }
    }
    bd.total = total.value()(0, 0);
    const double recon_total =
        bd.l_y + cfg.omega * (bd.l_alpha + bd.l_beta) + cfg.gamma * bd.l_r;
    if (std::abs(recon_total - bd.total) > 1e-9) {
        throw NumericError("train step: loss accounting drifted");
    }

    tape.backward(total);

    bool finite = true;
    for (ad::Parameter* p : params()) {
        if (!p->grad.allFinite()) {
            finite = false;
            break;
        }
    }
    if (!finite) {
        if (++skip_streak_ >= 10) {
            throw NumericError(
                "training aborted: 10 consecutive non-finite gradient steps");
        }
        return bd;
    }
    skip_streak_ = 0;
    adam_step_();
    return bd;
}

void SasaModel::adam_step_() {
    std::vector<ad::Parameter*> ps = params();
    if (adam_m_.empty()) {
        for (ad::Parameter* p : ps) {
            adam_m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
            adam_v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
        }
    }
    ++adam_t_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const Mat& g = ps[i]->grad;
        adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * g;
        adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * g.cwiseProduct(g);
        ps[i]->value.array() -=
            cfg.lr * (adam_m_[i].array() / c1) /
            ((adam_v_[i].array() / c2).sqrt() + eps);
    }
}

FitResult SasaModel::fit(const TimeSeriesBatch& src,
                         const TimeSeriesBatch& tgt) {
    src.validate();
    if (src.batch_size() == 0) {
        throw SemanticError("fit: source dataset is empty");
    }
    if (!src.labels) {
        throw SemanticError("fit: source dataset must be labeled");
    }
    const bool need_tgt = cfg.variant != ModelVariant::source_only;
    if (need_tgt) {
        tgt.validate();
        if (tgt.batch_size() == 0) {
            throw SemanticError("fit: target dataset is empty");
        }
    }

    const int B = cfg.batch_size;
    auto nbatches = [B](Eigen::Index count) {
        return (static_cast<long>(count) + B - 1) / B;
    };
    std::vector<int> order_s = iota_indices(src.batch_size());
    std::vector<int> order_t =
        need_tgt ? iota_indices(tgt.batch_size()) : std::vector<int>{};
    const long nbs = nbatches(src.batch_size());
    const long nbt = need_tgt ? nbatches(tgt.batch_size()) : 0;
    const long steps_per_epoch = need_tgt ? std::max(nbs, nbt) : nbs;

    auto take = [B](const TimeSeriesBatch& data, const std::vector<int>& order,
                    long k) {
        const std::size_t lo = static_cast<std::size_t>(k) *
                               static_cast<std::size_t>(B);
        const std::size_t hi =
            std::min(order.size(), lo + static_cast<std::size_t>(B));
        std::vector<int> idx(order.begin() + static_cast<std::ptrdiff_t>(lo),
                             order.begin() + static_cast<std::ptrdiff_t>(hi));
        return data.subset(idx);
    };

    FitResult res;
    TimeSeriesBatch empty;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_indices(order_s, rng_);
        if (need_tgt) shuffle_indices(order_t, rng_);
        long ks = 0, kt = 0;
        LossBreakdown acc;
        for (long step = 0; step < steps_per_epoch; ++step) {
            if (ks == nbs) {
                shuffle_indices(order_s, rng_);
                ks = 0;
            }
            if (need_tgt && kt == nbt) {
                shuffle_indices(order_t, rng_);
                kt = 0;
            }
            TimeSeriesBatch bs = take(src, order_s, ks++);
            TimeSeriesBatch bt = need_tgt ? take(tgt, order_t, kt++) : empty;
            const int before = skip_streak_;
            LossBreakdown bd = train_step(bs, bt);
            if (skip_streak_ > before) {
                ++res.steps_skipped;
            }
            ++res.steps_taken;
            acc.l_y += bd.l_y;
            acc.l_alpha += bd.l_alpha;
            acc.l_beta += bd.l_beta;
            acc.l_r += bd.l_r;
            acc.total += bd.total;
        }
        const double inv = 1.0 / static_cast<double>(steps_per_epoch);
        acc.l_y *= inv;
        acc.l_alpha *= inv;
        acc.l_beta *= inv;
        acc.l_r *= inv;
        acc.total *= inv;
        res.history.push_back(acc);
    }
    return res;
}

Mat SasaModel::predict_scores(const TimeSeriesBatch& x) {
    ad::Tape tape(false);
    ForwardResult fr = forward(tape, x);
    ad::Var out = predict(tape, fr.h);
    if (cfg.task == Task::classification) {
        return ad::softmax_rows(out).value();
    }
    return out.value();
}

StructureReport SasaModel::structures(const TimeSeriesBatch& x) {
    ad::Tape tape(false);
    ForwardResult fr = forward(tape, x, nullptr, false);
    StructureReport r;
    r.summary = summarize_batch(fr.est);
    r.bin = binarize_structure(fr.est, cfg.mu);
    return r;
}

void SasaModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("checkpoint: cannot open '" + path + "' for writing");
    }
    out << "SASAIV1\n";
    out << "meta variant " << model_variant_name(cfg.variant) << "\n";
    out << "meta task " << task_name(cfg.task) << "\n";
    out << "meta m " << m << "\n";
    out << "meta n " << n << "\n";
    out << "meta d_h " << cfg.d_h << "\n";
    out << "meta d_g " << cfg.d_g << "\n";
    out << "meta d_e " << cfg.d_e << "\n";
    out << "meta head_hidden " << cfg.head_hidden << "\n";
    out << "meta num_classes " << cfg.num_classes << "\n";
    out << "meta omega " << format_double(cfg.omega) << "\n";
    out << "meta gamma " << format_double(cfg.gamma) << "\n";
    out << "meta mu " << format_double(cfg.mu) << "\n";
    out << "meta estimator " << estimator_name(cfg.estimator) << "\n";
    out << "meta aggregate " << aggregate_name(cfg.aggregate) << "\n";
    out << "meta st_band " << format_double(cfg.st_band) << "\n";
    out << "meta sigmoid_temperature "
        << format_double(cfg.sigmoid_temperature) << "\n";
    out << "meta pool " << variant_pool_name(cfg.pool) << "\n";
    out << "meta lr " << format_double(cfg.lr) << "\n";
    out << "meta batch_size " << cfg.batch_size << "\n";
    out << "meta epochs " << cfg.epochs << "\n";
    out << "meta seed " << cfg.seed << "\n";
    SasaModel& self = const_cast<SasaModel&>(*this);
    for (ad::Parameter* p : self.params()) {
        out << "tensor " << p->name << " " << p->value.rows() << " "
            << p->value.cols() << "\n";
        for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                if (c) out << " ";
                out << format_double(p->value(r, c));
            }
            out << "\n";
        }
    }
    out << "end\n";
    if (!out) {
        throw IoError("checkpoint: write to '" + path + "' failed");
    }
}

SasaModel SasaModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("checkpoint: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "SASAIV1") {
        throw SchemaError("checkpoint: bad magic, expected SASAIV1");
    }

    ModelConfig cfg;
    int m = 0, n = 0;
    std::vector<std::pair<std::string, Mat>> tensors;
    bool saw_end = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "meta") {
            std::string key, value;
            if (!(ls >> key >> value)) {
                throw SchemaError("checkpoint: malformed meta line '" + line +
                                  "'");
            }
            if (key == "variant") cfg.variant = parse_model_variant(value);
            else if (key == "task") cfg.task = parse_task(value);
            else if (key == "m") m = static_cast<int>(parse_long(value, "m"));
            else if (key == "n") n = static_cast<int>(parse_long(value, "n"));
            else if (key == "d_h") cfg.d_h = static_cast<int>(parse_long(value, "d_h"));
            else if (key == "d_g") cfg.d_g = static_cast<int>(parse_long(value, "d_g"));
            else if (key == "d_e") cfg.d_e = static_cast<int>(parse_long(value, "d_e"));
            else if (key == "head_hidden") cfg.head_hidden = static_cast<int>(parse_long(value, "head_hidden"));
            else if (key == "num_classes") cfg.num_classes = static_cast<int>(parse_long(value, "num_classes"));
            else if (key == "omega") cfg.omega = parse_double(value, "omega");
            else if (key == "gamma") cfg.gamma = parse_double(value, "gamma");
            else if (key == "mu") cfg.mu = parse_double(value, "mu");
            else if (key == "estimator") cfg.estimator = parse_estimator(value);
            else if (key == "aggregate") cfg.aggregate = parse_aggregate(value);
            else if (key == "st_band") cfg.st_band = parse_double(value, "st_band");
            else if (key == "sigmoid_temperature") cfg.sigmoid_temperature = parse_double(value, "sigmoid_temperature");
            else if (key == "pool") cfg.pool = parse_variant_pool(value);
            else if (key == "lr") cfg.lr = parse_double(value, "lr");
            else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_long(value, "batch_size"));
            else if (key == "epochs") cfg.epochs = static_cast<int>(parse_long(value, "epochs"));
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(value, "seed"));
            else throw SchemaError("checkpoint: unknown meta key '" + key + "'");
        } else if (kind == "tensor") {
            std::string name;
            Eigen::Index rows = 0, cols = 0;
            if (!(ls >> name >> rows >> cols) || rows < 1 || cols < 1) {
                throw SchemaError("checkpoint: malformed tensor header '" +
                                  line + "'");
            }
            Mat mat(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                if (!std::getline(in, line)) {
                    throw SchemaError("checkpoint: truncated tensor '" + name +
                                      "'");
                }
                std::istringstream row(line);
                std::string cell;
                for (Eigen::Index c = 0; c < cols; ++c) {
                    if (!(row >> cell)) {
                        throw SchemaError("checkpoint: short row in tensor '" +
                                          name + "'");
                    }
                    mat(r, c) = parse_double(cell, name.c_str());
                }
                if (row >> cell) {
                    throw SchemaError("checkpoint: long row in tensor '" +
                                      name + "'");
                }
            }
            tensors.emplace_back(name, std::move(mat));
        } else if (kind == "end") {
            saw_end = true;
            break;
        } else {
            throw SchemaError("checkpoint: unknown record '" + kind + "'");
        }
    }
    if (!saw_end) {
        throw SchemaError("checkpoint: missing end marker");
    }
    if (m == 0 || n == 0) {
        throw SchemaError("checkpoint: missing model dimensions");
    }

    SasaModel model(cfg, m, n);
    std::map<std::string, ad::Parameter*> by_name;
    for (ad::Parameter* p : model.params()) by_name[p->name] = p;
    std::size_t assigned = 0;
    for (auto& [name, mat] : tensors) {
        auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw SchemaError("checkpoint: unexpected tensor '" + name + "'");
        }
        if (it->second->value.rows() != mat.rows() ||
            it->second->value.cols() != mat.cols()) {
            throw SchemaError("checkpoint: tensor '" + name +
                              "' has the wrong shape");
        }
        it->second->value = std::move(mat);
        ++assigned;
    }
    if (assigned != by_name.size()) {
        throw SchemaError("checkpoint: missing tensors");
    }
    return model;
}

} // namespace sasa
