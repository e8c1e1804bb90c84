#include "sasa/commands.hpp"

#include "sasa/heatmap.hpp"
#include "sasa/metrics.hpp"
#include "sasa/model.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace sasa {
namespace {

std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Header-less numeric CSV for structure matrices.
void dump_matrix(const Mat& m, const std::string& path) {
    std::ostringstream os;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ",";
            os << fmt(m(r, c));
        }
        os << "\n";
    }
    write_text(path, os.str());
}

Mat load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            throw SchemaError(path + ": line " + std::to_string(lineno) +
                              ": CRLF line ending, expected LF");
        }
        if (line.empty()) {
            throw SchemaError(path + ": line " + std::to_string(lineno) +
                              ": blank line");
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string cell =
                line.substr(start, comma == std::string::npos
                                       ? std::string::npos
                                       : comma - start);
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                throw SchemaError(path + ": line " + std::to_string(lineno) +
                                  ": expected a number, got '" + cell + "'");
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows[0].size()) {
            throw SchemaError(path + ": line " + std::to_string(lineno) +
                              ": expected " + std::to_string(rows[0].size()) +
                              " fields, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw SchemaError(path + ": empty matrix");
    Mat m(static_cast<Eigen::Index>(rows.size()),
          static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
        }
    }
    return m;
}

std::vector<std::string> split_list(const std::string& s,
                                    const std::string& what) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        std::string item = s.substr(
            start, comma == std::string::npos ? std::string::npos
                                              : comma - start);
        const std::size_t b = item.find_first_not_of(" \t");
        const std::size_t e = item.find_last_not_of(" \t");
        item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
        if (item.empty()) {
            throw SchemaError("empty entry in " + what + " list '" + s + "'");
        }
        out.push_back(std::move(item));
        if (comma == std::string::npos) return out;
        start = comma + 1;
    }
}

double parse_real_token(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError(what + ": not a number: '" + s + "'");
    }
    return v;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

const std::vector<KeyDoc> kModelKeys = {
    {"variant", "model family (sasa-iv, sasa-iv-alpha, sasa-iv-beta, "
                "sasa-iv-gamma, sasa-iv-c, sasa, sasa-alpha, sasa-beta, "
                "source-only); default sasa-iv", false},
    {"task", "regression or classification; default regression", false},
    {"d_h", "segment encoder width; default 32", false},
    {"d_g", "strength code width, 0 picks the pooling default", false},
    {"d_e", "strength encoder recurrent width; default 16", false},
    {"head_hidden", "prediction head hidden width; default 64", false},
    {"num_classes", "classification class count; default 2", false},
    {"omega", "alignment loss weight; default 1", false},
    {"gamma", "reconstruction loss weight; default 0.5", false},
    {"mu", "structure binarization threshold; default 0.08", false},
    {"estimator", "indicator gradient estimator (straight-through or "
                  "sigmoid); default straight-through", false},
    {"aggregate", "alignment aggregation (batch-mean or per-sample); "
                  "default batch-mean", false},
    {"st_band", "straight-through gradient window; default 1", false},
    {"sigmoid_temperature", "sigmoid estimator sharpness; default 0.1", false},
    {"pool", "strength code pooling (concat or mean); default concat", false},
    {"lr", "Adam step size; default 0.001", false},
    {"batch_size", "minibatch size; default 64", false},
    {"epochs", "training epochs; default 10", false},
    {"seed", "RNG seed; default 7", false},
};

std::vector<KeyDoc> with_model_keys(std::vector<KeyDoc> own,
                                    bool drop_grid_keys = false) {
    for (const auto& d : kModelKeys) {
        if (drop_grid_keys && (d.key == "variant" || d.key == "seed")) continue;
        own.push_back(d);
    }
    return own;
}

const std::vector<KeyDoc>& gen_schema() {
    static const std::vector<KeyDoc> s = {
        {"out", "output directory; default .", false},
        {"m", "variable count; default 6", false},
        {"n", "window length; default 16", false},
        {"l_max", "largest causal lag; default 3", false},
        {"density", "edge probability of the shared graph; default 0.25", false},
        {"variation", "factor that differs across domains (strengths, lags, "
                      "offsets, start, all); default all", false},
        {"count", "samples per domain; default 1000", false},
        {"task", "regression or classification; default regression", false},
        {"noise_std", "process noise scale; default 0.1", false},
        {"seed", "RNG seed; default 7", false},
    };
    return s;
}

const std::vector<KeyDoc>& train_schema() {
    static const std::vector<KeyDoc> s = with_model_keys({
        {"data", "directory produced by gen", true},
        {"out", "output directory; default .", false},
    });
    return s;
}

const std::vector<KeyDoc>& eval_schema() {
    static const std::vector<KeyDoc> s = {
        {"model", "checkpoint path", true},
        {"data", "series CSV to score", true},
        {"labels", "labels CSV matching the data", true},
        {"manifest", "domain manifest; adds structure recovery scores", false},
        {"out", "output directory; default .", false},
    };
    return s;
}

const std::vector<KeyDoc>& ablate_schema() {
    static const std::vector<KeyDoc> s = with_model_keys(
        {
            {"data", "directory produced by gen", true},
            {"out", "output directory; default .", false},
            {"variants", "comma list of model families to sweep; default all "
                         "of them", false},
            {"seeds", "comma list of RNG seeds; default 7", false},
        },
        /*drop_grid_keys=*/true);
    return s;
}

const std::vector<KeyDoc>& plot_schema() {
    static const std::vector<KeyDoc> s = {
        {"beta", "association weight CSV written by train", true},
        {"out", "output directory; default .", false},
        {"mus", "comma list of binarization thresholds; default 0,0.1,0.3",
         false},
    };
    return s;
}

const std::vector<KeyDoc>& sd_schema() {
    static const std::vector<KeyDoc> s = {
        {"a", "first domain manifest", true},
        {"b", "second domain manifest", true},
    };
    return s;
}

ModelConfig model_config_from(const RunConfig& cfg) {
    ModelConfig mc;
    mc.variant = parse_model_variant(cfg.str_or("variant", "sasa-iv"));
    mc.task = parse_task(cfg.str_or("task", "regression"));
    mc.d_h = static_cast<int>(cfg.int_or("d_h", 32));
    mc.d_g = static_cast<int>(cfg.int_or("d_g", 0));
    mc.d_e = static_cast<int>(cfg.int_or("d_e", 16));
    mc.head_hidden = static_cast<int>(cfg.int_or("head_hidden", 64));
    mc.num_classes = static_cast<int>(cfg.int_or("num_classes", 2));
    mc.omega = cfg.real_or("omega", 1.0);
    mc.gamma = cfg.real_or("gamma", 0.5);
    mc.mu = cfg.real_or("mu", 0.08);
    mc.estimator = parse_estimator(cfg.str_or("estimator", "straight-through"));
    mc.aggregate = parse_aggregate(cfg.str_or("aggregate", "batch-mean"));
    mc.st_band = cfg.real_or("st_band", 1.0);
    mc.sigmoid_temperature = cfg.real_or("sigmoid_temperature", 0.1);
    mc.pool = parse_variant_pool(cfg.str_or("pool", "concat"));
    mc.lr = cfg.real_or("lr", 1e-3);
    mc.batch_size = static_cast<int>(cfg.int_or("batch_size", 64));
    mc.epochs = static_cast<int>(cfg.int_or("epochs", 10));
    mc.seed = static_cast<std::uint64_t>(cfg.int_or("seed", 7));
    mc.validate();
    return mc;
}

TimeSeriesBatch read_domain(const std::string& dir, const std::string& stem,
                            bool want_labels, DomainTag tag) {
    TimeSeriesBatch x = read_series_csv(join(dir, stem + ".csv"));
    if (want_labels) {
        x.labels = read_labels_csv(join(dir, stem + "_labels.csv"),
                                   x.batch_size());
    }
    x.tag = tag;
    return x;
}

void print_sd(std::ostream& out, const SDReport& r) {
    out << "tv_start " << fmt(r.tv_start) << "\n"
        << "structure_term " << fmt(r.structure_term) << "\n"
        << "strength_term " << fmt(r.strength_term) << "\n"
        << "total " << fmt(r.total) << "\n";
}

/// Per-pair association mass: column j of row i sums every lag slot of the
/// j -> i weights.
Mat pair_mass(const Mat& beta, int m, int n) {
    Mat mass = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int slot = 0; slot < (m - 1) * n; ++slot) {
            mass(i, beta_slot(i, slot, m, n).first) += beta(i, slot);
        }
    }
    return mass;
}

double task_metric(const SasaModel& model, const TimeSeriesBatch& x) {
    SasaModel& mut = const_cast<SasaModel&>(model);
    Mat scores = mut.predict_scores(x);
    Vec pred = model.cfg.task == Task::classification ? scores.col(1).eval()
                                                      : scores.col(0).eval();
    return evaluate(pred, *x.labels, model.cfg.task);
}

} // namespace

void cmd_gen(const RunConfig& cfg, std::ostream& out) {
    cfg.enforce_schema("gen", gen_schema());
    const std::string dir = cfg.str_or("out", ".");
    const int m = static_cast<int>(cfg.int_or("m", 6));
    const int n = static_cast<int>(cfg.int_or("n", 16));
    const int l_max = static_cast<int>(cfg.int_or("l_max", 3));
    const double density = cfg.real_or("density", 0.25);
    const Variation variation =
        parse_variation(cfg.str_or("variation", "all"));
    const int count = static_cast<int>(cfg.int_or("count", 1000));
    const Task task = parse_task(cfg.str_or("task", "regression"));
    const double noise_std = cfg.real_or("noise_std", 0.1);
    const auto seed = static_cast<std::uint64_t>(cfg.int_or("seed", 7));

    if (count < 1) throw SemanticError("gen: count must be positive");
    if (density < 0.0 || density > 1.0) {
        throw SemanticError("gen: density must lie in [0, 1]");
    }
    if (m < 2) throw SemanticError("gen: m must be at least 2");

    Rng rng(seed);
    const Mat a = random_adjacency(m, density, rng);
    auto [src_spec, tgt_spec] =
        sample_pair(a, variation, seed, n, l_max, task, noise_std);
    SyntheticDataset src = generate(src_spec, count, seed + 1);
    SyntheticDataset tgt = generate(tgt_spec, count, seed + 2);

    ensure_dir(dir);
    write_series_csv(src.batch, join(dir, "source.csv"));
    write_labels_csv(*src.batch.labels, join(dir, "source_labels.csv"));
    write_series_csv(tgt.batch, join(dir, "target.csv"));
    write_labels_csv(*tgt.batch.labels, join(dir, "target_labels.csv"));
    write_text(join(dir, "source_manifest.json"), spec_to_manifest(src.spec));
    write_text(join(dir, "target_manifest.json"), spec_to_manifest(tgt.spec));

    out << "wrote " << count << " samples per domain to " << dir << "\n";
    print_sd(out, structural_distance(src.spec, tgt.spec));
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
    cfg.enforce_schema("train", train_schema());
    const std::string data = cfg.require("data");
    const std::string dir = cfg.str_or("out", ".");

    TimeSeriesBatch src = read_domain(data, "source", true, DomainTag::source);
    TimeSeriesBatch tgt = read_domain(data, "target", false, DomainTag::target);
    if (tgt.vars() != src.vars() || tgt.steps() != src.steps()) {
        throw SemanticError("train: source and target shapes disagree");
    }

    ModelConfig mc = model_config_from(cfg);
    SasaModel model(mc, static_cast<int>(src.vars()),
                    static_cast<int>(src.steps()));
    FitResult fit = model.fit(src, tgt);

    ensure_dir(dir);
    std::ostringstream log;
    for (std::size_t e = 0; e < fit.history.size(); ++e) {
        const LossBreakdown& b = fit.history[e];
        log << (e + 1) << " " << fmt(b.l_y) << " " << fmt(b.l_alpha) << " "
            << fmt(b.l_beta) << " " << fmt(b.l_r) << " " << fmt(b.total)
            << "\n";
    }
    write_text(join(dir, "train_log.txt"), log.str());
    model.save(join(dir, "model.ckpt"));

    StructureReport rs = model.structures(src);
    StructureReport rt = model.structures(tgt);
    dump_matrix(rs.bin.adjacency, join(dir, "source_adjacency.csv"));
    dump_matrix(rs.summary.beta, join(dir, "source_beta.csv"));
    dump_matrix(rt.bin.adjacency, join(dir, "target_adjacency.csv"));
    dump_matrix(rt.summary.beta, join(dir, "target_beta.csv"));

    out << log.str();
    out << "steps " << fit.steps_taken << " skipped " << fit.steps_skipped
        << "\n";
    out << "saved " << join(dir, "model.ckpt") << "\n";
}

void cmd_eval(const RunConfig& cfg, std::ostream& out) {
    cfg.enforce_schema("eval", eval_schema());
    const std::string dir = cfg.str_or("out", ".");

    SasaModel model = SasaModel::load(cfg.require("model"));
    TimeSeriesBatch x = read_series_csv(cfg.require("data"));
    x.labels = read_labels_csv(cfg.require("labels"), x.batch_size());
    if (x.vars() != model.m || x.steps() != model.n) {
        std::ostringstream os;
        os << "eval: data is " << x.steps() << "x" << x.vars()
           << " but the model expects " << model.n << "x" << model.m;
        throw SemanticError(os.str());
    }

    const std::string metric =
        model.cfg.task == Task::classification ? "auc" : "rmse";
    const double value = task_metric(model, x);

    nlohmann::json doc;
    doc["metric"] = metric;
    doc["value"] = value;
    doc["samples"] = x.batch_size();
    doc["task"] = task_name(model.cfg.task);
    doc["variant"] = model_variant_name(model.cfg.variant);
    doc["mu"] = model.cfg.mu;

    out << "metric " << metric << " " << fmt(value) << "\n";
    if (cfg.has("manifest")) {
        const DomainSpec spec =
            spec_from_manifest(slurp_file(cfg.require("manifest")));
        if (spec.m != model.m) {
            throw SemanticError("eval: manifest variable count disagrees "
                                "with the model");
        }
        StructureReport rep = model.structures(x);
        const ScoreTriple sc =
            structure_score(rep.bin.adjacency, ground_truth_adjacency(spec));
        doc["structure_precision"] = sc.precision;
        doc["structure_recall"] = sc.recall;
        doc["structure_f1"] = sc.f1;
        out << "structure_precision " << fmt(sc.precision) << "\n"
            << "structure_recall " << fmt(sc.recall) << "\n"
            << "structure_f1 " << fmt(sc.f1) << "\n";
    }

    ensure_dir(dir);
    write_text(join(dir, "metrics.json"), doc.dump(2) + "\n");
    out << "saved " << join(dir, "metrics.json") << "\n";
}

void cmd_ablate(const RunConfig& cfg, std::ostream& out) {
    cfg.enforce_schema("ablate", ablate_schema());
    const std::string data = cfg.require("data");
    const std::string dir = cfg.str_or("out", ".");
    const std::vector<std::string> variants = split_list(
        cfg.str_or("variants",
                   "sasa-iv,sasa-iv-alpha,sasa-iv-beta,sasa-iv-gamma,"
                   "sasa-iv-c,sasa,sasa-alpha,sasa-beta,source-only"),
        "variants");
    const std::vector<std::string> seed_tokens =
        split_list(cfg.str_or("seeds", "7"), "seeds");
    std::vector<std::uint64_t> seeds;
    for (const auto& tok : seed_tokens) {
        RunConfig one;
        one.set("seed", tok);
        seeds.push_back(static_cast<std::uint64_t>(one.int_or("seed", 0)));
    }
    for (const auto& v : variants) parse_model_variant(v); // fail fast

    TimeSeriesBatch src = read_domain(data, "source", true, DomainTag::source);
    TimeSeriesBatch tgt = read_domain(data, "target", true, DomainTag::target);

    struct Row {
        std::string variant;
        std::uint64_t seed;
        std::string source, target, status;
    };
    std::vector<Row> rows;
    for (const auto& v : variants) {
        for (std::uint64_t s : seeds) {
            ModelConfig mc = model_config_from(cfg);
            mc.variant = parse_model_variant(v);
            mc.seed = s;
            Row row{v, s, "nan", "nan", "ok"};
            try {
                SasaModel model(mc, static_cast<int>(src.vars()),
                                static_cast<int>(src.steps()));
                model.fit(src, tgt);
                row.source = fmt(task_metric(model, src));
                row.target = fmt(task_metric(model, tgt));
            } catch (const std::exception& e) {
                row.status = "failed";
                out << "ablate: " << v << " seed " << s
                    << " failed: " << e.what() << "\n";
            }
            rows.push_back(std::move(row));
        }
    }

    ensure_dir(dir);
    std::ostringstream csv;
    csv << "variant,seed,source,target,status\n";
    for (const Row& r : rows) {
        csv << r.variant << "," << r.seed << "," << r.source << ","
            << r.target << "," << r.status << "\n";
    }
    write_text(join(dir, "ablation.csv"), csv.str());

    auto brief = [](const std::string& exact) {
        double v = 0.0;
        auto res = std::from_chars(exact.data(), exact.data() + exact.size(), v);
        if (res.ec != std::errc()) return exact;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    out << std::left << std::setw(16) << "variant" << std::setw(8) << "seed"
        << std::setw(14) << "source" << std::setw(14) << "target" << "status"
        << "\n";
    for (const Row& r : rows) {
        out << std::left << std::setw(16) << r.variant << std::setw(8)
            << r.seed << std::setw(14) << brief(r.source) << std::setw(14)
            << brief(r.target) << r.status << "\n";
    }
    out << "saved " << join(dir, "ablation.csv") << "\n";
}

void cmd_plot(const RunConfig& cfg, std::ostream& out) {
    cfg.enforce_schema("plot", plot_schema());
    const std::string dir = cfg.str_or("out", ".");
    const Mat beta = load_matrix(cfg.require("beta"));
    const int m = static_cast<int>(beta.rows());
    if (m < 2) throw SemanticError("plot: need at least two variables");
    if (beta.cols() % (m - 1) != 0 || beta.cols() < m - 1) {
        std::ostringstream os;
        os << "plot: " << beta.cols() << " columns cannot split into " << m - 1
           << " neighbor blocks";
        throw SemanticError(os.str());
    }
    const int n = static_cast<int>(beta.cols()) / (m - 1);

    ensure_dir(dir);
    const Mat mass = pair_mass(beta, m, n);
    StructureSummary summary{Mat::Zero(m, n), beta};
    for (const std::string& tok :
         split_list(cfg.str_or("mus", "0,0.1,0.3"), "mus")) {
        const double mu = parse_real_token(tok, "plot: mu");
        BinarizedStructure bin = binarize_structure(summary, mu);
        write_ppm(join(dir, "beta_mu" + tok + ".ppm"), render_heatmap(mass));
        write_ppm(join(dir, "adjacency_mu" + tok + ".ppm"),
                  render_heatmap(bin.adjacency, 1.0));
        out << "mu " << fmt(mu) << " lit "
            << static_cast<long>(bin.adjacency.sum()) << "\n";
    }
}

void cmd_sd(const RunConfig& cfg, std::ostream& out) {
    cfg.enforce_schema("sd", sd_schema());
    const DomainSpec a = spec_from_manifest(slurp_file(cfg.require("a")));
    const DomainSpec b = spec_from_manifest(slurp_file(cfg.require("b")));
    print_sd(out, structural_distance(a, b));
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"associative-structure transfer toolkit for multivariate "
                 "time series"};
    app.name("sasa");
    app.require_subcommand(1);

    struct SubState {
        std::string config_path;
        std::map<std::string, std::string> flags;
        const std::vector<KeyDoc>* schema = nullptr;
        void (*fn)(const RunConfig&, std::ostream&) = nullptr;
        CLI::App* sub = nullptr;
    };
    const std::pair<const char*, const char*> names[] = {
        {"gen", "sample a synthetic source/target domain pair"},
        {"train", "fit a model on a generated directory"},
        {"eval", "score a checkpoint on one domain"},
        {"ablate", "train a variant/seed grid and tabulate the metrics"},
        {"plot", "render association heatmaps at several thresholds"},
        {"sd", "print the generative distance between two manifests"},
    };
    std::map<std::string, SubState> states;
    states["gen"] = {"", {}, &gen_schema(), &cmd_gen, nullptr};
    states["train"] = {"", {}, &train_schema(), &cmd_train, nullptr};
    states["eval"] = {"", {}, &eval_schema(), &cmd_eval, nullptr};
    states["ablate"] = {"", {}, &ablate_schema(), &cmd_ablate, nullptr};
    states["plot"] = {"", {}, &plot_schema(), &cmd_plot, nullptr};
    states["sd"] = {"", {}, &sd_schema(), &cmd_sd, nullptr};

    for (const auto& [name, blurb] : names) {
        SubState& st = states[name];
        st.sub = app.add_subcommand(name, blurb);
        st.sub->add_option("--config", st.config_path,
                           "settings file of `key = value` lines; flags "
                           "override its entries");
        for (const KeyDoc& d : *st.schema) {
            const std::string key = d.key;
            SubState* stp = &st;
            st.sub->add_option(
                "--" + key,
                [stp, key](const CLI::results_t& res) {
                    stp->flags[key] = res.back();
                    return true;
                },
                d.doc);
        }
    }

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 3;
        }
        for (auto& [name, st] : states) {
            if (!st.sub->parsed()) continue;
            RunConfig cfg;
            if (!st.config_path.empty()) {
                cfg = RunConfig::from_file(st.config_path);
            }
            for (const auto& [k, v] : st.flags) cfg.set(k, v);
            bool has_out = false;
            for (const KeyDoc& d : *st.schema) has_out |= d.key == "out";
            if (const char* env = std::getenv("SASA_OUT");
                has_out && env && *env) {
                cfg.set("out", env);
            }
            st.fn(cfg, out);
            return 0;
        }
        err << "error: no command given\n";
        return 3;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SemanticError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sasa
