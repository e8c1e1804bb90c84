#include "sasa/synth.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace sasa {

using nlohmann::json;

Task parse_task(const std::string& s) {
    if (s == "regression") return Task::regression;
    if (s == "classification") return Task::classification;
    throw SchemaError("unknown task '" + s +
                      "' (expected regression|classification)");
}

std::string task_name(Task t) {
    return t == Task::regression ? "regression" : "classification";
}

Variation parse_variation(const std::string& s) {
    if (s == "strengths") return Variation::strengths;
    if (s == "lags") return Variation::lags;
    if (s == "offsets") return Variation::offsets;
    if (s == "start") return Variation::start;
    if (s == "all") return Variation::all;
    throw SchemaError("unknown variation '" + s +
                      "' (expected strengths|lags|offsets|start|all)");
}

std::string variation_name(Variation v) {
    switch (v) {
        case Variation::strengths: return "strengths";
        case Variation::lags: return "lags";
        case Variation::offsets: return "offsets";
        case Variation::start: return "start";
        case Variation::all: return "all";
    }
    return "?";
}

void DomainSpec::validate() const {
    auto fail = [](const std::string& msg) { throw SemanticError("domain spec: " + msg); };
    if (m < 2) fail("needs at least 2 variables");
    if (n < 1) fail("window length must be >= 1");
    if (l_max < 1) fail("l_max must be >= 1");
    if (a.rows() != m || a.cols() != m) fail("adjacency shape mismatch");
    if (w.rows() != m || w.cols() != m) fail("strength shape mismatch");
    if (lags.rows() != m || lags.cols() != m) fail("lag shape mismatch");
    if (offsets.size() != m || x0_mean.size() != m || x0_std.size() != m ||
        label_weights.size() != m) {
        fail("per-variable vector length mismatch");
    }
    for (int i = 0; i < m; ++i) {
        if (a(i, i) != 0.0) fail("adjacency diagonal must be zero");
        for (int j = 0; j < m; ++j) {
            if (a(i, j) != 0.0 && a(i, j) != 1.0) fail("adjacency must be binary");
            if (a(i, j) == 0.0 && w(i, j) != 0.0) {
                fail("strength outside adjacency support");
            }
            if (lags(i, j) < 1 || lags(i, j) > l_max) {
                fail("lag outside [1, l_max]");
            }
        }
        if (offsets(i) < 0) fail("offsets must be >= 0");
        if (x0_std(i) < 0.0) fail("x0_std must be >= 0");
    }
    if (w.cwiseAbs().rowwise().sum().maxCoeff() >= 1.0) {
        fail("unstable strengths (max absolute row sum must stay below 1)");
    }
    if (noise_std < 0.0) fail("noise_std must be >= 0");
}

namespace {

template <typename T>
bool exact_eq(const T& a, const T& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.array() == b.array()).all();
}

} // namespace

bool DomainSpec::operator==(const DomainSpec& o) const {
    return m == o.m && n == o.n && l_max == o.l_max && exact_eq(a, o.a) &&
           exact_eq(w, o.w) && exact_eq(lags, o.lags) &&
           exact_eq(offsets, o.offsets) && exact_eq(x0_mean, o.x0_mean) &&
           exact_eq(x0_std, o.x0_std) && noise_std == o.noise_std &&
           exact_eq(label_weights, o.label_weights) && task == o.task &&
           seed == o.seed;
}

Mat random_adjacency(int m, double density, Rng& rng) {
    if (m < 2) throw SemanticError("adjacency needs at least 2 variables");
    if (density < 0.0 || density > 1.0) {
        throw SemanticError("edge density must lie in [0, 1]");
    }
    Mat a = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i != j && rng.bernoulli(density)) a(i, j) = 1.0;
        }
    }
    return a;
}

namespace {

constexpr double kMaxRowSum = 0.85;

/// Signed magnitudes on the adjacency support; rows are damped to keep the
/// absolute row sum at or below kMaxRowSum, which guarantees stability.
Mat sample_strengths(const Mat& a, Rng& rng) {
    const int m = static_cast<int>(a.rows());
    Mat w = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (a(i, j) != 0.0) {
                const double mag = rng.uniform(0.35, 0.8);
                w(i, j) = rng.bernoulli(0.5) ? mag : -mag;
            }
        }
        const double s = w.row(i).cwiseAbs().sum();
        if (s > kMaxRowSum) w.row(i) *= kMaxRowSum / s;
    }
    return w;
}

DomainSpec sample_base(const Mat& shared_a, Rng& rng, int n, int l_max,
                       Task task, double noise_std, std::uint64_t seed) {
    DomainSpec s;
    s.m = static_cast<int>(shared_a.rows());
    s.n = n;
    s.l_max = l_max;
    s.a = shared_a;
    s.w = sample_strengths(shared_a, rng);
    s.lags.resize(s.m, s.m);
    for (int i = 0; i < s.m; ++i) {
        for (int j = 0; j < s.m; ++j) {
            s.lags(i, j) = static_cast<int>(rng.uniform_int(1, l_max));
        }
    }
    s.offsets.resize(s.m);
    s.x0_mean.resize(s.m);
    s.x0_std.resize(s.m);
    s.label_weights.resize(s.m);
    for (int i = 0; i < s.m; ++i) {
        s.offsets(i) = static_cast<int>(rng.uniform_int(0, 2));
        // Zero start means keep label scores symmetric around zero, which is
        // what makes classification labels balanced for any seed.
        s.x0_mean(i) = 0.0;
        s.x0_std(i) = rng.uniform(0.2, 0.5);
        s.label_weights(i) = rng.normal(0.0, 1.0);
    }
    s.noise_std = noise_std;
    s.task = task;
    s.seed = seed;
    return s;
}

void vary_strengths(DomainSpec& tgt, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Mat w = sample_strengths(tgt.a, rng);
        if (w.cwiseAbs().rowwise().sum().maxCoeff() < 1.0) {
            tgt.w = w;
            return;
        }
    }
    throw SemanticError("sample_pair: could not draw stable target strengths "
                        "after 100 tries");
}

void vary_lags(DomainSpec& tgt, Rng& rng) {
    for (int i = 0; i < tgt.m; ++i) {
        for (int j = 0; j < tgt.m; ++j) {
            if (tgt.a(i, j) != 0.0) {
                const int delta = rng.bernoulli(0.5) ? 1 : -1;
                tgt.lags(i, j) =
                    std::clamp(tgt.lags(i, j) + delta, 1, tgt.l_max);
            }
        }
    }
}

void vary_offsets(DomainSpec& tgt, Rng& rng) {
    for (int i = 0; i < tgt.m; ++i) {
        tgt.offsets(i) += static_cast<int>(rng.uniform_int(1, 2));
    }
}

void vary_start(DomainSpec& tgt, Rng& rng) {
    for (int i = 0; i < tgt.m; ++i) {
        const double f = rng.uniform(1.6, 2.4);
        tgt.x0_mean(i) *= f;
        tgt.x0_std(i) *= f;
    }
}

} // namespace

std::pair<DomainSpec, DomainSpec> sample_pair(const Mat& shared_a,
                                              Variation variation,
                                              std::uint64_t seed, int n,
                                              int l_max, Task task,
                                              double noise_std) {
    for (Eigen::Index i = 0; i < shared_a.rows(); ++i) {
        for (Eigen::Index j = 0; j < shared_a.cols(); ++j) {
            if (shared_a(i, j) != 0.0 && shared_a(i, j) != 1.0) {
                throw SemanticError("sample_pair: adjacency must be binary");
            }
        }
        if (shared_a(i, i) != 0.0) {
            throw SemanticError("sample_pair: adjacency diagonal must be zero");
        }
    }
    Rng root(seed);
    Rng src_rng = root.derive(1);
    Rng tgt_rng = root.derive(2);

    DomainSpec src = sample_base(shared_a, src_rng, n, l_max, task, noise_std, seed);
    DomainSpec tgt = src;
    switch (variation) {
        case Variation::strengths: vary_strengths(tgt, tgt_rng); break;
        case Variation::lags: vary_lags(tgt, tgt_rng); break;
        case Variation::offsets: vary_offsets(tgt, tgt_rng); break;
        case Variation::start: vary_start(tgt, tgt_rng); break;
        case Variation::all:
            vary_strengths(tgt, tgt_rng);
            vary_lags(tgt, tgt_rng);
            vary_offsets(tgt, tgt_rng);
            vary_start(tgt, tgt_rng);
            break;
    }
    src.validate();
    tgt.validate();
    return {src, tgt};
}

SyntheticDataset generate(const DomainSpec& spec, int count,
                          std::uint64_t seed) {
    spec.validate();
    if (count < 1) throw SemanticError("generate: count must be >= 1");

    SyntheticDataset ds;
    ds.spec = spec;
    ds.batch.values.reserve(count);
    Vec labels(count);
    Rng root(seed);

    for (int b = 0; b < count; ++b) {
        Rng rng = root.derive(static_cast<std::uint64_t>(b));
        Vec x0(spec.m);
        for (int i = 0; i < spec.m; ++i) {
            x0(i) = rng.normal(spec.x0_mean(i), spec.x0_std(i));
        }
        Mat x(spec.n, spec.m);
        auto past = [&](int s, int j) { // value of x^j_s with s possibly <= 0
            return s >= 1 ? x(s - 1, j) : x0(j);
        };
        for (int t = 1; t <= spec.n; ++t) {
            for (int i = 0; i < spec.m; ++i) {
                if (t <= spec.offsets(i)) {
                    x(t - 1, i) = x0(i);
                    continue;
                }
                const bool has_parents = spec.a.row(i).sum() > 0.0;
                double v = has_parents ? 0.0 : x0(i);
                if (has_parents) {
                    for (int j = 0; j < spec.m; ++j) {
                        if (spec.a(i, j) != 0.0) {
                            v += spec.w(i, j) * past(t - spec.lags(i, j), j);
                        }
                    }
                }
                if (spec.noise_std > 0.0) {
                    v += rng.normal(0.0, spec.noise_std);
                }
                x(t - 1, i) = v;
            }
        }
        double y = spec.label_weights.dot(x.row(spec.n - 1));
        if (spec.noise_std > 0.0) y += rng.normal(0.0, spec.noise_std);
        labels(b) = spec.task == Task::regression ? y : (y > 0.0 ? 1.0 : 0.0);
        ds.batch.values.push_back(std::move(x));
    }
    ds.batch.labels = std::move(labels);
    ds.batch.tag = DomainTag::source;
    return ds;
}

Mat ground_truth_adjacency(const DomainSpec& spec) { return spec.a; }

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat json_to_mat(const json& j, const char* key) {
    if (!j.is_array() || j.empty()) {
        throw SchemaError(std::string("manifest: '") + key +
                          "' must be a non-empty array of rows");
    }
    const std::size_t cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw SchemaError(std::string("manifest: '") + key +
                              "' rows are ragged");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) {
                throw SchemaError(std::string("manifest: '") + key +
                                  "' holds a non-numeric entry");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                j[i][c].get<double>();
        }
    }
    return m;
}

Vec json_to_vec(const json& j, const char* key) {
    if (!j.is_array()) {
        throw SchemaError(std::string("manifest: '") + key +
                          "' must be an array");
    }
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw SchemaError(std::string("manifest: '") + key +
                              "' holds a non-numeric entry");
        }
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

const json& need(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(std::string("manifest: missing key '") + key + "'");
    }
    return *it;
}

} // namespace

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

} // namespace

std::string spec_to_manifest(const DomainSpec& spec) {
    json j;
    j["format"] = "sasa-domain-manifest";
    j["version"] = 1;
    j["m"] = spec.m;
    j["n"] = spec.n;
    j["l_max"] = spec.l_max;
    j["adjacency"] = mat_to_json(spec.a);
    j["strengths"] = mat_to_json(spec.w);
    j["lags"] = mat_to_json(spec.lags.cast<double>());
    json off = json::array();
    for (int i = 0; i < spec.m; ++i) off.push_back(spec.offsets(i));
    j["offsets"] = std::move(off);
    j["x0_mean"] = vec_to_json(spec.x0_mean);
    j["x0_std"] = vec_to_json(spec.x0_std);
    j["noise_std"] = spec.noise_std;
    j["label_weights"] = vec_to_json(spec.label_weights);
    j["task"] = task_name(spec.task);
    j["seed"] = spec.seed;
    return j.dump(2) + "\n";
}

DomainSpec spec_from_manifest(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("manifest: invalid JSON: ") + e.what());
    }
    if (need(j, "format").get<std::string>() != "sasa-domain-manifest") {
        throw SchemaError("manifest: unrecognized format tag");
    }
    DomainSpec s;
    s.m = need(j, "m").get<int>();
    s.n = need(j, "n").get<int>();
    s.l_max = need(j, "l_max").get<int>();
    s.a = json_to_mat(need(j, "adjacency"), "adjacency");
    s.w = json_to_mat(need(j, "strengths"), "strengths");
    Mat lagd = json_to_mat(need(j, "lags"), "lags");
    s.lags = lagd.cast<int>();
    if ((s.lags.cast<double>() - lagd).cwiseAbs().maxCoeff() != 0.0) {
        throw SchemaError("manifest: 'lags' holds non-integer entries");
    }
    Vec offd = json_to_vec(need(j, "offsets"), "offsets");
    s.offsets = offd.cast<int>();
    s.x0_mean = json_to_vec(need(j, "x0_mean"), "x0_mean");
    s.x0_std = json_to_vec(need(j, "x0_std"), "x0_std");
    s.noise_std = need(j, "noise_std").get<double>();
    s.label_weights = json_to_vec(need(j, "label_weights"), "label_weights");
    s.task = parse_task(need(j, "task").get<std::string>());
    s.seed = need(j, "seed").get<std::uint64_t>();
    s.validate();
    return s;
}

} // namespace sasa
