#include "sasa/metrics.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace sasa;

namespace {

// Independent oracle: Simpson integration at a finer step than the
// implementation's trapezoid grid.
double simpson_tv(double m1, double s1, double m2, double s2) {
    auto pdf = [](double x, double m, double s) {
        const double z = (x - m) / s;
        return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * M_PI));
    };
    const double lo = std::min(m1, m2) - 8.0 * (s1 + s2);
    const double hi = std::max(m1, m2) + 8.0 * (s1 + s2);
    const long n = 2 * static_cast<long>((hi - lo) / 4e-4);
    const double h = (hi - lo) / static_cast<double>(n);
    auto f = [&](double x) {
        return 0.5 * std::abs(pdf(x, m1, s1) - pdf(x, m2, s2));
    };
    double acc = f(lo) + f(hi);
    for (long k = 1; k < n; ++k) {
        acc += f(lo + h * static_cast<double>(k)) * (k % 2 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

DomainSpec base_spec() {
    Rng rng(31);
    Mat a = random_adjacency(4, 0.4, rng);
    return sample_pair(a, Variation::all, 5, 8).first;
}

} // namespace

TEST_CASE("gaussian total variation matches closed forms and an independent "
          "integrator") {
    // Equal spreads: TV = erf(|m1 - m2| / (2*sqrt(2)*s)).
    for (auto [dm, s] : {std::pair{0.7, 0.5}, {2.0, 1.3}, {0.05, 0.2}}) {
        const double expect = std::erf(dm / (2.0 * std::sqrt(2.0) * s));
        CHECK(gaussian_tv(0.0, s, dm, s) ==
              doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK(gaussian_tv(0.3, 0.7, 0.3, 0.7) == 0.0);
    CHECK(gaussian_tv(0.0, 0.5, 100.0, 0.5) == doctest::Approx(1.0));
    // General case against Simpson.
    CHECK(gaussian_tv(0.1, 0.4, -0.3, 1.1) ==
          doctest::Approx(simpson_tv(0.1, 0.4, -0.3, 1.1)).epsilon(1e-6));
    CHECK(gaussian_tv(1.0, 2.0, 1.0, 0.25) ==
          doctest::Approx(simpson_tv(1.0, 2.0, 1.0, 0.25)).epsilon(1e-6));
    // Symmetry and range.
    CHECK(gaussian_tv(0.2, 0.3, -0.5, 0.9) ==
          gaussian_tv(-0.5, 0.9, 0.2, 0.3));
    CHECK(gaussian_tv(0.0, 0.01, 5.0, 3.0) <= 1.0);
    CHECK_THROWS_AS(gaussian_tv(0.0, 0.0, 1.0, 1.0), SemanticError);
}

TEST_CASE("structural distance: identity, symmetry, additivity") {
    DomainSpec s = base_spec();
    SDReport self = structural_distance(s, s);
    CHECK(self.total == 0.0);

    Rng rng(32);
    Mat a = random_adjacency(4, 0.4, rng);
    auto [s1, s2] = sample_pair(a, Variation::all, 9, 8);
    SDReport fwd = structural_distance(s1, s2);
    SDReport rev = structural_distance(s2, s1);
    CHECK(fwd.tv_start == rev.tv_start);
    CHECK(fwd.structure_term == rev.structure_term);
    CHECK(fwd.strength_term == rev.strength_term);
    CHECK(fwd.total ==
          fwd.tv_start + fwd.structure_term + fwd.strength_term);
    CHECK(fwd.tv_start >= 0.0);
    CHECK(fwd.tv_start <= 1.0);

    DomainSpec other = s;
    other.m = 5;
    CHECK_THROWS_AS(structural_distance(s, other), SemanticError);
}

TEST_CASE("two flipped edges with silent strengths cost exactly 2") {
    DomainSpec s1 = base_spec();
    s1.a.setZero();
    s1.w.setZero();
    s1.lags.setConstant(1);
    DomainSpec s2 = s1;
    s2.a(0, 1) = 1.0;
    s2.a(2, 3) = 1.0; // edges exist but carry zero weight
    SDReport r = structural_distance(s1, s2);
    CHECK(r.tv_start == 0.0);
    CHECK(r.strength_term == 0.0);
    CHECK(r.structure_term == 2.0);
    CHECK(r.total == 2.0);
}

TEST_CASE("metric axioms hold over random triples") {
    Rng rng(33);
    Mat a = random_adjacency(5, 0.3, rng);
    std::vector<DomainSpec> pool;
    for (Variation v : {Variation::strengths, Variation::lags,
                        Variation::offsets, Variation::start, Variation::all}) {
        auto [ds, dt] = sample_pair(a, v, 40 + static_cast<int>(v), 10);
        pool.push_back(ds);
        pool.push_back(dt);
    }
    AxiomCheck report = check_metric_axioms(pool, 100, 7);
    CHECK(report.triples == 100);
    CHECK(report.ok());
    INFO("violations: " << report.violations.size());

    std::vector<DomainSpec> degenerate = {pool[0], pool[0], pool[0]};
    AxiomCheck same = check_metric_axioms(degenerate, 10, 7);
    CHECK(same.ok());
    CHECK(structural_distance(pool[0], pool[0]).total == 0.0);

    CHECK_THROWS_AS(check_metric_axioms({pool[0], pool[1]}, 10, 7),
                    SemanticError);
}

TEST_CASE("rmse closed forms") {
    Vec y{{1.0, -2.0, 0.5}};
    CHECK(rmse(y, y) == 0.0);
    Vec off = y.array() + 1.0;
    CHECK(rmse(off, y) == doctest::Approx(1.0));
    CHECK(evaluate(off, y, Task::regression) == rmse(off, y));
    Vec shorter{{1.0}};
    CHECK_THROWS_AS(rmse(shorter, y), SemanticError);
}

TEST_CASE("auc: ranking quality, ties, and degenerate labels") {
    Vec labels{{0.0, 0.0, 1.0, 1.0}};
    Vec perfect{{0.1, 0.2, 0.7, 0.9}};
    CHECK(auc(perfect, labels) == 1.0);
    Vec inverted{{0.9, 0.7, 0.2, 0.1}};
    CHECK(auc(inverted, labels) == 0.0);
    Vec constant{{0.4, 0.4, 0.4, 0.4}};
    CHECK(auc(constant, labels) == 0.5);
    // Hand-ranked: positive scores rank 2 and 4 -> (6 - 3) / 4.
    Vec mixed{{0.1, 0.4, 0.35, 0.8}};
    Vec lab2{{0.0, 0.0, 1.0, 1.0}};
    CHECK(auc(mixed, lab2) == doctest::Approx(0.75));
    // Monotone transform invariance.
    Vec transformed = (mixed.array() * 2.0).exp();
    CHECK(auc(transformed, lab2) == auc(mixed, lab2));

    Vec ones{{1.0, 1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(auc(perfect, ones), SemanticError);
    Vec notbin{{0.0, 0.5, 1.0, 1.0}};
    CHECK_THROWS_AS(auc(perfect, notbin), SemanticError);
    CHECK(evaluate(perfect, labels, Task::classification) == 1.0);
}

TEST_CASE("spearman handles ties and degenerate input") {
    Vec a{{1.0, 2.0, 3.0, 4.0}};
    Vec up{{10.0, 20.0, 30.0, 40.0}};
    Vec down{{4.0, 3.0, 2.0, 1.0}};
    CHECK(spearman(a, up) == doctest::Approx(1.0));
    CHECK(spearman(a, down) == doctest::Approx(-1.0));
    Vec flat{{5.0, 5.0, 5.0, 5.0}};
    CHECK(spearman(a, flat) == 0.0);
    Vec tied{{1.0, 1.0, 2.0, 3.0}};
    CHECK(spearman(tied, tied) == doctest::Approx(1.0));
}

TEST_CASE("structure recovery scores") {
    Mat truth = Mat::Zero(3, 3);
    truth(0, 1) = truth(1, 2) = 1.0;
    CHECK(structure_score(truth, truth).f1 == 1.0);
    CHECK(structure_score(truth, truth).precision == 1.0);
    CHECK(structure_score(truth, truth).recall == 1.0);

    Mat none = Mat::Zero(3, 3);
    ScoreTriple empty_rec = structure_score(none, truth);
    CHECK(empty_rec.precision == 0.0);
    CHECK(empty_rec.recall == 0.0);
    CHECK(empty_rec.f1 == 0.0);
    ScoreTriple both_empty = structure_score(none, none);
    CHECK(both_empty.precision == 1.0);
    CHECK(both_empty.recall == 1.0);

    Mat complement = Mat::Ones(3, 3) - Mat::Identity(3, 3) - truth;
    CHECK(structure_score(complement, truth).precision == 0.0);

    Mat half = Mat::Zero(3, 3);
    half(0, 1) = 1.0;
    half(2, 0) = 1.0;
    ScoreTriple s = structure_score(half, truth);
    CHECK(s.precision == doctest::Approx(0.5));
    CHECK(s.recall == doctest::Approx(0.5));
    CHECK(s.f1 == doctest::Approx(0.5));

    Mat loops = Mat::Identity(3, 3);
    CHECK_THROWS_AS(structure_score(loops, truth), SemanticError);
    Mat graded = Mat::Zero(3, 3);
    graded(0, 1) = 0.4;
    CHECK_THROWS_AS(structure_score(graded, truth), SemanticError);
}

TEST_CASE("bound diagnostic ranks a strengths sweep perfectly against "
          "matching gaps") {
    DomainSpec s = base_spec();
    std::vector<std::pair<DomainSpec, DomainSpec>> pairs;
    std::vector<std::pair<double, double>> risks;
    double prev = -1.0;
    for (int k = 0; k < 5; ++k) {
        DomainSpec t = s;
        t.w *= 1.0 - 0.15 * static_cast<double>(k);
        pairs.emplace_back(s, t);
        const double d = structural_distance(s, t).total;
        CHECK(d >= prev); // nondecreasing along the sweep
        prev = d;
        risks.emplace_back(0.1, 0.1 + 0.01 * static_cast<double>(k));
    }
    BoundDiagnostic diag = bound_diagnostic(pairs, risks);
    REQUIRE(diag.distances.size() == 5);
    CHECK(diag.gaps[0] == doctest::Approx(0.0));
    CHECK(diag.rank_correlation == doctest::Approx(1.0));

    pairs.resize(2);
    risks.resize(2);
    CHECK_THROWS_AS(bound_diagnostic(pairs, risks), SemanticError);
}
