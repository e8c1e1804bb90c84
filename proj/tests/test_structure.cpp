#include "sasa/structure.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace sasa;
using ad::Tape;
using ad::Var;
using sasa::testutil::random_mat;

namespace {

/// Bank whose representations are handed in directly, one [B x d] matrix per
/// (variable, length) slot.
SegmentBank make_bank(Tape& t, const std::vector<std::vector<Mat>>& reps) {
    SegmentBank bank;
    bank.m = static_cast<int>(reps.size());
    bank.n = static_cast<int>(reps[0].size());
    bank.d_h = static_cast<int>(reps[0][0].cols());
    bank.reps.resize(bank.m);
    for (int i = 0; i < bank.m; ++i) {
        for (const Mat& r : reps[i]) {
            bank.reps[i].push_back(t.constant(r));
        }
    }
    return bank;
}

Var identity_leaf(Tape& t, int d) { return t.constant(Mat::Identity(d, d)); }

} // namespace

TEST_CASE("beta_slot skips the self column and walks lags fastest") {
    // m = 4, n = 3, target variable 1: neighbors are 0, 2, 3.
    CHECK(beta_slot(1, 0, 4, 3) == std::pair<int, int>{0, 1});
    CHECK(beta_slot(1, 2, 4, 3) == std::pair<int, int>{0, 3});
    CHECK(beta_slot(1, 3, 4, 3) == std::pair<int, int>{2, 1});
    CHECK(beta_slot(1, 8, 4, 3) == std::pair<int, int>{3, 3});
    CHECK(beta_slot(0, 0, 4, 3) == std::pair<int, int>{1, 1});
    CHECK_THROWS_AS(beta_slot(0, 9, 4, 3), NumericError);
}

TEST_CASE("intra_attention: identical segments give uniform weights") {
    Tape t;
    const int b = 2, n = 4, d = 3;
    Rng rng(1);
    Mat h = random_mat(rng, b, d); // same rep for every length
    SegmentBank bank = make_bank(t, {{h, h, h, h}, {h, h, h, h}});
    auto alpha = intra_attention(bank, identity_leaf(t, d), identity_leaf(t, d));
    REQUIRE(alpha.size() == 2);
    for (const Var& a : alpha) {
        CHECK(((a.value().array() - 1.0 / n).abs() < 1e-12).all());
    }
}

TEST_CASE("intra_attention: single segment and dominant segment") {
    Tape t;
    const int b = 2, d = 3;
    Rng rng(2);
    SegmentBank single = make_bank(t, {{random_mat(rng, b, d)},
                                       {random_mat(rng, b, d)}});
    auto alpha1 = intra_attention(single, identity_leaf(t, d),
                                  identity_leaf(t, d));
    for (const Var& a : alpha1) {
        CHECK(((a.value().array() - 1.0).abs() < 1e-12).all());
    }

    // Scalar reps make scores h_tau * mean(h); 10 dominates by more than 1.
    Mat big = Mat::Constant(1, 1, 10.0);
    Mat s1 = Mat::Constant(1, 1, 0.1);
    Mat s2 = Mat::Constant(1, 1, 0.2);
    Tape t2;
    SegmentBank bank = make_bank(t2, {{big, s1, s2}, {s1, s1, s1}});
    auto alpha = intra_attention(bank, identity_leaf(t2, 1),
                                 identity_leaf(t2, 1));
    CHECK(alpha[0].value()(0, 0) == doctest::Approx(1.0));
    CHECK(alpha[0].value()(0, 1) == doctest::Approx(0.0));
    CHECK(alpha[0].value()(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("summarize degenerate weightings") {
    Tape t;
    const int b = 2, d = 3;
    Rng rng(3);
    Mat h1 = random_mat(rng, b, d), h2 = random_mat(rng, b, d),
        h3 = random_mat(rng, b, d);
    SegmentBank bank = make_bank(t, {{h1, h2, h3}, {h3, h2, h1}});

    // One-hot at tau = 2 picks that projected segment alone.
    Mat onehot = Mat::Zero(b, 3);
    onehot.col(2).setOnes();
    Mat wv = random_mat(rng, d, d);
    auto z = summarize(bank, {t.constant(onehot), t.constant(onehot)},
                       t.constant(wv));
    CHECK((z[0].value() - h3 * wv).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((z[1].value() - h1 * wv).cwiseAbs().maxCoeff() < 1e-12);

    // Uniform weights give the mean of projections.
    Mat uni = Mat::Constant(b, 3, 1.0 / 3.0);
    auto zu = summarize(bank, {t.constant(uni), t.constant(uni)},
                        t.constant(wv));
    Mat want = ((h1 + h2 + h3) / 3.0) * wv;
    CHECK((zu[0].value() - want).cwiseAbs().maxCoeff() < 1e-12);

    // Identity projection with a single segment passes it through.
    Tape t2;
    SegmentBank one = make_bank(t2, {{h1}, {h2}});
    auto zi = summarize(one, {t2.constant(Mat::Ones(b, 1)),
                              t2.constant(Mat::Ones(b, 1))},
                        identity_leaf(t2, d));
    CHECK((zi[0].value() - h1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inter_attention: orthogonal summaries spread uniformly, parallel "
          "segments dominate") {
    const int b = 1, d = 4;
    Tape t;
    // Variable reps along axis e0/e1; summaries along e2/e3: all cosines 0.
    Mat e0 = Mat::Zero(b, d), e1 = Mat::Zero(b, d), e2 = Mat::Zero(b, d),
        e3 = Mat::Zero(b, d);
    e0(0, 0) = e1(0, 1) = e2(0, 2) = e3(0, 3) = 1.0;
    SegmentBank bank = make_bank(t, {{e0, e0}, {e1, e1}, {e0, e1}});
    auto beta = inter_attention({t.constant(e2), t.constant(e3),
                                 t.constant(e2)},
                                bank);
    REQUIRE(beta.size() == 3);
    for (const Var& bi : beta) {
        REQUIRE(bi.cols() == 4); // (m-1) * n slots, self excluded
        CHECK(((bi.value().array() - 0.25).abs() < 1e-12).all());
    }

    // Summary parallel to exactly one neighbor segment: that slot wins.
    Tape t2;
    SegmentBank bank2 = make_bank(t2, {{e0, e0}, {e1, e0}, {e3, e3}});
    auto beta2 = inter_attention({t2.constant(e1), t2.constant(e2),
                                  t2.constant(e2)},
                                 bank2);
    // Target 0's slots: (j=1, tau=1), (j=1, tau=2), (j=2, tau=1), (j=2, tau=2).
    const Mat& b0 = beta2[0].value();
    CHECK(b0(0, 0) > b0(0, 1));
    CHECK(b0(0, 0) > b0(0, 2));
    CHECK(b0(0, 1) == doctest::Approx(0.0));
    Eigen::Index argmax;
    b0.row(0).maxCoeff(&argmax);
    CHECK(argmax == 0);
}

TEST_CASE("structure_representation composes one-hot associations") {
    Tape t;
    const int b = 2, d = 3;
    Rng rng(5);
    Mat h10 = random_mat(rng, b, d), h11 = random_mat(rng, b, d);
    Mat h00 = random_mat(rng, b, d), h01 = random_mat(rng, b, d);
    SegmentBank bank = make_bank(t, {{h00, h01}, {h10, h11}});

    // M = 2: target 0's only neighbor is 1; one-hot at (j=1, tau=2).
    Mat onehot = Mat::Zero(b, 2);
    onehot.col(1).setOnes();
    Mat uniform = Mat::Constant(b, 2, 0.5);
    auto u = structure_representation(
        {t.constant(onehot), t.constant(uniform)}, bank);
    CHECK((u[0].value() - h11).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u[1].value() - 0.5 * (h00 + h01)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("simplex invariants hold on random end-to-end forwards") {
    Rng rng(6);
    const int b = 3, n = 5, m = 4, d = 6;
    TimeSeriesBatch batch;
    for (int s = 0; s < b; ++s) batch.values.push_back(random_mat(rng, n, m));
    Rng prng(7);
    SegmentEncoderParams enc(m, d, prng);
    AttentionParams attn(d, prng);

    Tape tape;
    SegmentBank bank = encode_bank(tape, batch, enc);
    StructureEstimate est = structure_forward(tape, bank, attn);

    for (int i = 0; i < m; ++i) {
        const Mat& a = est.alpha[i].value();
        const Mat& bt = est.beta[i].value();
        CHECK(bt.cols() == (m - 1) * n);
        for (int r = 0; r < b; ++r) {
            CHECK(std::abs(a.row(r).sum() - 1.0) < 1e-6);
            CHECK(a.row(r).minCoeff() >= 0.0);
            CHECK(std::abs(bt.row(r).sum() - 1.0) < 1e-6);
            CHECK(bt.row(r).minCoeff() >= 0.0);
        }
        CHECK(est.z[i].cols() == d);
        CHECK(est.u[i].cols() == d);
    }
}

TEST_CASE("sparse rows: Gaussian scores of spread >= 2 leave zeros") {
    Rng rng(8);
    Tape t;
    Mat scores(20, 8);
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 8; ++c) scores(r, c) = rng.normal(0.0, 1.0);
        // Force spread >= 2 so the sparsity property is guaranteed territory.
        Eigen::Index lo, hi;
        scores.row(r).minCoeff(&lo);
        scores.row(r).maxCoeff(&hi);
        if (scores(r, hi) - scores(r, lo) < 2.0) scores(r, hi) += 2.0;
    }
    Var p = ad::sparsemax_rows(t.constant(scores));
    for (int r = 0; r < 20; ++r) {
        CHECK(p.value().row(r).minCoeff() == 0.0);
    }
}

TEST_CASE("binarize_structure thresholds and aggregates lags into edges") {
    const int m = 3, n = 2;
    StructureSummary s;
    s.alpha = Mat::Constant(m, n, 0.5);
    s.beta = Mat::Zero(m, (m - 1) * n);
    // Target 0: weight on neighbor 1 lag 2 and neighbor 2 lag 1.
    s.beta(0, 1) = 0.6;
    s.beta(0, 2) = 0.4;
    // Target 1: nothing above threshold; target 2: neighbor 0 on both lags.
    s.beta(1, 0) = 0.05;
    s.beta(2, 0) = 0.3;
    s.beta(2, 1) = 0.7;

    auto bin = binarize_structure(s, 0.1);
    CHECK(bin.adjacency(0, 1) == 1.0);
    CHECK(bin.adjacency(0, 2) == 1.0);
    CHECK(bin.adjacency(1, 0) == 0.0);
    CHECK(bin.adjacency(2, 0) == 1.0);
    CHECK(bin.adjacency.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(bin.alpha_bin.sum() == m * n); // all 0.5 > 0.1

    // One-hot beta rows produce exactly one incoming edge.
    StructureSummary oh;
    oh.alpha = Mat::Constant(m, n, 1.0 / n);
    oh.beta = Mat::Zero(m, (m - 1) * n);
    oh.beta(0, 3) = 1.0;
    oh.beta(1, 0) = 1.0;
    oh.beta(2, 2) = 1.0;
    auto bin2 = binarize_structure(oh, 0.5);
    CHECK(bin2.adjacency.sum() == 3.0);
    for (int i = 0; i < m; ++i) CHECK(bin2.adjacency.row(i).sum() == 1.0);

    // mu = 0 with strictly positive beta lights every off-diagonal edge.
    StructureSummary full;
    full.alpha = Mat::Constant(m, n, 1.0 / n);
    full.beta = Mat::Constant(m, (m - 1) * n, 0.01);
    auto bin3 = binarize_structure(full, 0.0);
    CHECK(bin3.adjacency.sum() == m * (m - 1));

    CHECK_THROWS_AS(binarize_structure(full, 1.0), SemanticError);
    CHECK_THROWS_AS(binarize_structure(full, -0.1), SemanticError);
}

TEST_CASE("raising mu never adds edges") {
    Rng rng(9);
    StructureSummary s;
    const int m = 5, n = 3;
    s.alpha = random_mat(rng, m, n, 0.0, 1.0);
    s.beta = random_mat(rng, m, (m - 1) * n, 0.0, 0.4);
    Mat prev = binarize_structure(s, 0.0).adjacency;
    for (double mu : {0.05, 0.1, 0.2, 0.3, 0.5}) {
        Mat cur = binarize_structure(s, mu).adjacency;
        CHECK(((prev - cur).array() >= 0.0).all()); // cur subset of prev
        prev = cur;
    }
}

TEST_CASE("gradients flow through the full structure pipeline") {
    Rng rng(10);
    const int b = 2, n = 3, m = 3, d = 4;
    TimeSeriesBatch batch;
    for (int s = 0; s < b; ++s) batch.values.push_back(random_mat(rng, n, m));
    Rng prng(11);
    SegmentEncoderParams enc(m, d, prng);
    AttentionParams attn(d, prng);

    std::vector<ad::Parameter*> params = enc.all();
    for (ad::Parameter* p : attn.all()) params.push_back(p);

    testutil::Scenario sc{params, [&](Tape& t) {
                              SegmentBank bank = encode_bank(t, batch, enc);
                              StructureEstimate est =
                                  structure_forward(t, bank, attn);
                              std::vector<Var> outs;
                              for (int i = 0; i < m; ++i) {
                                  outs.push_back(est.z[i]);
                                  outs.push_back(est.u[i]);
                              }
                              return ad::mean_all(ad::concat_cols(outs));
                          }};
    auto rep = testutil::fd_check(sc, 1e-5, 1e-6);
    INFO("worst " << rep.worst_param << " analytic " << rep.analytic
                  << " numeric " << rep.numeric);
    CHECK(rep.max_rel_err < 2e-4);
}
