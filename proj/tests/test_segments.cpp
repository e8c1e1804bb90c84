#include "sasa/segments.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace sasa;
using sasa::testutil::random_mat;

namespace {

TimeSeriesBatch random_batch(Rng& rng, int b, int n, int m) {
    TimeSeriesBatch batch;
    for (int s = 0; s < b; ++s) {
        batch.values.push_back(random_mat(rng, n, m));
    }
    return batch;
}

} // namespace

TEST_CASE("build_segments enumerates the N suffixes in temporal order") {
    TimeSeriesBatch batch;
    Mat x(3, 2);
    x << 1, 10, 2, 20, 3, 30;
    batch.values.push_back(x);

    auto segs = build_segments(batch, 0);
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].cols() == 1);
    CHECK(segs[1].cols() == 2);
    CHECK(segs[2].cols() == 3);
    CHECK(segs[0](0, 0) == 3.0);
    CHECK(segs[1](0, 0) == 2.0);
    CHECK(segs[1](0, 1) == 3.0);
    CHECK(segs[2](0, 0) == 1.0);
    CHECK(segs[2](0, 2) == 3.0);

    auto segs1 = build_segments(batch, 1);
    CHECK(segs1[2](0, 0) == 10.0);

    TimeSeriesBatch single;
    single.values.push_back(Mat::Constant(1, 2, 4.0));
    auto s1 = build_segments(single, 0);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0](0, 0) == 4.0);

    CHECK_THROWS_AS(build_segments(batch, 5), SemanticError);
}

TEST_CASE("encode_bank shape and zero-parameter collapse") {
    Rng rng(31);
    const int b = 3, n = 4, m = 3, d = 5;
    TimeSeriesBatch batch = random_batch(rng, b, n, m);

    Rng prng(32);
    SegmentEncoderParams params(m, d, prng);
    ad::Tape tape;
    SegmentBank bank = encode_bank(tape, batch, params);
    REQUIRE(bank.reps.size() == m);
    for (int i = 0; i < m; ++i) {
        REQUIRE(bank.reps[i].size() == n);
        for (int tau = 0; tau < n; ++tau) {
            CHECK(bank.reps[i][tau].rows() == b);
            CHECK(bank.reps[i][tau].cols() == d);
        }
    }

    // All-zero parameters force every representation to zero.
    SegmentEncoderParams zero(m, d, prng);
    for (ad::Parameter* p : zero.all()) p->value.setZero();
    ad::Tape t2;
    SegmentBank zbank = encode_bank(t2, batch, zero);
    for (int i = 0; i < m; ++i) {
        for (int tau = 0; tau < n; ++tau) {
            CHECK(zbank.reps[i][tau].value().cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("encode_bank matches a fresh scalar LSTM run per suffix") {
    Rng rng(77);
    const int b = 2, n = 5, m = 2, d = 3;
    TimeSeriesBatch batch = random_batch(rng, b, n, m);
    Rng prng(78);
    SegmentEncoderParams params(m, d, prng);

    ad::Tape tape;
    SegmentBank bank = encode_bank(tape, batch, params);

    for (int i = 0; i < m; ++i) {
        for (int tau = 1; tau <= n; ++tau) {
            for (int s = 0; s < b; ++s) {
                Vec h = Vec::Zero(d), c = Vec::Zero(d);
                for (int step = n - tau; step < n; ++step) {
                    Vec x1(1), ho, co;
                    x1(0) = batch.values[s](step, i);
                    oracles::naive_lstm_step(x1, h, c, params.enc[i].wx.value,
                                             params.enc[i].wh.value,
                                             params.enc[i].b.value.row(0).transpose(),
                                             ho, co);
                    h = ho;
                    c = co;
                }
                CHECK((bank.reps[i][tau - 1].value().row(s).transpose() - h)
                          .cwiseAbs()
                          .maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("per-variable isolation and temporal locality") {
    Rng rng(55);
    const int b = 2, n = 4, m = 3, d = 4;
    TimeSeriesBatch batch = random_batch(rng, b, n, m);
    Rng prng(56);
    SegmentEncoderParams params(m, d, prng);

    ad::Tape tape;
    SegmentBank base = encode_bank(tape, batch, params);

    // Perturbing variable j leaves every other variable's bank untouched,
    // and reps[i][tau-1] only reacts to the last tau steps of variable i.
    for (int j = 0; j < m; ++j) {
        for (int step = 0; step < n; ++step) {
            TimeSeriesBatch pert = batch;
            pert.values[1](step, j) += 0.37;
            ad::Tape t2;
            SegmentBank moved = encode_bank(t2, pert, params);
            for (int i = 0; i < m; ++i) {
                for (int tau = 1; tau <= n; ++tau) {
                    const double delta =
                        (moved.reps[i][tau - 1].value() -
                         base.reps[i][tau - 1].value())
                            .cwiseAbs()
                            .maxCoeff();
                    const bool in_window = (i == j) && (step >= n - tau);
                    if (in_window) {
                        CHECK(delta > 1e-8);
                    } else {
                        CHECK(delta == 0.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("bank gradients flow into every encoder parameter") {
    Rng rng(91);
    const int b = 2, n = 3, m = 2, d = 3;
    TimeSeriesBatch batch = random_batch(rng, b, n, m);
    Rng prng(92);
    SegmentEncoderParams params(m, d, prng);

    testutil::Scenario sc{
        params.all(),
        [&](ad::Tape& t) {
            SegmentBank bank = encode_bank(t, batch, params);
            std::vector<ad::Var> flat;
            for (auto& per_var : bank.reps) {
                for (ad::Var v : per_var) flat.push_back(v);
            }
            return ad::mean_all(ad::concat_cols(flat));
        }};
    auto rep = testutil::fd_check(sc);
    INFO("worst " << rep.worst_param << " analytic " << rep.analytic
                  << " numeric " << rep.numeric);
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("encoder rejects mismatched variable counts") {
    Rng rng(13);
    TimeSeriesBatch batch = random_batch(rng, 2, 3, 4);
    Rng prng(14);
    SegmentEncoderParams params(3, 4, prng);
    ad::Tape tape;
    CHECK_THROWS_AS(encode_bank(tape, batch, params), SemanticError);
}
