#include "sasa/segments.hpp"

#include <cmath>
#include <sstream>

namespace sasa {

namespace {

Mat uniform_init(Rng& rng, Eigen::Index r, Eigen::Index c, double bound) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rng.uniform(-bound, bound);
        }
    }
    return m;
}

} // namespace

LstmParams::LstmParams(const std::string& prefix, int in, int d, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    wx = ad::Parameter(prefix + ".wx", uniform_init(rng, in, 4 * d, bound));
    wh = ad::Parameter(prefix + ".wh", uniform_init(rng, d, 4 * d, bound));
    b = ad::Parameter(prefix + ".b", uniform_init(rng, 1, 4 * d, bound));
}

std::vector<ad::Parameter*> LstmParams::all() { return {&wx, &wh, &b}; }

SegmentEncoderParams::SegmentEncoderParams(int m_, int d_h_, Rng& rng)
    : m(m_), d_h(d_h_) {
    enc.reserve(m);
    for (int i = 0; i < m; ++i) {
        enc.emplace_back("seg_enc" + std::to_string(i), 1, d_h, rng);
    }
}

std::vector<ad::Parameter*> SegmentEncoderParams::all() {
    std::vector<ad::Parameter*> ps;
    for (LstmParams& e : enc) {
        for (ad::Parameter* p : e.all()) ps.push_back(p);
    }
    return ps;
}

std::vector<Mat> build_segments(const TimeSeriesBatch& x, int i) {
    if (i < 0 || i >= x.vars()) {
        throw SemanticError("build_segments: variable index out of range");
    }
    const Eigen::Index b = x.batch_size();
    const Eigen::Index n = x.steps();
    std::vector<Mat> segs;
    segs.reserve(n);
    for (Eigen::Index tau = 1; tau <= n; ++tau) {
        Mat seg(b, tau);
        for (Eigen::Index s = 0; s < b; ++s) {
            seg.row(s) = x.values[s].col(i).segment(n - tau, tau).transpose();
        }
        segs.push_back(std::move(seg));
    }
    return segs;
}

SegmentBank encode_bank(ad::Tape& tape, const TimeSeriesBatch& x,
                        SegmentEncoderParams& params,
                        std::vector<ad::LeafRecord>* trace) {
    x.validate();
    if (x.vars() != params.m) {
        throw SemanticError("encode_bank: batch has a different variable count "
                            "than the encoder parameters");
    }
    const Eigen::Index b = x.batch_size();
    const Eigen::Index n = x.steps();
    const int d = params.d_h;

    SegmentBank bank;
    bank.m = params.m;
    bank.n = static_cast<int>(n);
    bank.d_h = d;
    bank.reps.resize(params.m);

    for (int i = 0; i < params.m; ++i) {
        // One [B x 1] constant per timestep of this variable, shared by all
        // suffix runs.
        std::vector<ad::Var> steps(n);
        for (Eigen::Index s = 0; s < n; ++s) {
            Mat col(b, 1);
            for (Eigen::Index r = 0; r < b; ++r) col(r, 0) = x.values[r](s, i);
            steps[s] = tape.constant(std::move(col));
        }
        ad::Var wx = tape.leaf(params.enc[i].wx, trace);
        ad::Var wh = tape.leaf(params.enc[i].wh, trace);
        ad::Var bb = tape.leaf(params.enc[i].b, trace);

        bank.reps[i].resize(n);
        for (Eigen::Index tau = 1; tau <= n; ++tau) {
            try {
                ad::Var h = tape.constant(Mat::Zero(b, d));
                ad::Var c = tape.constant(Mat::Zero(b, d));
                for (Eigen::Index s = n - tau; s < n; ++s) {
                    ad::Var hc = ad::lstm_step(steps[s], h, c, wx, wh, bb);
                    h = ad::slice_cols(hc, 0, d);
                    c = ad::slice_cols(hc, d, d);
                }
                bank.reps[i][tau - 1] = h;
            } catch (const NumericError& e) {
                std::ostringstream os;
                os << "segment encoder: failure at variable " << i
                   << ", segment length " << tau << ": " << e.what();
                throw NumericError(os.str());
            }
        }
    }
    return bank;
}

} // namespace sasa
