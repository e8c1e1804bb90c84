// Suffix-segment construction and per-variable recurrent encoding.
//
// For each variable i the candidate set is the N suffix segments of its
// window, lengths 1..N, all ending at the final timestep. Every segment is
// encoded by that variable's own LSTM, started from the zero state, and the
// final hidden state becomes the segment representation. Segments never share
// prefix state (a length-tau suffix starts at a different timestep than the
// full run), so each one is encoded by its own fresh pass.
#ifndef SASA_SEGMENTS_HPP
#define SASA_SEGMENTS_HPP

#include "sasa/tape.hpp"
#include "sasa/timeseries.hpp"

#include <vector>

namespace sasa {

/// One LSTM's parameters (packed gate order: input, forget, cell, output).
struct LstmParams {
    ad::Parameter wx; // [in x 4d]
    ad::Parameter wh; // [d x 4d]
    ad::Parameter b;  // [1 x 4d]

    LstmParams() = default;
    LstmParams(const std::string& prefix, int in, int d, Rng& rng);

    std::vector<ad::Parameter*> all();
};

/// Independent encoder per variable, scalar input per timestep.
struct SegmentEncoderParams {
    int m = 0;
    int d_h = 0;
    std::vector<LstmParams> enc; // size m

    SegmentEncoderParams() = default;
    SegmentEncoderParams(int m, int d_h, Rng& rng);

    std::vector<ad::Parameter*> all();
};

/// reps[i][tau-1] encodes the length-tau suffix of variable i, shape [B x d_h].
struct SegmentBank {
    int m = 0;
    int n = 0;
    int d_h = 0;
    std::vector<std::vector<ad::Var>> reps;
};

/// The N suffix segments of variable i (0-based), batched: element tau-1 is
/// [B x tau] holding x^i_{t-tau+1..t} in temporal order.
std::vector<Mat> build_segments(const TimeSeriesBatch& x, int i);

/// Encodes every suffix segment of every variable. Aborts with the offending
/// (variable, segment length) if an activation goes non-finite.
SegmentBank encode_bank(ad::Tape& tape, const TimeSeriesBatch& x,
                        SegmentEncoderParams& params,
                        std::vector<ad::LeafRecord>* trace = nullptr);

} // namespace sasa

#endif
