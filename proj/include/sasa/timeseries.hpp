// Batched multivariate time-series container shared by the data pipeline and
// all model stages.
#ifndef SASA_TIMESERIES_HPP
#define SASA_TIMESERIES_HPP

#include "sasa/common.hpp"

#include <optional>
#include <vector>

namespace sasa {

enum class DomainTag { source, target };

/// B windows of N timesteps over M variables; values[b](t, i) = x^i_{t+1}.
struct TimeSeriesBatch {
    std::vector<Mat> values; // each N x M
    std::optional<Vec> labels;
    DomainTag tag = DomainTag::source;

    Eigen::Index batch_size() const {
        return static_cast<Eigen::Index>(values.size());
    }
    Eigen::Index steps() const { return values.empty() ? 0 : values[0].rows(); }
    Eigen::Index vars() const { return values.empty() ? 0 : values[0].cols(); }

    /// Throws SemanticError on ragged shapes, non-finite values, or a label
    /// vector whose length disagrees with the batch.
    void validate() const;

    /// Rows picked by index, labels sliced alongside when present.
    TimeSeriesBatch subset(const std::vector<int>& idx) const;
};

/// CSV schema, byte-exact: header `sample_id,step,x1,...,xM`, one row per
/// (sample, step), sample ids 0..B-1 in order, steps 1..N contiguous per
/// sample, LF line endings, '.' decimal separator, shortest round-trip
/// number formatting. Labels live in a separate file `sample_id,y`.
void write_series_csv(const TimeSeriesBatch& x, const std::string& path);
TimeSeriesBatch read_series_csv(const std::string& path);

void write_labels_csv(const Vec& labels, const std::string& path);
/// expected_count < 0 skips the length check.
Vec read_labels_csv(const std::string& path, Eigen::Index expected_count = -1);

} // namespace sasa

#endif
