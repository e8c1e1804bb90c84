#include "sasa/timeseries.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace sasa {

namespace {

std::string format_value(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

[[noreturn]] void csv_fail(const std::string& path, long line,
                           const std::string& column,
                           const std::string& what) {
    std::ostringstream os;
    os << path << ": line " << line;
    if (!column.empty()) os << ", column " << column;
    os << ": " << what;
    throw SchemaError(os.str());
}

double parse_value(std::string_view field, const std::string& path, long line,
                   const std::string& column) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        csv_fail(path, line, column,
                 "expected a number, got '" + std::string(field) + "'");
    }
    return v;
}

long parse_id(std::string_view field, const std::string& path, long line,
              const std::string& column) {
    long v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        csv_fail(path, line, column,
                 "expected an integer, got '" + std::string(field) + "'");
    }
    return v;
}

void reject_cr(const std::string& line, const std::string& path, long lineno) {
    if (!line.empty() && line.back() == '\r') {
        csv_fail(path, lineno, "", "CRLF line ending, expected LF");
    }
}

} // namespace

void TimeSeriesBatch::validate() const {
    if (values.empty()) throw SemanticError("batch: no samples");
    const Eigen::Index n = values[0].rows();
    const Eigen::Index m = values[0].cols();
    if (n < 1 || m < 2) {
        throw SemanticError("batch: needs N >= 1 timesteps and M >= 2 variables");
    }
    for (std::size_t b = 0; b < values.size(); ++b) {
        if (values[b].rows() != n || values[b].cols() != m) {
            std::ostringstream os;
            os << "batch: sample " << b << " has shape " << values[b].rows()
               << "x" << values[b].cols() << ", expected " << n << "x" << m;
            throw SemanticError(os.str());
        }
        if (!values[b].allFinite()) {
            std::ostringstream os;
            os << "batch: sample " << b << " holds non-finite values";
            throw SemanticError(os.str());
        }
    }
    if (labels && labels->size() != batch_size()) {
        throw SemanticError("batch: label count does not match sample count");
    }
}

TimeSeriesBatch TimeSeriesBatch::subset(const std::vector<int>& idx) const {
    TimeSeriesBatch out;
    out.tag = tag;
    out.values.reserve(idx.size());
    Vec lv(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const int b = idx[k];
        if (b < 0 || b >= batch_size()) {
            throw SemanticError("batch: subset index out of range");
        }
        out.values.push_back(values[b]);
        if (labels) lv(static_cast<Eigen::Index>(k)) = (*labels)(b);
    }
    if (labels) out.labels = std::move(lv);
    return out;
}

void write_series_csv(const TimeSeriesBatch& x, const std::string& path) {
    x.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "sample_id,step";
    for (Eigen::Index i = 1; i <= x.vars(); ++i) out << ",x" << i;
    out << "\n";
    for (Eigen::Index b = 0; b < x.batch_size(); ++b) {
        for (Eigen::Index t = 0; t < x.steps(); ++t) {
            out << b << "," << (t + 1);
            for (Eigen::Index i = 0; i < x.vars(); ++i) {
                out << "," << format_value(x.values[b](t, i));
            }
            out << "\n";
        }
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

TimeSeriesBatch read_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        csv_fail(path, 1, "", "empty file, expected a header");
    }
    reject_cr(line, path, 1);
    std::vector<std::string_view> head = split_fields(line);
    if (head.size() < 3 || head[0] != "sample_id" || head[1] != "step") {
        csv_fail(path, 1, "",
                 "header must read sample_id,step,x1,...,xM, got '" + line +
                     "'");
    }
    const Eigen::Index m = static_cast<Eigen::Index>(head.size()) - 2;
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::string want = "x" + std::to_string(i + 1);
        if (head[static_cast<std::size_t>(i + 2)] != want) {
            csv_fail(path, 1, std::string(head[static_cast<std::size_t>(i + 2)]),
                     "expected column name " + want);
        }
    }

    TimeSeriesBatch batch;
    std::vector<Vec> rows; // current sample's step rows
    long expected_sample = 0;
    long expected_step = 1;
    Eigen::Index steps_per_sample = -1;
    long lineno = 1;

    auto flush_sample = [&](long at_line) {
        if (rows.empty()) return;
        if (steps_per_sample < 0) {
            steps_per_sample = static_cast<Eigen::Index>(rows.size());
        } else if (static_cast<Eigen::Index>(rows.size()) != steps_per_sample) {
            csv_fail(path, at_line, "step",
                     "sample " + std::to_string(expected_sample) + " has " +
                         std::to_string(rows.size()) + " steps, expected " +
                         std::to_string(steps_per_sample));
        }
        Mat sample(static_cast<Eigen::Index>(rows.size()), m);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            sample.row(static_cast<Eigen::Index>(t)) = rows[t].transpose();
        }
        batch.values.push_back(std::move(sample));
        rows.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        reject_cr(line, path, lineno);
        if (line.empty()) {
            csv_fail(path, lineno, "", "blank line");
        }
        std::vector<std::string_view> fields = split_fields(line);
        if (static_cast<Eigen::Index>(fields.size()) != m + 2) {
            csv_fail(path, lineno, "",
                     "expected " + std::to_string(m + 2) + " fields, got " +
                         std::to_string(fields.size()));
        }
        const long sid = parse_id(fields[0], path, lineno, "sample_id");
        const long step = parse_id(fields[1], path, lineno, "step");
        if (!rows.empty() && sid == expected_sample + 1 && step == 1) {
            flush_sample(lineno);
            ++expected_sample;
            expected_step = 1;
        }
        if (sid != expected_sample) {
            std::string want = std::to_string(expected_sample);
            if (!rows.empty()) {
                want += " or " + std::to_string(expected_sample + 1);
            }
            csv_fail(path, lineno, "sample_id",
                     "expected " + want +
                         " (ids must be 0-based, contiguous, grouped)");
        }
        if (step != expected_step) {
            csv_fail(path, lineno, "step",
                     "expected " + std::to_string(expected_step) +
                         " (steps must run 1..N per sample)");
        }
        Vec row(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            row(i) = parse_value(fields[static_cast<std::size_t>(i + 2)], path,
                                 lineno, "x" + std::to_string(i + 1));
        }
        rows.push_back(std::move(row));
        ++expected_step;
    }
    flush_sample(lineno);
    if (batch.values.empty()) {
        csv_fail(path, lineno, "", "no data rows");
    }
    batch.validate();
    return batch;
}

void write_labels_csv(const Vec& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "sample_id,y\n";
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        out << i << "," << format_value(labels(i)) << "\n";
    }
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

Vec read_labels_csv(const std::string& path, Eigen::Index expected_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        csv_fail(path, 1, "", "empty file, expected a header");
    }
    reject_cr(line, path, 1);
    if (line != "sample_id,y") {
        csv_fail(path, 1, "", "header must read sample_id,y, got '" + line +
                                  "'");
    }
    std::vector<double> ys;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        reject_cr(line, path, lineno);
        if (line.empty()) {
            csv_fail(path, lineno, "", "blank line");
        }
        std::vector<std::string_view> fields = split_fields(line);
        if (fields.size() != 2) {
            csv_fail(path, lineno, "", "expected 2 fields, got " +
                                           std::to_string(fields.size()));
        }
        const long sid = parse_id(fields[0], path, lineno, "sample_id");
        if (sid != static_cast<long>(ys.size())) {
            csv_fail(path, lineno, "sample_id",
                     "expected " + std::to_string(ys.size()));
        }
        ys.push_back(parse_value(fields[1], path, lineno, "y"));
    }
    if (expected_count >= 0 &&
        static_cast<Eigen::Index>(ys.size()) != expected_count) {
        csv_fail(path, lineno, "",
                 "label count " + std::to_string(ys.size()) +
                     " does not match the data's " +
                     std::to_string(expected_count) + " samples");
    }
    Vec v(static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < ys.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = ys[i];
    }
    return v;
}

} // namespace sasa
