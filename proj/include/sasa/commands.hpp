#pragma once

#include "sasa/config.hpp"

#include <ostream>

namespace sasa {

/// Subcommand bodies. Each one validates its settings against the command's
/// key schema, does the work, and writes a short report to `out`. Errors
/// surface as the library exception types.
///
///   gen    sample a domain pair and write its CSVs and manifests
///   train  fit a model on a generated directory, write checkpoint and logs
///   eval   score a checkpoint on one domain, write metrics.json
///   ablate train a variant/seed grid, write ablation.csv
///   plot   render association heatmaps from a saved structure at several
///          thresholds
///   sd     print the generative distance between two manifests
void cmd_gen(const RunConfig& cfg, std::ostream& out);
void cmd_train(const RunConfig& cfg, std::ostream& out);
void cmd_eval(const RunConfig& cfg, std::ostream& out);
void cmd_ablate(const RunConfig& cfg, std::ostream& out);
void cmd_plot(const RunConfig& cfg, std::ostream& out);
void cmd_sd(const RunConfig& cfg, std::ostream& out);

/// Full argv-to-exit-code driver: parses `<command> [--config file] [--key
/// value ...]`, layers file settings under flag settings, lets the SASA_OUT
/// environment variable override `out`, and maps exceptions to exit codes
///   0 success, 2 I/O failure, 3 malformed input or usage, 4 invalid
///   configuration or data, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

} // namespace sasa
