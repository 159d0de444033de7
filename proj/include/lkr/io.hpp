#ifndef LKR_IO_HPP
#define LKR_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lkr/harness.hpp"
#include "lkr/theory.hpp"

// Config parsing, CSV/manifest emission. All numeric output uses 17
// significant digits so files are byte-stable across identical runs.

namespace lkr {

// Parses "0.01", "1/300", or "2pi*577/13872"-style exact forms handled at
// the JSON level; plain fraction strings here.
double parse_number_or_fraction(const std::string& text);

// Flat JSON config; unknown keys are fatal, flags override file values.
// Recognized keys: dist, alpha, tau0, kappa, W, T, n, seed, K, hbar, M,
// guard_fraction, leakage_threshold, workers, samples_per_decade.
// hbar accepts a number or {"two_pi_times": {"num": 577, "den": 13872}}.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

// Stable FNV-1a digest of the canonicalized config, hex string.
std::string config_hash(const ExperimentConfig& config);

struct Series {
    std::vector<std::string> columns;            // header, first is "t"
    std::vector<long> t;
    std::vector<std::vector<double>> values;     // one vector per column
};

Series series_from_ensemble(const EnsembleResult& result);
Series series_from_prediction(const PredictionSeries& pred);
Series series_from_tables(const RenewalTables& tables);

// CSV with header row and %.17g values, plus a JSON sidecar manifest at
// path + ".manifest.json" (hash, tool version, seed, timestamp).
void emit_series(const Series& series, const std::string& path,
                 const std::string& config_digest, std::uint64_t base_seed);

Series read_series_csv(const std::string& path);

extern const char* kToolVersion;

}  // namespace lkr

#endif
