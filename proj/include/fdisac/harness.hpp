// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: configuration parsing, seeded Monte-Carlo sweeps over SI
// level and communication priority, aggregation and table output.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "fdisac/baselines.hpp"
#include "fdisac/metrics.hpp"
#include "fdisac/scenario.hpp"

namespace fdisac {

struct ExperimentSpec {
    SystemConfig base;
    std::vector<double> si_levels_db{10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
    std::vector<double> rho_values{1.0, 10.0, 100.0, 1000.0};
    int trials = 100;
    std::vector<BaselineKind> baselines{BaselineKind::kNsp, BaselineKind::kRadarOnly,
                                        BaselineKind::kCommOnly};
    std::filesystem::path output_dir = "out";
    bool emit_csv = true;
    bool emit_json = true;
    int threads = 0;  // 0: one per hardware thread

    void validate() const;
};

/// Reads a flat YAML mapping. Unknown keys and bad values raise Error naming the key;
/// an empty document yields the defaults.
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config(const std::filesystem::path& path);

/// Every configurable key with its current value (same key names as the parser).
nlohmann::ordered_json spec_to_json(const ExperimentSpec& spec);

/// Output directory used when none is given: $FDISAC_OUT_DIR, else "out".
std::filesystem::path default_output_dir();

/// alpha_com = rho on the rate terms, alpha_radar = 1 on the beampattern terms.
std::array<double, 4> priority_weights(double rho);

/// Method label used in tables: "Proposed" or the baseline name.
inline constexpr const char* kProposedLabel = "Proposed";

struct TrialRecord {
    std::size_t si_index = 0;
    std::size_t rho_index = 0;
    std::size_t method_index = 0;  // 0 = proposed, k = baselines[k - 1]
    int trial = 0;
    bool ok = false;
    std::string error;
    MetricsRecord metrics;
    int iterations = 0;
    bool converged = false;
};

struct FieldStats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct CellAggregate {
    double si_level_db = 0.0;
    double rho = 0.0;
    std::string method;
    int n_ok = 0;
    int n_failed = 0;
    int n_converged = 0;
    double mean_iterations = 0.0;
    std::vector<FieldStats> fields;  // in metric_field_names() order
};

struct SweepResult {
    std::vector<std::string> methods;
    std::vector<TrialRecord> trials;      // lattice order: si, rho, method, trial
    std::vector<CellAggregate> cells;     // lattice order: si, rho, method
    std::size_t rho_count = 0;
    double elapsed_seconds = 0.0;

    const CellAggregate& cell(std::size_t si_index, std::size_t rho_index,
                              std::size_t method_index) const;
};

const std::vector<std::string>& metric_field_names();
std::vector<double> metric_values(const MetricsRecord& m);

/// Seeds: channels depend on (master seed, si level, trial) only, so every
/// priority value and method sees the same channel draw; solver starts add rho.
std::uint64_t channel_stream(std::uint64_t seed, std::size_t si_index, int trial);
std::uint64_t init_stream(std::uint64_t seed, std::size_t si_index, std::size_t rho_index,
                          int trial);

/// One (si level, rho, method, trial) evaluation; exceptions become ok = false.
TrialRecord run_trial(const ExperimentSpec& spec, std::size_t si_index, std::size_t rho_index,
                      std::size_t method_index, int trial);

SweepResult run_sweep(const ExperimentSpec& spec);

/// si_sweep.csv, rho_sweep.csv, trials.csv, beampattern.csv, convergence.csv,
/// range_doppler_<method>.csv, angle_spectrum.csv and manifest.json.
std::vector<std::filesystem::path> emit_tables(const SweepResult& result,
                                               const ExperimentSpec& spec);

/// Shortest round-tripping decimal form used in every table.
std::string format_number(double v);
/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

}  // namespace fdisac
