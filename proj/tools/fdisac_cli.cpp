// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: sweeps, single solves, radar maps, angle spectra and
// baseline evaluation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fdisac/baselines.hpp"
#include "fdisac/harness.hpp"
#include "fdisac/metrics.hpp"
#include "fdisac/radar_dsp.hpp"
#include "fdisac/solver.hpp"

namespace fs = std::filesystem;
using namespace fdisac;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> trials;
    std::string format = "both";
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "YAML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "master seed (overrides rng_seed)");
    sub->add_option("--out", f.out, "output directory (default $FDISAC_OUT_DIR or ./out)");
    sub->add_option("--trials", f.trials, "Monte-Carlo trials per cell")->check(CLI::PositiveNumber);
    sub->add_option("--format", f.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
}

ExperimentSpec load_spec(const CommonFlags& f) {
    ExperimentSpec spec = f.config.empty() ? parse_config_text("") : parse_config(f.config);
    if (f.seed) spec.base.rng_seed = *f.seed;
    if (!f.out.empty()) spec.output_dir = f.out;
    if (f.trials) spec.trials = *f.trials;
    spec.emit_csv = f.format != "json";
    spec.emit_json = f.format != "csv";
    spec.validate();
    return spec;
}

Scenario reference_scenario(const ExperimentSpec& spec) {
    CounterRng rng(channel_stream(spec.base.rng_seed, 0, 0));
    return synthesize(spec.base, rng);
}

nlohmann::ordered_json metrics_json(const MetricsRecord& m) {
    nlohmann::ordered_json j;
    const auto names = metric_field_names();
    const auto values = metric_values(m);
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = values[i];
    return j;
}

void print_metrics(const MetricsRecord& m, const std::string& format) {
    if (format == "csv") {
        const auto names = metric_field_names();
        const auto values = metric_values(m);
        for (std::size_t i = 0; i < names.size(); ++i) std::cout << (i ? "," : "") << names[i];
        std::cout << "\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::cout << (i ? "," : "") << format_number(values[i]);
        }
        std::cout << "\n";
    } else {
        std::cout << metrics_json(m).dump(2) << "\n";
    }
}

std::ofstream open_in(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw Error("cannot write '" + (dir / name).string() + "'");
    return os;
}

BeamformerState state_for(const std::string& method, const Scenario& sc,
                          const ExperimentSpec& spec, SolverReport* report) {
    if (method == "proposed") {
        CounterRng init(init_stream(spec.base.rng_seed, 0, 0, 0));
        SolveResult r = solve(sc.channels, spec.base, SolverOptions::from_config(spec.base), init);
        if (report != nullptr) *report = r.report;
        return r.state;
    }
    return baseline_state(parse_baseline_kind(method), sc.channels, spec.base);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-duplex ISAC joint transmit/receive beamforming"};
    app.require_subcommand(1);

    CommonFlags sweep_f, once_f, map_f, angle_f, base_f;
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over SI level and priority");
    add_common(sweep, sweep_f);

    auto* once = app.add_subcommand("solve-once", "solve the reference scenario once");
    add_common(once, once_f);
    double rho = 1.0;
    once->add_option("--rho", rho, "communication priority (alpha_com / alpha_radar)")
        ->check(CLI::PositiveNumber);

    auto* radar = app.add_subcommand("radar-map", "range-Doppler map of one frame");
    add_common(radar, map_f);
    std::string map_method = "proposed";
    bool with_si = false;
    radar->add_option("--method", map_method, "proposed, NSP, RadarOnly or CommOnly");
    radar->add_flag("--with-si", with_si, "add the residual SI term to the stream");

    auto* angle = app.add_subcommand("angle", "receive angle spectra of the proposed design and NSP");
    add_common(angle, angle_f);

    auto* base = app.add_subcommand("baseline", "metrics of a baseline design");
    add_common(base, base_f);
    std::string kind = "NSP";
    base->add_option("--kind", kind, "NSP, RadarOnly or CommOnly");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            const ExperimentSpec spec = load_spec(sweep_f);
            const SweepResult result = run_sweep(spec);
            const auto files = emit_tables(result, spec);
            int failed = 0;
            for (const auto& t : result.trials) failed += t.ok ? 0 : 1;
            std::cerr << "sweep: " << result.trials.size() << " trials (" << failed << " failed) in "
                      << result.elapsed_seconds << " s\n";
            for (const auto& f : files) std::cout << f.string() << "\n";
        } else if (*once) {
            ExperimentSpec spec = load_spec(once_f);
            spec.base.alpha = priority_weights(rho);
            const Scenario sc = reference_scenario(spec);
            SolverReport rep;
            const BeamformerState st = state_for("proposed", sc, spec, &rep);
            const MetricsRecord m = compute_metrics(st, sc.channels, spec.base);
            if (once_f.format == "csv") {
                print_metrics(m, "csv");
            } else {
                nlohmann::ordered_json j;
                j["iterations"] = rep.iterations;
                j["converged"] = rep.converged;
                j["initial_objective"] = rep.initial_objective;
                j["final_objective"] = rep.objective_trace.empty() ? rep.initial_objective
                                                                   : rep.objective_trace.back();
                j["residual_si_linear"] = rep.residual_si_linear;
                j["elapsed_seconds"] = rep.elapsed_seconds;
                j["metrics"] = metrics_json(m);
                std::cout << j.dump(2) << "\n";
            }
        } else if (*radar) {
            const ExperimentSpec spec = load_spec(map_f);
            const Scenario sc = reference_scenario(spec);
            const BeamformerState st = state_for(map_method, sc, spec, nullptr);
            const FrameSpec frame = FrameSpec::from_config(spec.base);
            CounterRng rng(derive_stream_key(spec.base.rng_seed, {3}));
            const RxFrame rx = synthesize_rx_stream(st, sc.channels, sc.truth, frame,
                                                    spec.base.noise_watts(),
                                                    {spec.base.dsp_noise, with_si}, rng);
            const RangeDopplerMap map =
                range_doppler_map(range_profile(rx.stream, rx.s_d, spec.base.lag_window), frame);
            const MapPeak peak = find_peak(map);
            auto os = open_in(spec.output_dir, "range_doppler_" + map_method + ".csv");
            write_range_doppler_csv(os, map, spec.base.carrier_hz);
            std::cout << "peak lag " << peak.lag << " (" << peak.lag * map.range_resolution_m
                      << " m), Doppler bin " << peak.bin << " (" << map.doppler_hz(peak.bin)
                      << " Hz); expected lag " << rx.i_tau << ", bin "
                      << expected_doppler_bin(sc.truth.doppler_hz, frame) << "\n";
        } else if (*angle) {
            const ExperimentSpec spec = load_spec(angle_f);
            const Scenario sc = reference_scenario(spec);
            const auto grid = default_theta_grid();
            for (const std::string method : {"proposed", "NSP"}) {
                const BeamformerState st = state_for(method, sc, spec, nullptr);
                const AngleSpectrum sp = angle_spectrum(st, sc.channels, grid);
                auto os = open_in(spec.output_dir, "angle_spectrum_" + method + ".csv");
                write_angle_spectrum_csv(os, sp);
                std::cout << method << ": argmax " << sp.argmax_deg() << " deg, P(0) = "
                          << sp.at(0.0) << "\n";
            }
        } else if (*base) {
            const ExperimentSpec spec = load_spec(base_f);
            const Scenario sc = reference_scenario(spec);
            const BeamformerState st = baseline_state(parse_baseline_kind(kind), sc.channels, spec.base);
            print_metrics(compute_metrics(st, sc.channels, spec.base),
                          base_f.format == "csv" ? "csv" : "json");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
