// SPDX-License-Identifier: Apache-2.0

#include "fdisac/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "fdisac/radar_dsp.hpp"
#include "fdisac/solver.hpp"

#ifndef FDISAC_GIT_DESCRIBE
#define FDISAC_GIT_DESCRIBE "unknown"
#endif

namespace fdisac {

namespace {

using Setter = std::function<void(ExperimentSpec&, const YAML::Node&)>;

template <typename T>
T scalar(const YAML::Node& n) {
    if (!n.IsScalar()) throw YAML::Exception(n.Mark(), "expected a scalar");
    return n.as<T>();
}

template <typename T>
std::vector<T> sequence(const YAML::Node& n) {
    if (!n.IsSequence()) throw YAML::Exception(n.Mark(), "expected a list");
    std::vector<T> out;
    for (const auto& item : n) out.push_back(scalar<T>(item));
    return out;
}

std::size_t count(const YAML::Node& n) {
    const long long v = scalar<long long>(n);
    if (v < 0) throw YAML::Exception(n.Mark(), "must be non-negative");
    return static_cast<std::size_t>(v);
}

DopplerConvention parse_convention(const std::string& s) {
    if (s == "literal") return DopplerConvention::kLiteral;
    if (s == "physical") return DopplerConvention::kPhysical;
    throw Error("expected 'literal' or 'physical'");
}

const char* convention_name(DopplerConvention c) {
    return c == DopplerConvention::kLiteral ? "literal" : "physical";
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto dbl = [&t](const char* key, double SystemConfig::*field) {
            t[key] = [field](ExperimentSpec& s, const YAML::Node& n) {
                s.base.*field = scalar<double>(n);
            };
        };
        auto size = [&t](const char* key, std::size_t SystemConfig::*field) {
            t[key] = [field](ExperimentSpec& s, const YAML::Node& n) { s.base.*field = count(n); };
        };
        auto bearing = [&t](const std::string& prefix, Bearing SystemConfig::*field) {
            t[prefix + "_theta_deg"] = [field](ExperimentSpec& s, const YAML::Node& n) {
                (s.base.*field).theta_deg = scalar<double>(n);
            };
            t[prefix + "_range_m"] = [field](ExperimentSpec& s, const YAML::Node& n) {
                (s.base.*field).range_m = scalar<double>(n);
            };
            t[prefix + "_velocity_mps"] = [field](ExperimentSpec& s, const YAML::Node& n) {
                (s.base.*field).velocity_mps = scalar<double>(n);
            };
        };
        size("n_t", &SystemConfig::n_t);
        size("n_r", &SystemConfig::n_r);
        size("n_u", &SystemConfig::n_u);
        size("n_d", &SystemConfig::n_d);
        dbl("carrier_hz", &SystemConfig::carrier_hz);
        dbl("bandwidth_hz", &SystemConfig::bandwidth_hz);
        dbl("pd_dbm", &SystemConfig::pd_dbm);
        dbl("pu_dbm", &SystemConfig::pu_dbm);
        dbl("noise_dbm", &SystemConfig::noise_dbm);
        dbl("pathloss_exponent", &SystemConfig::pathloss_exponent);
        dbl("reference_distance_m", &SystemConfig::reference_distance_m);
        dbl("kappa", &SystemConfig::kappa);
        dbl("kappa_si", &SystemConfig::kappa_si);
        dbl("si_level_db", &SystemConfig::si_level_db);
        dbl("si_theta_deg", &SystemConfig::si_theta_deg);
        dbl("rcs_m2", &SystemConfig::rcs_m2);
        dbl("beta", &SystemConfig::beta);
        dbl("epsilon", &SystemConfig::epsilon);
        dbl("bisection_tol", &SystemConfig::bisection_tol);
        dbl("hd_delta", &SystemConfig::hd_delta);
        dbl("nsp_tx_split", &SystemConfig::nsp_tx_split);
        size("frame_symbols", &SystemConfig::frame_symbols);
        size("frame_blocks", &SystemConfig::frame_blocks);
        size("lag_window", &SystemConfig::lag_window);
        bearing("target", &SystemConfig::target);
        bearing("uplink", &SystemConfig::uplink);
        bearing("downlink", &SystemConfig::downlink);
        t["alpha"] = [](ExperimentSpec& s, const YAML::Node& n) {
            const auto v = sequence<double>(n);
            if (v.size() != 4) throw Error("expected a list of 4 weights");
            std::copy(v.begin(), v.end(), s.base.alpha.begin());
        };
        t["max_iters"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.base.max_iters = scalar<int>(n);
        };
        t["rng_seed"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.base.rng_seed = scalar<std::uint64_t>(n);
        };
        t["nsp_null_downlink"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.base.nsp_null_downlink = scalar<bool>(n);
        };
        t["dsp_noise"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.base.dsp_noise = scalar<bool>(n);
        };
        t["doppler_convention"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.base.doppler = parse_convention(scalar<std::string>(n));
        };
        t["si_levels_db"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.si_levels_db = sequence<double>(n);
        };
        t["rho_values"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.rho_values = sequence<double>(n);
        };
        t["trials"] = [](ExperimentSpec& s, const YAML::Node& n) { s.trials = scalar<int>(n); };
        t["threads"] = [](ExperimentSpec& s, const YAML::Node& n) { s.threads = scalar<int>(n); };
        t["baselines"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.baselines.clear();
            for (const auto& name : sequence<std::string>(n)) {
                s.baselines.push_back(parse_baseline_kind(name));
            }
        };
        t["output_dir"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.output_dir = scalar<std::string>(n);
        };
        t["emit"] = [](ExperimentSpec& s, const YAML::Node& n) {
            s.emit_csv = false;
            s.emit_json = false;
            for (const auto& f : sequence<std::string>(n)) {
                if (f == "csv") {
                    s.emit_csv = true;
                } else if (f == "json") {
                    s.emit_json = true;
                } else {
                    throw Error("expected 'csv' or 'json'");
                }
            }
        };
        return t;
    }();
    return table;
}

double sample_stderr(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::vector<std::string> method_labels(const ExperimentSpec& spec) {
    std::vector<std::string> m{kProposedLabel};
    for (auto k : spec.baselines) m.emplace_back(to_string(k));
    return m;
}

SystemConfig cell_config(const ExperimentSpec& spec, double si_level_db, double rho) {
    SystemConfig cfg = spec.base;
    cfg.si_level_db = si_level_db;
    cfg.alpha = priority_weights(rho);
    return cfg;
}

// Streams for the single-instance figure runs, disjoint from the sweep lattice.
std::uint64_t figure_stream(std::uint64_t seed, std::uint64_t purpose) {
    return derive_stream_key(seed, {2, purpose});
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    return os;
}

void write_aggregate_header(std::ostream& os) {
    os << "si_level_db,rho,method,n_ok,n_failed,n_converged,mean_iterations";
    for (const auto& f : metric_field_names()) os << ',' << f << "_mean," << f << "_stderr";
    os << "\r\n";
}

void write_aggregate_row(std::ostream& os, const CellAggregate& c) {
    os << format_number(c.si_level_db) << ',' << format_number(c.rho) << ',' << csv_field(c.method)
       << ',' << c.n_ok << ',' << c.n_failed << ',' << c.n_converged << ','
       << format_number(c.mean_iterations);
    for (const auto& f : c.fields) os << ',' << format_number(f.mean) << ',' << format_number(f.stderr_);
    os << "\r\n";
}

}  // namespace

void ExperimentSpec::validate() const {
    base.validate();
    if (si_levels_db.empty()) throw Error("invalid config 'si_levels_db': must not be empty");
    for (double v : si_levels_db) {
        if (!std::isfinite(v)) throw Error("invalid config 'si_levels_db': values must be finite");
    }
    if (rho_values.empty()) throw Error("invalid config 'rho_values': must not be empty");
    for (double r : rho_values) {
        if (!(r > 0.0) || !std::isfinite(r)) throw Error("invalid config 'rho_values': must be > 0");
    }
    if (trials < 1) throw Error("invalid config 'trials': must be at least 1");
    if (threads < 0) throw Error("invalid config 'threads': must be >= 0");
}

ExperimentSpec parse_config_text(const std::string& text) {
    ExperimentSpec spec;
    spec.output_dir = default_output_dir();
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw Error(std::string("config is not well-formed: ") + e.what());
    }
    if (!root || root.IsNull()) {
        spec.validate();
        return spec;
    }
    if (!root.IsMap()) throw Error("config must be a key: value mapping");
    const auto& table = setters();
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        const auto it = table.find(key);
        if (it == table.end()) throw Error("unknown config key '" + key + "'");
        try {
            it->second(spec, kv.second);
        } catch (const YAML::Exception& e) {
            throw Error("invalid value for config key '" + key + "': " + e.msg);
        } catch (const Error& e) {
            throw Error("invalid value for config key '" + key + "': " + e.what());
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

nlohmann::ordered_json spec_to_json(const ExperimentSpec& spec) {
    const SystemConfig& c = spec.base;
    nlohmann::ordered_json j;
    j["n_t"] = c.n_t;
    j["n_r"] = c.n_r;
    j["n_u"] = c.n_u;
    j["n_d"] = c.n_d;
    j["carrier_hz"] = c.carrier_hz;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["pd_dbm"] = c.pd_dbm;
    j["pu_dbm"] = c.pu_dbm;
    j["noise_dbm"] = c.noise_dbm;
    j["pathloss_exponent"] = c.pathloss_exponent;
    j["reference_distance_m"] = c.reference_distance_m;
    j["kappa"] = c.kappa;
    j["kappa_si"] = c.kappa_si;
    j["si_level_db"] = c.si_level_db;
    j["si_theta_deg"] = c.si_theta_deg;
    j["rcs_m2"] = c.rcs_m2;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["epsilon"] = c.epsilon;
    j["max_iters"] = c.max_iters;
    j["bisection_tol"] = c.bisection_tol;
    j["rng_seed"] = c.rng_seed;
    for (const auto& [name, b] : {std::pair{"target", c.target}, std::pair{"uplink", c.uplink},
                                  std::pair{"downlink", c.downlink}}) {
        j[std::string(name) + "_theta_deg"] = b.theta_deg;
        j[std::string(name) + "_range_m"] = b.range_m;
        j[std::string(name) + "_velocity_mps"] = b.velocity_mps;
    }
    j["hd_delta"] = c.hd_delta;
    j["nsp_tx_split"] = c.nsp_tx_split;
    j["nsp_null_downlink"] = c.nsp_null_downlink;
    j["frame_symbols"] = c.frame_symbols;
    j["frame_blocks"] = c.frame_blocks;
    j["lag_window"] = c.lag_window;
    j["doppler_convention"] = convention_name(c.doppler);
    j["dsp_noise"] = c.dsp_noise;
    j["si_levels_db"] = spec.si_levels_db;
    j["rho_values"] = spec.rho_values;
    j["trials"] = spec.trials;
    j["threads"] = spec.threads;
    std::vector<std::string> names;
    for (auto k : spec.baselines) names.emplace_back(to_string(k));
    j["baselines"] = names;
    std::vector<std::string> emit;
    if (spec.emit_csv) emit.emplace_back("csv");
    if (spec.emit_json) emit.emplace_back("json");
    j["emit"] = emit;
    return j;
}

std::filesystem::path default_output_dir() {
    const char* env = std::getenv("FDISAC_OUT_DIR");
    return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("out");
}

std::array<double, 4> priority_weights(double rho) { return {rho, rho, 1.0, 1.0}; }

const std::vector<std::string>& metric_field_names() {
    static const std::vector<std::string> names{
        "sinr_u", "sinr_d", "rate_u", "rate_d", "gain_t", "gain_r",
        "p_res_db", "soi_over_si_db", "sumrate_fd", "sumrate_hd"};
    return names;
}

std::vector<double> metric_values(const MetricsRecord& m) {
    return {m.sinr_u, m.sinr_d,   m.rate_u,         m.rate_d,     m.gain_t,
            m.gain_r, m.p_res_db, m.soi_over_si_db, m.sumrate_fd, m.sumrate_hd};
}

std::uint64_t channel_stream(std::uint64_t seed, std::size_t si_index, int trial) {
    return derive_stream_key(seed, {0, si_index, static_cast<std::uint64_t>(trial)});
}

std::uint64_t init_stream(std::uint64_t seed, std::size_t si_index, std::size_t rho_index,
                          int trial) {
    return derive_stream_key(seed, {1, si_index, rho_index, static_cast<std::uint64_t>(trial)});
}

const CellAggregate& SweepResult::cell(std::size_t si_index, std::size_t rho_index,
                                       std::size_t method_index) const {
    return cells.at((si_index * rho_count + rho_index) * methods.size() + method_index);
}

TrialRecord run_trial(const ExperimentSpec& spec, std::size_t si_index, std::size_t rho_index,
                      std::size_t method_index, int trial) {
    TrialRecord rec;
    rec.si_index = si_index;
    rec.rho_index = rho_index;
    rec.method_index = method_index;
    rec.trial = trial;
    try {
        const SystemConfig cfg =
            cell_config(spec, spec.si_levels_db.at(si_index), spec.rho_values.at(rho_index));
        CounterRng ch_rng(channel_stream(cfg.rng_seed, si_index, trial));
        const Scenario sc = synthesize(cfg, ch_rng);
        BeamformerState state;
        if (method_index == 0) {
            CounterRng init_rng(init_stream(cfg.rng_seed, si_index, rho_index, trial));
            const SolveResult r = solve(sc.channels, cfg, SolverOptions::from_config(cfg), init_rng);
            state = r.state;
            rec.iterations = r.report.iterations;
            rec.converged = r.report.converged;
        } else {
            state = baseline_state(spec.baselines.at(method_index - 1), sc.channels, cfg);
        }
        rec.metrics = compute_metrics(state, sc.channels, cfg);
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

SweepResult run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SweepResult result;
    result.methods = method_labels(spec);
    const std::size_t n_si = spec.si_levels_db.size();
    const std::size_t n_rho = spec.rho_values.size();
    const std::size_t n_m = result.methods.size();
    const std::size_t n_t = static_cast<std::size_t>(spec.trials);
    const std::size_t total = n_si * n_rho * n_m * n_t;
    result.trials.resize(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
            const std::size_t trial = k % n_t;
            const std::size_t m = (k / n_t) % n_m;
            const std::size_t r = (k / (n_t * n_m)) % n_rho;
            const std::size_t s = k / (n_t * n_m * n_rho);
            result.trials[k] = run_trial(spec, s, r, m, static_cast<int>(trial));
        }
    };
    unsigned n_threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                          : std::max(1U, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, total));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const std::size_t n_fields = metric_field_names().size();
    for (std::size_t s = 0; s < n_si; ++s) {
        for (std::size_t r = 0; r < n_rho; ++r) {
            for (std::size_t m = 0; m < n_m; ++m) {
                CellAggregate c;
                c.si_level_db = spec.si_levels_db[s];
                c.rho = spec.rho_values[r];
                c.method = result.methods[m];
                std::vector<std::vector<double>> columns(n_fields);
                double iters = 0.0;
                for (std::size_t t = 0; t < n_t; ++t) {
                    const TrialRecord& rec = result.trials[((s * n_rho + r) * n_m + m) * n_t + t];
                    if (!rec.ok) {
                        ++c.n_failed;
                        continue;
                    }
                    ++c.n_ok;
                    if (rec.converged) ++c.n_converged;
                    iters += rec.iterations;
                    const auto v = metric_values(rec.metrics);
                    for (std::size_t f = 0; f < n_fields; ++f) columns[f].push_back(v[f]);
                }
                c.mean_iterations = c.n_ok > 0 ? iters / c.n_ok : 0.0;
                c.fields.resize(n_fields);
                for (std::size_t f = 0; f < n_fields; ++f) {
                    if (columns[f].empty()) {
                        c.fields[f] = {std::nan(""), std::nan("")};
                        continue;
                    }
                    double sum = 0.0;
                    for (double x : columns[f]) sum += x;
                    const double mean = sum / static_cast<double>(columns[f].size());
                    c.fields[f] = {mean, sample_stderr(columns[f], mean)};
                }
                result.cells.push_back(std::move(c));
            }
        }
    }
    result.rho_count = n_rho;
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::filesystem::path> emit_tables(const SweepResult& result,
                                               const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    if (ec) throw Error("cannot create output directory '" + spec.output_dir.string() + "'");
    std::vector<fs::path> written;
    const std::uint64_t seed = spec.base.rng_seed;

    if (spec.emit_csv) {
        // Full lattice, grouped for plotting against SI level.
        {
            const fs::path path = spec.output_dir / "si_sweep.csv";
            auto os = open_output(path);
            write_aggregate_header(os);
            for (std::size_t m = 0; m < result.methods.size(); ++m)
                for (std::size_t r = 0; r < spec.rho_values.size(); ++r)
                    for (std::size_t s = 0; s < spec.si_levels_db.size(); ++s)
                        write_aggregate_row(os, result.cell(s, r, m));
            written.push_back(path);
        }
        // Proposed method only, grouped for plotting against rho.
        {
            const fs::path path = spec.output_dir / "rho_sweep.csv";
            auto os = open_output(path);
            write_aggregate_header(os);
            for (std::size_t s = 0; s < spec.si_levels_db.size(); ++s)
                for (std::size_t r = 0; r < spec.rho_values.size(); ++r)
                    write_aggregate_row(os, result.cell(s, r, 0));
            written.push_back(path);
        }
        {
            const fs::path path = spec.output_dir / "trials.csv";
            auto os = open_output(path);
            os << "si_level_db,rho,method,trial,ok,iterations,converged";
            for (const auto& f : metric_field_names()) os << ',' << f;
            os << ",error\r\n";
            for (const auto& t : result.trials) {
                os << format_number(spec.si_levels_db[t.si_index]) << ','
                   << format_number(spec.rho_values[t.rho_index]) << ','
                   << csv_field(result.methods[t.method_index]) << ',' << t.trial << ','
                   << (t.ok ? 1 : 0) << ',' << t.iterations << ',' << (t.converged ? 1 : 0);
                for (double v : metric_values(t.metrics)) os << ',' << format_number(v);
                os << ',' << csv_field(t.error) << "\r\n";
            }
            written.push_back(path);
        }

        // Single-instance figure runs at the base SI level.
        const SystemConfig& base = spec.base;
        CounterRng ch_rng(figure_stream(seed, 0));
        const Scenario sc = synthesize(base, ch_rng);
        const auto grid = default_theta_grid();

        std::vector<std::string> bp_names;
        std::vector<std::vector<double>> bp_cols;
        {
            const fs::path path = spec.output_dir / "convergence.csv";
            auto os = open_output(path);
            os << "rho,iteration,objective,zeta\r\n";
            for (std::size_t r = 0; r < spec.rho_values.size(); ++r) {
                SystemConfig cfg = base;
                cfg.alpha = priority_weights(spec.rho_values[r]);
                CounterRng init(figure_stream(seed, 10 + r));
                const SolveResult res = solve(sc.channels, cfg, SolverOptions::from_config(cfg), init);
                const auto& rep = res.report;
                os << format_number(spec.rho_values[r]) << ",0," << format_number(rep.initial_objective)
                   << ",\r\n";
                for (std::size_t i = 0; i < rep.objective_trace.size(); ++i) {
                    os << format_number(spec.rho_values[r]) << ',' << i + 1 << ','
                       << format_number(rep.objective_trace[i]) << ','
                       << format_number(rep.zeta_trace[i]) << "\r\n";
                }
                const std::string tag = "proposed_rho" + format_number(spec.rho_values[r]);
                bp_names.push_back(tag + "_tx");
                bp_cols.push_back(beampattern(res.state.p, grid));
                bp_names.push_back(tag + "_rx");
                bp_cols.push_back(beampattern(res.state.w, grid));
            }
            written.push_back(path);
        }
        for (auto kind : spec.baselines) {
            const BeamformerState st = baseline_state(kind, sc.channels, base);
            const std::string tag(to_string(kind));
            bp_names.push_back(tag + "_tx");
            bp_cols.push_back(beampattern(st.p, grid));
            bp_names.push_back(tag + "_rx");
            bp_cols.push_back(beampattern(st.w, grid));
        }
        {
            const fs::path path = spec.output_dir / "beampattern.csv";
            auto os = open_output(path);
            os << "theta_deg";
            for (const auto& n : bp_names) os << ',' << csv_field(n);
            os << "\r\n";
            for (std::size_t i = 0; i < grid.size(); ++i) {
                os << format_number(grid[i]);
                for (const auto& c : bp_cols) os << ',' << format_number(c[i]);
                os << "\r\n";
            }
            written.push_back(path);
        }

        // Radar processing at rho = 1 with the SI term present in the stream.
        SystemConfig radar_cfg = base;
        radar_cfg.alpha = priority_weights(1.0);
        CounterRng init(figure_stream(seed, 1));
        const BeamformerState proposed =
            solve(sc.channels, radar_cfg, SolverOptions::from_config(radar_cfg), init).state;
        const FrameSpec frame = FrameSpec::from_config(radar_cfg);
        std::vector<std::pair<std::string, BeamformerState>> radar_methods{{"proposed", proposed}};
        for (auto kind : spec.baselines) {
            radar_methods.emplace_back(std::string(to_string(kind)),
                                       baseline_state(kind, sc.channels, radar_cfg));
        }
        for (std::size_t i = 0; i < radar_methods.size(); ++i) {
            CounterRng stream_rng(figure_stream(seed, 100 + i));
            const RxFrame rx =
                synthesize_rx_stream(radar_methods[i].second, sc.channels, sc.truth, frame,
                                     radar_cfg.noise_watts(), {radar_cfg.dsp_noise, true}, stream_rng);
            const RangeDopplerMap map =
                range_doppler_map(range_profile(rx.stream, rx.s_d, radar_cfg.lag_window), frame);
            const fs::path path = spec.output_dir / ("range_doppler_" + radar_methods[i].first + ".csv");
            auto os = open_output(path);
            write_range_doppler_csv(os, map, radar_cfg.carrier_hz);
            written.push_back(path);
        }
        {
            const fs::path path = spec.output_dir / "angle_spectrum.csv";
            auto os = open_output(path);
            os << "theta_deg";
            for (const auto& [name, st] : radar_methods) os << ',' << csv_field(name);
            os << "\r\n";
            std::vector<AngleSpectrum> spectra;
            for (const auto& [name, st] : radar_methods) {
                spectra.push_back(angle_spectrum(st, sc.channels, grid));
            }
            for (std::size_t i = 0; i < grid.size(); ++i) {
                os << format_number(grid[i]);
                for (const auto& sp : spectra) os << ',' << format_number(sp.power[i]);
                os << "\r\n";
            }
            written.push_back(path);
        }
    }

    if (spec.emit_json) {
        nlohmann::ordered_json manifest;
        manifest["config"] = spec_to_json(spec);
        manifest["git_describe"] = FDISAC_GIT_DESCRIBE;
        manifest["master_seed"] = seed;
        manifest["methods"] = result.methods;
        int failed = 0;
        for (const auto& t : result.trials) failed += t.ok ? 0 : 1;
        manifest["trials_failed"] = failed;
        std::vector<std::string> files;
        for (const auto& p : written) files.push_back(p.filename().string());
        manifest["files"] = files;
        const fs::path path = spec.output_dir / "manifest.json";
        auto os = open_output(path);
        os << manifest.dump(2) << "\n";
        written.push_back(path);
    }
    return written;
}

}  // namespace fdisac
