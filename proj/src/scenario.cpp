// SPDX-License-Identifier: Apache-2.0

#include "fdisac/scenario.hpp"

#include <cmath>
#include <sstream>

namespace fdisac {

namespace {

constexpr double kDeg = kPi / 180.0;

void require(bool ok, const char* field, const std::string& why) {
    if (!ok) {
        std::ostringstream msg;
        msg << "invalid config '" << field << "': " << why;
        throw Error(msg.str());
    }
}

bool finite(double v) { return std::isfinite(v); }

void check_bearing(const Bearing& b, const char* name) {
    require(finite(b.theta_deg) && b.theta_deg > -90.0 && b.theta_deg < 90.0, name,
            "angle must lie in (-90, 90) degrees");
    require(finite(b.range_m) && b.range_m > 0.0, name, "range must be positive");
    require(finite(b.velocity_mps), name, "velocity must be finite");
}

CVector ula_steering(double theta_deg, std::size_t n) {
    constexpr double kSpacing = 0.5;
    const double step = 2.0 * kPi * kSpacing * std::sin(theta_deg * kDeg);
    CVector v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = std::polar(1.0, step * static_cast<double>(k));
    return v;
}

}  // namespace

void SystemConfig::validate() const {
    require(n_t >= 1, "n_t", "must be at least 1");
    require(n_r >= 1, "n_r", "must be at least 1");
    require(n_u >= 1, "n_u", "must be at least 1");
    require(n_d >= 1, "n_d", "must be at least 1");
    require(n_u < n_t && n_t <= n_r, "n_u", "requires n_u < n_t <= n_r");
    require(n_d < n_t && n_t <= n_r, "n_d", "requires n_d < n_t <= n_r");
    require(finite(carrier_hz) && carrier_hz > 0.0, "carrier_hz", "must be positive");
    require(finite(bandwidth_hz) && bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
    require(finite(pd_dbm), "pd_dbm", "must be finite");
    require(finite(pu_dbm), "pu_dbm", "must be finite");
    require(finite(noise_dbm), "noise_dbm", "must be finite");
    require(finite(pathloss_exponent) && pathloss_exponent >= 0.0, "pathloss_exponent",
            "must be non-negative");
    require(finite(reference_distance_m) && reference_distance_m > 0.0, "reference_distance_m",
            "must be positive");
    require(kappa >= 0.0 && !std::isnan(kappa), "kappa", "must be >= 0");
    require(kappa_si >= 0.0 && !std::isnan(kappa_si), "kappa_si", "must be >= 0");
    require(finite(si_level_db), "si_level_db", "must be finite");
    require(finite(si_theta_deg) && si_theta_deg > -90.0 && si_theta_deg < 90.0, "si_theta_deg",
            "must lie in (-90, 90)");
    require(finite(rcs_m2) && rcs_m2 > 0.0, "rcs_m2", "must be positive");
    for (double a : alpha) require(finite(a) && a >= 0.0, "alpha", "weights must be >= 0");
    require(finite(beta) && beta > 0.0, "beta", "must be positive");
    require(finite(epsilon) && epsilon > 0.0, "epsilon", "must be positive");
    require(max_iters >= 1, "max_iters", "must be at least 1");
    require(finite(bisection_tol) && bisection_tol > 0.0, "bisection_tol", "must be positive");
    check_bearing(target, "target");
    check_bearing(uplink, "uplink");
    check_bearing(downlink, "downlink");
    require(hd_delta >= 0.0 && hd_delta <= 1.0, "hd_delta", "must lie in [0, 1]");
    require(nsp_tx_split >= 0.0 && nsp_tx_split <= 1.0, "nsp_tx_split", "must lie in [0, 1]");
    require(frame_symbols >= 1, "frame_symbols", "must be at least 1");
    require(frame_blocks >= 1, "frame_blocks", "must be at least 1");
    require(lag_window >= 1 && lag_window <= frame_symbols, "lag_window",
            "must lie in [1, frame_symbols]");
}

double SystemConfig::pd_watts() const { return dbm_to_watts(pd_dbm); }
double SystemConfig::pu_watts() const { return dbm_to_watts(pu_dbm); }
double SystemConfig::noise_watts() const { return dbm_to_watts(noise_dbm); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

CVector steering_rx(double theta_deg, std::size_t n) { return ula_steering(theta_deg, n); }
CVector steering_tx(double theta_deg, std::size_t n) { return ula_steering(theta_deg, n); }

double pathloss_db(double distance_m, const SystemConfig& cfg) {
    const double d0 = cfg.reference_distance_m;
    return -20.0 * std::log10(cfg.wavelength_m() / (4.0 * kPi * d0)) +
           10.0 * cfg.pathloss_exponent * std::log10(distance_m / d0);
}

double radar_attenuation(double wavelength_m, double rcs_m2, double range_m) {
    const double four_pi = 4.0 * kPi;
    return std::sqrt(wavelength_m * wavelength_m * rcs_m2 /
                     (four_pi * four_pi * four_pi * std::pow(range_m, 4)));
}

double doppler_shift_hz(double velocity_mps, double carrier_hz) {
    return 2.0 * velocity_mps * carrier_hz / kSpeedOfLight;
}

RadarGroundTruth make_radar_ground_truth(const SystemConfig& cfg, const Bearing& target) {
    RadarGroundTruth gt;
    gt.theta_deg = target.theta_deg;
    gt.range_m = target.range_m;
    gt.velocity_mps = target.velocity_mps;
    gt.rcs_m2 = cfg.rcs_m2;
    gt.eta_r = radar_attenuation(cfg.wavelength_m(), cfg.rcs_m2, target.range_m);
    gt.doppler_hz = doppler_shift_hz(target.velocity_mps, cfg.carrier_hz);
    return gt;
}

ComplexMatrix rician_channel(double theta_arrive_deg, double theta_depart_deg,
                             std::size_t rows, std::size_t cols, double kappa,
                             double eta_linear, CounterRng& rng) {
    const CVector a = steering_rx(theta_arrive_deg, rows);
    const CVector b = steering_tx(theta_depart_deg, cols);
    const double amp = std::sqrt(eta_linear);
    ComplexMatrix g(rows, cols);
    if (kappa >= kPureLosKappa) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) g(i, j) = amp * a[i] * b[j];
        return g;
    }
    const double los = std::sqrt(kappa / (kappa + 1.0));
    const double nlos = std::sqrt(1.0 / (kappa + 1.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            g(i, j) = amp * (los * a[i] * b[j] + nlos * rng.complex_normal());
        }
    }
    return g;
}

ComplexMatrix radar_channel(const RadarGroundTruth& gt, double t_s, std::size_t n_r,
                            std::size_t n_t) {
    const CVector a = steering_rx(gt.theta_deg, n_r);
    const CVector b = steering_tx(gt.theta_deg, n_t);
    const cplx gain = gt.eta_r * std::polar(1.0, 2.0 * kPi * gt.doppler_hz * t_s);
    ComplexMatrix h(n_r, n_t);
    for (std::size_t i = 0; i < n_r; ++i)
        for (std::size_t j = 0; j < n_t; ++j) h(i, j) = gain * a[i] * b[j];
    return h;
}

double si_large_scale_gain(const SystemConfig& cfg) {
    return dbm_to_watts(cfg.noise_dbm + cfg.si_level_db) / cfg.pd_watts();
}

ComplexMatrix si_channel(const SystemConfig& cfg, CounterRng& rng) {
    return rician_channel(cfg.si_theta_deg, cfg.si_theta_deg, cfg.n_r, cfg.n_t, cfg.kappa_si,
                          si_large_scale_gain(cfg), rng);
}

Scenario synthesize(const SystemConfig& cfg, const Bearing& target, const Bearing& uplink,
                    const Bearing& downlink, CounterRng& rng) {
    cfg.validate();
    Scenario s;
    s.truth = make_radar_ground_truth(cfg, target);

    // User arrays are taken parallel to the transceiver array, so departure and
    // arrival angles coincide.
    const double eta_u = std::pow(10.0, -pathloss_db(uplink.range_m, cfg) / 10.0);
    const double eta_d = std::pow(10.0, -pathloss_db(downlink.range_m, cfg) / 10.0);

    // Fixed draw order: uplink, downlink, SI.
    s.channels.h_u = rician_channel(uplink.theta_deg, uplink.theta_deg, cfg.n_r, cfg.n_u,
                                    cfg.kappa, eta_u, rng);
    s.channels.h_d = rician_channel(downlink.theta_deg, downlink.theta_deg, cfg.n_d, cfg.n_t,
                                    cfg.kappa, eta_d, rng);
    s.channels.h_si = si_channel(cfg, rng);
    s.channels.h_r = radar_channel(s.truth, 0.0, cfg.n_r, cfg.n_t);
    s.channels.h = s.channels.h_r + s.channels.h_si;
    return s;
}

Scenario synthesize(const SystemConfig& cfg, CounterRng& rng) {
    return synthesize(cfg, cfg.target, cfg.uplink, cfg.downlink, rng);
}

}  // namespace fdisac
