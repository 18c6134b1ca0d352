// SPDX-License-Identifier: Apache-2.0

#include "fdisac/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fdisac/baselines.hpp"

namespace fdisac {

namespace {

double clamp_db(double db) {
    if (std::isnan(db)) return -kDbFloor;
    return std::clamp(db, -kDbFloor, kDbFloor);
}

double leak_power(const BeamformerState& s, const ChannelSet& ch) {
    return std::norm(dot(s.w, matvec(ch.h_si, s.p)));
}

}  // namespace

double sinr_uplink(const BeamformerState& s, const ChannelSet& ch, double sigma2_u) {
    const double signal = std::norm(dot(s.w, matvec(ch.h_u, s.omega_u)));
    const double interference = std::norm(dot(s.w, matvec(ch.h, s.p)));
    const double denom = interference + norm2_squared(s.w) * sigma2_u;
    if (!(denom > 0.0)) throw Error("sinr_uplink: interference plus noise must be positive");
    return signal / denom;
}

double sinr_downlink(const BeamformerState& s, const ChannelSet& ch, double sigma2_d) {
    const double signal = std::norm(dot(s.u_d, matvec(ch.h_d, s.p)));
    const double denom = norm2_squared(s.u_d) * sigma2_d;
    if (denom == 0.0) return 0.0;  // u_d = 0 receives nothing
    return signal / denom;
}

double rate_from_sinr(double sinr) { return std::log2(1.0 + sinr); }

std::vector<double> beampattern(std::span<const cplx> v, std::span<const double> theta_grid_deg) {
    if (theta_grid_deg.empty()) throw Error("beampattern: empty angle grid");
    std::vector<double> out;
    out.reserve(theta_grid_deg.size());
    for (double th : theta_grid_deg) out.push_back(std::norm(dot(steering_tx(th, v.size()), v)));
    return out;
}

std::vector<double> default_theta_grid() {
    std::vector<double> g;
    g.reserve(361);
    for (int k = 0; k <= 360; ++k) g.push_back(-90.0 + 0.5 * k);
    return g;
}

double residual_si_db(const BeamformerState& s, const ChannelSet& ch, double noise_dbm) {
    return clamp_db(10.0 * std::log10(leak_power(s, ch) / 1e-3) - noise_dbm);
}

double soi_over_si_db(const BeamformerState& s, const ChannelSet& ch) {
    const double soi = std::norm(dot(s.w, matvec(ch.h_r, s.p))) +
                       std::norm(dot(s.w, matvec(ch.h_u, s.omega_u)));
    const double si = leak_power(s, ch);
    if (si == 0.0) return soi > 0.0 ? kDbFloor : 0.0;
    return clamp_db(10.0 * std::log10(soi / si));
}

SumRates sum_rates(double rate_u, double rate_d, double delta) {
    return {rate_u + rate_d, half_duplex_rate(rate_u, rate_d, delta)};
}

MetricsRecord compute_metrics(const BeamformerState& s, const ChannelSet& ch,
                              const SystemConfig& cfg) {
    MetricsRecord m;
    const double sigma2 = cfg.noise_watts();
    m.sinr_u = sinr_uplink(s, ch, sigma2);
    m.sinr_d = sinr_downlink(s, ch, sigma2);
    m.rate_u = rate_from_sinr(m.sinr_u);
    m.rate_d = rate_from_sinr(m.sinr_d);
    m.gain_t = std::norm(dot(steering_tx(cfg.target.theta_deg, s.p.size()), s.p));
    m.gain_r = std::norm(dot(s.w, steering_rx(cfg.target.theta_deg, s.w.size())));
    m.p_res_db = residual_si_db(s, ch, cfg.noise_dbm);
    m.soi_over_si_db = soi_over_si_db(s, ch);
    const SumRates sr = sum_rates(m.rate_u, m.rate_d, cfg.hd_delta);
    m.sumrate_fd = sr.fd;
    m.sumrate_hd = sr.hd;
    return m;
}

}  // namespace fdisac
