// SPDX-License-Identifier: Apache-2.0
//
// Scalar performance figures of a transceiver state: SINRs and rates,
// beampattern gains, residual SI and the SoI-to-SI ratio.

#pragma once

#include <vector>

#include "fdisac/scenario.hpp"
#include "fdisac/solver.hpp"

namespace fdisac {

/// dB values are clamped to [-kDbFloor, +kDbFloor].
inline constexpr double kDbFloor = 300.0;

struct MetricsRecord {
    double sinr_u = 0.0;
    double sinr_d = 0.0;
    double rate_u = 0.0;  // bits/s/Hz
    double rate_d = 0.0;
    double gain_t = 0.0;  // |b^H(theta_r) p|^2
    double gain_r = 0.0;  // |w^H a(theta_r)|^2
    double p_res_db = 0.0;
    double soi_over_si_db = 0.0;
    double sumrate_fd = 0.0;
    double sumrate_hd = 0.0;
};

/// |w^H H_u omega_u|^2 / (|w^H H p|^2 + ||w||^2 sigma2); the radar return counts as noise.
double sinr_uplink(const BeamformerState& s, const ChannelSet& ch, double sigma2_u);
/// |u_d^H H_d p|^2 / (||u_d||^2 sigma2).
double sinr_downlink(const BeamformerState& s, const ChannelSet& ch, double sigma2_d);

double rate_from_sinr(double sinr);

/// Power |v^H s(theta)|^2 over the grid, with s the ULA steering vector.
std::vector<double> beampattern(std::span<const cplx> v, std::span<const double> theta_grid_deg);

/// -90..90 degrees in 0.5 degree steps (361 points).
std::vector<double> default_theta_grid();

/// 10 log10(|w^H H_si p|^2 / 1 mW) - noise_dbm, clamped.
double residual_si_db(const BeamformerState& s, const ChannelSet& ch, double noise_dbm);
/// 10 log10((|w^H H_r p|^2 + |w^H H_u omega_u|^2) / |w^H H_si p|^2), clamped.
double soi_over_si_db(const BeamformerState& s, const ChannelSet& ch);

struct SumRates {
    double fd;
    double hd;
};
SumRates sum_rates(double rate_u, double rate_d, double delta);

/// Every field of MetricsRecord for the state (w is used as given).
MetricsRecord compute_metrics(const BeamformerState& s, const ChannelSet& ch,
                              const SystemConfig& cfg);

}  // namespace fdisac
