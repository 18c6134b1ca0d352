// SPDX-License-Identifier: Apache-2.0
//
// Physical scenario: array geometry, path loss, and the four channel matrices
// seen by a full-duplex ISAC transceiver (uplink, downlink, radar echo and
// self-interference). Angles are degrees at this interface.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "fdisac/numerics.hpp"
#include "fdisac/random.hpp"

namespace fdisac {

inline constexpr double kSpeedOfLight = 3e8;

/// Slow-time phase progression of the radar echo from block to block.
///  - kLiteral: phase step 2*pi*f_d*T_s per block.
///  - kPhysical: phase step 2*pi*f_d*N*T_s per block (one block lasts N samples).
enum class DopplerConvention { kLiteral, kPhysical };

struct Bearing {
    double theta_deg = 0.0;
    double range_m = 1.0;
    double velocity_mps = 0.0;
};

struct SystemConfig {
    std::size_t n_t = 16;
    std::size_t n_r = 16;
    std::size_t n_u = 2;
    std::size_t n_d = 2;

    double carrier_hz = 2.4e9;
    double bandwidth_hz = 20e6;
    double pd_dbm = 20.0;
    double pu_dbm = 10.0;
    double noise_dbm = -94.0;
    double pathloss_exponent = 2.2;
    double reference_distance_m = 1.0;

    double kappa = 1.0;       // Rician factor of the uplink/downlink channels
    double kappa_si = 10.0;   // Rician factor of the SI channel
    double si_level_db = 60.0;
    double si_theta_deg = 0.0;  // LoS direction of the SI coupling (both ends)
    double rcs_m2 = 1.0;

    std::array<double, 4> alpha{1.0, 1.0, 1.0, 1.0};
    double beta = 1e-25;
    double epsilon = 1e-5;
    int max_iters = 500;
    double bisection_tol = 1e-10;
    std::uint64_t rng_seed = 1;

    Bearing target{45.0, 7.5, 20.0};
    Bearing uplink{-50.0, 10.0, 0.0};
    Bearing downlink{-30.0, 100.0, 0.0};

    double hd_delta = 0.5;
    double nsp_tx_split = 0.5;
    bool nsp_null_downlink = false;

    std::size_t frame_symbols = 1024;
    std::size_t frame_blocks = 512;
    std::size_t lag_window = 64;
    DopplerConvention doppler = DopplerConvention::kLiteral;
    bool dsp_noise = false;

    /// Throws fdisac::Error naming the offending field.
    void validate() const;

    double pd_watts() const;
    double pu_watts() const;
    double noise_watts() const;
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    double sample_period_s() const { return 1.0 / bandwidth_hz; }
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct ChannelSet {
    ComplexMatrix h_u;   // N_r x N_u
    ComplexMatrix h_d;   // N_d x N_t
    ComplexMatrix h_r;   // N_r x N_t, radar echo at t = 0
    ComplexMatrix h_si;  // N_r x N_t
    ComplexMatrix h;     // h_r + h_si
};

struct RadarGroundTruth {
    double theta_deg = 0.0;
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double eta_r = 0.0;      // amplitude attenuation from the radar range equation
    double doppler_hz = 0.0;
    double rcs_m2 = 1.0;
};

/// a(theta)[k] = exp(j 2 pi 0.5 k sin(theta)), k = 0..n-1.
CVector steering_rx(double theta_deg, std::size_t n);
CVector steering_tx(double theta_deg, std::size_t n);

/// Large-scale loss in dB: -20 log10(lambda / (4 pi d0)) + 10 n log10(d / d0).
double pathloss_db(double distance_m, const SystemConfig& cfg);

/// Amplitude attenuation sqrt(lambda^2 sigma / ((4 pi)^3 r^4)).
double radar_attenuation(double wavelength_m, double rcs_m2, double range_m);

double doppler_shift_hz(double velocity_mps, double carrier_hz);

RadarGroundTruth make_radar_ground_truth(const SystemConfig& cfg, const Bearing& target);

/// Rician factor at or above this value is treated as pure line of sight.
inline constexpr double kPureLosKappa = 1e12;

/// sqrt(eta) * (sqrt(k/(k+1)) a(arrive) b(depart)^T + sqrt(1/(k+1)) G), G ~ CN(0,1) iid.
ComplexMatrix rician_channel(double theta_arrive_deg, double theta_depart_deg,
                             std::size_t rows, std::size_t cols, double kappa,
                             double eta_linear, CounterRng& rng);

/// eta_r e^{j 2 pi f_d t} a(theta_r) b(theta_r)^T.
ComplexMatrix radar_channel(const RadarGroundTruth& gt, double t_s, std::size_t n_r,
                            std::size_t n_t);

/// Large-scale SI gain that puts the per-antenna SI power at noise + si_level_db
/// when the transceiver radiates its full power.
double si_large_scale_gain(const SystemConfig& cfg);

ComplexMatrix si_channel(const SystemConfig& cfg, CounterRng& rng);

struct Scenario {
    ChannelSet channels;
    RadarGroundTruth truth;
};

Scenario synthesize(const SystemConfig& cfg, const Bearing& target, const Bearing& uplink,
                    const Bearing& downlink, CounterRng& rng);

/// Convenience overload using the bearings stored in the configuration.
Scenario synthesize(const SystemConfig& cfg, CounterRng& rng);

}  // namespace fdisac
