// SPDX-License-Identifier: Apache-2.0
//
// Receive-stream synthesis for one radar frame (N symbols x M blocks), matched
// filtering along fast time, slow-time DFT to a range-Doppler map, and the
// receive angle spectrum.

#pragma once

#include <iosfwd>
#include <vector>

#include "fdisac/random.hpp"
#include "fdisac/scenario.hpp"
#include "fdisac/solver.hpp"

namespace fdisac {

struct FrameSpec {
    std::size_t n = 1024;  // symbols per block (fast time)
    std::size_t m = 512;   // blocks (slow time)
    double t_s = 50e-9;    // sample period
    DopplerConvention doppler = DopplerConvention::kLiteral;

    static FrameSpec from_config(const SystemConfig& cfg);
    void validate() const;
};

/// i_tau = round(2 r / (c T_s)).
std::size_t delay_bins(double range_m, double t_s);

/// Unit-energy QPSK symbols {+-1 +- j}/sqrt(2).
CVector gen_qpsk(std::size_t count, CounterRng& rng);

/// Fast-time x slow-time samples; entry (n, m) sits at flat index n + m N.
struct FrameSamples {
    std::size_t n = 0;
    std::size_t m = 0;
    CVector data;

    cplx& at(std::size_t i, std::size_t j) { return data[i + j * n]; }
    const cplx& at(std::size_t i, std::size_t j) const { return data[i + j * n]; }
    /// Sample i - lag of block j, wrapping cyclically through the whole frame.
    const cplx& delayed(std::size_t i, std::size_t j, std::size_t lag) const;
};

struct StreamOptions {
    bool noise = false;
    bool include_si = false;  // add w^H H_si p s_d[n, m] (zero delay, zero Doppler)
};

struct RxFrame {
    FrameSamples stream;
    FrameSamples s_d;  // transmitted downlink symbols
    FrameSamples s_u;  // uplink symbols
    std::size_t i_tau = 0;
};

/// s[n, m] = w^H H_u omega_u s_u[n, m]
///         + eta_r e^{j phi(m)} w^H a(theta_r) b^T(theta_r) p s_d[n - i_tau, m]
///         (+ w^H H_si p s_d[n, m]) (+ w^H noise),
/// with phi(m) = 2 pi f_d T_s m (literal) or 2 pi f_d N T_s m (physical).
RxFrame synthesize_rx_stream(const BeamformerState& s, const ChannelSet& ch,
                             const RadarGroundTruth& gt, const FrameSpec& frame, double sigma2_u,
                             const StreamOptions& opts, CounterRng& rng);

/// Complex matched-filter output c[l, m] = (1/N) sum_n s[n, m] conj(s_d[n - l, m]),
/// l = 0..lags-1; stored as lags x M with entry (l, m) at l + m * lags.
FrameSamples range_profile(const FrameSamples& stream, const FrameSamples& s_d, std::size_t lags);

struct RangeDopplerMap {
    std::size_t lags = 0;
    std::size_t bins = 0;
    std::vector<double> grid;  // |DFT|, entry (l, k) at l * bins + k
    double range_resolution_m = 0.0;
    double doppler_resolution_hz = 0.0;

    double at(std::size_t l, std::size_t k) const { return grid[l * bins + k]; }
    /// Signed frequency of bin k (bins >= M/2 wrap to negative frequencies).
    double doppler_hz(std::size_t k) const;
    double velocity_mps(std::size_t k, double carrier_hz) const;
};

RangeDopplerMap range_doppler_map(const FrameSamples& profile, const FrameSpec& frame);

struct MapPeak {
    std::size_t lag = 0;
    std::size_t bin = 0;
    double value = 0.0;
};
MapPeak find_peak(const RangeDopplerMap& map);

/// Doppler bin nearest to f_d under the frame's convention.
std::size_t expected_doppler_bin(double doppler_hz, const FrameSpec& frame);

struct AngleSpectrum {
    std::vector<double> thetas_deg;
    std::vector<double> power;

    double argmax_deg() const;
    double at(double theta_deg) const;  // value at the grid point nearest theta
};

/// P(theta) = |w^H (a(theta) + H_si p)|^2.
AngleSpectrum angle_spectrum(const BeamformerState& s, const ChannelSet& ch,
                             std::span<const double> theta_grid_deg);

void write_range_doppler_csv(std::ostream& os, const RangeDopplerMap& map, double carrier_hz);
void write_angle_spectrum_csv(std::ostream& os, const AngleSpectrum& spectrum);

}  // namespace fdisac
