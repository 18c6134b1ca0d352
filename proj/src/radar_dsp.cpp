// SPDX-License-Identifier: Apache-2.0

#include "fdisac/radar_dsp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fdisac {

FrameSpec FrameSpec::from_config(const SystemConfig& cfg) {
    return {cfg.frame_symbols, cfg.frame_blocks, cfg.sample_period_s(), cfg.doppler};
}

void FrameSpec::validate() const {
    if (n < 1 || m < 1) throw Error("frame: N and M must be at least 1");
    if (!(t_s > 0.0)) throw Error("frame: sample period must be positive");
}

std::size_t delay_bins(double range_m, double t_s) {
    return static_cast<std::size_t>(std::llround(2.0 * range_m / (kSpeedOfLight * t_s)));
}

CVector gen_qpsk(std::size_t count, CounterRng& rng) {
    static const double a = 1.0 / std::sqrt(2.0);
    CVector out(count);
    for (auto& s : out) {
        const std::uint64_t bits = rng();
        s = cplx{(bits & 1U) ? a : -a, (bits & 2U) ? a : -a};
    }
    return out;
}

const cplx& FrameSamples::delayed(std::size_t i, std::size_t j, std::size_t lag) const {
    const std::size_t total = data.size();
    const std::size_t flat = i + j * n;
    return data[(flat + total - lag % total) % total];
}

RxFrame synthesize_rx_stream(const BeamformerState& s, const ChannelSet& ch,
                             const RadarGroundTruth& gt, const FrameSpec& frame, double sigma2_u,
                             const StreamOptions& opts, CounterRng& rng) {
    frame.validate();
    RxFrame rx;
    rx.i_tau = delay_bins(gt.range_m, frame.t_s);
    if (rx.i_tau >= frame.n) throw Error("synthesize_rx_stream: echo delay exceeds the block length");

    const std::size_t total = frame.n * frame.m;
    rx.s_d = {frame.n, frame.m, gen_qpsk(total, rng)};
    rx.s_u = {frame.n, frame.m, gen_qpsk(total, rng)};
    rx.stream = {frame.n, frame.m, CVector(total)};

    const std::size_t n_r = s.w.size();
    const std::size_t n_t = s.p.size();
    const cplx g_up = dot(s.w, matvec(ch.h_u, s.omega_u));
    // w^H a(theta) b^T(theta) p
    const CVector a = steering_rx(gt.theta_deg, n_r);
    const CVector b = steering_tx(gt.theta_deg, n_t);
    cplx bt_p{};
    for (std::size_t i = 0; i < n_t; ++i) bt_p += b[i] * s.p[i];
    const cplx g_echo = gt.eta_r * dot(s.w, a) * bt_p;
    const cplx g_si = opts.include_si ? dot(s.w, matvec(ch.h_si, s.p)) : cplx{};
    const double noise_var = sigma2_u * norm2_squared(s.w);

    const double step = frame.doppler == DopplerConvention::kLiteral
                            ? 2.0 * kPi * gt.doppler_hz * frame.t_s
                            : 2.0 * kPi * gt.doppler_hz * static_cast<double>(frame.n) * frame.t_s;
    for (std::size_t j = 0; j < frame.m; ++j) {
        const cplx echo = g_echo * std::polar(1.0, step * static_cast<double>(j));
        for (std::size_t i = 0; i < frame.n; ++i) {
            cplx v = g_up * rx.s_u.at(i, j) + echo * rx.s_d.delayed(i, j, rx.i_tau) +
                     g_si * rx.s_d.at(i, j);
            if (opts.noise) v += rng.complex_normal(noise_var);
            rx.stream.at(i, j) = v;
        }
    }
    return rx;
}

FrameSamples range_profile(const FrameSamples& stream, const FrameSamples& s_d, std::size_t lags) {
    if (stream.n != s_d.n || stream.m != s_d.m) throw DimensionError("range_profile: frame shape");
    FrameSamples out{lags, stream.m, CVector(lags * stream.m)};
    const double inv_n = 1.0 / static_cast<double>(stream.n);
    for (std::size_t j = 0; j < stream.m; ++j) {
        for (std::size_t l = 0; l < lags; ++l) {
            cplx acc{};
            for (std::size_t i = 0; i < stream.n; ++i) {
                acc += stream.at(i, j) * std::conj(s_d.delayed(i, j, l));
            }
            out.at(l, j) = acc * inv_n;
        }
    }
    return out;
}

double RangeDopplerMap::doppler_hz(std::size_t k) const {
    const double signed_k = k < (bins + 1) / 2 ? static_cast<double>(k)
                                               : static_cast<double>(k) - static_cast<double>(bins);
    return signed_k * doppler_resolution_hz;
}

double RangeDopplerMap::velocity_mps(std::size_t k, double carrier_hz) const {
    return doppler_hz(k) * kSpeedOfLight / (2.0 * carrier_hz);
}

RangeDopplerMap range_doppler_map(const FrameSamples& profile, const FrameSpec& frame) {
    if (profile.m != frame.m) throw DimensionError("range_doppler_map: slow-time length");
    RangeDopplerMap map;
    map.lags = profile.n;
    map.bins = frame.m;
    map.grid.assign(map.lags * map.bins, 0.0);
    map.range_resolution_m = kSpeedOfLight * frame.t_s / 2.0;
    const double period = frame.doppler == DopplerConvention::kLiteral
                              ? frame.t_s
                              : static_cast<double>(frame.n) * frame.t_s;
    map.doppler_resolution_hz = 1.0 / (static_cast<double>(frame.m) * period);
    CVector slow(frame.m);
    for (std::size_t l = 0; l < map.lags; ++l) {
        for (std::size_t j = 0; j < frame.m; ++j) slow[j] = profile.at(l, j);
        const CVector spec = dft(slow);
        for (std::size_t k = 0; k < frame.m; ++k) map.grid[l * map.bins + k] = std::abs(spec[k]);
    }
    return map;
}

MapPeak find_peak(const RangeDopplerMap& map) {
    MapPeak best;
    best.value = -1.0;
    for (std::size_t l = 0; l < map.lags; ++l) {
        for (std::size_t k = 0; k < map.bins; ++k) {
            if (map.at(l, k) > best.value) best = {l, k, map.at(l, k)};
        }
    }
    return best;
}

std::size_t expected_doppler_bin(double doppler_hz, const FrameSpec& frame) {
    const double period = frame.doppler == DopplerConvention::kLiteral
                              ? frame.t_s
                              : static_cast<double>(frame.n) * frame.t_s;
    const double m = static_cast<double>(frame.m);
    double k = std::round(doppler_hz * m * period);
    k = std::fmod(k, m);
    if (k < 0.0) k += m;
    return static_cast<std::size_t>(k);
}

double AngleSpectrum::argmax_deg() const {
    if (power.empty()) throw Error("angle spectrum is empty");
    const auto it = std::max_element(power.begin(), power.end());
    return thetas_deg[static_cast<std::size_t>(it - power.begin())];
}

double AngleSpectrum::at(double theta_deg) const {
    if (power.empty()) throw Error("angle spectrum is empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < thetas_deg.size(); ++i) {
        if (std::abs(thetas_deg[i] - theta_deg) < std::abs(thetas_deg[best] - theta_deg)) best = i;
    }
    return power[best];
}

AngleSpectrum angle_spectrum(const BeamformerState& s, const ChannelSet& ch,
                             std::span<const double> theta_grid_deg) {
    if (theta_grid_deg.empty()) throw Error("angle_spectrum: empty angle grid");
    AngleSpectrum out;
    out.thetas_deg.assign(theta_grid_deg.begin(), theta_grid_deg.end());
    const CVector leak = matvec(ch.h_si, s.p);
    out.power.reserve(theta_grid_deg.size());
    for (double th : theta_grid_deg) {
        const CVector v = add(steering_rx(th, s.w.size()), leak);
        out.power.push_back(std::norm(dot(s.w, v)));
    }
    return out;
}

void write_range_doppler_csv(std::ostream& os, const RangeDopplerMap& map, double carrier_hz) {
    os << "# range_resolution_m=" << map.range_resolution_m
       << " doppler_resolution_hz=" << map.doppler_resolution_hz << "\r\n";
    os << "lag,range_m,bin,doppler_hz,velocity_mps,magnitude\r\n";
    for (std::size_t l = 0; l < map.lags; ++l) {
        for (std::size_t k = 0; k < map.bins; ++k) {
            os << l << ',' << static_cast<double>(l) * map.range_resolution_m << ',' << k << ','
               << map.doppler_hz(k) << ',' << map.velocity_mps(k, carrier_hz) << ','
               << map.at(l, k) << "\r\n";
        }
    }
}

void write_angle_spectrum_csv(std::ostream& os, const AngleSpectrum& spectrum) {
    os << "# argmax_deg=" << spectrum.argmax_deg() << "\r\n";
    os << "theta_deg,power\r\n";
    for (std::size_t i = 0; i < spectrum.power.size(); ++i) {
        os << spectrum.thetas_deg[i] << ',' << spectrum.power[i] << "\r\n";
    }
}

}  // namespace fdisac
