// SPDX-License-Identifier: Apache-2.0

#include "fdisac/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace fdisac {

namespace {

constexpr double kDependentColumn = 1e-10;

CVector to_power(std::span<const cplx> v, double power) {
    const double n2 = norm2_squared(v);
    if (!(n2 > 0.0)) throw Error("baselines: zero beam direction");
    return scaled(v, std::sqrt(power / n2));
}

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::kNsp:
            return "NSP";
        case BaselineKind::kRadarOnly:
            return "RadarOnly";
        case BaselineKind::kCommOnly:
            return "CommOnly";
    }
    return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view text) {
    const std::string t = lowered(text);
    if (t == "nsp") return BaselineKind::kNsp;
    if (t == "radaronly" || t == "radar_only" || t == "radar-only") return BaselineKind::kRadarOnly;
    if (t == "commonly" || t == "comm_only" || t == "comm-only") return BaselineKind::kCommOnly;
    throw Error("unknown baseline '" + std::string(text) + "' (expected NSP, RadarOnly, CommOnly)");
}

BeamPair radar_only(double theta_r_deg, const SystemConfig& cfg) {
    return {to_power(steering_tx(theta_r_deg, cfg.n_t), cfg.pd_watts()),
            to_power(steering_rx(theta_r_deg, cfg.n_r), 1.0)};
}

BeamPair comm_only(double theta_u_deg, const SystemConfig& cfg) {
    return radar_only(theta_u_deg, cfg);
}

Projector complement_projector(const std::vector<CVector>& columns, std::size_t dim) {
    // Modified Gram-Schmidt on the columns, then P = I - sum q q^H.
    std::vector<CVector> basis;
    Projector out;
    for (const auto& col : columns) {
        if (col.size() != dim) throw DimensionError("complement_projector: column length");
        const double norm0 = norm2(col);
        CVector r = col;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                const cplx c = dot(q, r);
                for (std::size_t i = 0; i < dim; ++i) r[i] -= c * q[i];
            }
        }
        const double nr = norm2(r);
        if (!(norm0 > 0.0) || nr <= kDependentColumn * norm0) {
            ++out.dropped;
            continue;
        }
        basis.push_back(scaled(r, 1.0 / nr));
    }
    out.matrix = ComplexMatrix::identity(dim);
    for (const auto& q : basis) out.matrix -= ComplexMatrix::outer(q, q);
    out.rank = basis.size();
    return out;
}

NspResult nsp_beamformers(const ChannelSet& channels, double theta_r_deg, double theta_d_deg,
                          const SystemConfig& cfg) {
    const double s = cfg.nsp_tx_split;
    const CVector br = steering_tx(theta_r_deg, cfg.n_t);
    const CVector bd = steering_tx(theta_d_deg, cfg.n_t);
    CVector p(cfg.n_t);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::sqrt(s) * br[i] + std::sqrt(1.0 - s) * bd[i];
    p = to_power(p, cfg.pd_watts());

    std::vector<CVector> nulls;
    const CVector leak = matvec(channels.h_si, p);
    if (norm2_squared(leak) > 0.0) nulls.push_back(leak);
    if (cfg.nsp_null_downlink) nulls.push_back(steering_rx(theta_d_deg, cfg.n_r));
    if (nulls.size() >= cfg.n_r) throw DimensionError("nsp_beamformers: null set fills the array");

    const Projector proj = complement_projector(nulls, cfg.n_r);
    CVector w = matvec(proj.matrix, steering_rx(theta_r_deg, cfg.n_r));
    w = to_power(w, 1.0);
    return {{std::move(p), std::move(w)}, proj.rank, proj.dropped};
}

BeamformerState complete_state(const BeamPair& beams, const ChannelSet& channels,
                               const SystemConfig& cfg) {
    BeamformerState s;
    s.p = beams.p;
    s.w = beams.w;
    const CVector h = matvec(hermitian_transpose(channels.h_u), s.w);
    const double hn2 = norm2_squared(h);
    s.omega_u = hn2 > 0.0 ? scaled(h, std::sqrt(cfg.pu_watts() / hn2)) : CVector(cfg.n_u);
    s.u_d = update_u_d(s, channels, cfg.noise_watts());
    s.rho_u = 1.0 / mse_bs(s, channels, cfg.noise_watts());
    s.rho_d = 1.0 / mse_dl(s, channels, cfg.noise_watts());
    return s;
}

BeamformerState baseline_state(BaselineKind kind, const ChannelSet& channels,
                               const SystemConfig& cfg) {
    switch (kind) {
        case BaselineKind::kNsp:
            return complete_state(
                nsp_beamformers(channels, cfg.target.theta_deg, cfg.downlink.theta_deg, cfg).beams,
                channels, cfg);
        case BaselineKind::kRadarOnly:
            return complete_state(radar_only(cfg.target.theta_deg, cfg), channels, cfg);
        case BaselineKind::kCommOnly:
            return complete_state(comm_only(cfg.uplink.theta_deg, cfg), channels, cfg);
    }
    throw Error("baseline_state: unknown kind");
}

double half_duplex_rate(double r_ul, double r_dl, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw Error("half_duplex_rate: delta must lie in [0, 1]");
    return delta * r_dl + (1.0 - delta) * r_ul;
}

}  // namespace fdisac
