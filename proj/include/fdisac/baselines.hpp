// SPDX-License-Identifier: Apache-2.0
//
// Reference transceiver designs: null-space projection (NSP), radar-only and
// communication-only beams, plus half-duplex rate accounting.

#pragma once

#include <string_view>
#include <vector>

#include "fdisac/scenario.hpp"
#include "fdisac/solver.hpp"

namespace fdisac {

enum class BaselineKind { kNsp, kRadarOnly, kCommOnly };

std::string_view to_string(BaselineKind kind);
/// Accepts "NSP", "RadarOnly", "CommOnly" (case-insensitive). Throws Error otherwise.
BaselineKind parse_baseline_kind(std::string_view text);

struct BeamPair {
    CVector p;  // ||p||^2 = P_d
    CVector w;  // unit norm
};

BeamPair radar_only(double theta_r_deg, const SystemConfig& cfg);
BeamPair comm_only(double theta_u_deg, const SystemConfig& cfg);

/// I - A (A^H A)^{-1} A^H for the columns of `a` that are linearly independent;
/// columns whose residual after orthogonalization falls below 1e-10 of their own
/// norm are dropped and counted in `dropped`.
struct Projector {
    ComplexMatrix matrix;
    std::size_t rank = 0;
    std::size_t dropped = 0;
};
Projector complement_projector(const std::vector<CVector>& columns, std::size_t dim);

struct NspResult {
    BeamPair beams;
    std::size_t nulled = 0;   // columns actually projected out
    std::size_t dropped = 0;  // dependent columns skipped
};

/// TX: sqrt(s) b(theta_r) + sqrt(1-s) b(theta_d) scaled to P_d (s = nsp_tx_split).
/// RX: a(theta_r) projected off H_si p (and a(theta_d) if nsp_null_downlink), normalized.
NspResult nsp_beamformers(const ChannelSet& channels, double theta_r_deg, double theta_d_deg,
                          const SystemConfig& cfg);

/// Completes a baseline beam pair into a full state so the communication metrics
/// are defined: omega_u = sqrt(P_u) H_u^H w / ||H_u^H w|| and u_d is the MMSE
/// combiner for p.
BeamformerState complete_state(const BeamPair& beams, const ChannelSet& channels,
                               const SystemConfig& cfg);

/// Builds the baseline of the given kind for the configured geometry.
BeamformerState baseline_state(BaselineKind kind, const ChannelSet& channels,
                               const SystemConfig& cfg);

/// delta R_dl + (1 - delta) R_ul.
double half_duplex_rate(double r_ul, double r_dl, double delta);

}  // namespace fdisac
