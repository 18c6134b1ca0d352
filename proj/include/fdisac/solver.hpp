// SPDX-License-Identifier: Apache-2.0
//
// Penalty-based joint transmit/receive beamformer design for a full-duplex
// ISAC transceiver. The SI-free constraint w^H H_si p = 0 is replaced by the
// penalty (1/2beta)|w^H H_si p|^2, the two rates are handled through their
// weighted-MMSE equivalents, and the beampattern gains are replaced by concave
// quadratic minorants p^H Z_t p and w^H Z_r w. The resulting objective
//
//   f_g = a1 (ln rho_u - rho_u E_bs) + a2 (ln rho_d - rho_d E_d)
//         + a3 p^H Z_t p + a4 w^H Z_r w - (1/2beta) |w^H H_si p|^2
//
// The rate surrogate uses the natural log so that rho = 1/E maximizes it.
//
// is maximized by block coordinate ascent over (rho_u, rho_d), omega_u, w, u_d
// and p, each block in closed form (up to a scalar multiplier found by
// bisection for the two power-constrained blocks).

#pragma once

#include <array>
#include <vector>

#include "fdisac/numerics.hpp"
#include "fdisac/random.hpp"
#include "fdisac/scenario.hpp"

namespace fdisac {

/// A block update had no usable direction (e.g. H_u^H w = 0). The solver keeps
/// the previous value of that block when this is raised.
class DegenerateUpdateError : public Error {
public:
    using Error::Error;
};

struct BeamformerState {
    CVector p;        // transceiver precoder, N_t
    CVector w;        // transceiver combiner, N_r
    CVector omega_u;  // uplink user precoder, N_u
    CVector u_d;      // downlink user combiner, N_d
    double rho_u = 1.0;
    double rho_d = 1.0;
};

struct SolverOptions {
    int max_iters = 500;
    double epsilon = 1e-5;
    double beta = 1e-25;
    double bisection_tol = 1e-10;
    std::array<double, 4> alpha{1.0, 1.0, 1.0, 1.0};

    static SolverOptions from_config(const SystemConfig& cfg);
};

struct SolverReport {
    int iterations = 0;
    double initial_objective = 0.0;
    std::vector<double> objective_trace;  // f_g after each full sweep (w unnormalized)
    std::vector<double> zeta_trace;       // relative change of f_g per sweep
    bool converged = false;
    double residual_si_linear = 0.0;      // |w^H H_si p|^2 after normalizing w
    double beta_used = 0.0;               // last penalty parameter actually applied
    int degenerate_updates = 0;
    int boundary_cases = 0;               // p-updates that hit the hard case of the bracket
    double elapsed_seconds = 0.0;
};

/// Everything the block updates need besides the current iterate.
struct DesignProblem {
    const ChannelSet* channels = nullptr;
    std::array<double, 4> alpha{1.0, 1.0, 1.0, 1.0};
    double beta = 1e-25;
    double sigma2_u = 0.0;
    double sigma2_d = 0.0;
    double p_d = 1.0;
    double p_u = 1.0;
    double bisection_tol = 1e-10;
    ComplexMatrix z_t;  // N_t x N_t
    ComplexMatrix z_r;  // N_r x N_r

    static DesignProblem make(const ChannelSet& channels, const SystemConfig& cfg,
                              const SolverOptions& options);
};

/// Z(theta) = s s^H - ||s||^2 I for the length-n steering vector s(theta).
ComplexMatrix build_z(double theta_deg, std::size_t n);

double mse_bs(const BeamformerState& s, const ChannelSet& ch, double sigma2_u);
double mse_dl(const BeamformerState& s, const ChannelSet& ch, double sigma2_d);

struct RhoUpdate {
    double rho_u;
    double rho_d;
};
RhoUpdate update_rho(const BeamformerState& s, const ChannelSet& ch, double sigma2_u,
                     double sigma2_d);

struct OmegaUpdate {
    CVector omega_u;
    double mu;  // multiplier of ||omega_u||^2 = P_u
};
/// Minimizes alpha1 E_bs over the sphere ||omega_u||^2 = P_u. When the
/// unconstrained minimizer h / ||h||^2 (h = H_u^H w) has less than full power
/// and N_u >= 2, the remaining power goes orthogonal to h and mu = 0.
OmegaUpdate update_omega_u(const BeamformerState& s, const ChannelSet& ch, double alpha1,
                           double p_u, double tol);

/// Unconstrained minimizer of alpha1 rho_u E_bs - alpha4 w^H Z_r w + (1/2beta)|w^H H_si p|^2.
CVector update_w(const BeamformerState& s, const ChannelSet& ch, double alpha1, double alpha4,
                 double beta, double sigma2_u, const ComplexMatrix& z_r);

/// MMSE combiner (H_d p p^H H_d^H + sigma2_d I)^{-1} H_d p.
CVector update_u_d(const BeamformerState& s, const ChannelSet& ch, double sigma2_d);

struct PrecoderUpdate {
    CVector p;
    double gamma;               // multiplier of ||p||^2 = P_d
    bool boundary_case = false;  // root not bracketed above the PD boundary
};
/// Minimizes a1 rho_u E_bs + a2 rho_d E_d - a3 p^H Z_t p + (1/2beta)|w^H H_si p|^2
/// over the sphere ||p||^2 = P_d.
PrecoderUpdate update_p(const BeamformerState& s, const ChannelSet& ch,
                        const std::array<double, 4>& alpha, double beta, double sigma2_u,
                        double sigma2_d, double p_d, const ComplexMatrix& z_t, double tol);

double evaluate_objective(const BeamformerState& s, const DesignProblem& problem);
double evaluate_objective(const BeamformerState& s, const ChannelSet& ch,
                          const SystemConfig& cfg);

/// Random feasible start: iid CN(0,1) entries, p and omega_u scaled to full
/// power, w to unit norm, u_d as drawn; rho from one update_rho call.
BeamformerState initial_state(const DesignProblem& problem, CounterRng& rng);

struct SolveResult {
    BeamformerState state;
    SolverReport report;
};

/// Runs the block sweeps rho, omega_u, w, u_d, p until the relative change of
/// f_g drops to epsilon (or max_iters), then normalizes w.
SolveResult solve(const ChannelSet& channels, const SystemConfig& cfg,
                  const SolverOptions& options, CounterRng& init_rng);

SolveResult solve_from(BeamformerState start, const DesignProblem& problem,
                       const SolverOptions& options);

/// Solves (base + weight v v^H) x = rhs. The rank-one term is rotated onto the
/// first coordinate with a Householder reflector so very large weights do not
/// swamp the entries of `base`.
CVector solve_rank_one_penalized(const ComplexMatrix& base, std::span<const cplx> v,
                                 double weight, std::span<const cplx> rhs);

}  // namespace fdisac
