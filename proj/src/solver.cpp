// SPDX-License-Identifier: Apache-2.0

#include "fdisac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace fdisac {

namespace {

constexpr double kDegenerateNorm = 1e-300;
constexpr int kMaxBracketDoublings = 60;

// Smallest diagonal shift t (to within a relative 1e-12) such that m + t I is
// positive definite, for Hermitian PSD m: t lies in [-min diag, 0] because the
// smallest eigenvalue never exceeds the smallest diagonal entry.
double positive_definite_boundary(const ComplexMatrix& m) {
    auto pd_at = [&](double t) {
        ComplexMatrix probe = m;
        probe.add_diagonal(t);
        return is_positive_definite(probe);
    };
    double min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.rows(); ++i) min_diag = std::min(min_diag, m(i, i).real());
    double lower = -std::max(min_diag, 0.0);
    double upper = 0.0;
    if (!pd_at(upper)) {
        // Numerically only semidefinite: walk up from a tiny shift.
        upper = std::max(1e-300, 1e-14 * std::abs(min_diag));
        for (int k = 0; k < 2000 && !pd_at(upper); ++k) upper *= 2.0;
        lower = 0.0;
    }
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lower + upper);
        if (mid <= lower || mid >= upper) break;
        if (upper - lower <= 1e-12 * std::max(1.0, std::abs(upper))) break;
        if (pd_at(mid)) {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    return upper;
}

// Unit vector spanning the (near) null space of a nearly singular PD matrix.
CVector inverse_iteration(const ComplexMatrix& m) {
    const std::size_t n = m.rows();
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = cplx{1.0, 0.5 / static_cast<double>(i + 1)};
    for (int it = 0; it < 8; ++it) {
        v = solve_linear(m, v);
        const double nv = norm2(v);
        for (auto& x : v) x /= nv;
    }
    return v;
}

}  // namespace

SolverOptions SolverOptions::from_config(const SystemConfig& cfg) {
    SolverOptions o;
    o.max_iters = cfg.max_iters;
    o.epsilon = cfg.epsilon;
    o.beta = cfg.beta;
    o.bisection_tol = cfg.bisection_tol;
    o.alpha = cfg.alpha;
    return o;
}

DesignProblem DesignProblem::make(const ChannelSet& channels, const SystemConfig& cfg,
                                  const SolverOptions& options) {
    DesignProblem p;
    p.channels = &channels;
    p.alpha = options.alpha;
    p.beta = options.beta;
    p.sigma2_u = cfg.noise_watts();
    p.sigma2_d = cfg.noise_watts();
    p.p_d = cfg.pd_watts();
    p.p_u = cfg.pu_watts();
    p.bisection_tol = options.bisection_tol;
    p.z_t = build_z(cfg.target.theta_deg, channels.h_r.cols());
    p.z_r = build_z(cfg.target.theta_deg, channels.h_r.rows());
    return p;
}

ComplexMatrix build_z(double theta_deg, std::size_t n) {
    const CVector s = steering_tx(theta_deg, n);
    ComplexMatrix z = ComplexMatrix::outer(s, s);
    z.add_diagonal(-norm2_squared(s));
    return z;
}

double mse_bs(const BeamformerState& s, const ChannelSet& ch, double sigma2_u) {
    // |w^H H_u w_u|^2 - 2 Re{w^H H_u w_u} + 1 == |1 - w^H H_u w_u|^2.
    const cplx c = dot(s.w, matvec(ch.h_u, s.omega_u));
    const cplx interference = dot(s.w, matvec(ch.h, s.p));
    return std::norm(1.0 - c) + std::norm(interference) + sigma2_u * norm2_squared(s.w);
}

double mse_dl(const BeamformerState& s, const ChannelSet& ch, double sigma2_d) {
    const cplx c = dot(s.u_d, matvec(ch.h_d, s.p));
    return std::norm(1.0 - c) + sigma2_d * norm2_squared(s.u_d);
}

RhoUpdate update_rho(const BeamformerState& s, const ChannelSet& ch, double sigma2_u,
                     double sigma2_d) {
    const double e_bs = mse_bs(s, ch, sigma2_u);
    const double e_d = mse_dl(s, ch, sigma2_d);
    if (!(e_bs > 0.0) || !(e_d > 0.0)) {
        throw Error("update_rho: mean-square error must be positive");
    }
    return {1.0 / e_bs, 1.0 / e_d};
}

OmegaUpdate update_omega_u(const BeamformerState& s, const ChannelSet& ch, double alpha1,
                           double p_u, double tol) {
    const CVector h = matvec(hermitian_transpose(ch.h_u), s.w);
    const double hn2 = norm2_squared(h);
    if (!(hn2 > kDegenerateNorm)) {
        throw DegenerateUpdateError("update_omega_u: H_u^H w vanishes");
    }
    if (alpha1 == 0.0) {
        // Objective is flat; take the limit direction at full power.
        return {scaled(h, std::sqrt(p_u / hn2)), 0.0};
    }
    // omega(mu) = alpha1 h / (alpha1 ||h||^2 + mu); ||omega||^2 / P_u - 1 decreases in mu.
    const double a = alpha1 * hn2;
    auto excess = [&](double mu) {
        const double denom = a + mu;
        return alpha1 * alpha1 * hn2 / (denom * denom) / p_u - 1.0;
    };
    double lo = 0.0;
    if (excess(lo) < 0.0) {
        if (h.size() == 1) {
            // Unconstrained minimizer lies inside the circle; alpha1 |h|^2 + mu
            // stays positive down to -a.
            lo = -a * (1.0 - 1e-12);
        } else {
            // alpha1 h h^H is singular, so mu cannot go below 0. Take the mu = 0
            // point and fill the remaining power orthogonally to h, which leaves
            // E_bs unchanged. The orthogonal direction follows the previous
            // precoder when it has one.
            const CVector base = scaled(h, 1.0 / hn2);
            CVector v = s.omega_u;
            if (v.size() != h.size()) v.assign(h.size(), cplx{});
            auto project_out = [&](CVector& x) {
                const cplx c = dot(h, x) / hn2;
                for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * h[i];
            };
            project_out(v);
            if (!(norm2_squared(v) > 1e-24 * norm2_squared(s.omega_u))) {
                v.assign(h.size(), cplx{});
                std::size_t k = 0;
                for (std::size_t i = 1; i < h.size(); ++i)
                    if (std::norm(h[i]) < std::norm(h[k])) k = i;
                v[k] = 1.0;
                project_out(v);
            }
            const double tau = std::sqrt(std::max(0.0, p_u - norm2_squared(base)));
            return {add(base, scaled(v, tau / norm2(v))), 0.0};
        }
    }
    double hi = 1.0;
    int doublings = 0;
    while (hi <= lo || excess(hi) > 0.0) {
        hi = hi <= lo ? std::abs(lo) + 1.0 : 2.0 * hi;
        if (++doublings > kMaxBracketDoublings + 1100) {
            throw BracketError("update_omega_u: could not bracket the multiplier");
        }
    }
    const double mu = bisect(excess, lo, hi, BisectionOptions{tol, 0.0, 2000});
    return {scaled(h, alpha1 / (a + mu)), mu};
}

CVector solve_rank_one_penalized(const ComplexMatrix& base, std::span<const cplx> v,
                                 double weight, std::span<const cplx> rhs) {
    const double nv2 = norm2_squared(v);
    if (weight == 0.0 || nv2 == 0.0) return solve_linear(base, rhs);
    const ComplexMatrix q = householder_reflector(v);
    ComplexMatrix rotated = matmul(q, matmul(base, q));
    rotated(0, 0) += weight * nv2;
    const CVector y = solve_linear(rotated, matvec(q, rhs));
    return matvec(q, y);
}

CVector update_w(const BeamformerState& s, const ChannelSet& ch, double alpha1, double alpha4,
                 double beta, double sigma2_u, const ComplexMatrix& z_r) {
    const CVector g = matvec(ch.h_u, s.omega_u);
    const CVector hp = matvec(ch.h, s.p);
    const CVector v = matvec(ch.h_si, s.p);
    const double c = alpha1 * s.rho_u;

    // 2 X_u = 2 (c g g^H + c hp hp^H + c sigma2 I - alpha4 Z_r)
    ComplexMatrix m = ComplexMatrix::outer(g, g);
    m += ComplexMatrix::outer(hp, hp);
    m.add_diagonal(sigma2_u);
    m *= 2.0 * c;
    m -= cplx{2.0 * alpha4} * z_r;
    const CVector rhs = scaled(g, 2.0 * c);
    if (norm2_squared(rhs) == 0.0) return CVector(g.size());
    return solve_rank_one_penalized(m, v, 1.0 / beta, rhs);
}

CVector update_u_d(const BeamformerState& s, const ChannelSet& ch, double sigma2_d) {
    const CVector g = matvec(ch.h_d, s.p);
    if (norm2_squared(g) == 0.0) return CVector(g.size());
    ComplexMatrix m = ComplexMatrix::outer(g, g);
    m.add_diagonal(sigma2_d);
    return solve_linear(m, g);
}

PrecoderUpdate update_p(const BeamformerState& s, const ChannelSet& ch,
                        const std::array<double, 4>& alpha, double beta, double sigma2_u,
                        double sigma2_d, double p_d, const ComplexMatrix& z_t, double tol) {
    (void)sigma2_u;
    (void)sigma2_d;
    const ComplexMatrix h_d_h = hermitian_transpose(ch.h_d);
    const CVector rhs = scaled(matvec(h_d_h, s.u_d), 2.0 * alpha[1] * s.rho_d);
    if (!(norm2_squared(rhs) > kDegenerateNorm)) {
        throw DegenerateUpdateError("update_p: H_d^H u_d vanishes");
    }
    const CVector hw = matvec(hermitian_transpose(ch.h), s.w);
    const CVector hdu = matvec(h_d_h, s.u_d);
    const CVector penalty_dir = matvec(hermitian_transpose(ch.h_si), s.w);

    // 2 X_d = 2 (a1 rho_u H^H w w^H H + a2 rho_d H_d^H u u^H H_d - a3 Z_t)
    ComplexMatrix m = cplx{alpha[0] * s.rho_u} * ComplexMatrix::outer(hw, hw);
    m += cplx{alpha[1] * s.rho_d} * ComplexMatrix::outer(hdu, hdu);
    m -= cplx{alpha[2]} * z_t;
    m *= 2.0;

    // Rotate the penalty direction onto e_0; the Gamma shift is rotation invariant.
    const std::size_t n = m.rows();
    ComplexMatrix q = ComplexMatrix::identity(n);
    ComplexMatrix base = m;
    const double pn2 = norm2_squared(penalty_dir);
    if (pn2 > 0.0) {
        q = householder_reflector(penalty_dir);
        base = matmul(q, matmul(m, q));
        base(0, 0) += pn2 / beta;
    }
    const CVector rhs_rot = matvec(q, rhs);

    auto solve_at = [&](double gamma) {
        ComplexMatrix a = base;
        a.add_diagonal(2.0 * gamma);
        return solve_linear(a, rhs_rot);
    };
    auto excess = [&](double gamma) { return norm2_squared(solve_at(gamma)) / p_d - 1.0; };
    auto finish = [&](const CVector& rotated, double gamma, bool boundary) {
        return PrecoderUpdate{matvec(q, rotated), gamma, boundary};
    };

    // Lower end: Gamma = 0 when the unconstrained minimizer has at least full
    // power, otherwise just above the positive-definiteness boundary. Near the
    // boundary the shifted system can be numerically singular; the margin grows
    // until it is not, which only tightens the bracket from below.
    auto try_excess = [&](double gamma) -> std::optional<double> {
        try {
            return excess(gamma);
        } catch (const SingularMatrixError&) {
            return std::nullopt;
        }
    };
    double lo = 0.0;
    const std::optional<double> f0 = is_positive_definite(base) ? try_excess(0.0) : std::nullopt;
    if (!f0 || *f0 < 0.0) {
        const double boundary = 0.5 * positive_definite_boundary(base);
        double margin = 1e-9 * std::max(1.0, std::abs(boundary));
        std::optional<double> f_lo;
        for (int k = 0; k < 40; ++k, margin *= 10.0) {
            lo = boundary + margin;
            f_lo = try_excess(lo);
            if (f_lo) break;
        }
        if (!f_lo) throw SingularMatrixError("update_p: no solvable multiplier above the boundary", 0.0);
        if (*f_lo < 0.0) {
            // Hard case: the multiplier sits at the boundary; add the null
            // direction of the shifted system to reach the sphere.
            ComplexMatrix a = base;
            a.add_diagonal(2.0 * lo);
            CVector p0 = solve_linear(a, rhs_rot);
            const CVector v = inverse_iteration(a);
            const double c = dot(v, p0).real();
            const double gap = std::max(0.0, p_d - norm2_squared(p0));
            const double tau = -c + std::sqrt(c * c + gap);
            for (std::size_t i = 0; i < n; ++i) p0[i] += tau * v[i];
            return finish(p0, lo, true);
        }
    }

    double hi = std::max(1.0, 2.0 * std::abs(lo));
    for (int k = 0; excess(hi) > 0.0; ++k) {
        if (k >= kMaxBracketDoublings) {
            throw BracketError("update_p: multiplier bracket exceeded 2^60");
        }
        hi *= 2.0;
    }
    const double gamma = bisect(excess, lo, hi, BisectionOptions{tol, 0.0, 2000});
    return finish(solve_at(gamma), gamma, false);
}

double evaluate_objective(const BeamformerState& s, const DesignProblem& pr) {
    const auto& ch = *pr.channels;
    const auto& a = pr.alpha;
    // Natural log: rho = 1/E is then the exact maximizer over rho.
    double f = 0.0;
    if (a[0] != 0.0) f += a[0] * (std::log(s.rho_u) - s.rho_u * mse_bs(s, ch, pr.sigma2_u));
    if (a[1] != 0.0) f += a[1] * (std::log(s.rho_d) - s.rho_d * mse_dl(s, ch, pr.sigma2_d));
    if (a[2] != 0.0) f += a[2] * hermitian_form(pr.z_t, s.p);
    if (a[3] != 0.0) f += a[3] * hermitian_form(pr.z_r, s.w);
    const cplx leak = dot(s.w, matvec(ch.h_si, s.p));
    f -= std::norm(leak) / (2.0 * pr.beta);
    return f;
}

double evaluate_objective(const BeamformerState& s, const ChannelSet& ch,
                          const SystemConfig& cfg) {
    const SolverOptions opts = SolverOptions::from_config(cfg);
    return evaluate_objective(s, DesignProblem::make(ch, cfg, opts));
}

BeamformerState initial_state(const DesignProblem& pr, CounterRng& rng) {
    const auto& ch = *pr.channels;
    auto draw = [&](std::size_t n) {
        CVector v(n);
        for (auto& x : v) x = rng.complex_normal();
        return v;
    };
    BeamformerState s;
    s.p = draw(ch.h.cols());
    s.w = draw(ch.h.rows());
    s.omega_u = draw(ch.h_u.cols());
    s.u_d = draw(ch.h_d.rows());
    s.p = scaled(s.p, std::sqrt(pr.p_d / norm2_squared(s.p)));
    s.omega_u = scaled(s.omega_u, std::sqrt(pr.p_u / norm2_squared(s.omega_u)));
    s.w = scaled(s.w, 1.0 / norm2(s.w));
    const RhoUpdate r = update_rho(s, ch, pr.sigma2_u, pr.sigma2_d);
    s.rho_u = r.rho_u;
    s.rho_d = r.rho_d;
    return s;
}

SolveResult solve_from(BeamformerState state, const DesignProblem& problem_in,
                       const SolverOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    DesignProblem problem = problem_in;
    const auto& ch = *problem.channels;
    const auto& a = problem.alpha;
    SolverReport report;
    report.initial_objective = evaluate_objective(state, problem);

    double previous = report.initial_objective;
    bool retried = false;
    for (int it = 1; it <= options.max_iters; ++it) {
        const RhoUpdate r = update_rho(state, ch, problem.sigma2_u, problem.sigma2_d);
        state.rho_u = r.rho_u;
        state.rho_d = r.rho_d;

        try {
            state.omega_u =
                update_omega_u(state, ch, a[0], problem.p_u, problem.bisection_tol).omega_u;
        } catch (const DegenerateUpdateError&) {
            ++report.degenerate_updates;
        }

        try {
            state.w = update_w(state, ch, a[0], a[3], problem.beta, problem.sigma2_u, problem.z_r);
        } catch (const SingularMatrixError&) {
            if (retried) throw;
            retried = true;
            problem.beta *= 10.0;
            state.w = update_w(state, ch, a[0], a[3], problem.beta, problem.sigma2_u, problem.z_r);
        }

        state.u_d = update_u_d(state, ch, problem.sigma2_d);

        try {
            const PrecoderUpdate up =
                update_p(state, ch, a, problem.beta, problem.sigma2_u, problem.sigma2_d,
                         problem.p_d, problem.z_t, problem.bisection_tol);
            state.p = up.p;
            if (up.boundary_case) ++report.boundary_cases;
        } catch (const DegenerateUpdateError&) {
            ++report.degenerate_updates;
        }

        const double current = evaluate_objective(state, problem);
        const double delta = std::abs(current - previous);
        const double zeta = previous != 0.0 ? delta / std::abs(previous)
                                            : std::numeric_limits<double>::infinity();
        report.objective_trace.push_back(current);
        report.zeta_trace.push_back(zeta);
        report.iterations = it;
        previous = current;
        if (zeta <= options.epsilon &&
            delta <= options.epsilon * std::max(1.0, std::abs(current))) {
            report.converged = true;
            break;
        }
    }

    const double wn = norm2(state.w);
    if (wn > 0.0) state.w = scaled(state.w, 1.0 / wn);
    report.residual_si_linear = std::norm(dot(state.w, matvec(ch.h_si, state.p)));
    report.beta_used = problem.beta;
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(state), std::move(report)};
}

SolveResult solve(const ChannelSet& channels, const SystemConfig& cfg,
                  const SolverOptions& options, CounterRng& init_rng) {
    const DesignProblem problem = DesignProblem::make(channels, cfg, options);
    return solve_from(initial_state(problem, init_rng), problem, options);
}

}  // namespace fdisac
