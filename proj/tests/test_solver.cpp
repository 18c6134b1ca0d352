// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fdisac/harness.hpp"
#include "fdisac/scenario.hpp"
#include "fdisac/solver.hpp"
#include "oracle.hpp"

using namespace fdisac;

namespace {

DesignProblem problem_of(const oracle::Instance& in) {
    DesignProblem pr;
    pr.channels = &in.ch;
    pr.alpha = in.alpha;
    pr.beta = in.beta;
    pr.sigma2_u = in.sigma2_u;
    pr.sigma2_d = in.sigma2_d;
    pr.p_d = in.p_d;
    pr.p_u = in.p_u;
    pr.bisection_tol = 1e-12;
    pr.z_t = build_z(in.theta_deg, in.ch.h.cols());
    pr.z_r = build_z(in.theta_deg, in.ch.h.rows());
    return pr;
}

ChannelSet zero_channels(std::size_t nt, std::size_t nr, std::size_t nu, std::size_t nd) {
    ChannelSet ch;
    ch.h_u = ComplexMatrix(nr, nu);
    ch.h_d = ComplexMatrix(nd, nt);
    ch.h_r = ComplexMatrix(nr, nt);
    ch.h_si = ComplexMatrix(nr, nt);
    ch.h = ComplexMatrix(nr, nt);
    return ch;
}

Scenario reference(std::uint64_t seed, int trial) {
    SystemConfig cfg;
    CounterRng rng(channel_stream(seed, 5, trial));
    return synthesize(cfg, rng);
}

}  // namespace

TEST_CASE("uplink MSE") {
    auto ch = zero_channels(2, 2, 1, 1);
    BeamformerState s;
    s.w = {1.0, 0.0};
    s.p = {1.0, 0.0};
    s.omega_u = {1.0};
    s.u_d = {1.0};
    CHECK(mse_bs(s, ch, 1.0) == doctest::Approx(2.0).epsilon(1e-15));

    ch.h_u(0, 0) = 1.0;
    CHECK(mse_bs(s, ch, 0.0) == doctest::Approx(0.0));

    std::mt19937_64 g(21);
    for (int t = 0; t < 5; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const double closed = mse_bs(in.st, in.ch, in.sigma2_u);
        CHECK(closed == doctest::Approx(oracle::ref_mse_bs(in.st, in.ch, in.sigma2_u)).epsilon(1e-12));
        const double mc = oracle::mc_mse_bs(in.st, in.ch, in.sigma2_u, 100000, g);
        CHECK(std::abs(mc - closed) <= 0.01 * closed);
    }
}

TEST_CASE("downlink MSE") {
    auto ch = zero_channels(2, 2, 1, 1);
    BeamformerState s;
    s.w = {1.0, 0.0};
    s.p = {1.0, 0.0};
    s.omega_u = {1.0};
    s.u_d = {1.0};
    CHECK(mse_dl(s, ch, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    ch.h_d(0, 0) = 1.0;
    CHECK(mse_dl(s, ch, 0.0) == doctest::Approx(0.0));

    std::mt19937_64 g(22);
    for (int t = 0; t < 5; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const double closed = mse_dl(in.st, in.ch, in.sigma2_d);
        CHECK(closed == doctest::Approx(oracle::ref_mse_dl(in.st, in.ch, in.sigma2_d)).epsilon(1e-12));
        const double mc = oracle::mc_mse_dl(in.st, in.ch, in.sigma2_d, 100000, g);
        CHECK(std::abs(mc - closed) <= 0.01 * closed);
    }
}

TEST_CASE("rho update") {
    auto ch = zero_channels(2, 2, 1, 1);
    BeamformerState s;
    s.w = {1.0, 0.0};
    s.p = {1.0, 0.0};
    s.omega_u = {1.0};
    s.u_d = {1.0};
    // E_bs = 2, E_d = 1 + 0 with sigma2_d = 0.
    const auto r = update_rho(s, ch, 1.0, 0.0);
    CHECK(r.rho_u == 0.5);
    CHECK(r.rho_d == 1.0);

    ch.h_u(0, 0) = 1.0;
    CHECK_THROWS_AS(update_rho(s, ch, 0.0, 1.0), Error);

    std::mt19937_64 g(23);
    for (int t = 0; t < 20; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const auto rr = update_rho(in.st, in.ch, in.sigma2_u, in.sigma2_d);
        CHECK(rr.rho_u * mse_bs(in.st, in.ch, in.sigma2_u) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(rr.rho_d * mse_dl(in.st, in.ch, in.sigma2_d) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(oracle::check_rho(in, true).fd <= 1e-6);
        CHECK(oracle::check_rho(in, false).fd <= 1e-6);
    }
}

TEST_CASE("uplink precoder update") {
    auto ch = zero_channels(2, 2, 1, 1);
    ch.h_u(0, 0) = cplx(0.6, 0.8);
    BeamformerState s;
    s.w = {1.0, 0.0};
    s.p = {1.0, 0.0};
    s.omega_u = {1.0};
    s.u_d = {1.0};
    const auto up = update_omega_u(s, ch, 1.0, 1.0, 1e-12);
    CHECK(oracle::sq(up.omega_u) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(up.omega_u[0] - cplx(0.6, -0.8)) <= 1e-9);

    std::mt19937_64 g(24);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const auto u = update_omega_u(in.st, in.ch, in.alpha[0], in.p_u, 1e-12);
        CHECK(std::abs(oracle::sq(u.omega_u) / in.p_u - 1.0) <= 1e-6);
        // Parallel to H_u^H w unless the power has to be filled orthogonally.
        const auto h = matvec(hermitian_transpose(in.ch.h_u), in.st.w);
        const cplx c = oracle::inner(h, u.omega_u);
        if (oracle::sq(h) * in.p_u <= 1.0) {
            CHECK(std::abs(std::abs(c) - norm2(h) * norm2(u.omega_u)) <= 1e-12 * norm2(h) * norm2(u.omega_u));
        } else {
            CHECK(std::abs(c - 1.0) <= 1e-12);
            CHECK(u.mu == 0.0);
        }
        CHECK(oracle::check_omega(in, g).fd <= 1e-6);
    }

    s.w = {0.0, 1.0};
    CHECK_THROWS_AS(update_omega_u(s, ch, 1.0, 1.0, 1e-12), DegenerateUpdateError);
}

TEST_CASE("receive combiner update") {
    std::mt19937_64 g(25);
    auto in = oracle::make_instance(g, 4, 4, 2, 2);
    in.st.omega_u = CVector(2);
    const auto w0 = update_w(in.st, in.ch, 1.0, 1.0, in.beta, in.sigma2_u, build_z(0.0, 4));
    CHECK(oracle::sq(w0) == 0.0);

    for (int t = 0; t < 30; ++t) {
        const auto inst = oracle::make_instance(g, 4, 4, 2, 2);
        CHECK(oracle::check_w(inst, g).fd <= 1e-6);
    }

    // With the production penalty the combiner is pushed onto the null of H_si p.
    SystemConfig cfg;
    for (int t = 0; t < 10; ++t) {
        const auto sc = reference(7, t);
        const SolverOptions opts = SolverOptions::from_config(cfg);
        const auto pr = DesignProblem::make(sc.channels, cfg, opts);
        CounterRng rng(static_cast<std::uint64_t>(t) + 1);
        const auto st = initial_state(pr, rng);
        const auto w = update_w(st, sc.channels, 1.0, 1.0, cfg.beta, pr.sigma2_u, pr.z_r);
        const auto v = matvec(sc.channels.h_si, st.p);
        CHECK(std::norm(oracle::inner(w, v)) <= 1e-12 * oracle::sq(w) * oracle::sq(v));
    }
}

TEST_CASE("rank-one penalized solve") {
    std::mt19937_64 g(26);
    for (int t = 0; t < 20; ++t) {
        auto base = oracle::random_matrix(g, 5, 5);
        base = matmul(hermitian_transpose(base), base);
        base.add_diagonal(1.0);
        const auto v = oracle::random_vector(g, 5);
        const auto rhs = oracle::random_vector(g, 5);
        const double weight = 3.7;
        ComplexMatrix full = base + cplx{weight} * ComplexMatrix::outer(v, v);
        const auto x = solve_rank_one_penalized(base, v, weight, rhs);
        CHECK(norm2(subtract(matvec(full, x), rhs)) <= 1e-10 * norm2(rhs));
    }
}

TEST_CASE("downlink combiner update") {
    auto ch = zero_channels(2, 2, 1, 1);
    ch.h_d(0, 0) = 1.0;
    BeamformerState s;
    s.w = {1.0, 0.0};
    s.p = {1.0, 0.0};
    s.omega_u = {1.0};
    s.u_d = {0.0};
    const auto u = update_u_d(s, ch, 1.0);
    CHECK(std::abs(u[0] - 0.5) <= 1e-15);
    s.p = {0.0, 0.0};
    CHECK(update_u_d(s, ch, 1.0)[0] == cplx(0.0, 0.0));

    std::mt19937_64 g(27);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        CHECK(oracle::check_u_d(in, g).fd <= 1e-6);
    }
}

TEST_CASE("transmit precoder update") {
    std::mt19937_64 g(28);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const auto zt = build_z(in.theta_deg, 4);
        const auto up = update_p(in.st, in.ch, in.alpha, in.beta, in.sigma2_u, in.sigma2_d, in.p_d, zt, 1e-12);
        CHECK(std::abs(oracle::sq(up.p) / in.p_d - 1.0) <= 1e-6);
        CHECK(oracle::check_p(in, g).fd <= 1e-6);

        // Scaling every weight (and 1/beta) by c leaves the precoder unchanged.
        auto scaled_alpha = in.alpha;
        for (auto& a : scaled_alpha) a *= 3.0;
        const auto up2 =
            update_p(in.st, in.ch, scaled_alpha, in.beta / 3.0, in.sigma2_u, in.sigma2_d, in.p_d, zt, 1e-12);
        CHECK(norm2(subtract(up.p, up2.p)) <= 1e-6 * norm2(up.p));
    }

    std::mt19937_64 g2(29);
    auto in = oracle::make_instance(g2, 4, 4, 2, 2);
    in.st.u_d = CVector(2);
    CHECK_THROWS_AS(update_p(in.st, in.ch, in.alpha, in.beta, 1.0, 1.0, 1.0, build_z(0.0, 4), 1e-12),
                    DegenerateUpdateError);
}

TEST_CASE("precoder update on reference channels") {
    SystemConfig cfg;
    for (int t = 0; t < 10; ++t) {
        const auto sc = reference(8, t);
        const SolverOptions opts = SolverOptions::from_config(cfg);
        const auto pr = DesignProblem::make(sc.channels, cfg, opts);
        CounterRng rng(static_cast<std::uint64_t>(t) + 100);
        auto st = initial_state(pr, rng);
        st.w = update_w(st, sc.channels, 1.0, 1.0, cfg.beta, pr.sigma2_u, pr.z_r);
        st.u_d = update_u_d(st, sc.channels, pr.sigma2_d);
        const auto up = update_p(st, sc.channels, cfg.alpha, cfg.beta, pr.sigma2_u, pr.sigma2_d,
                                 pr.p_d, pr.z_t, cfg.bisection_tol);
        CHECK(std::abs(oracle::sq(up.p) / pr.p_d - 1.0) <= 1e-6);
    }
}

TEST_CASE("objective") {
    std::mt19937_64 g(30);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 5, 2, 3);
        const auto pr = problem_of(in);
        const double f = evaluate_objective(in.st, pr);
        const double ref = oracle::ref_objective(in.st, in);
        CHECK(std::abs(f - ref) <= 1e-12 * std::abs(ref));
    }

    // The beampattern minorant is tight at the matched beam.
    const auto b = steering_tx(45.0, 16);
    const auto p = scaled(b, std::sqrt(0.1 / 16.0));
    CHECK(std::abs(hermitian_form(build_z(45.0, 16), p)) <= 1e-14);

    auto in = oracle::make_instance(g, 4, 4, 2, 2);
    in.alpha = {0.0, 0.0, 0.0, 0.0};
    const auto pr = problem_of(in);
    const double pen = std::norm(oracle::form(in.st.w, in.ch.h_si, in.st.p)) / (2.0 * in.beta);
    CHECK(evaluate_objective(in.st, pr) == doctest::Approx(-pen).epsilon(1e-13));
    CHECK(evaluate_objective(in.st, pr) <= 0.0);
}

TEST_CASE("Z matrix") {
    for (std::size_t n : {1u, 4u, 16u}) {
        for (double th : {-60.0, 0.0, 45.0}) {
            const auto z = build_z(th, n);
            CHECK(is_hermitian(z, 0.0));
            cplx tr{};
            for (std::size_t i = 0; i < n; ++i) tr += z(i, i);
            const double nn = static_cast<double>(n);
            CHECK(std::abs(tr - (nn - nn * nn)) <= 1e-12);
            CHECK(norm2(matvec(z, steering_tx(th, n))) <= 1e-10);
            CHECK(std::abs(max_eigenvalue_hermitian(z)) <= 1e-8);
        }
    }
}

TEST_CASE("each block update does not decrease the objective") {
    std::mt19937_64 g(31);
    for (int t = 0; t < 30; ++t) {
        auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const auto pr = problem_of(in);
        auto& s = in.st;
        double f = evaluate_objective(s, pr);
        const double slack = 1e-9 * std::max(1.0, std::abs(f));

        const auto r = update_rho(s, in.ch, in.sigma2_u, in.sigma2_d);
        s.rho_u = r.rho_u;
        s.rho_d = r.rho_d;
        double next = evaluate_objective(s, pr);
        CHECK(next >= f - slack);
        f = next;

        s.omega_u = update_omega_u(s, in.ch, in.alpha[0], in.p_u, 1e-12).omega_u;
        next = evaluate_objective(s, pr);
        CHECK(next >= f - slack);
        f = next;

        s.w = update_w(s, in.ch, in.alpha[0], in.alpha[3], in.beta, in.sigma2_u, pr.z_r);
        next = evaluate_objective(s, pr);
        CHECK(next >= f - slack);
        f = next;

        s.u_d = update_u_d(s, in.ch, in.sigma2_d);
        next = evaluate_objective(s, pr);
        CHECK(next >= f - slack);
        f = next;

        s.p = update_p(s, in.ch, in.alpha, in.beta, in.sigma2_u, in.sigma2_d, in.p_d, pr.z_t, 1e-12).p;
        next = evaluate_objective(s, pr);
        CHECK(next >= f - slack);
    }
}

TEST_CASE("power constraints hold after every sweep") {
    SystemConfig cfg;
    const SolverOptions opts = SolverOptions::from_config(cfg);
    for (int t = 0; t < 3; ++t) {
        const auto sc = reference(9, t);
        const auto pr = DesignProblem::make(sc.channels, cfg, opts);
        CounterRng rng(static_cast<std::uint64_t>(t) + 5);
        auto s = initial_state(pr, rng);
        for (int it = 0; it < 15; ++it) {
            const auto r = update_rho(s, sc.channels, pr.sigma2_u, pr.sigma2_d);
            s.rho_u = r.rho_u;
            s.rho_d = r.rho_d;
            s.omega_u = update_omega_u(s, sc.channels, pr.alpha[0], pr.p_u, pr.bisection_tol).omega_u;
            s.w = update_w(s, sc.channels, pr.alpha[0], pr.alpha[3], pr.beta, pr.sigma2_u, pr.z_r);
            s.u_d = update_u_d(s, sc.channels, pr.sigma2_d);
            s.p = update_p(s, sc.channels, pr.alpha, pr.beta, pr.sigma2_u, pr.sigma2_d, pr.p_d, pr.z_t,
                           pr.bisection_tol).p;
            CHECK(std::abs(oracle::sq(s.omega_u) / pr.p_u - 1.0) <= 1e-6);
            CHECK(std::abs(oracle::sq(s.p) / pr.p_d - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("solve on the reference scenario") {
    SystemConfig cfg;
    cfg.max_iters = 60;
    const SolverOptions opts = SolverOptions::from_config(cfg);
    for (int t = 0; t < 3; ++t) {
        const auto sc = reference(10, t);
        CounterRng rng(static_cast<std::uint64_t>(t) + 1);
        const auto res = solve(sc.channels, cfg, opts, rng);
        const auto& rep = res.report;
        CHECK(rep.iterations >= 1);
        CHECK(rep.objective_trace.size() == static_cast<std::size_t>(rep.iterations));
        CHECK(rep.zeta_trace.size() == rep.objective_trace.size());
        double prev = rep.initial_objective;
        for (double f : rep.objective_trace) {
            CHECK(f >= prev - 1e-9);
            prev = f;
        }
        CHECK(std::abs(norm2(res.state.w) - 1.0) <= 1e-12);
        CHECK(std::abs(oracle::sq(res.state.p) / cfg.pd_watts() - 1.0) <= 1e-6);
        CHECK(std::abs(oracle::sq(res.state.omega_u) / cfg.pu_watts() - 1.0) <= 1e-6);
        CHECK(rep.residual_si_linear ==
              doctest::Approx(std::norm(oracle::form(res.state.w, sc.channels.h_si, res.state.p))).epsilon(1e-12));
    }
}

TEST_CASE("solve is deterministic") {
    SystemConfig cfg;
    cfg.max_iters = 40;
    const SolverOptions opts = SolverOptions::from_config(cfg);
    const auto sc = reference(11, 0);
    CounterRng r1(4), r2(4);
    const auto a = solve(sc.channels, cfg, opts, r1);
    const auto b = solve(sc.channels, cfg, opts, r2);
    CHECK(a.report.iterations == b.report.iterations);
    CHECK(a.report.objective_trace == b.report.objective_trace);
    CHECK(a.report.zeta_trace == b.report.zeta_trace);
    CHECK(a.report.residual_si_linear == b.report.residual_si_linear);
    CHECK(a.state.p == b.state.p);
    CHECK(a.state.w == b.state.w);
}

TEST_CASE("solve without self-interference") {
    SystemConfig cfg;
    cfg.max_iters = 40;
    const SolverOptions opts = SolverOptions::from_config(cfg);
    auto sc = reference(12, 0);
    sc.channels.h_si = ComplexMatrix(cfg.n_r, cfg.n_t);
    sc.channels.h = sc.channels.h_r;
    CounterRng rng(3);
    const auto res = solve(sc.channels, cfg, opts, rng);
    CHECK(res.report.residual_si_linear == 0.0);
}

TEST_CASE("desk-scale blocks match numeric minimization") {
    std::mt19937_64 g(32);
    for (int t = 0; t < 10; ++t) {
        const auto in = oracle::make_instance(g, 2, 2, 1, 1);
        CHECK(oracle::check_rho(in, true).gap <= 1e-3);
        CHECK(oracle::check_rho(in, false).gap <= 1e-3);
        CHECK(oracle::check_omega(in, g).gap <= 1e-3);
        CHECK(oracle::check_w(in, g).gap <= 1e-3);
        CHECK(oracle::check_u_d(in, g).gap <= 1e-3);
        CHECK(oracle::check_p(in, g).gap <= 1e-3);
    }
}
