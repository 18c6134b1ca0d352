// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fdisac/baselines.hpp"
#include "fdisac/metrics.hpp"
#include "oracle.hpp"

using namespace fdisac;

namespace {

ChannelSet zero_channels(std::size_t nt, std::size_t nr, std::size_t nu, std::size_t nd) {
    ChannelSet ch;
    ch.h_u = ComplexMatrix(nr, nu);
    ch.h_d = ComplexMatrix(nd, nt);
    ch.h_r = ComplexMatrix(nr, nt);
    ch.h_si = ComplexMatrix(nr, nt);
    ch.h = ComplexMatrix(nr, nt);
    return ch;
}

BeamformerState unit_state() {
    BeamformerState s;
    s.w = {1.0, 0.0};
    s.p = {1.0, 0.0};
    s.omega_u = {1.0};
    s.u_d = {1.0};
    return s;
}

}  // namespace

TEST_CASE("uplink SINR") {
    auto ch = zero_channels(2, 2, 1, 1);
    ch.h_u(0, 0) = std::sqrt(0.5);
    auto s = unit_state();
    CHECK(sinr_uplink(s, ch, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rate_from_sinr(sinr_uplink(s, ch, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
    s.omega_u = {0.0};
    CHECK(sinr_uplink(s, ch, 0.5) == 0.0);
    CHECK_THROWS_AS(sinr_uplink(s, ch, 0.0), Error);

    std::mt19937_64 g(1);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 5, 2, 3);
        CHECK(sinr_uplink(in.st, in.ch, in.sigma2_u) ==
              doctest::Approx(oracle::ref_sinr_u(in.st, in.ch, in.sigma2_u)).epsilon(1e-12));
    }
}

TEST_CASE("downlink SINR") {
    auto ch = zero_channels(2, 2, 1, 1);
    ch.h_d(0, 0) = std::sqrt(0.5);
    auto s = unit_state();
    CHECK(sinr_downlink(s, ch, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    s.p = {0.0, 0.0};
    CHECK(sinr_downlink(s, ch, 0.5) == 0.0);
    s.u_d = {0.0};
    CHECK(sinr_downlink(s, ch, 0.5) == 0.0);

    std::mt19937_64 g(2);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 5, 2, 3);
        CHECK(sinr_downlink(in.st, in.ch, in.sigma2_d) ==
              doctest::Approx(oracle::ref_sinr_d(in.st, in.ch, in.sigma2_d)).epsilon(1e-12));
    }
}

TEST_CASE("rate and MMSE agree for the MMSE combiner") {
    std::mt19937_64 g(3);
    for (int t = 0; t < 30; ++t) {
        auto in = oracle::make_instance(g, 4, 4, 2, 2);
        in.st.u_d = update_u_d(in.st, in.ch, in.sigma2_d);
        const double rd = rate_from_sinr(sinr_downlink(in.st, in.ch, in.sigma2_d));
        CHECK(std::abs(-std::log2(mse_dl(in.st, in.ch, in.sigma2_d)) - rd) <= 1e-9);
    }
}

TEST_CASE("beampattern") {
    SystemConfig cfg;
    const auto grid = default_theta_grid();
    CHECK(grid.size() == 361);
    CHECK(grid.front() == -90.0);
    CHECK(grid.back() == 90.0);
    CHECK(grid[181] == 0.5);

    const auto p = scaled(steering_tx(20.0, 16), std::sqrt(cfg.pd_watts() / 16.0));
    const std::vector<double> at{20.0};
    CHECK(beampattern(p, at)[0] == doctest::Approx(16.0 * cfg.pd_watts()).epsilon(1e-12));

    // w orthogonal to a(20 deg).
    CVector w = steering_rx(-40.0, 16);
    const auto a = steering_rx(20.0, 16);
    const cplx c = dot(a, w) / 16.0;
    for (std::size_t i = 0; i < 16; ++i) w[i] -= c * a[i];
    w = scaled(w, 1.0 / norm2(w));
    CHECK(beampattern(w, at)[0] <= 1e-24);

    std::mt19937_64 g(4);
    const auto v = oracle::random_vector(g, 16);
    const auto pat = beampattern(v, grid);
    double sum = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sum += pat[i];
        const double s = std::sin(grid[i] * M_PI / 180.0);
        cplx acc{};
        for (std::size_t k = 0; k < 16; ++k) acc += std::polar(1.0, -M_PI * k * s) * v[k];
        ref += std::norm(acc);
        CHECK(pat[i] >= 0.0);
    }
    CHECK(std::abs(sum - ref) <= 1e-12 * ref);

    // Cauchy-Schwarz bound for a unit-norm combiner.
    const auto wn = scaled(v, 1.0 / norm2(v));
    const auto pw = beampattern(wn, grid);
    CHECK(*std::max_element(pw.begin(), pw.end()) <= 16.0 + 1e-12);
    CHECK_THROWS_AS(beampattern(v, std::vector<double>{}), Error);
}

TEST_CASE("residual SI") {
    SystemConfig cfg;
    auto ch = zero_channels(2, 2, 1, 1);
    auto s = unit_state();
    CHECK(residual_si_db(s, ch, cfg.noise_dbm) == -kDbFloor);
    ch.h_si(0, 0) = std::sqrt(cfg.noise_watts());
    CHECK(residual_si_db(s, ch, cfg.noise_dbm) == doctest::Approx(0.0).epsilon(1e-9));
    ch.h_si(0, 0) = 1.0;
    CHECK(residual_si_db(s, ch, cfg.noise_dbm) == doctest::Approx(30.0 + 94.0).epsilon(1e-12));
}

TEST_CASE("SoI over SI") {
    auto ch = zero_channels(2, 2, 1, 1);
    auto s = unit_state();
    ch.h_si(0, 0) = 2.0;
    ch.h_r(0, 0) = std::sqrt(2.0);
    ch.h_u(0, 0) = std::sqrt(2.0);
    CHECK(soi_over_si_db(s, ch) == doctest::Approx(0.0).epsilon(1e-12));
    ch.h_r(0, 0) = 0.0;
    ch.h_u(0, 0) = 0.0;
    CHECK(soi_over_si_db(s, ch) == -kDbFloor);
    ch.h_si(0, 0) = 0.0;
    ch.h_u(0, 0) = 1.0;
    CHECK(soi_over_si_db(s, ch) == kDbFloor);

    std::mt19937_64 g(5);
    for (int t = 0; t < 30; ++t) {
        const auto in = oracle::make_instance(g, 4, 4, 2, 2);
        const double soi = std::norm(oracle::form(in.st.w, in.ch.h_r, in.st.p)) +
                           std::norm(oracle::form(in.st.w, in.ch.h_u, in.st.omega_u));
        const double si = std::norm(oracle::form(in.st.w, in.ch.h_si, in.st.p));
        CHECK(soi_over_si_db(in.st, in.ch) == doctest::Approx(10.0 * std::log10(soi / si)).epsilon(1e-12));
    }
}

TEST_CASE("sum rates") {
    const auto z = sum_rates(0.0, 0.0, 0.5);
    CHECK(z.fd == 0.0);
    CHECK(z.hd == 0.0);
    const auto r = sum_rates(3.0, 5.0, 0.5);
    CHECK(r.fd == 8.0);
    CHECK(r.hd == r.fd / 2.0);
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int t = 0; t < 100; ++t) {
        const double ru = u(g), rd = u(g), d = u(g) / 10.0;
        const auto s = sum_rates(ru, rd, d);
        CHECK(s.fd >= s.hd);
    }
}

TEST_CASE("metrics record") {
    SystemConfig cfg;
    CounterRng rng(9);
    const auto sc = synthesize(cfg, rng);
    const auto s = baseline_state(BaselineKind::kNsp, sc.channels, cfg);
    const auto m = compute_metrics(s, sc.channels, cfg);
    CHECK(m.rate_u == doctest::Approx(std::log2(1.0 + m.sinr_u)).epsilon(1e-12));
    CHECK(m.rate_d == doctest::Approx(std::log2(1.0 + m.sinr_d)).epsilon(1e-12));
    CHECK(m.sumrate_fd == doctest::Approx(m.rate_u + m.rate_d).epsilon(1e-15));
    CHECK(m.sumrate_hd == doctest::Approx(0.5 * m.rate_u + 0.5 * m.rate_d).epsilon(1e-15));
    CHECK(m.gain_t == doctest::Approx(std::norm(dot(steering_tx(45.0, 16), s.p))).epsilon(1e-15));
    CHECK(m.gain_r == doctest::Approx(std::norm(dot(s.w, steering_rx(45.0, 16)))).epsilon(1e-15));
}
