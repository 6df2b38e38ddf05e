#include <doctest.h>

#include <random>

#include "spinbath/observables.hpp"

using namespace spinbath;

namespace {

WPoint random_w(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    WPoint w;
    w.t = u(rng);
    w.w_uu_uu = u(rng);
    w.w_dd_uu = 1.0 - w.w_uu_uu;
    w.w_uu_dd = u(rng);
    w.w_dd_dd = 1.0 - w.w_uu_dd;
    // |r|^2 <= W_1111 * W_dddd by Cauchy-Schwarz on the A*B sum
    const double rmax = std::sqrt(w.w_uu_uu * w.w_dd_dd);
    const double phase = 2.0 * pi * u(rng);
    w.r = u(rng) * rmax * std::exp(cplx(0.0, phase));
    return w;
}

}  // namespace

TEST_CASE("Bloch point at t=0 for a product initial state") {
    const int N = 6;
    const auto coh = coherent_coefficients(N, cplx{0.6, 0.0});
    std::vector<PairBlocks> sectors(N + 1);
    for (int n = 0; n <= N; ++n) {
        sectors[n].small = dicke_initial_amplitudes(N, n);
        sectors[n].big.assign(binomial(N, n + 1), cplx{});
    }
    const BlochPoint p = bloch_point(0.0, sectors, coh, 0.7);
    CHECK(std::abs(p.sx) < 1e-12);
    CHECK(std::abs(p.sy) < 1e-12);
    CHECK(p.sz == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.purity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("W point initial values and sum rules") {
    GroundChannels ch;
    ch.up.small = {cplx{1.0, 0.0}, cplx{}};
    ch.up.big.assign(3, cplx{});
    ch.down.small.assign(2, cplx{});
    ch.down.big = {cplx{1.0, 0.0}, cplx{}};
    const WPoint w = w_point(0.0, ch, 0.5);
    CHECK(w.w_uu_uu == doctest::Approx(1.0));
    CHECK(w.w_dd_dd == doctest::Approx(1.0));
    CHECK(w.w_uu_dd == doctest::Approx(0.0));
    CHECK(w.w_dd_uu == doctest::Approx(0.0));
    CHECK(std::abs(w.r - 1.0) < 1e-15);
}

TEST_CASE("two-qubit state: Bell projector at t=0, trace one always") {
    WPoint w0;  // identity channel
    const double a = 1.0 / std::sqrt(2.0);
    const Mat4 bell = two_qubit_rho(w0, a, a);
    CHECK(std::abs(bell[1][1] - 0.5) < 1e-14);
    CHECK(std::abs(bell[2][2] - 0.5) < 1e-14);
    CHECK(std::abs(bell[1][2] - 0.5) < 1e-14);
    CHECK(std::abs(bell[0][0]) < 1e-14);
    CHECK(std::abs(bell[3][3]) < 1e-14);

    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const WPoint w = random_w(rng);
        const Mat4 rho = two_qubit_rho(w, 0.6, cplx{0.8, 0.0});
        cplx tr = 0.0;
        for (int i = 0; i < 4; ++i) tr += rho[i][i];
        CHECK(std::abs(tr - 1.0) < 1e-12);
    }

    CHECK_THROWS_AS(two_qubit_rho(w0, 0.9, cplx{0.9, 0.0}), std::invalid_argument);
}

TEST_CASE("closed-form concurrence equals the spectrum-based definition") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const WPoint w = random_w(rng);
        const double a = std::sqrt(u(rng));
        const cplx b = std::sqrt(1.0 - a * a) * std::exp(cplx(0.0, 2.0 * pi * u(rng)));
        const double closed = concurrence_closed(w, a, b);
        const double general = concurrence_wootters(two_qubit_rho(w, a, b));
        CHECK(std::abs(closed - general) < 1e-10);
    }
    // product state has no entanglement
    WPoint w0;
    CHECK(concurrence_closed(w0, 1.0, cplx{0.0, 0.0}) == 0.0);
    // Bell state at t=0 is maximally entangled
    CHECK(concurrence_closed(w0, 1.0 / std::sqrt(2.0), cplx{1.0 / std::sqrt(2.0), 0.0}) ==
          doctest::Approx(1.0));
}

TEST_CASE("Gaussian rate fit recovers its own model") {
    std::vector<double> t, r2;
    for (int i = 0; i <= 200; ++i) {
        t.push_back(i * 2e-4);
        r2.push_back(std::exp(-3.0 * t.back() * t.back()));
    }
    const auto alpha = fit_gaussian_rate(t, r2);
    REQUIRE(alpha.has_value());
    CHECK(*alpha == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("extremum and zero-crossing detection") {
    // r2 = cos^2 shape: first minimum at t = pi/2, first revival max at pi
    std::vector<double> t, r2, q;
    for (int i = 0; i <= 1000; ++i) {
        t.push_back(i * 0.005);
        const double c = std::cos(t.back());
        r2.push_back(c * c);
        q.push_back(0.5 - t.back());  // crosses zero at 0.5
    }
    const MetricReport rep = analyze_series(t, r2, q);
    REQUIRE(rep.t_first_min.has_value());
    CHECK(*rep.t_first_min == doctest::Approx(pi / 2).epsilon(1e-4));
    REQUIRE(rep.r2_max.has_value());
    CHECK(*rep.r2_max == doctest::Approx(1.0).epsilon(1e-6));
    REQUIRE(rep.t_esd.has_value());
    CHECK(*rep.t_esd == doctest::Approx(0.5).epsilon(1e-12));

    // monotone series has no extrema or crossings
    std::vector<double> mono_t{0.0, 1.0, 2.0}, mono_y{3.0, 2.0, 1.0}, mono_q{1.0, 2.0, 3.0};
    const MetricReport none = analyze_series(mono_t, mono_y, mono_q);
    CHECK_FALSE(none.t_first_min.has_value());
    CHECK_FALSE(none.r2_max.has_value());
    CHECK_FALSE(none.t_esd.has_value());
}
