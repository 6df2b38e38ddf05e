#include <doctest.h>

#include "spinbath/oracle.hpp"

using namespace spinbath;

TEST_CASE("plan step sizing") {
    const ModelParams p = ModelParams::uniform(10, 0.0, 15.0, 0.0, 1.0);
    EvolutionPlan plan;
    plan.gt_max = 10.0;
    // stiffness guard: 0.05/15 beats 1e-3/g? no: 1e-3 < 3.3e-3
    CHECK(plan.resolved_dt(p) == doctest::Approx(1e-3));
    double dt = 0.0;
    const auto n = plan.steps(p, &dt);
    CHECK(n * dt == doctest::Approx(plan.gt_max).epsilon(1e-15));

    const ModelParams stiff = ModelParams::uniform(10, -20.0, 10.0, 0.0, 1.0);
    CHECK(plan.resolved_dt(stiff) == doctest::Approx(0.05 / 200.0));
}

TEST_CASE("J=0 sector dynamics matches the closed form") {
    const int N = 6, n = 2;
    const ModelParams p = ModelParams::uniform(N, 0.0, 0.8, 0.3, 1.0);
    EvolutionPlan plan;
    plan.gt_max = 4.0;
    plan.stride = 100;

    PairBlocks init;
    init.small = dicke_initial_amplitudes(N, n);
    init.big.assign(binomial(N, n + 1), cplx{});
    const auto dicke_big = dicke_initial_amplitudes(N, n + 1);

    const auto traj = evolve_sector(n, p, init, plan);
    CHECK(traj.front().t == 0.0);
    for (std::size_t i = 0; i < init.small.size(); ++i)
        CHECK(std::abs(traj.front().state.small[i] - init.small[i]) == 0.0);

    for (const auto& s : traj) {
        const RabiJ0 ab = analytic_j0_amplitudes(N, n, 1.0, p.detuning(), s.t);
        for (std::size_t i = 0; i < s.state.small.size(); ++i)
            CHECK(std::abs(s.state.small[i] - ab.a * init.small[i]) < 1e-6);
        for (std::size_t i = 0; i < s.state.big.size(); ++i)
            CHECK(std::abs(s.state.big[i] - ab.b * dicke_big[i]) < 1e-6);
    }
}

TEST_CASE("sector initial-state size is validated") {
    const ModelParams p = ModelParams::uniform(4, 0.0, 0.0, 0.0, 1.0);
    EvolutionPlan plan;
    plan.gt_max = 0.1;
    PairBlocks bad;
    bad.small.assign(3, cplx{});
    bad.big.assign(1, cplx{});
    CHECK_THROWS_AS(evolve_sector(1, p, bad, plan), std::invalid_argument);
}

TEST_CASE("serial reference path agrees with the sparse parallel path") {
    const ModelParams p = ModelParams::uniform(8, -0.9, 0.6, 0.2, 1.0);
    EvolutionPlan plan;
    PairSystem sys(p, 3, sector_table(p, 3, plan));
    PairBlocks y;
    y.small = dicke_initial_amplitudes(8, 3);
    y.big.assign(sys.n_big(), cplx{});

    PairBlocks ys = y;
    for (int i = 0; i < 50; ++i) {
        sys.rk4_step(i * 1e-3, 1e-3, y, false);
        sys.rk4_step(i * 1e-3, 1e-3, ys, true);
    }
    for (std::size_t i = 0; i < y.small.size(); ++i)
        CHECK(std::abs(y.small[i] - ys.small[i]) < 1e-12);
    for (std::size_t i = 0; i < y.big.size(); ++i)
        CHECK(std::abs(y.big[i] - ys.big[i]) < 1e-12);
}

TEST_CASE("coherent run matches dense propagator at N=4") {
    const ModelParams p = ModelParams::uniform(4, 0.7, 0.4, 0.2, 1.0);
    const auto coh = coherent_coefficients(4, 1.0);
    EvolutionPlan plan;
    plan.gt_max = 3.0;
    plan.stride = 200;

    std::vector<BlochPoint> series;
    const double drift = evolve_coherent(p, plan, [&](double t, std::span<const PairBlocks> s) {
        series.push_back(bloch_point(t, s, coh, p.omega));
    });
    CHECK(drift < 1e-9);

    DenseOracle oracle(p);
    const Eigen::VectorXcd psi0 = dense_coherent_initial(4, coh);
    for (const BlochPoint& b : series) {
        const auto rho = oracle.qubit_rho(oracle.evolve(psi0, b.t));
        CHECK(std::abs(2.0 * rho(0, 1).real() - b.sx) < 1e-8);
        CHECK(std::abs(-2.0 * rho(0, 1).imag() - b.sy) < 1e-8);
        CHECK(std::abs((rho(0, 0) - rho(1, 1)).real() - b.sz) < 1e-8);
    }
}

TEST_CASE("decoupled ground run keeps full coherence") {
    const ModelParams p = ModelParams::uniform(6, -1.0, 0.5, 0.4, 0.0);
    const auto gs = ground_state(6, 0.5);
    EvolutionPlan plan;
    plan.gt_max = 2.0;
    plan.stride = 50;
    evolve_ground(p, gs, plan, [&](double t, const GroundChannels& ch) {
        const WPoint w = w_point(t, ch, p.omega);
        CHECK(std::abs(std::abs(w.r) - 1.0) < 1e-12);
        CHECK(w.w_uu_uu == doctest::Approx(1.0));
        CHECK(w.w_dd_dd == doctest::Approx(1.0));
    });
}

TEST_CASE("ground run matches dense propagator at N=6") {
    const ModelParams p = ModelParams::uniform(6, -1.5, 1.0, 0.0, 1.0);
    const auto gs = ground_state(6, 1.0 / 1.5);
    EvolutionPlan plan;
    plan.gt_max = 2.0;
    plan.stride = 100;

    std::vector<WPoint> w;
    evolve_ground(p, gs, plan,
                  [&](double t, const GroundChannels& ch) { w.push_back(w_point(t, ch, 0.0)); });

    const cplx a = 1.0 / std::sqrt(2.0);
    DenseOracle oracle(p);
    const Eigen::VectorXcd psi0 = dense_ground_initial(6, gs, a, a);
    for (const WPoint& pt : w) {
        const auto rho = oracle.qubit_rho(oracle.evolve(psi0, pt.t));
        const double r00 = 0.5 * (pt.w_uu_uu + pt.w_uu_dd);
        CHECK(std::abs(rho(0, 0).real() - r00) < 1e-8);
        CHECK(std::abs(rho(0, 1) - 0.5 * pt.r) < 1e-8);
    }
}

TEST_CASE("halving dt changes the answer below 1e-8") {
    const ModelParams p = ModelParams::uniform(6, -2.0, 1.3, 0.0, 1.0);
    const auto gs = ground_state(6, 1.3 / 2.0);
    auto run = [&](double dt) {
        EvolutionPlan plan;
        plan.gt_max = 1.0;
        plan.dt = dt;
        plan.stride = static_cast<int>(std::lround(0.5 / dt));  // sample every gt = 0.5
        std::vector<cplx> r;
        evolve_ground(p, gs, plan, [&](double t, const GroundChannels& ch) {
            r.push_back(w_point(t, ch, 0.0).r);
        });
        return r;
    };
    const auto coarse = run(1e-3);
    const auto fine = run(5e-4);
    REQUIRE(coarse.size() == fine.size());
    for (std::size_t i = 0; i < coarse.size(); ++i)
        CHECK(std::abs(coarse[i] - fine[i]) < 1e-8);
}
