#include "spinbath/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace spinbath {

double EvolutionPlan::resolved_dt(const ModelParams& p) const {
    if (dt > 0.0) return dt;
    const double g = p.g_max();
    double step = (g > 0.0) ? 1e-3 / g : 1e-3;
    // stiffness guard: resolve the fastest phase in the stock regimes
    const double rate = std::max({std::abs(p.detuning()), std::abs(p.J) * p.N,
                                  g * std::sqrt(double(p.N))});
    if (rate > 0.0) step = std::min(step, 0.05 / rate);
    return step;
}

std::uint64_t EvolutionPlan::steps(const ModelParams& p, double* dt_out) const {
    const double target = resolved_dt(p);
    std::uint64_t n = static_cast<std::uint64_t>(std::ceil(gt_max / target));
    if (n == 0) n = 1;
    *dt_out = gt_max / static_cast<double>(n);
    return n;
}

double PairBlocks::norm2() const {
    double s = 0.0;
    for (const cplx& v : small) s += std::norm(v);
    for (const cplx& v : big) s += std::norm(v);
    return s;
}

namespace {

void resize_like(PairBlocks& x, std::size_t ns, std::size_t nb) {
    x.small.assign(ns, cplx{});
    x.big.assign(nb, cplx{});
}

void axpy(PairBlocks& y, double a, const PairBlocks& x) {
    for (std::size_t i = 0; i < y.small.size(); ++i) y.small[i] += a * x.small[i];
    for (std::size_t i = 0; i < y.big.size(); ++i) y.big[i] += a * x.big[i];
}

void set_axpy(PairBlocks& y, const PairBlocks& base, double a, const PairBlocks& x) {
    for (std::size_t i = 0; i < y.small.size(); ++i) y.small[i] = base.small[i] + a * x.small[i];
    for (std::size_t i = 0; i < y.big.size(); ++i) y.big[i] = base.big[i] + a * x.big[i];
}

}  // namespace

PairSystem::PairSystem(const ModelParams& params, int m, std::shared_ptr<const FTable> table)
    : m_(m), omega_(params.omega), table_(std::move(table)) {
    const auto grid_small = momentum_grid(params.N, parity_of_count(m));
    e_small_ = config_energies(grid_small, m, params.J, params.h);
    if (m + 1 <= params.N) {
        const auto grid_big = momentum_grid(params.N, parity_of_count(m + 1));
        e_big_ = config_energies(grid_big, m + 1, params.J, params.h);
    }
    ph_small_.resize(e_small_.size());
    ph_big_.resize(e_big_.size());
}

void PairSystem::apply_phases(double t, const PairBlocks& s) const {
    for (std::size_t i = 0; i < e_small_.size(); ++i)
        ph_small_[i] = std::exp(cplx(0.0, -e_small_[i] * t)) * s.small[i];
    for (std::size_t i = 0; i < e_big_.size(); ++i)
        ph_big_[i] = std::exp(cplx(0.0, -e_big_[i] * t)) * s.big[i];
}

void PairSystem::derivative(double t, const PairBlocks& s, PairBlocks& ds) const {
    resize_like(ds, e_small_.size(), e_big_.size());
    if (!table_ || table_->nnz == 0) return;
    apply_phases(t, s);
    const cplx mi(0.0, -1.0);
    const cplx ew = std::exp(cplx(0.0, -omega_ * t));
    const FTable& T = *table_;

    const std::int64_t nb = static_cast<std::int64_t>(e_big_.size());
#pragma omp parallel for schedule(static) if (nb > 256)
    for (std::int64_t p = 0; p < nb; ++p) {
        cplx acc = 0.0;
        for (std::uint64_t e = T.row_ptr[p]; e < T.row_ptr[p + 1]; ++e)
            acc += std::conj(T.row_val[e]) * ph_small_[T.row_col[e]];
        ds.big[p] = mi * ew * std::exp(cplx(0.0, e_big_[p] * t)) * acc;
    }
    const std::int64_t ns = static_cast<std::int64_t>(e_small_.size());
    const cplx ewc = std::conj(ew);
#pragma omp parallel for schedule(static) if (ns > 256)
    for (std::int64_t p = 0; p < ns; ++p) {
        cplx acc = 0.0;
        for (std::uint64_t e = T.col_ptr[p]; e < T.col_ptr[p + 1]; ++e)
            acc += T.col_val[e] * ph_big_[T.col_row[e]];
        ds.small[p] = mi * ewc * std::exp(cplx(0.0, e_small_[p] * t)) * acc;
    }
}

void PairSystem::derivative_serial(double t, const PairBlocks& s, PairBlocks& ds) const {
    resize_like(ds, e_small_.size(), e_big_.size());
    if (!table_ || table_->values.empty()) return;
    apply_phases(t, s);
    const cplx mi(0.0, -1.0);
    const cplx ew = std::exp(cplx(0.0, -omega_ * t));
    const FTable& T = *table_;
    for (std::uint64_t p = 0; p < T.n_big; ++p) {
        cplx acc = 0.0;
        for (std::uint64_t k = 0; k < T.n_small; ++k)
            acc += std::conj(T.values[p * T.n_small + k]) * ph_small_[k];
        ds.big[p] = mi * ew * std::exp(cplx(0.0, e_big_[p] * t)) * acc;
    }
    for (std::uint64_t p = 0; p < T.n_small; ++p) {
        cplx acc = 0.0;
        for (std::uint64_t k = 0; k < T.n_big; ++k)
            acc += T.values[k * T.n_small + p] * ph_big_[k];
        ds.small[p] = mi * std::conj(ew) * std::exp(cplx(0.0, e_small_[p] * t)) * acc;
    }
}

void PairSystem::rk4_step(double t, double dt, PairBlocks& y, bool serial) const {
    auto deriv = [&](double tt, const PairBlocks& s, PairBlocks& ds) {
        serial ? derivative_serial(tt, s, ds) : derivative(tt, s, ds);
    };
    deriv(t, y, k1_);
    set_axpy(tmp_ = y, y, 0.5 * dt, k1_);
    deriv(t + 0.5 * dt, tmp_, k2_);
    set_axpy(tmp_, y, 0.5 * dt, k2_);
    deriv(t + 0.5 * dt, tmp_, k3_);
    set_axpy(tmp_, y, dt, k3_);
    deriv(t + dt, tmp_, k4_);
    const double w = dt / 6.0;
    axpy(y, w, k1_);
    axpy(y, 2.0 * w, k2_);
    axpy(y, 2.0 * w, k3_);
    axpy(y, w, k4_);
}

std::shared_ptr<const FTable> sector_table(const ModelParams& params, int m,
                                           const EvolutionPlan& plan) {
    if (m + 1 > params.N) return nullptr;  // big block empty: no coupling
    return std::make_shared<FTable>(
        build_f_table_cached(params.N, m, params.g, plan.cache_dir, plan.mem_cap_bytes));
}

std::vector<SectorSample> evolve_sector(int n, const ModelParams& params,
                                        const PairBlocks& initial, const EvolutionPlan& plan) {
    params.validate();
    PairSystem sys(params, n, sector_table(params, n, plan));
    if (initial.small.size() != sys.n_small() || initial.big.size() != sys.n_big())
        throw std::invalid_argument("evolve_sector: initial state has wrong block sizes");
    const double norm0 = initial.norm2();

    double dt = 0.0;
    const std::uint64_t nsteps = plan.steps(params, &dt);

    std::vector<SectorSample> out;
    PairBlocks y = initial;
    out.push_back({0.0, y});
    for (std::uint64_t i = 0; i < nsteps; ++i) {
        sys.rk4_step(i * dt, dt, y);
        if (i + 1 == nsteps || (i + 1) % plan.stride == 0) {
            const double drift = std::abs(y.norm2() - norm0);
            if (drift > plan.norm_tol)
                throw integration_failure("evolve_sector: norm drift exceeds tolerance", drift);
            out.push_back({(i + 1) * dt, y});
        }
    }
    return out;
}

double evolve_coherent(const ModelParams& params, const EvolutionPlan& plan,
                       const CoherentObserver& observe) {
    params.validate();
    const int N = params.N;

    std::vector<PairSystem> systems;
    std::vector<PairBlocks> state(N + 1);
    systems.reserve(N + 1);
    for (int n = 0; n <= N; ++n) {
        systems.emplace_back(params, n, sector_table(params, n, plan));
        state[n].small = dicke_initial_amplitudes(N, n);
        state[n].big.assign(systems[n].n_big(), cplx{});
    }

    double dt = 0.0;
    const std::uint64_t nsteps = plan.steps(params, &dt);

    double max_drift = 0.0;
    observe(0.0, state);
    for (std::uint64_t i = 0; i < nsteps; ++i) {
        for (int n = 0; n <= N; ++n) systems[n].rk4_step(i * dt, dt, state[n]);
        if (i + 1 == nsteps || (i + 1) % plan.stride == 0) {
            for (int n = 0; n <= N; ++n) {
                const double drift = std::abs(state[n].norm2() - 1.0);
                max_drift = std::max(max_drift, drift);
                if (drift > plan.norm_tol)
                    throw integration_failure("evolve_coherent: norm drift exceeds tolerance",
                                              drift);
            }
            observe((i + 1) * dt, state);
        }
    }
    return max_drift;
}

double evolve_ground(const ModelParams& params, const GroundStateSpec& gs,
                     const EvolutionPlan& plan, const GroundObserver& observe) {
    params.validate();
    const int N = params.N;
    const int m = gs.m;

    const auto grid = momentum_grid(N, parity_of_count(m + 1));
    std::vector<int> gs_pos;
    gs_pos.reserve(gs.occupied_num.size());
    for (int q : gs.occupied_num) {
        const int p = grid.pos_of_num(q);
        if (p < 0) throw std::invalid_argument("evolve_ground: ground config not on branch grid");
        gs_pos.push_back(p);
    }
    const std::uint64_t gs_rank = rank_combination(N, m + 1, gs_pos.data());

    PairSystem sys_up(params, m + 1, sector_table(params, m + 1, plan));   // B/D
    PairSystem sys_down(params, m, sector_table(params, m, plan));         // C/A

    GroundChannels ch;
    resize_like(ch.up, sys_up.n_small(), sys_up.n_big());
    resize_like(ch.down, sys_down.n_small(), sys_down.n_big());
    ch.up.small[gs_rank] = 1.0;  // B
    ch.down.big[gs_rank] = 1.0;  // A

    double dt = 0.0;
    const std::uint64_t nsteps = plan.steps(params, &dt);

    double max_drift = 0.0;
    observe(0.0, ch);
    for (std::uint64_t i = 0; i < nsteps; ++i) {
        sys_up.rk4_step(i * dt, dt, ch.up);
        sys_down.rk4_step(i * dt, dt, ch.down);
        if (i + 1 == nsteps || (i + 1) % plan.stride == 0) {
            for (const PairBlocks* b : {&ch.up, &ch.down}) {
                const double drift = std::abs(b->norm2() - 1.0);
                max_drift = std::max(max_drift, drift);
                if (drift > plan.norm_tol)
                    throw integration_failure("evolve_ground: norm drift exceeds tolerance",
                                              drift);
            }
            observe((i + 1) * dt, ch);
        }
    }
    return max_drift;
}

}  // namespace spinbath
