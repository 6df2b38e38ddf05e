#include "spinbath/oracle.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinbath {

namespace {

// advance a strictly increasing tuple over values 1..N; false when done
bool next_sites(std::vector<int>& js, int N) {
    const int m = static_cast<int>(js.size());
    for (int i = m - 1; i >= 0; --i) {
        if (js[i] < N - (m - 1 - i)) {
            ++js[i];
            for (int l = i + 1; l < m; ++l) js[l] = js[l - 1] + 1;
            return true;
        }
    }
    return false;
}

std::size_t bath_index(int N, const std::vector<int>& js) {
    std::size_t idx = 0;
    for (int j : js) idx |= std::size_t{1} << (N - j);
    return idx;
}

}  // namespace

DenseOracle::DenseOracle(const ModelParams& params) : N_(params.N) {
    params.validate();
    if (N_ > 8) throw std::invalid_argument("DenseOracle: N > 8 not supported");
    const Eigen::Index dim = Eigen::Index{1} << (N_ + 1);
    H_ = Eigen::MatrixXcd::Zero(dim, dim);

    const int qb = N_;
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto bit = [&](int b) { return (s >> b) & 1; };
        // qubit splitting omega/2 (sz+1) and bath field -h/2 sum (sz+1)
        double diag = bit(qb) ? params.omega : 0.0;
        for (int j = 1; j <= N_; ++j)
            if (bit(N_ - j)) diag -= params.h;
        H_(s, s) = diag;
        // intrabath hopping over all N directed bonds; the j = N term wraps,
        // and at N = 2 the single bond is counted twice, matching the
        // momentum-space dispersion
        for (int j = 1; j <= N_; ++j) {
            const int j2 = j % N_ + 1;
            const int b1 = N_ - j, b2 = N_ - j2;
            if (bit(b1) != bit(b2))
                H_(s ^ (Eigen::Index{1} << b1) ^ (Eigen::Index{1} << b2), s) +=
                    0.5 * params.J;
        }
        // spin-flip qubit-bath exchange
        for (int j = 1; j <= N_; ++j) {
            const int bj = N_ - j;
            if (bit(qb) != bit(bj))
                H_(s ^ (Eigen::Index{1} << qb) ^ (Eigen::Index{1} << bj), s) +=
                    params.g[j - 1];
        }
    }
    es_.compute(H_);
}

Eigen::VectorXcd DenseOracle::evolve(const Eigen::VectorXcd& psi0, double t) const {
    const auto& V = es_.eigenvectors();
    Eigen::VectorXcd c = V.adjoint() * psi0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c(i) *= std::exp(cplx(0.0, -es_.eigenvalues()(i) * t));
    return V * c;
}

Eigen::Matrix2cd DenseOracle::qubit_rho(const Eigen::VectorXcd& psi) const {
    const Eigen::Index half = Eigen::Index{1} << N_;
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (Eigen::Index b = 0; b < half; ++b) {
        const cplx up = psi(half + b), down = psi(b);
        rho(0, 0) += up * std::conj(up);
        rho(0, 1) += up * std::conj(down);
        rho(1, 1) += down * std::conj(down);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

double DenseOracle::magnetization(const Eigen::VectorXcd& psi) const {
    double M = 0.0;
    for (Eigen::Index s = 0; s < psi.size(); ++s)
        M += std::norm(psi(s)) * (std::popcount(static_cast<std::uint64_t>(s)) -
                                  0.5 * (N_ + 1));
    return M;
}

Eigen::MatrixXcd bath_hamiltonian(int N, double J, double h) {
    const Eigen::Index dim = Eigen::Index{1} << N;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto bit = [&](int b) { return (s >> b) & 1; };
        double diag = 0.0;
        for (int j = 1; j <= N; ++j)
            if (bit(N - j)) diag -= h;
        H(s, s) = diag;
        for (int j = 1; j <= N; ++j) {
            const int j2 = j % N + 1;
            const int b1 = N - j, b2 = N - j2;
            if (bit(b1) != bit(b2))
                H(s ^ (Eigen::Index{1} << b1) ^ (Eigen::Index{1} << b2), s) += 0.5 * J;
        }
    }
    return H;
}

Eigen::VectorXcd dense_config_state(int N, const FermionConfig& cfg) {
    const int m = cfg.size();
    const auto ks = cfg.ks();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << N);
    if (m == 0) {
        v(0) = 1.0;
        return v;
    }
    std::vector<int> js(m);
    std::iota(js.begin(), js.end(), 1);
    do {
        v(bath_index(N, js)) += slater(N, ks, js);
    } while (next_sites(js, N));
    return v;
}

Eigen::VectorXcd dense_coherent_initial(int N, const CoherentSpec& coh) {
    const Eigen::Index half = Eigen::Index{1} << N;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * half);
    for (Eigen::Index b = 0; b < half; ++b) {
        const int n = std::popcount(static_cast<std::uint64_t>(b));
        v(half + b) = coh.Cn[n] / std::sqrt(double(binomial(N, n)));
    }
    return v;
}

Eigen::VectorXcd dense_ground_initial(int N, const GroundStateSpec& gs,
                                      cplx a_up, cplx a_down) {
    const auto grid = momentum_grid(N, parity_of_count(gs.m + 1));
    FermionConfig cfg;
    cfg.grid = &grid;
    for (int q : gs.occupied_num) cfg.pos.push_back(grid.pos_of_num(q));
    const Eigen::VectorXcd bath = dense_config_state(N, cfg);

    const Eigen::Index half = Eigen::Index{1} << N;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * half);
    v.segment(half, half) = a_up * bath;
    v.segment(0, half) = a_down * bath;
    return v;
}

RabiJ0 analytic_j0_amplitudes(int N, int n, double g, double detuning, double t) {
    const double gt = g * std::sqrt(double(n + 1) * double(N - n));
    const double Om = std::sqrt(4.0 * gt * gt + detuning * detuning);
    if (Om == 0.0) return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    const double s = std::sin(0.5 * Om * t) / Om;
    const cplx eph = std::exp(cplx(0.0, 0.5 * detuning * t));
    RabiJ0 r;
    r.a = eph * (cplx(0.0, -detuning) * s + std::cos(0.5 * Om * t));
    r.b = cplx(0.0, -2.0 * gt) * std::conj(eph) * s;
    return r;
}

BlochPoint analytic_j0_bloch(const ModelParams& params, const CoherentSpec& coh,
                             double t) {
    if (!params.uniform_g())
        throw std::invalid_argument("analytic_j0_bloch: requires uniform coupling");
    const int N = params.N;
    const double g = params.g[0];
    const double det = params.detuning();

    std::vector<RabiJ0> ab(N + 1);
    for (int n = 0; n <= N; ++n) ab[n] = analytic_j0_amplitudes(N, n, g, det, t);

    BlochPoint p;
    p.t = t;
    p.sz = 0.0;
    for (int n = 0; n <= N; ++n)
        p.sz += std::norm(coh.Cn[n]) * (std::norm(ab[n].a) - std::norm(ab[n].b));
    cplx Z = 0.0;
    for (int n = 1; n <= N; ++n)
        Z += std::conj(coh.Cn[n - 1]) * coh.Cn[n] * std::conj(ab[n - 1].b) * ab[n].a;
    const cplx phased = std::exp(cplx(0.0, -params.omega * t)) * Z;
    p.sx = 2.0 * phased.real();
    p.sy = -2.0 * phased.imag();
    p.purity = 0.5 * (1.0 + p.sx * p.sx + p.sy * p.sy + p.sz * p.sz);
    return p;
}

double analytic_n2_sz(const ModelParams& params, const CoherentSpec& coh, double t) {
    if (params.N != 2) throw std::invalid_argument("analytic_n2_sz: N must be 2");
    if (!params.uniform_g())
        throw std::invalid_argument("analytic_n2_sz: requires uniform coupling");
    const double g2 = 8.0 * params.g[0] * params.g[0];
    const double Jm = params.detuning() - params.J;
    const double Jp = params.detuning() + params.J;
    const auto term = [&](double Jpm) {
        const double d = g2 + Jpm * Jpm;
        return (g2 * std::cos(t * std::sqrt(d)) + Jpm * Jpm) / d;
    };
    return std::norm(coh.Cn[0]) * term(Jm) + std::norm(coh.Cn[1]) * term(Jp) +
           std::norm(coh.Cn[2]);
}

namespace {

std::uint64_t ground_rank(int N, const GroundStateSpec& gs, const MomentumGrid& grid) {
    std::vector<int> pos;
    pos.reserve(gs.occupied_num.size());
    for (int q : gs.occupied_num) {
        const int p = grid.pos_of_num(q);
        if (p < 0) throw std::invalid_argument("ground config not on its parity grid");
        pos.push_back(p);
    }
    return rank_combination(N, gs.m + 1, pos.data());
}

}  // namespace

double perturbative_alpha(int N, const GroundStateSpec& gs) {
    const std::vector<double> ones(N, 1.0);
    const int m = gs.m;
    const auto grid_big = momentum_grid(N, parity_of_count(m + 1));
    const std::uint64_t r = ground_rank(N, gs, grid_big);

    double alpha = 0.0;
    if (m >= 0) {
        const FTable T = build_f_table(N, m, ones);
        for (std::uint64_t is = 0; is < T.n_small; ++is) alpha += std::norm(T.at(r, is));
    }
    if (m + 2 <= N) {
        const FTable T = build_f_table(N, m + 1, ones);
        for (std::uint64_t ib = 0; ib < T.n_big; ++ib) alpha += std::norm(T.at(ib, r));
    }
    return alpha;
}

double perturbative_r2(const ModelParams& params, const GroundStateSpec& gs, double t) {
    if (!params.uniform_g())
        throw std::invalid_argument("perturbative_r2: requires uniform coupling");
    const int N = params.N;
    const int m = gs.m;
    const double g = params.g[0];
    const std::vector<double> ones(N, 1.0);

    const auto grid_big = momentum_grid(N, parity_of_count(m + 1));
    const std::uint64_t r = ground_rank(N, gs, grid_big);
    double E_gs = 0.0;
    for (int q : gs.occupied_num)
        E_gs += dispersion(q * pi / N, params.J, params.h);

    const auto kernel = [&](double theta) {
        if (std::abs(theta) < 1e-9) return -0.5 * t * t;
        return (std::cos(theta * t) - 1.0) / (theta * theta);
    };

    double r2 = 1.0;
    {
        const FTable T = build_f_table(N, m, ones);
        const auto grid_small = momentum_grid(N, parity_of_count(m));
        const auto Ep = config_energies(grid_small, m, params.J, params.h);
        for (std::uint64_t is = 0; is < T.n_small; ++is)
            r2 += 2.0 * g * g * std::norm(T.at(r, is)) *
                  kernel(params.omega + Ep[is] - E_gs);
    }
    if (m + 2 <= N) {
        const FTable T = build_f_table(N, m + 1, ones);
        const auto grid_big2 = momentum_grid(N, parity_of_count(m + 2));
        const auto Ep = config_energies(grid_big2, m + 2, params.J, params.h);
        for (std::uint64_t ib = 0; ib < T.n_big; ++ib)
            r2 += 2.0 * g * g * std::norm(T.at(ib, r)) *
                  kernel(params.omega + E_gs - Ep[ib]);
    }
    return r2;
}

}  // namespace spinbath
