#include "spinbath/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace spinbath {

ModelParams ModelParams::uniform(int N, double J, double h, double omega, double g) {
    ModelParams p;
    p.N = N;
    p.J = J;
    p.h = h;
    p.omega = omega;
    p.g.assign(static_cast<std::size_t>(std::max(N, 0)), g);
    p.validate();
    return p;
}

double ModelParams::g_max() const {
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

bool ModelParams::uniform_g() const {
    for (double v : g)
        if (v != g.front()) return false;
    return true;
}

void ModelParams::validate() const {
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("ModelParams: N must be even and >= 2");
    if (static_cast<int>(g.size()) != N)
        throw std::invalid_argument("ModelParams: g profile must have length N");
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(J) || !finite(h) || !finite(omega))
        throw std::invalid_argument("ModelParams: couplings must be finite");
    for (double v : g)
        if (!finite(v)) throw std::invalid_argument("ModelParams: couplings must be finite");
}

Parity parity_of_count(int n) { return n % 2 == 0 ? Parity::even : Parity::odd; }

MomentumGrid momentum_grid(int N, Parity parity) {
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("momentum_grid: N must be even and >= 2");
    MomentumGrid grid;
    grid.N = N;
    grid.parity = parity;
    grid.num.reserve(N);
    if (parity == Parity::even) {
        for (int q = -(N - 1); q <= N - 1; q += 2) grid.num.push_back(q);
    } else {
        for (int q = -N; q <= N - 2; q += 2) grid.num.push_back(q);
    }
    return grid;
}

std::vector<double> MomentumGrid::ks() const {
    std::vector<double> out(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) out[i] = k(static_cast<int>(i));
    return out;
}

int MomentumGrid::pos_of_num(int q) const {
    auto it = std::lower_bound(num.begin(), num.end(), q);
    if (it == num.end() || *it != q) return -1;
    return static_cast<int>(it - num.begin());
}

std::vector<std::pair<int, double>> critical_fields(int N) {
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("critical_fields: N must be even and >= 2");
    std::vector<std::pair<int, double>> out;
    out.reserve(N / 2);
    const double denom = std::cos(pi / (2 * N));
    for (int m = N / 2; m <= N - 1; ++m) {
        double hm = (m == N - 1)
                        ? 1.0  // h_{N-1} = h_c = 1 exactly
                        : -std::cos((m + 0.5) * pi / N) / denom;
        out.emplace_back(m, hm);
    }
    return out;
}

namespace {

std::vector<int> symmetric_occupation(int m) {
    std::vector<int> occ;
    occ.reserve(m + 1);
    for (int q = -m; q <= m; q += 2) occ.push_back(q);
    return occ;
}

}  // namespace

GroundStateSpec ground_state(int N, double h) {
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("ground_state: N must be even and >= 2");
    if (h < 0.0) throw std::invalid_argument("ground_state: h must be >= 0");

    const auto hm = critical_fields(N);

    int m = -1;
    if (h >= 1.0) {
        m = N - 1;  // fully polarized branch, includes h = 1
    } else {
        // Refuse exactly-degenerate fields (interior level crossings).
        for (const auto& [mm, hc] : hm) {
            if (mm <= N - 2 && std::abs(h - hc) < 1e-12)
                throw degenerate_ground_state(
                    "ground_state: h coincides with level crossing h_" + std::to_string(mm));
        }
        if (h < hm.front().second) {
            m = N / 2 - 1;
        } else {
            for (std::size_t i = 0; i < hm.size(); ++i) {
                double lo = hm[i].second;
                double hi = (i + 1 < hm.size()) ? hm[i + 1].second : 1.0;
                if (h > lo && h < hi) {
                    m = hm[i].first;
                    break;
                }
            }
        }
    }
    if (m < 0) throw std::logic_error("ground_state: interval search failed");

    GroundStateSpec spec;
    spec.m = m;
    spec.branch = parity_of_count(m);  // odd m -> c-fermions, even m -> d-fermions
    spec.occupied_num = symmetric_occupation(m);

    if (m == N - 1) {
        spec.energy = -h * N;
    } else if (m % 2 == 0) {
        double e = -(h + 1.0);
        for (int l = 1; l <= m / 2; ++l) e -= 2.0 * (std::cos(2.0 * pi * l / N) + h);
        spec.energy = e;
    } else {
        double e = 0.0;
        for (int l = 1; l <= (m + 1) / 2; ++l) e -= 2.0 * (std::cos((2 * l - 1) * pi / N) + h);
        spec.energy = e;
    }
    return spec;
}

CoherentSpec coherent_coefficients(int N, cplx z) {
    if (N < 1) throw std::invalid_argument("coherent_coefficients: N must be positive");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("coherent_coefficients: z must be finite");
    CoherentSpec spec;
    spec.z = z;
    spec.Cn.resize(N + 1);
    const double norm = std::pow(1.0 + std::norm(z), N / 2.0);
    cplx zn = 1.0;
    double binom = 1.0;  // C(N, n), updated multiplicatively
    for (int n = 0; n <= N; ++n) {
        spec.Cn[n] = zn * std::sqrt(binom) / norm;
        zn *= z;
        binom *= static_cast<double>(N - n) / (n + 1);
    }
    return spec;
}

CoherentSpec coherent_from_angles(int N, double theta, double phi) {
    cplx z = std::cos(theta / 2) / std::sin(theta / 2) * std::exp(-iu * phi);
    return coherent_coefficients(N, z);
}

}  // namespace spinbath
