#include "spinbath/observables.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinbath {

namespace {

double norm2_of(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return s;
}

void check_qubit_norm(double alpha, cplx beta) {
    if (std::abs(alpha * alpha + std::norm(beta) - 1.0) > 1e-10)
        throw std::invalid_argument("two-qubit initial state is not normalized");
}

}  // namespace

BlochPoint bloch_point(double t, std::span<const PairBlocks> sectors,
                       const CoherentSpec& coh, double omega) {
    const std::size_t nsec = coh.Cn.size();
    if (sectors.size() != nsec)
        throw std::invalid_argument("bloch_point: sector count does not match coefficients");

    double sz = 0.0;
    for (std::size_t n = 0; n < nsec; ++n)
        sz += std::norm(coh.Cn[n]) *
              (norm2_of(sectors[n].small) - norm2_of(sectors[n].big));

    // Z(t) pairs the qubit-down amplitudes of sector s-1 with the qubit-up
    // amplitudes of sector s; both live on the same config set.
    cplx Z = 0.0;
    for (std::size_t s = 1; s < nsec; ++s) {
        const auto& big = sectors[s - 1].big;
        const auto& small = sectors[s].small;
        cplx dot = 0.0;
        for (std::size_t r = 0; r < big.size(); ++r) dot += std::conj(big[r]) * small[r];
        Z += std::conj(coh.Cn[s - 1]) * coh.Cn[s] * dot;
    }
    const cplx phased = std::exp(cplx(0.0, -omega * t)) * Z;

    BlochPoint p;
    p.t = t;
    p.sx = 2.0 * phased.real();
    p.sy = -2.0 * phased.imag();
    p.sz = sz;
    p.purity = 0.5 * (1.0 + p.sx * p.sx + p.sy * p.sy + p.sz * p.sz);
    return p;
}

WPoint w_point(double t, const GroundChannels& ch, double omega) {
    WPoint w;
    w.t = t;
    w.w_uu_uu = norm2_of(ch.up.small);    // B
    w.w_dd_uu = norm2_of(ch.up.big);      // D
    w.w_uu_dd = norm2_of(ch.down.small);  // C
    w.w_dd_dd = norm2_of(ch.down.big);    // A
    cplx ab = 0.0;
    for (std::size_t r = 0; r < ch.up.small.size(); ++r)
        ab += std::conj(ch.down.big[r]) * ch.up.small[r];
    w.r = std::exp(cplx(0.0, -omega * t)) * ab;
    return w;
}

Mat4 two_qubit_rho(const WPoint& w, double alpha, cplx beta) {
    check_qubit_norm(alpha, beta);
    const double a2 = alpha * alpha;
    const double b2 = std::norm(beta);
    Mat4 rho{};
    rho[0][0] = w.w_uu_dd * w.w_uu_uu;
    rho[1][1] = a2 * w.w_uu_dd * w.w_dd_uu + b2 * w.w_uu_uu * w.w_dd_dd;
    rho[2][2] = a2 * w.w_dd_dd * w.w_uu_uu + b2 * w.w_dd_uu * w.w_uu_dd;
    rho[3][3] = w.w_dd_dd * w.w_dd_uu;
    rho[1][2] = alpha * beta * std::norm(w.r);
    rho[2][1] = std::conj(rho[1][2]);
    return rho;
}

double concurrence_pre_clamp(const WPoint& w, double alpha, cplx beta) {
    check_qubit_norm(alpha, beta);
    const double r2 = std::norm(w.r);
    const double rho11 = w.w_uu_dd * w.w_uu_uu;
    const double rho44 = w.w_dd_dd * w.w_dd_uu;
    return 2.0 * std::abs(alpha * beta) * r2 - 2.0 * std::sqrt(std::max(0.0, rho11 * rho44));
}

double concurrence_closed(const WPoint& w, double alpha, cplx beta) {
    return std::max(0.0, concurrence_pre_clamp(w, alpha, beta));
}

double concurrence_wootters(const Mat4& rho) {
    Eigen::Matrix4cd R;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) R(i, j) = rho[i][j];
    Eigen::Matrix4cd Y = Eigen::Matrix4cd::Zero();
    // sigma_y x sigma_y in the {uu, ud, du, dd} basis
    Y(0, 3) = -1.0;
    Y(1, 2) = 1.0;
    Y(2, 1) = 1.0;
    Y(3, 0) = -1.0;
    const Eigen::Matrix4cd M = R * Y * R.conjugate() * Y;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i)
        lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<double>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

std::optional<double> fit_gaussian_rate(std::span<const double> t,
                                        std::span<const double> r2, double fit_window) {
    double sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= 0.0 || t[i] > fit_window || r2[i] <= 0.0) continue;
        const double x = t[i] * t[i];
        const double y = -std::log(r2[i]);
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    if (used < 2 || sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

std::optional<double> first_downward_zero(std::span<const double> t,
                                          std::span<const double> q) {
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (q[i - 1] > 0.0 && q[i] <= 0.0) {
            if (q[i] == 0.0) return t[i];
            return t[i - 1] + (t[i] - t[i - 1]) * q[i - 1] / (q[i - 1] - q[i]);
        }
    }
    return std::nullopt;
}

namespace {

// Parabola through three samples around index i; returns refined (x, y).
// Falls back to the grid point for plateaus and degenerate curvature.
std::pair<double, double> quad_refine(std::span<const double> t,
                                      std::span<const double> y, std::size_t i) {
    const double d2 = y[i - 1] - 2.0 * y[i] + y[i + 1];
    if (d2 == 0.0) return {t[i], y[i]};
    const double delta = 0.5 * (y[i - 1] - y[i + 1]) / d2;
    if (std::abs(delta) > 1.0) return {t[i], y[i]};
    const double h = 0.5 * (t[i + 1] - t[i - 1]);
    return {t[i] + delta * h, y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta};
}

}  // namespace

MetricReport analyze_series(std::span<const double> t, std::span<const double> r2,
                            std::span<const double> q, double fit_window) {
    MetricReport rep;
    rep.alpha = fit_gaussian_rate(t, r2, fit_window);

    bool seen_min = false;
    for (std::size_t i = 1; i + 1 < r2.size(); ++i) {
        // plateau resolves to its earliest sample: strict test on the left,
        // non-strict on the right
        const bool is_min = r2[i] < r2[i - 1] && r2[i] <= r2[i + 1];
        const bool is_max = r2[i] > r2[i - 1] && r2[i] >= r2[i + 1];
        if (is_min && !rep.t_first_min) {
            const bool strict = r2[i] < r2[i + 1];
            rep.t_first_min = strict ? quad_refine(t, r2, i).first : t[i];
            seen_min = true;
        }
        if (is_max && !rep.r2_max && seen_min) {
            const bool strict = r2[i] > r2[i + 1];
            rep.r2_max = strict ? quad_refine(t, r2, i).second : r2[i];
        }
        if (rep.t_first_min && rep.r2_max) break;
    }
    if (!q.empty()) rep.t_esd = first_downward_zero(t, q);
    return rep;
}

}  // namespace spinbath
