#pragma once

#include <array>
#include <optional>

#include "spinbath/evolve.hpp"

namespace spinbath {

// --- single-qubit Bloch vector (spin-coherent-state bath) ------------------

struct BlochPoint {
    double t = 0.0;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    double purity = 1.0;
};

// Reduce all sector amplitudes at one time to the Bloch vector and purity.
// sectors[n] holds the qubit-up amplitudes (small, n bath excitations) and
// qubit-down amplitudes (big, n+1) of the sector evolved from |1>|D_n>.
BlochPoint bloch_point(double t, std::span<const PairBlocks> sectors,
                       const CoherentSpec& coh, double omega);

// --- W factors (ground-state bath) -----------------------------------------

// The nonzero reduced-density-matrix transfer factors of one qubit-bath
// copy. Up/down refer to the qubit index pair; w_ud_ud is the decoherence
// factor r(t) and carries the e^{-i omega t} prefactor. The conjugate
// element w_du_du is conj(r) and is not stored.
struct WPoint {
    double t = 0.0;
    double w_uu_uu = 1.0;  // sum |B|^2
    double w_uu_dd = 0.0;  // sum |C|^2
    double w_dd_uu = 0.0;  // sum |D|^2
    double w_dd_dd = 1.0;  // sum |A|^2
    cplx r{1.0, 0.0};
};

WPoint w_point(double t, const GroundChannels& ch, double omega);

// --- two-qubit X state ------------------------------------------------------

// Basis order {|uu>, |ud>, |du>, |dd>}.
using Mat4 = std::array<std::array<cplx, 4>, 4>;

// Reduced state of two qubits coupled to identical independent baths,
// evolved from alpha|du> + beta|ud> with alpha real, alpha^2+|beta|^2 = 1.
Mat4 two_qubit_rho(const WPoint& w, double alpha, cplx beta);

// Closed-form concurrence of that X state and its pre-clamp expression
// 2|alpha beta||r|^2 - 2 sqrt(rho_uu,uu rho_dd,dd); the clamp is
// C = max{0, pre}. The pre-clamp value is what the disentanglement-time
// search interpolates through zero.
double concurrence_pre_clamp(const WPoint& w, double alpha, cplx beta);
double concurrence_closed(const WPoint& w, double alpha, cplx beta);

// General concurrence via the spin-flipped-spectrum construction; reference
// implementation for validating the closed form.
double concurrence_wootters(const Mat4& rho);

// --- scalar metrics ---------------------------------------------------------

struct MetricReport {
    std::optional<double> alpha;        // Gaussian rate per (gt)^2
    std::optional<double> r2_max;       // first post-initial maximum of |r|^2
    std::optional<double> t_first_min;  // gt of first minimum of |r|^2
    std::optional<double> t_esd;        // gt where the concurrence first hits 0
};

// Through-origin least squares of -ln|r|^2 against t^2 on t in (0, window].
std::optional<double> fit_gaussian_rate(std::span<const double> t,
                                        std::span<const double> r2,
                                        double fit_window = 0.02);

// First downward zero crossing of q, linearly interpolated. q is the
// pre-clamp concurrence expression.
std::optional<double> first_downward_zero(std::span<const double> t,
                                          std::span<const double> q);

// Full report. q may be empty (no concurrence series); then t_esd is absent.
// Extrema use three-point local tests with quadratic refinement; plateaus
// resolve to the earliest time.
MetricReport analyze_series(std::span<const double> t, std::span<const double> r2,
                            std::span<const double> q = {}, double fit_window = 0.02);

}  // namespace spinbath
