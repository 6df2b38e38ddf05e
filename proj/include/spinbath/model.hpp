#pragma once

#include <utility>
#include <vector>

#include "spinbath/common.hpp"

namespace spinbath {

// Couplings of the qubit + periodic XX chain. All energies are quoted in
// units of the (uniform) qubit-bath coupling g in the stock experiments,
// but the per-site profile g[j] is carried through everywhere.
struct ModelParams {
    int N = 0;          // bath sites, even
    double J = 0.0;     // nearest-neighbor intrabath coupling
    double h = 0.0;     // bath field
    double omega = 0.0; // qubit splitting
    std::vector<double> g;  // per-site qubit-bath couplings, length N

    static ModelParams uniform(int N, double J, double h, double omega, double g);

    double detuning() const { return h + omega; }
    double g_max() const;
    bool uniform_g() const;
    void validate() const;  // throws std::invalid_argument
};

enum class Parity { even, odd };

// A config with n fermions lives on K+ for n even and on K- for n odd.
Parity parity_of_count(int n);

// Momentum grid of one parity sector. Wavenumbers are stored as exact
// integer numerators q with k = q*pi/N, so grid membership and momentum
// bookkeeping stay exact.
//   K+ : q in {-(N-1), ..., -1, 1, ..., N-1}, q odd
//   K- : q in {-N, -N+2, ..., 0, ..., N-2},  q even
struct MomentumGrid {
    int N = 0;
    Parity parity = Parity::even;
    std::vector<int> num;  // strictly increasing numerators, |num| = N

    double k(int pos) const { return num[pos] * pi / N; }
    std::vector<double> ks() const;
    int pos_of_num(int q) const;  // -1 if absent
    int size() const { return static_cast<int>(num.size()); }
};

MomentumGrid momentum_grid(int N, Parity parity);

// Single-particle spectrum of the fermionized chain.
inline double dispersion(double k, double J, double h) { return J * std::cos(k) - h; }

// Level-crossing fields of the periodic XX chain at J = -1, h >= 0:
// h_m = -cos((m+1/2)pi/N)/cos(pi/(2N)) for m = N/2 .. N-1. The last one
// is the critical field and equals 1 exactly.
std::vector<std::pair<int, double>> critical_fields(int N);

// Ground state of the bath-only chain at J = -1, h >= 0.
struct GroundStateSpec {
    int m = 0;                      // filling index, occupation is m+1 modes
    Parity branch = Parity::even;   // odd -> c-fermions (K+), even -> d-fermions (K-)
    std::vector<int> occupied_num;  // numerators {-m, -m+2, ..., m}
    double energy = 0.0;
};

GroundStateSpec ground_state(int N, double h);

// Spin coherent state |Omega>, z = cot(theta/2) e^{-i phi}.
struct CoherentSpec {
    cplx z;
    std::vector<cplx> Cn;  // N+1 Dicke coefficients
};

CoherentSpec coherent_coefficients(int N, cplx z);
CoherentSpec coherent_from_angles(int N, double theta, double phi);

}  // namespace spinbath
