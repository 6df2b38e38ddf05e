#pragma once

#include <Eigen/Dense>

#include "spinbath/observables.hpp"

namespace spinbath {

// Brute-force propagator in the full 2^(N+1) spin basis, for cross-checking
// the momentum-space evolution at small N. Basis index bits: bit N is the
// qubit, bath site j (1-based) is bit N-j; a set bit is spin up.
class DenseOracle {
  public:
    // N <= 8 (dimension 512); larger N throws.
    explicit DenseOracle(const ModelParams& params);

    int N() const { return N_; }
    Eigen::Index dim() const { return H_.rows(); }
    const Eigen::MatrixXcd& hamiltonian() const { return H_; }

    // Schroedinger-picture state at time t from psi0 at t = 0.
    Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const;

    // 2x2 reduced state of the qubit, row/col 0 = up.
    Eigen::Matrix2cd qubit_rho(const Eigen::VectorXcd& psi) const;

    // <psi| sum_z/2 |psi> including the qubit; conserved by H.
    double magnetization(const Eigen::VectorXcd& psi) const;

  private:
    int N_;
    Eigen::MatrixXcd H_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_;
};

// Bath-only chain Hamiltonian in the 2^N spin basis (site j at bit N-j).
Eigen::MatrixXcd bath_hamiltonian(int N, double J, double h);

// Spin-basis expansion of a Slater state, dim 2^N:
//   |cfg> = sum_{j_1<..<j_m} S(ks; js) |js>.
Eigen::VectorXcd dense_config_state(int N, const FermionConfig& cfg);

// Full-space initial states matching the two evolution branches.
Eigen::VectorXcd dense_coherent_initial(int N, const CoherentSpec& coh);
Eigen::VectorXcd dense_ground_initial(int N, const GroundStateSpec& gs,
                                      cplx a_up, cplx a_down);

// --- closed forms -----------------------------------------------------------

// J = 0, uniform g: sector amplitudes a_n (qubit up) and b_n (qubit down).
struct RabiJ0 {
    cplx a, b;
};
RabiJ0 analytic_j0_amplitudes(int N, int n, double g, double detuning, double t);

// J = 0 Bloch vector and purity from the closed-form amplitudes.
BlochPoint analytic_j0_bloch(const ModelParams& params, const CoherentSpec& coh,
                             double t);

// N = 2, uniform g, any J: qubit polarization.
double analytic_n2_sz(const ModelParams& params, const CoherentSpec& coh, double t);

// --- perturbative decoherence ----------------------------------------------

// Second-order Gaussian rate alpha of |r(t)|^2 ~ exp(-alpha (gt)^2);
// depends only on N and the filling of the bath ground state.
double perturbative_alpha(int N, const GroundStateSpec& gs);

// Second-order |r(t)|^2, full cosine sum (valid for g << |J|, h).
double perturbative_r2(const ModelParams& params, const GroundStateSpec& gs, double t);

}  // namespace spinbath
