#pragma once

#include <span>
#include <vector>

#include "spinbath/configs.hpp"

namespace spinbath {

// Plane-wave Slater determinant
//   S(k_1..k_m; j_1..j_m) = N^{-m/2} det[e^{i k_a j_b}],
// sites are 1-based. ks in radians.
cplx slater(int N, std::span<const double> ks, std::span<const int> js);

// Determinant of an m x m complex matrix (row-major), destructive.
// Gaussian elimination with partial pivoting; deterministic.
cplx det_inplace(cplx* a, int m);

// Antisymmetric coupling kernel between adjacent-filling configs,
//   f~(k_1..k_{m+1}; p_1..p_m; {g_j})
//     = sum_{j_1<..<j_{m+1}} S(ks; js) sum_l g_{j_l} S*(ps; js \ j_l),
// evaluated by the direct ordered-subset sum. Exponential cost; this is
// the slow reference the table builder is checked against.
// ks live on one parity grid, ps on the other.
cplx f_function(const FermionConfig& ks, const FermionConfig& ps,
                std::span<const double> gs);

// Initial sector amplitudes of the Dicke state |D_n>:
//   B(k_1..k_n; 0) = C(N,n)^{-1/2} sum_{j_1<..<j_n} S*(ks; js),
// indexed by config rank on the parity-n grid. Unit norm.
std::vector<cplx> dicke_initial_amplitudes(int N, int n);

}  // namespace spinbath
