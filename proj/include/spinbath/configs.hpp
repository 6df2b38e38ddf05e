#pragma once

#include <cstdint>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath {

// C(n, k); 0 outside the valid range. Exact for everything this code touches.
std::uint64_t binomial(int n, int k);

// Lexicographic rank/unrank over strictly increasing index tuples
// 0 <= c[0] < c[1] < ... < c[n-1] < N.
std::uint64_t rank_combination(int N, int n, const int* pos);
void unrank_combination(int N, int n, std::uint64_t rank, int* pos_out);

// Strictly increasing tuple of grid positions; the basis label of one
// Slater state.
struct FermionConfig {
    const MomentumGrid* grid = nullptr;
    std::vector<int> pos;  // positions into grid->num, strictly increasing

    int size() const { return static_cast<int>(pos.size()); }
    std::uint64_t rank() const;
    std::vector<double> ks() const;
    int momentum_num() const;  // sum of numerators (exact total momentum * N/pi)
};

FermionConfig unrank_config(const MomentumGrid& grid, int n, std::uint64_t rank);
std::vector<FermionConfig> enumerate_configs(const MomentumGrid& grid, int n);

// Sorts an arbitrary distinct tuple into canonical increasing order and
// returns the permutation sign (+1/-1); 0 if a repeated entry makes the
// Slater state vanish.
int canonicalize(std::vector<int>& pos);

// Sum of single-particle energies for every n-config of the grid, indexed
// by rank.
std::vector<double> config_energies(const MomentumGrid& grid, int n, double J, double h);

// Total momentum numerator (sum of grid numerators mod 2N) per rank.
std::vector<int> config_momenta_mod(const MomentumGrid& grid, int n);

}  // namespace spinbath
