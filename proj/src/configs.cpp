#include "spinbath/configs.hpp"

#include <algorithm>
#include <stdexcept>

namespace spinbath {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / i;
    }
    return r;
}

std::uint64_t rank_combination(int N, int n, const int* pos) {
    // Lexicographic rank: count combinations that precede the given one.
    std::uint64_t rank = 0;
    int prev = -1;
    for (int i = 0; i < n; ++i) {
        for (int c = prev + 1; c < pos[i]; ++c) rank += binomial(N - 1 - c, n - 1 - i);
        prev = pos[i];
    }
    return rank;
}

void unrank_combination(int N, int n, std::uint64_t rank, int* pos_out) {
    if (rank >= binomial(N, n))
        throw std::invalid_argument("unrank_combination: rank out of range");
    int c = 0;
    for (int i = 0; i < n; ++i) {
        while (true) {
            std::uint64_t block = binomial(N - 1 - c, n - 1 - i);
            if (rank < block) break;
            rank -= block;
            ++c;
        }
        pos_out[i] = c++;
    }
}

std::uint64_t FermionConfig::rank() const {
    return rank_combination(grid->size(), size(), pos.data());
}

std::vector<double> FermionConfig::ks() const {
    std::vector<double> out(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) out[i] = grid->k(pos[i]);
    return out;
}

int FermionConfig::momentum_num() const {
    int s = 0;
    for (int p : pos) s += grid->num[p];
    return s;
}

FermionConfig unrank_config(const MomentumGrid& grid, int n, std::uint64_t rank) {
    if (n < 0 || n > grid.size())
        throw std::invalid_argument("unrank_config: invalid occupation number");
    FermionConfig cfg;
    cfg.grid = &grid;
    cfg.pos.resize(n);
    unrank_combination(grid.size(), n, rank, cfg.pos.data());
    return cfg;
}

std::vector<FermionConfig> enumerate_configs(const MomentumGrid& grid, int n) {
    const std::uint64_t count = binomial(grid.size(), n);
    std::vector<FermionConfig> out;
    out.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) out.push_back(unrank_config(grid, n, r));
    return out;
}

int canonicalize(std::vector<int>& pos) {
    int sign = 1;
    // insertion sort with transposition counting; tuples are short
    for (std::size_t i = 1; i < pos.size(); ++i) {
        int v = pos[i];
        std::size_t j = i;
        while (j > 0 && pos[j - 1] > v) {
            pos[j] = pos[j - 1];
            --j;
            sign = -sign;
        }
        pos[j] = v;
    }
    for (std::size_t i = 1; i < pos.size(); ++i)
        if (pos[i] == pos[i - 1]) return 0;
    return sign;
}

std::vector<double> config_energies(const MomentumGrid& grid, int n, double J, double h) {
    std::vector<double> eps(grid.size());
    for (int i = 0; i < grid.size(); ++i) eps[i] = dispersion(grid.k(i), J, h);
    const std::uint64_t count = binomial(grid.size(), n);
    std::vector<double> out(count);
    std::vector<int> pos(n);
    for (std::uint64_t r = 0; r < count; ++r) {
        unrank_combination(grid.size(), n, r, pos.data());
        double e = 0.0;
        for (int p : pos) e += eps[p];
        out[r] = e;
    }
    return out;
}

std::vector<int> config_momenta_mod(const MomentumGrid& grid, int n) {
    const int mod = 2 * grid.N;
    const std::uint64_t count = binomial(grid.size(), n);
    std::vector<int> out(count);
    std::vector<int> pos(n);
    for (std::uint64_t r = 0; r < count; ++r) {
        unrank_combination(grid.size(), n, r, pos.data());
        int s = 0;
        for (int p : pos) s += grid.num[p];
        out[r] = ((s % mod) + mod) % mod;
    }
    return out;
}

}  // namespace spinbath
