#include "spinbath/slater.hpp"

#include <cmath>
#include <stdexcept>

namespace spinbath {

cplx det_inplace(cplx* a, int m) {
    if (m == 0) return 1.0;
    cplx det = 1.0;
    for (int col = 0; col < m; ++col) {
        int piv = col;
        double best = std::norm(a[col * m + col]);
        for (int r = col + 1; r < m; ++r) {
            double v = std::norm(a[r * m + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int c = col; c < m; ++c) std::swap(a[col * m + c], a[piv * m + c]);
            det = -det;
        }
        const cplx d = a[col * m + col];
        det *= d;
        for (int r = col + 1; r < m; ++r) {
            const cplx factor = a[r * m + col] / d;
            if (factor == cplx{}) continue;
            for (int c = col + 1; c < m; ++c) a[r * m + c] -= factor * a[col * m + c];
        }
    }
    return det;
}

cplx slater(int N, std::span<const double> ks, std::span<const int> js) {
    if (ks.size() != js.size())
        throw std::invalid_argument("slater: wavenumber/site tuples differ in length");
    const int m = static_cast<int>(ks.size());
    for (int j : js)
        if (j < 1 || j > N) throw std::invalid_argument("slater: site index out of 1..N");
    std::vector<cplx> a(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) a[r * m + c] = std::exp(iu * (ks[r] * js[c]));
    return det_inplace(a.data(), m) * std::pow(1.0 / std::sqrt(double(N)), m);
}

cplx f_function(const FermionConfig& ks, const FermionConfig& ps, std::span<const double> gs) {
    if (ks.grid == nullptr || ps.grid == nullptr)
        throw std::invalid_argument("f_function: configs must reference a grid");
    if (ks.grid->parity == ps.grid->parity)
        throw std::invalid_argument("f_function: configs must live on opposite parity grids");
    if (ks.size() != ps.size() + 1)
        throw std::invalid_argument("f_function: sector sizes must differ by one");
    const int N = ks.grid->N;
    const int m1 = ks.size();  // m+1

    const auto kvals = ks.ks();
    const auto pvals = ps.ks();

    // iterate ordered site subsets of size m+1 (sites 1-based)
    std::vector<int> js(m1);
    for (int i = 0; i < m1; ++i) js[i] = i + 1;
    std::vector<int> sub(m1 - 1);
    cplx total = 0.0;
    while (true) {
        cplx inner = 0.0;
        for (int l = 0; l < m1; ++l) {
            int t = 0;
            for (int i = 0; i < m1; ++i)
                if (i != l) sub[t++] = js[i];
            inner += gs[js[l] - 1] * std::conj(slater(N, pvals, sub));
        }
        total += slater(N, kvals, js) * inner;

        // next combination
        int i = m1 - 1;
        while (i >= 0 && js[i] == N - (m1 - 1 - i)) --i;
        if (i < 0) break;
        ++js[i];
        for (int t = i + 1; t < m1; ++t) js[t] = js[t - 1] + 1;
    }
    return total;
}

std::vector<cplx> dicke_initial_amplitudes(int N, int n) {
    if (n < 0 || n > N) throw std::invalid_argument("dicke_initial_amplitudes: n out of 0..N");
    MomentumGrid grid = momentum_grid(N, parity_of_count(n));
    const auto configs = enumerate_configs(grid, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(binomial(N, n)));

    std::vector<cplx> out(configs.size(), cplx{});
    if (n == 0) {
        out[0] = 1.0;  // empty product
        return out;
    }
    std::vector<int> js(n);
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const auto kvals = configs[ci].ks();
        for (int i = 0; i < n; ++i) js[i] = i + 1;
        cplx sum = 0.0;
        while (true) {
            sum += std::conj(slater(N, kvals, js));
            int i = n - 1;
            while (i >= 0 && js[i] == N - (n - 1 - i)) --i;
            if (i < 0) break;
            ++js[i];
            for (int t = i + 1; t < n; ++t) js[t] = js[t - 1] + 1;
        }
        out[ci] = scale * sum;
    }
    return out;
}

}  // namespace spinbath
