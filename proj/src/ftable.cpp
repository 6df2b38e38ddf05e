#include "spinbath/ftable.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinbath {

namespace {

void check_level(int N, int m) {
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("f_table: N must be even and >= 2");
    if (m < 0 || m + 1 > N) throw std::invalid_argument("f_table: need 0 <= m and m+1 <= N");
}

void init_table(FTable& t, int N, int m, std::span<const double> gs) {
    t.N = N;
    t.m = m;
    t.gs.assign(gs.begin(), gs.end());
    if (static_cast<int>(t.gs.size()) != N)
        throw std::invalid_argument("f_table: coupling profile must have length N");
    t.n_small = binomial(N, m);
    t.n_big = binomial(N, m + 1);
    t.values.assign(t.n_big * t.n_small, cplx{});
}

void classify_and_compress(FTable& t) {
    double vmax = 0.0;
    for (const cplx& v : t.values) vmax = std::max(vmax, std::abs(v));
    t.zero_threshold = 1e-13 * vmax;

    t.row_ptr.assign(t.n_big + 1, 0);
    t.col_ptr.assign(t.n_small + 1, 0);
    std::uint64_t nnz = 0;
    for (std::uint64_t ib = 0; ib < t.n_big; ++ib) {
        for (std::uint64_t is = 0; is < t.n_small; ++is) {
            if (std::abs(t.values[ib * t.n_small + is]) > t.zero_threshold) {
                ++nnz;
                ++t.row_ptr[ib + 1];
                ++t.col_ptr[is + 1];
            }
        }
    }
    t.nnz = nnz;
    for (std::uint64_t i = 0; i < t.n_big; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
    for (std::uint64_t i = 0; i < t.n_small; ++i) t.col_ptr[i + 1] += t.col_ptr[i];
    t.row_col.resize(nnz);
    t.row_val.resize(nnz);
    t.col_row.resize(nnz);
    t.col_val.resize(nnz);
    std::vector<std::uint64_t> rfill(t.row_ptr.begin(), t.row_ptr.end() - 1);
    std::vector<std::uint64_t> cfill(t.col_ptr.begin(), t.col_ptr.end() - 1);
    for (std::uint64_t ib = 0; ib < t.n_big; ++ib) {
        for (std::uint64_t is = 0; is < t.n_small; ++is) {
            const cplx v = t.values[ib * t.n_small + is];
            if (std::abs(v) > t.zero_threshold) {
                t.row_col[rfill[ib]] = static_cast<std::uint32_t>(is);
                t.row_val[rfill[ib]++] = v;
                t.col_row[cfill[is]] = static_cast<std::uint32_t>(ib);
                t.col_val[cfill[is]++] = v;
            }
        }
    }
}

}  // namespace

cplx FTable::lookup(std::vector<int> big_pos, std::vector<int> small_pos) const {
    const int sb = canonicalize(big_pos);
    const int ss = canonicalize(small_pos);
    if (sb == 0 || ss == 0) return cplx{};
    const std::uint64_t ib = rank_combination(N, m + 1, big_pos.data());
    const std::uint64_t is = rank_combination(N, m, small_pos.data());
    return double(sb * ss) * at(ib, is);
}

std::optional<int> FTable::measured_momentum_offset() const {
    const auto grid_small = momentum_grid(N, parity_of_count(m));
    const auto grid_big = momentum_grid(N, parity_of_count(m + 1));
    const auto mom_small = config_momenta_mod(grid_small, m);
    const auto mom_big = config_momenta_mod(grid_big, m + 1);
    const int mod = 2 * N;
    std::optional<int> offset;
    for (std::uint64_t ib = 0; ib < n_big; ++ib) {
        for (std::uint64_t is = 0; is < n_small; ++is) {
            if (std::abs(values[ib * n_small + is]) <= zero_threshold) continue;
            int d = ((mom_big[ib] - mom_small[is]) % mod + mod) % mod;
            if (!offset)
                offset = d;
            else if (*offset != d)
                return std::nullopt;
        }
    }
    return offset;
}

FTable build_f_table(int N, int m, std::span<const double> gs, std::size_t mem_cap_bytes) {
    check_level(N, m);
    {
        const std::uint64_t entries = binomial(N, m) * binomial(N, m + 1);
        const std::uint64_t bytes = entries * sizeof(cplx) * 3;  // dense + two sparse views
        if (bytes > mem_cap_bytes)
            throw resource_error("f_table: estimated size exceeds memory cap", bytes);
    }
    FTable t;
    init_table(t, N, m, gs);

    const auto grid_small = momentum_grid(N, parity_of_count(m));
    const auto grid_big = momentum_grid(N, parity_of_count(m + 1));
    const int m1 = m + 1;

    // Phase table W[d + 2N] = e^{i d pi / N} for numerator differences d.
    std::vector<cplx> W(4 * N + 1);
    for (int d = -2 * N; d <= 2 * N; ++d) W[d + 2 * N] = std::exp(iu * (d * pi / N));
    // Full-ring geometric sums G(q) = sum_{l=1..N} e^{iql}. Cross-grid
    // differences are odd multiples of pi/N, so e^{iqN} = -1.
    std::vector<cplx> G(4 * N + 1);
    for (int d = -2 * N; d <= 2 * N; ++d) {
        if (((d % 2) + 2) % 2 == 1)
            G[d + 2 * N] = -2.0 * W[d + 2 * N] / (W[d + 2 * N] - 1.0);
        else
            G[d + 2 * N] = (d % (2 * N) == 0) ? cplx(N, 0) : cplx{};
    }

    const std::int64_t nbig = static_cast<std::int64_t>(t.n_big);

#pragma omp parallel
    {
        std::vector<int> bpos(m1), spos(m);
        std::vector<cplx> mat(static_cast<std::size_t>(m1) * m1);
        std::vector<cplx> Eq(static_cast<std::size_t>(m1) * m), powq(static_cast<std::size_t>(m1) * m),
            partial(static_cast<std::size_t>(m1) * m), Gq(static_cast<std::size_t>(m1) * m);
        std::vector<cplx> e0(m1), pow0(m1);

#pragma omp for schedule(dynamic, 8)
        for (std::int64_t ibs = 0; ibs < nbig; ++ibs) {
            const std::uint64_t ib = static_cast<std::uint64_t>(ibs);
            unrank_combination(N, m1, ib, bpos.data());
            for (int b = 0; b < m1; ++b) {
                e0[b] = std::conj(W[grid_big.num[bpos[b]] + 2 * N]);
            }
            for (std::uint64_t is = 0; is < t.n_small; ++is) {
                unrank_combination(N, m, is, spos.data());
                // per-pair phase data for q = p_a - kappa_b
                for (int b = 0; b < m1; ++b) {
                    for (int a = 0; a < m; ++a) {
                        const int d = grid_small.num[spos[a]] - grid_big.num[bpos[b]];
                        const cplx e = W[d + 2 * N];
                        Eq[b * m + a] = e;
                        powq[b * m + a] = e;       // e^{iq * 1}
                        partial[b * m + a] = 0.0;  // sum_{l<1} = 0
                        Gq[b * m + a] = G[d + 2 * N];
                    }
                    pow0[b] = e0[b];  // e^{-i kappa_b * 1}
                }
                const double inv_sqrtN = 1.0 / std::sqrt(double(N));
                const double invN = 1.0 / N;
                cplx acc = 0.0;
                for (int j = 1; j <= N; ++j) {
                    for (int b = 0; b < m1; ++b) {
                        mat[b * m1] = pow0[b] * inv_sqrtN;
                        for (int a = 0; a < m; ++a)
                            mat[b * m1 + 1 + a] =
                                (Gq[b * m + a] - 2.0 * partial[b * m + a]) * invN;
                    }
                    acc += gs[j - 1] * det_inplace(mat.data(), m1);
                    // advance partial sums to l < j+1
                    for (int b = 0; b < m1; ++b) {
                        for (int a = 0; a < m; ++a) {
                            partial[b * m + a] += powq[b * m + a];
                            powq[b * m + a] *= Eq[b * m + a];
                        }
                        pow0[b] *= e0[b];
                    }
                }
                t.values[ib * t.n_small + is] = std::conj(acc);
            }
        }
    }

    classify_and_compress(t);
    return t;
}

FTable build_f_table_reference(int N, int m, std::span<const double> gs) {
    check_level(N, m);
    FTable t;
    init_table(t, N, m, gs);
    const auto grid_small = momentum_grid(N, parity_of_count(m));
    const auto grid_big = momentum_grid(N, parity_of_count(m + 1));
    const auto small_cfgs = enumerate_configs(grid_small, m);
    const auto big_cfgs = enumerate_configs(grid_big, m + 1);
    for (std::uint64_t ib = 0; ib < t.n_big; ++ib)
        for (std::uint64_t is = 0; is < t.n_small; ++is)
            t.values[ib * t.n_small + is] = f_function(big_cfgs[ib], small_cfgs[is], gs);
    classify_and_compress(t);
    return t;
}

namespace {

constexpr std::uint32_t kCacheMagic = 0x53424654;  // "SBFT"
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t coupling_hash(std::span<const double> gs) {
    // FNV-1a over the raw bytes
    std::uint64_t h = 1469598103934665603ull;
    const auto* p = reinterpret_cast<const unsigned char*>(gs.data());
    for (std::size_t i = 0; i < gs.size() * sizeof(double); ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <typename T>
void put(std::vector<unsigned char>& out, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
bool get(std::span<const unsigned char> in, std::size_t& off, T& v) {
    if (off + sizeof(T) > in.size()) return false;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return true;
}

}  // namespace

std::vector<unsigned char> serialize_f_table(const FTable& t) {
    std::vector<unsigned char> out;
    out.reserve(32 + t.gs.size() * 8 + t.values.size() * 16);
    put(out, kCacheMagic);
    put(out, kCacheVersion);
    put(out, std::uint32_t(t.N));
    put(out, std::uint32_t(t.m));
    put(out, coupling_hash(t.gs));
    const auto* gp = reinterpret_cast<const unsigned char*>(t.gs.data());
    out.insert(out.end(), gp, gp + t.gs.size() * sizeof(double));
    const auto* vp = reinterpret_cast<const unsigned char*>(t.values.data());
    out.insert(out.end(), vp, vp + t.values.size() * sizeof(cplx));
    return out;
}

std::optional<FTable> deserialize_f_table(std::span<const unsigned char> bytes) {
    std::size_t off = 0;
    std::uint32_t magic = 0, version = 0, N = 0, m = 0;
    std::uint64_t ghash = 0;
    if (!get(bytes, off, magic) || magic != kCacheMagic) return std::nullopt;
    if (!get(bytes, off, version) || version != kCacheVersion) return std::nullopt;
    if (!get(bytes, off, N) || !get(bytes, off, m)) return std::nullopt;
    if (!get(bytes, off, ghash)) return std::nullopt;
    FTable t;
    t.N = static_cast<int>(N);
    t.m = static_cast<int>(m);
    t.gs.resize(N);
    if (off + N * sizeof(double) > bytes.size()) return std::nullopt;
    std::memcpy(t.gs.data(), bytes.data() + off, N * sizeof(double));
    off += N * sizeof(double);
    if (coupling_hash(t.gs) != ghash) return std::nullopt;
    t.n_small = binomial(t.N, t.m);
    t.n_big = binomial(t.N, t.m + 1);
    const std::size_t nvals = t.n_big * t.n_small;
    if (off + nvals * sizeof(cplx) != bytes.size()) return std::nullopt;
    t.values.resize(nvals);
    std::memcpy(t.values.data(), bytes.data() + off, nvals * sizeof(cplx));
    classify_and_compress(t);
    return t;
}

std::string f_table_cache_filename(int N, int m, std::span<const double> gs) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "ftable_N%d_m%d_g%016llx_v%u.bin", N, m,
                  static_cast<unsigned long long>(coupling_hash(gs)), kCacheVersion);
    return buf;
}

FTable build_f_table_cached(int N, int m, std::span<const double> gs,
                            const std::string& cache_dir, std::size_t mem_cap_bytes) {
    if (cache_dir.empty()) return build_f_table(N, m, gs, mem_cap_bytes);
    namespace fs = std::filesystem;
    const fs::path path = fs::path(cache_dir) / f_table_cache_filename(N, m, gs);
    if (fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
        if (auto t = deserialize_f_table(bytes)) return std::move(*t);
        // corrupt cache entry: fall through and rebuild
    }
    FTable t = build_f_table(N, m, gs, mem_cap_bytes);
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    const auto bytes = serialize_f_table(t);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    return t;
}

}  // namespace spinbath
