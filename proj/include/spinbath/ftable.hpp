#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "spinbath/slater.hpp"

namespace spinbath {

// Precomputed coupling table for one sector boundary: maps every m-config
// (on the parity-m grid) to every (m+1)-config (opposite grid) with the
// value f~(config_{m+1}; config_m; {g_j}). Immutable after construction.
//
// Entries are stored dense (row-major over the (m+1)-config axis) plus
// compressed row/column views that skip the structural zeros detected at
// build time. The zero pattern is measured, never assumed.
struct FTable {
    int N = 0;
    int m = 0;  // lower sector size
    std::uint64_t n_small = 0;  // #m-configs
    std::uint64_t n_big = 0;    // #(m+1)-configs
    std::vector<double> gs;     // coupling profile the table was built for

    std::vector<cplx> values;   // [ib * n_small + is]

    double zero_threshold = 0.0;
    std::uint64_t nnz = 0;

    // by (m+1)-config row: entries coupling row ib to small configs
    std::vector<std::uint64_t> row_ptr;
    std::vector<std::uint32_t> row_col;
    std::vector<cplx> row_val;
    // by m-config column
    std::vector<std::uint64_t> col_ptr;
    std::vector<std::uint32_t> col_row;
    std::vector<cplx> col_val;

    cplx at(std::uint64_t ib, std::uint64_t is) const { return values[ib * n_small + is]; }

    // Sign-tracked lookup for arbitrarily ordered tuples of grid positions.
    cplx lookup(std::vector<int> big_pos, std::vector<int> small_pos) const;

    // If every entry above threshold shares one value of
    // (momentum_big - momentum_small) mod 2N, returns it.
    std::optional<int> measured_momentum_offset() const;
};

inline constexpr std::size_t kDefaultTableMemCap = std::size_t{2} << 30;  // 2 GiB

// Fast builder: per entry, the ordered-subset sum is contracted into a sum
// over the inserted site of one (m+1)x(m+1) determinant of single-particle
// overlaps, with the string signs folded into the orbitals. O(N m^3) per
// entry instead of O((m+1)! C(N,m+1)). OpenMP over the (m+1)-config axis;
// deterministic regardless of schedule.
FTable build_f_table(int N, int m, std::span<const double> gs,
                     std::size_t mem_cap_bytes = kDefaultTableMemCap);

// Serial reference builder using the direct f_function sum. For tests.
FTable build_f_table_reference(int N, int m, std::span<const double> gs);

// Raw bytes of the table payload (header + dense values); used for the
// determinism checks and as the on-disk cache format.
std::vector<unsigned char> serialize_f_table(const FTable& t);
std::optional<FTable> deserialize_f_table(std::span<const unsigned char> bytes);

// Disk cache keyed by (N, m, coupling hash, format version). Returns the
// cached table if present, else builds, stores and returns it. An empty
// dir disables caching. Loaded tables are bit-identical to a fresh build.
FTable build_f_table_cached(int N, int m, std::span<const double> gs,
                            const std::string& cache_dir,
                            std::size_t mem_cap_bytes = kDefaultTableMemCap);

std::string f_table_cache_filename(int N, int m, std::span<const double> gs);

}  // namespace spinbath
