#include <doctest.h>

#include <filesystem>
#include <random>

#include "spinbath/ftable.hpp"

using namespace spinbath;

TEST_CASE("fast builder matches direct-sum reference") {
    // small uniform table, full comparison
    {
        const std::vector<double> ones(4, 1.0);
        const FTable fast = build_f_table(4, 0, ones);
        const FTable ref = build_f_table_reference(4, 0, ones);
        REQUIRE(fast.values.size() == ref.values.size());
        for (std::size_t i = 0; i < fast.values.size(); ++i)
            CHECK(std::abs(fast.values[i] - ref.values[i]) < 1e-12);
    }
    // N=6, m=2, uniform and nonuniform profiles
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.2, 1.5);
    std::vector<double> gs(6);
    for (double& g : gs) g = u(rng);
    for (const auto& profile : {std::vector<double>(6, 1.0), gs}) {
        const FTable fast = build_f_table(6, 2, profile);
        const FTable ref = build_f_table_reference(6, 2, profile);
        std::uniform_int_distribution<std::uint64_t> pick(0, fast.values.size() - 1);
        for (int trial = 0; trial < 20; ++trial) {
            const std::uint64_t i = pick(rng);
            CHECK(std::abs(fast.values[i] - ref.values[i]) < 1e-12);
        }
    }
}

TEST_CASE("momentum selection rule is measured, not assumed") {
    const std::vector<double> ones(6, 1.0);
    const FTable t = build_f_table(6, 2, ones);
    const auto offset = t.measured_momentum_offset();
    REQUIRE(offset.has_value());
    CHECK(*offset == 0);
    // sparsity consistent with one momentum class out of N
    CHECK(t.nnz < t.n_big * t.n_small);
    CHECK(t.nnz >= t.n_big * t.n_small / 6 / 2);

    // a site-dependent profile breaks the rule; table goes dense
    std::vector<double> ramp(6);
    for (int j = 0; j < 6; ++j) ramp[j] = 1.0 + 0.3 * j;
    const FTable dense = build_f_table(6, 2, ramp);
    CHECK_FALSE(dense.measured_momentum_offset().has_value());
}

TEST_CASE("lookup tracks permutation signs") {
    const std::vector<double> ones(6, 1.0);
    const FTable t = build_f_table(6, 1, ones);
    // canonical entry
    const cplx v = t.lookup({1, 3}, {2});
    CHECK(std::abs(t.lookup({3, 1}, {2}) + v) < 1e-15);
    CHECK(std::abs(t.lookup({1, 1}, {2})) == 0.0);
}

TEST_CASE("serialization determinism and round trip") {
    const std::vector<double> ones(6, 1.0);
    const FTable a = build_f_table(6, 2, ones);
    const FTable b = build_f_table(6, 2, ones);
    const auto bytes_a = serialize_f_table(a);
    const auto bytes_b = serialize_f_table(b);
    CHECK(bytes_a == bytes_b);  // bit-identical rebuild

    const auto back = deserialize_f_table(bytes_a);
    REQUIRE(back.has_value());
    CHECK(back->N == 6);
    CHECK(back->m == 2);
    CHECK(back->values == a.values);
    CHECK(back->nnz == a.nnz);

    auto corrupt = bytes_a;
    corrupt[0] ^= 0xff;
    CHECK_FALSE(deserialize_f_table(corrupt).has_value());
}

TEST_CASE("disk cache returns bit-identical tables") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "spinbath_ftable_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<double> ones(6, 1.0);

    const FTable fresh = build_f_table(6, 3, ones);
    const FTable stored = build_f_table_cached(6, 3, ones, dir.string());
    const FTable loaded = build_f_table_cached(6, 3, ones, dir.string());
    CHECK(fs::exists(dir / f_table_cache_filename(6, 3, ones)));
    CHECK(serialize_f_table(fresh) == serialize_f_table(stored));
    CHECK(serialize_f_table(fresh) == serialize_f_table(loaded));

    // different coupling profile gets a different cache key
    std::vector<double> other(6, 0.5);
    CHECK(f_table_cache_filename(6, 3, ones) != f_table_cache_filename(6, 3, other));
    fs::remove_all(dir);
}

TEST_CASE("memory cap raises resource_error") {
    const std::vector<double> ones(12, 1.0);
    CHECK_THROWS_AS(build_f_table(12, 5, ones, 1024), resource_error);
}
