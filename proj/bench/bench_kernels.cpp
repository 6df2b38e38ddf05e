// Timing comparison of the OpenMP table builder and sparse derivative
// against their serial reference paths.

#include <chrono>
#include <cstdio>

#include "spinbath/evolve.hpp"

using namespace spinbath;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void bench_table(int N, int m) {
    const std::vector<double> ones(N, 1.0);
    const auto t0 = clk::now();
    const FTable fast = build_f_table(N, m, ones);
    const auto t1 = clk::now();
    const FTable ref = build_f_table_reference(N, m, ones);
    const auto t2 = clk::now();
    double maxdiff = 0.0;
    for (std::size_t i = 0; i < fast.values.size(); ++i)
        maxdiff = std::max(maxdiff, std::abs(fast.values[i] - ref.values[i]));
    std::printf("table  N=%-3d m=%-2d  parallel %.4fs  serial-reference %.4fs  "
                "speedup %5.1fx  maxdiff %.2e\n",
                N, m, seconds(t0, t1), seconds(t1, t2),
                seconds(t1, t2) / seconds(t0, t1), maxdiff);
}

void bench_derivative(int N, int m, int reps) {
    ModelParams params = ModelParams::uniform(N, -1.0, 0.5, 0.0, 1.0);
    EvolutionPlan plan;
    PairSystem sys(params, m, sector_table(params, m, plan));
    PairBlocks y, dy;
    y.small.assign(sys.n_small(), cplx{1.0 / std::sqrt(double(sys.n_small())), 0.0});
    y.big.assign(sys.n_big(), cplx{});

    const auto t0 = clk::now();
    for (int i = 0; i < reps; ++i) sys.derivative(0.1 * i, y, dy);
    const auto t1 = clk::now();
    PairBlocks dy_ref;
    for (int i = 0; i < reps; ++i) sys.derivative_serial(0.1 * i, y, dy_ref);
    const auto t2 = clk::now();
    double maxdiff = 0.0;
    for (std::size_t i = 0; i < dy.big.size(); ++i)
        maxdiff = std::max(maxdiff, std::abs(dy.big[i] - dy_ref.big[i]));
    std::printf("deriv  N=%-3d m=%-2d  sparse %.4fs  dense-serial %.4fs  "
                "speedup %5.1fx  maxdiff %.2e  (%d reps)\n",
                N, m, seconds(t0, t1), seconds(t1, t2),
                seconds(t1, t2) / seconds(t0, t1), maxdiff, reps);
}

}  // namespace

int main() {
    bench_table(6, 2);
    bench_table(8, 3);
    bench_table(10, 3);
    bench_derivative(10, 5, 200);
    bench_derivative(12, 6, 50);
    return 0;
}
