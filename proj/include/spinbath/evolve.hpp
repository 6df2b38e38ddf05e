#pragma once

#include <functional>
#include <memory>
#include <span>

#include "spinbath/ftable.hpp"

namespace spinbath {

// Integration settings. Times are interaction-picture times; with g = 1
// the time variable is the dimensionless gt used throughout.
struct EvolutionPlan {
    double gt_max = 10.0;
    double dt = 0.0;       // <= 0 selects the default step with the stiffness guard
    int stride = 10;       // output every stride-th step
    double norm_tol = 1e-6;
    std::string cache_dir;  // f-table disk cache; empty disables
    std::size_t mem_cap_bytes = kDefaultTableMemCap;

    double resolved_dt(const ModelParams& p) const;
    // number of RK4 steps; dt is nudged so nsteps * dt == gt_max exactly
    std::uint64_t steps(const ModelParams& p, double* dt_out) const;
};

// Amplitude pair of one conserved-magnetization sector: `small` over
// m-configs, `big` over (m+1)-configs of the opposite parity grid.
struct PairBlocks {
    std::vector<cplx> small;
    std::vector<cplx> big;
    double norm2() const;
};

// The two-block interaction-picture system
//   i big'(p)   = e^{-i w t} e^{+iE_p t} sum_k e^{-iE_k t} conj(T[p][k]) small(k)
//   i small'(p) = e^{+i w t} e^{+iE_p t} sum_k e^{-iE_k t} T[k][p] big(k)
// shared by the coherent-state sectors (B/D, B'/D') and both channels of
// the ground-state branch (B/D and C/A, primed or not). The coupling
// enters only through the table; h and omega only through their sum.
class PairSystem {
  public:
    // level m table; table may be null when the big block is empty
    PairSystem(const ModelParams& params, int m, std::shared_ptr<const FTable> table);

    std::size_t n_small() const { return e_small_.size(); }
    std::size_t n_big() const { return e_big_.size(); }
    int level() const { return m_; }

    void derivative(double t, const PairBlocks& s, PairBlocks& ds) const;
    // dense, single-threaded reference path
    void derivative_serial(double t, const PairBlocks& s, PairBlocks& ds) const;

    void rk4_step(double t, double dt, PairBlocks& state, bool serial = false) const;

  private:
    void apply_phases(double t, const PairBlocks& s) const;

    int m_;
    double omega_;
    std::shared_ptr<const FTable> table_;
    std::vector<double> e_small_, e_big_;  // summed single-particle energies per rank
    // stage scratch
    mutable std::vector<cplx> ph_small_, ph_big_;
    mutable PairBlocks k1_, k2_, k3_, k4_, tmp_;
};

std::shared_ptr<const FTable> sector_table(const ModelParams& params, int m,
                                           const EvolutionPlan& plan);

// --- coherent-state branch -------------------------------------------------

struct SectorSample {
    double t;
    PairBlocks state;
};

// Evolve a single sector n from the given initial amplitudes.
std::vector<SectorSample> evolve_sector(int n, const ModelParams& params,
                                        const PairBlocks& initial, const EvolutionPlan& plan);

using CoherentObserver =
    std::function<void(double t, std::span<const PairBlocks> sectors)>;

// Evolve all sectors n = 0..N in lockstep from the Dicke initial
// amplitudes; the global state is sum_n C_n |psi^(n)(t)>. Returns the
// maximum norm drift seen across sectors.
double evolve_coherent(const ModelParams& params, const EvolutionPlan& plan,
                       const CoherentObserver& observe);

// --- ground-state branch ---------------------------------------------------

struct GroundChannels {
    // qubit-up channel: B over (m+1)-configs, D over (m+2)-configs
    PairBlocks up;    // small = B, big = D
    // qubit-down channel: C over m-configs, A over (m+1)-configs
    PairBlocks down;  // small = C, big = A
};

using GroundObserver = std::function<void(double t, const GroundChannels&)>;

// Both channels evolve independently from A = B = 1 on the ground-state
// config. The qubit amplitudes (a_1bar, a_1) do not enter the evolution;
// they only weight the observables downstream.
double evolve_ground(const ModelParams& params, const GroundStateSpec& gs,
                     const EvolutionPlan& plan, const GroundObserver& observe);

}  // namespace spinbath
