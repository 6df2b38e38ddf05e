// simulate: reproduce the stock qubit-spin-bath experiments as CSV files.
//
// usage: simulate <preset|config-path> [--out DIR] [--verify] [--dt X]
//                 [--gt-max X] [--threads K]
//
// Config grammar: INI-style sections [experiment] [model] [initial]
// [integrate] [sweep] [output] with key = value lines; '#' starts a
// comment. CLI flags override file values. See README for the key list.

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "spinbath/oracle.hpp"

namespace fs = std::filesystem;
using namespace spinbath;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config handling

using Section = std::map<std::string, std::string>;
using Config = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file: " + path);
    Config cfg;
    std::string line, section = "experiment";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw usage_error(path + ":" + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        cfg[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

const std::string* find(const Config& cfg, const std::string& sec, const std::string& key) {
    const auto s = cfg.find(sec);
    if (s == cfg.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

double get_d(const Config& cfg, const std::string& sec, const std::string& key, double dflt) {
    const std::string* v = find(cfg, sec, key);
    if (!v) return dflt;
    try {
        std::size_t used = 0;
        const double x = std::stod(*v, &used);
        if (trim(v->substr(used)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw usage_error("bad numeric value for [" + sec + "] " + key + ": " + *v);
}

int get_i(const Config& cfg, const std::string& sec, const std::string& key, int dflt) {
    const double x = get_d(cfg, sec, key, dflt);
    const int i = static_cast<int>(x);
    if (i != x) throw usage_error("expected integer for [" + sec + "] " + key);
    return i;
}

std::string get_s(const Config& cfg, const std::string& sec, const std::string& key,
                  const std::string& dflt) {
    const std::string* v = find(cfg, sec, key);
    return v ? *v : dflt;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw usage_error("bad numeric list for " + what + ": " + text);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// deterministic CSV output

class Csv {
  public:
    Csv(const fs::path& path, const std::string& header) {
        f_ = std::fopen(path.string().c_str(), "wb");
        if (!f_) throw std::runtime_error("cannot write " + path.string());
        std::fprintf(f_, "%s\n", header.c_str());
    }
    ~Csv() {
        if (f_) std::fclose(f_);
    }
    Csv(const Csv&) = delete;
    Csv& operator=(const Csv&) = delete;

    void row(std::span<const double> vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            std::fprintf(f_, i ? ",%.17e" : "%.17e", vals[i]);
        std::fprintf(f_, "\n");
    }
    // like row but optional fields may be absent (written empty)
    void row_opt(std::span<const std::optional<double>> vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) std::fprintf(f_, ",");
            if (vals[i]) std::fprintf(f_, "%.17e", *vals[i]);
        }
        std::fprintf(f_, "\n");
    }

  private:
    std::FILE* f_ = nullptr;
};

std::string num_tag(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    std::string s = buf;
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
    }
    return s;
}

// ---------------------------------------------------------------------------
// shared run setup

struct RunContext {
    Config cfg;
    fs::path out_dir;
    bool verify = false;
    double dt_override = 0.0;
    double gt_override = 0.0;
    std::ofstream report;  // verify report, opened lazily
    bool verify_failed = false;
};

ModelParams model_from(const Config& cfg) {
    ModelParams p;
    p.N = get_i(cfg, "model", "N", 0);
    p.J = get_d(cfg, "model", "J", 0.0);
    p.h = get_d(cfg, "model", "h", 0.0);
    p.omega = get_d(cfg, "model", "omega", 0.0);
    const std::string gtext = get_s(cfg, "model", "g", "1");
    const auto gl = parse_list(gtext, "[model] g");
    if (gl.size() == 1)
        p.g.assign(p.N, gl[0]);
    else
        p.g = gl;
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(std::string("invalid [model]: ") + e.what());
    }
    return p;
}

EvolutionPlan plan_from(const RunContext& rc) {
    EvolutionPlan plan;
    plan.gt_max = get_d(rc.cfg, "integrate", "gt_max", 10.0);
    plan.dt = get_d(rc.cfg, "integrate", "dt", 0.0);
    plan.stride = get_i(rc.cfg, "integrate", "stride", 10);
    if (rc.gt_override > 0.0) plan.gt_max = rc.gt_override;
    if (rc.dt_override > 0.0) plan.dt = rc.dt_override;
    if (plan.gt_max <= 0.0) throw usage_error("[integrate] gt_max must be positive");
    if (plan.stride < 1) throw usage_error("[integrate] stride must be >= 1");
    if (const char* dir = std::getenv("SPINBATH_CACHE_DIR"); dir && *dir)
        plan.cache_dir = dir;
    return plan;
}

CoherentSpec coherent_from(const Config& cfg, int N) {
    if (find(cfg, "initial", "theta"))
        return coherent_from_angles(N, get_d(cfg, "initial", "theta", 0.0),
                                    get_d(cfg, "initial", "phi", 0.0));
    const cplx z(get_d(cfg, "initial", "z", 0.0), get_d(cfg, "initial", "z_im", 0.0));
    return coherent_coefficients(N, z);
}

// Map the physical (J, h) with J < 0 onto the h >= 0, J = -1 ground-state
// classification: the bath ground state depends only on h/|J|.
GroundStateSpec bath_ground(const ModelParams& p) {
    if (p.h < 0.0) throw usage_error("ground-state bath requires h >= 0");
    if (p.J > 0.0) throw usage_error("ground-state bath requires J <= 0");
    const double h_eff = (p.J == 0.0) ? 2.0 : p.h / -p.J;  // J = 0: polarized
    try {
        return ground_state(p.N, h_eff);
    } catch (const degenerate_ground_state& e) {
        throw usage_error(std::string("bath field sits on a level crossing: ") + e.what());
    }
}

std::ofstream& report_stream(RunContext& rc) {
    if (!rc.report.is_open()) rc.report.open(rc.out_dir / "verify.txt");
    return rc.report;
}

void note_verify(RunContext& rc, const std::string& label, double dev, double tol) {
    auto& out = report_stream(rc);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-40s max deviation %.3e (tol %.1e) %s", label.c_str(),
                  dev, tol, dev <= tol ? "ok" : "FAIL");
    out << buf << '\n';
    if (dev > tol) rc.verify_failed = true;
}

constexpr double kVerifyTol = 1e-6;

// ---------------------------------------------------------------------------
// coherent-state branch (Rabi / collapse-revival)

void run_rabi(RunContext& rc) {
    const ModelParams params = model_from(rc.cfg);
    const EvolutionPlan plan = plan_from(rc);
    const CoherentSpec coh = coherent_from(rc.cfg, params.N);

    std::vector<BlochPoint> series;
    if (params.J == 0.0 && params.uniform_g()) {
        // closed-form path, any N; sample on the grid the integrator would use
        double dt = 0.0;
        const std::uint64_t nsteps = plan.steps(params, &dt);
        for (std::uint64_t i = 0; i <= nsteps; ++i) {
            if (i != 0 && i != nsteps && i % plan.stride != 0) continue;
            series.push_back(analytic_j0_bloch(params, coh, i * dt));
        }
    } else {
        if (params.N > 12)
            throw usage_error("finite-J coherent runs are limited to N <= 12");
        evolve_coherent(params, plan, [&](double t, std::span<const PairBlocks> sec) {
            series.push_back(bloch_point(t, sec, coh, params.omega));
        });
    }

    Csv csv(rc.out_dir / "bloch.csv", "gt,sx,sy,sz,purity");
    for (const BlochPoint& p : series)
        csv.row(std::array{p.t, p.sx, p.sy, p.sz, p.purity});

    if (rc.verify) {
        if (params.N > 8) {
            report_stream(rc) << "rabi: N > 8, oracle check skipped\n";
        } else {
            DenseOracle oracle(params);
            const Eigen::VectorXcd psi0 = dense_coherent_initial(params.N, coh);
            double dev = 0.0;
            const std::size_t step = std::max<std::size_t>(1, series.size() / 40);
            for (std::size_t i = 0; i < series.size(); i += step) {
                const auto psi = oracle.evolve(psi0, series[i].t);
                const auto rho = oracle.qubit_rho(psi);
                dev = std::max({dev,
                                std::abs(2.0 * rho(0, 1).real() - series[i].sx),
                                std::abs(-2.0 * rho(0, 1).imag() - series[i].sy),
                                std::abs((rho(0, 0) - rho(1, 1)).real() - series[i].sz)});
            }
            note_verify(rc, "rabi vs dense propagator", dev, kVerifyTol);
        }
    }
}

// ---------------------------------------------------------------------------
// ground-state branch (decoherence / concurrence / sweeps)

struct GroundRun {
    std::vector<WPoint> w;
    GroundStateSpec gs;
};

GroundRun run_ground(const ModelParams& params, const EvolutionPlan& plan) {
    GroundRun run;
    run.gs = bath_ground(params);
    evolve_ground(params, run.gs, plan, [&](double t, const GroundChannels& ch) {
        run.w.push_back(w_point(t, ch, params.omega));
    });
    return run;
}

void verify_ground(RunContext& rc, const ModelParams& params, const GroundRun& run,
                   const std::string& label) {
    if (params.N > 8) {
        report_stream(rc) << label << ": N > 8, oracle check skipped\n";
        return;
    }
    // one qubit-bath copy started in (|up> + |down>)/sqrt(2) x |ground>
    const cplx a_up = 1.0 / std::sqrt(2.0), a_down = a_up;
    DenseOracle oracle(params);
    const Eigen::VectorXcd psi0 = dense_ground_initial(params.N, run.gs, a_up, a_down);
    double dev = 0.0;
    const std::size_t step = std::max<std::size_t>(1, run.w.size() / 40);
    for (std::size_t i = 0; i < run.w.size(); i += step) {
        const WPoint& w = run.w[i];
        const auto psi = oracle.evolve(psi0, w.t);
        const auto rho = oracle.qubit_rho(psi);
        const double r00 = std::norm(a_up) * w.w_uu_uu + std::norm(a_down) * w.w_uu_dd;
        const cplx r01 = a_up * std::conj(a_down) * w.r;
        dev = std::max({dev, std::abs(rho(0, 0).real() - r00),
                        std::abs(rho(0, 1) - r01)});
    }
    note_verify(rc, label + " vs dense propagator", dev, kVerifyTol);
}

void write_r_csv(const fs::path& path, const std::vector<WPoint>& w) {
    Csv csv(path, "gt,re_r,im_r,abs_r2");
    for (const WPoint& p : w)
        csv.row(std::array{p.t, p.r.real(), p.r.imag(), std::norm(p.r)});
}

void write_conc_csv(const fs::path& path, const std::vector<WPoint>& w, double alpha,
                    cplx beta) {
    Csv csv(path, "gt,concurrence,abs_r2");
    for (const WPoint& p : w)
        csv.row(std::array{p.t, concurrence_closed(p, alpha, beta), std::norm(p.r)});
}

std::pair<double, cplx> bell_from(const Config& cfg) {
    const double a = get_d(cfg, "initial", "alpha", 1.0 / std::sqrt(2.0));
    const cplx b(get_d(cfg, "initial", "beta", 1.0 / std::sqrt(2.0)),
                 get_d(cfg, "initial", "beta_im", 0.0));
    if (std::abs(a * a + std::norm(b) - 1.0) > 1e-10)
        throw usage_error("[initial] alpha, beta must satisfy alpha^2 + |beta|^2 = 1");
    return {a, b};
}

void run_ground_family(RunContext& rc, const std::string& experiment) {
    const bool want_conc = experiment == "concurrence" || experiment == "esd_sweep";
    const ModelParams base = model_from(rc.cfg);
    const EvolutionPlan base_plan = plan_from(rc);
    const auto [bell_a, bell_b] =
        want_conc ? bell_from(rc.cfg) : std::pair<double, cplx>{0.0, 0.0};

    // sweep lists; absent sweep = the single configured (J, h) point
    std::vector<double> joh_values, hg_values, gt_values;
    if (const std::string* v = find(rc.cfg, "sweep", "values"))
        joh_values = parse_list(*v, "[sweep] values");
    if (const std::string* v = find(rc.cfg, "sweep", "h_over_g"))
        hg_values = parse_list(*v, "[sweep] h_over_g");
    if (const std::string* v = find(rc.cfg, "sweep", "gt_max"))
        gt_values = parse_list(*v, "[sweep] gt_max");
    if (hg_values.empty()) hg_values = {base.h};
    if (!gt_values.empty() && gt_values.size() != hg_values.size())
        throw usage_error("[sweep] gt_max list must match h_over_g list");
    const bool swept = !joh_values.empty();
    const double fit_window = get_d(rc.cfg, "sweep", "fit_window", 0.02);

    Csv summary(rc.out_dir / "summary.csv",
                "h_over_g,J_over_h,alpha,alpha_perturbative,r2_max,t_first_min,t_esd");

    for (std::size_t ih = 0; ih < hg_values.size(); ++ih) {
        const double hg = hg_values[ih];
        const std::vector<double> points =
            swept ? joh_values : std::vector<double>{hg != 0.0 ? base.J / hg : base.J};
        for (double joh : points) {
            ModelParams params = base;
            params.h = hg;
            params.J = swept ? joh * hg : base.J;
            EvolutionPlan plan = base_plan;
            if (!gt_values.empty() && rc.gt_override <= 0.0) plan.gt_max = gt_values[ih];

            const GroundRun run = run_ground(params, plan);
            const std::string tag =
                "_hg" + num_tag(hg) + "_joh" + num_tag(params.h != 0.0 ? params.J / params.h
                                                                       : params.J);
            write_r_csv(rc.out_dir / (swept ? "r" + tag + ".csv" : "decoherence.csv"),
                        run.w);

            std::vector<double> ts, r2, q;
            ts.reserve(run.w.size());
            for (const WPoint& p : run.w) {
                ts.push_back(p.t);
                r2.push_back(std::norm(p.r));
                if (want_conc) q.push_back(concurrence_pre_clamp(p, bell_a, bell_b));
            }
            if (want_conc)
                write_conc_csv(
                    rc.out_dir / (swept ? "concurrence" + tag + ".csv" : "concurrence.csv"),
                    run.w, bell_a, bell_b);

            const MetricReport rep = analyze_series(ts, r2, q, fit_window);
            const double alpha_p = perturbative_alpha(params.N, run.gs);
            summary.row_opt(std::array<std::optional<double>, 7>{
                hg, params.h != 0.0 ? params.J / params.h : params.J, rep.alpha, alpha_p,
                rep.r2_max, rep.t_first_min, rep.t_esd});

            if (rc.verify) verify_ground(rc, params, run, experiment + tag);
        }
    }
}

// ---------------------------------------------------------------------------
// presets

Config make_rabi_preset(int N, double J, double h, double omega, const std::string& z,
                        double gt_max) {
    Config c;
    c["experiment"]["type"] = "rabi";
    c["model"]["N"] = std::to_string(N);
    c["model"]["J"] = std::to_string(J);
    c["model"]["h"] = std::to_string(h);
    c["model"]["omega"] = std::to_string(omega);
    c["initial"]["z"] = z;
    c["integrate"]["gt_max"] = std::to_string(gt_max);
    return c;
}

Config make_ground_preset(const std::string& experiment, double hg,
                          const std::string& joh_values, double gt_max, int stride) {
    Config c;
    c["experiment"]["type"] = experiment;
    c["model"]["N"] = "10";
    c["model"]["h"] = std::to_string(hg);
    c["model"]["J"] = std::to_string(-hg);  // overridden per sweep point
    c["model"]["omega"] = "0";
    c["sweep"]["values"] = joh_values;
    c["integrate"]["gt_max"] = std::to_string(gt_max);
    c["integrate"]["stride"] = std::to_string(stride);
    return c;
}

// Two J/h values per filling interval of the N = 10 chain (the intervals
// follow from the level-crossing fields), plus two polarized-phase values.
const std::string kFillingPairs =
    "-0.5,-0.8,-1.02,-1.087,-1.136,-1.333,-1.43,-2.0,-2.5,-5.0,-6.5,-8.0";

std::map<std::string, Config> stock_presets() {
    std::map<std::string, Config> p;
    p["fig1a"] = make_rabi_preset(40, 0, 0, 0, "0.6", 10);
    p["fig1b"] = make_rabi_preset(40, 0, -1, 1, "0.6", 10);
    p["fig1c"] = make_rabi_preset(40, 0, -10, 10, "0.6", 10);
    p["fig1d"] = make_rabi_preset(40, 0, 0, 0, "1.6", 10);
    p["fig2"] = make_rabi_preset(10, 0, 15, 0, "1", 80);
    p["fig3a"] = make_rabi_preset(10, 0.5, 10, 0, "1", 40);
    p["fig3b"] = make_rabi_preset(10, 0.5, 10, 0, "1", 40);
    p["fig3c"] = make_rabi_preset(10, 1.0, 10, 0, "1", 40);

    p["fig4"] = make_ground_preset("decoherence", 10, "-0.5,-1.05,-1.5,-6.0", 3, 10);
    p["fig5a"] = make_ground_preset("decoherence", 10, kFillingPairs, 0.05, 1);
    p["fig5b"] = make_ground_preset(
        "alpha_sweep", 10,
        "-0.5,-0.7,-0.9,-1.02,-1.05,-1.1,-1.15,-1.2,-1.3,-1.4,-1.6,-1.8,-2.0,-2.4,"
        "-3.0,-4.0,-5.0,-6.0,-7.0,-8.0",
        0.05, 1);
    p["fig6"] = make_ground_preset(
        "rmax_sweep", 10, "-0.5,-0.8,-0.95,-1.05,-1.2,-1.5,-2.0,-3.0,-4.0,-6.0", 3, 10);
    p["fig6"]["sweep"]["h_over_g"] = "10,1,0.1";
    p["fig6"]["sweep"]["gt_max"] = "3,15,15";
    p["fig7"] = p["fig6"];
    p["fig7"]["experiment"]["type"] = "firstmin_sweep";
    p["fig8"] = make_ground_preset("concurrence", 10, "-0.5,-1.05,-1.5,-6.0", 3, 10);
    p["fig9"] = make_ground_preset(
        "esd_sweep", 10, "-1.05,-1.1,-1.2,-1.3,-1.5,-1.7,-2.0,-2.5,-3.0,-4.0,-5.0,-6.0",
        3, 10);
    p["fig9"]["sweep"]["h_over_g"] = "10,1,0.1";
    p["fig9"]["sweep"]["gt_max"] = "3,15,15";
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qubit + periodic XX spin-bath simulator"};
    std::string target, out_dir = "out";
    bool verify = false;
    double dt = 0.0, gt_max = 0.0;
    int threads = 0;
    app.add_option("target", target, "preset name or config file path")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--verify", verify, "cross-check against the dense propagator (N <= 8)");
    app.add_option("--dt", dt, "override integration step");
    app.add_option("--gt-max", gt_max, "override evolution length");
    app.add_option("--threads", threads, "OpenMP thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        RunContext rc;
        const auto presets = stock_presets();
        if (const auto it = presets.find(target); it != presets.end())
            rc.cfg = it->second;
        else
            rc.cfg = parse_config_file(target);
        rc.out_dir = out_dir;
        rc.verify = verify;
        rc.dt_override = dt;
        rc.gt_override = gt_max;
        if (const std::string* v = find(rc.cfg, "output", "dir"); v && out_dir == "out")
            rc.out_dir = *v;
        fs::create_directories(rc.out_dir);

        const std::string experiment = get_s(rc.cfg, "experiment", "type", "");
        if (experiment == "rabi") {
            run_rabi(rc);
        } else if (experiment == "decoherence" || experiment == "concurrence" ||
                   experiment == "alpha_sweep" || experiment == "rmax_sweep" ||
                   experiment == "firstmin_sweep" || experiment == "esd_sweep") {
            run_ground_family(rc, experiment);
        } else {
            throw usage_error("unknown [experiment] type: '" + experiment + "'");
        }

        if (rc.verify_failed) {
            std::fprintf(stderr, "verification failed; see %s\n",
                         (rc.out_dir / "verify.txt").string().c_str());
            return 2;
        }
        return 0;
    } catch (const usage_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const integration_failure& e) {
        std::fprintf(stderr, "integration failure: %s (drift %.3e)\n", e.what(), e.drift);
        return 2;
    } catch (const resource_error& e) {
        std::fprintf(stderr, "resource limit: %s (%zu bytes)\n", e.what(),
                     e.estimated_bytes);
        return 3;
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "resource limit: out of memory\n");
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
