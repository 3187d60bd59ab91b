// heraldlab: batch CLI for heralded non-Gaussian state synthesis, heralding
// statistics, and non-Gaussianity metrics.
//
// Exit codes: 0 success, 2 validation, 3 infeasible domain, 4 accuracy.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "heraldlab/heraldlab.hpp"

namespace {

using heraldlab::cplx;

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_complex(cplx v) {
    double im = v.imag();
    if (im == 0.0) im = 0.0;  // normalize -0
    std::string s = fmt17(v.real());
    s += std::signbit(im) ? '-' : '+';
    s += fmt17(std::abs(im));
    s += 'i';
    return s;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

// Complex literals of the form RE, REi is not allowed alone: accepted forms
// are "1.5", "1.5+2i", "1.5-2i", "2i", "-2i", "+0.3i".
bool parse_complex(const std::string& s, cplx& out) {
    if (s.empty()) return false;
    double re = 0.0, im = 0.0;
    if (s.back() == 'i' || s.back() == 'I') {
        const std::string body = s.substr(0, s.size() - 1);
        size_t split = std::string::npos;
        for (size_t k = body.size(); k-- > 1;) {
            if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                split = k;
                break;
            }
        }
        if (split == std::string::npos) {
            std::string imag = body;
            if (imag.empty() || imag == "+" || imag == "-") imag += "1";
            if (!parse_double(imag, im)) return false;
        } else {
            std::string imag = body.substr(split);
            if (imag == "+" || imag == "-") imag += "1";
            if (!parse_double(body.substr(0, split), re) || !parse_double(imag, im)) return false;
        }
    } else {
        if (!parse_double(s, re)) return false;
    }
    out = cplx(re, im);
    return true;
}

cplx require_complex(const std::string& s, const char* flag) {
    cplx v;
    if (!parse_complex(s, v))
        throw heraldlab::ValidationError(std::string(flag) + ": cannot parse '" + s +
                                         "' as a complex number (use RE, REi or RE+IMi)");
    return v;
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw heraldlab::ValidationError("cannot open output file '" + path + "'");
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw heraldlab::ValidationError("failed writing output file '" + path + "'");
}

int thread_budget(int njobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("HERALDLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    if (n < 1) n = 1;
    return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(std::max(njobs, 1))));
}

template <typename Fn>
void parallel_for(int njobs, Fn&& fn) {
    const int nt = thread_budget(njobs);
    if (nt <= 1) {
        for (int i = 0; i < njobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t)
        workers.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < njobs;) fn(i);
        });
    for (auto& w : workers) w.join();
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string a, b, c;
    int n = 0;
    double wn_tol = 1e-4;
};

int cmd_analyze(const AnalyzeArgs& args) {
    using namespace heraldlab;
    const TmegParams s =
        validate_tmeg(require_complex(args.a, "--a"), require_complex(args.b, "--b"),
                      require_complex(args.c, "--c"));
    if (args.n < 0) throw ValidationError("--n must be nonnegative");
    const OutputParams zr = map_to_output(s);
    const GaussianOp ops = gaussian_ops_from(zr);
    const double zabs = std::abs(zr.z);
    const FockSuperposition core = superposition_coeffs(args.n, zabs);
    const double pn = probability_abc(s, args.n).p;
    const MomentPair m = moments(args.n, zabs);
    const double ng = ng_measure(args.n, zabs);
    const double wn = wigner_negativity(core_fock_vector(args.n, zabs), args.wn_tol);

    std::string out = "{\n";
    out += "  \"a\": \"" + fmt_complex(s.a) + "\",\n";
    out += "  \"b\": \"" + fmt_complex(s.b) + "\",\n";
    out += "  \"c\": \"" + fmt_complex(s.c) + "\",\n";
    out += "  \"n\": " + std::to_string(args.n) + ",\n";
    out += "  \"z\": \"" + fmt_complex(zr.z) + "\",\n";
    out += "  \"R\": \"" + fmt_complex(zr.R) + "\",\n";
    out += "  \"r_R\": " + fmt17(ops.r) + ",\n";
    out += "  \"phi_R\": " + fmt17(ops.phi) + ",\n";
    out += "  \"rotation\": " + fmt17(ops.rot) + ",\n";
    out += "  \"m\": [";
    for (size_t i = 0; i < core.coeffs.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(core.index_of(i));
    }
    out += "],\n  \"A\": [";
    for (size_t i = 0; i < core.coeffs.size(); ++i) {
        if (i) out += ", ";
        out += fmt17(core.coeffs[i]);
    }
    out += "],\n";
    out += "  \"P_n\": " + fmt17(pn) + ",\n";
    out += "  \"d_x\": " + fmt17(m.d_x) + ",\n";
    out += "  \"d_p\": " + fmt17(m.d_p) + ",\n";
    out += "  \"ng_measure\": " + fmt17(ng) + ",\n";
    out += "  \"wigner_negativity\": " + fmt17(wn) + "\n";
    out += "}\n";
    std::fwrite(out.data(), 1, out.size(), stdout);
    return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    std::string variable;
    double start = 0.0, stop = 0.0;
    int count = 0;
    std::vector<int> ns;
    double z_fixed = 0.0;
    std::vector<std::string> metrics;
    double wn_tol = 1e-4;
    std::string out;
};

bool known_metric(const std::string& m) {
    return m == "wigner_negativity" || m == "ng_measure" || m == "fidelity_gaussian" ||
           m == "d_x" || m == "d_p";
}

int cmd_sweep(const SweepArgs& args) {
    using namespace heraldlab;
    if (args.variable != "z_abs" && args.variable != "n")
        throw ValidationError("--variable must be z_abs or n");
    if (args.count < 2) throw ValidationError("--count must be at least 2");
    if (!(args.start < args.stop)) throw ValidationError("--start must be below --stop");
    if (args.metrics.empty()) throw ValidationError("--metrics must not be empty");
    for (const std::string& m : args.metrics)
        if (!known_metric(m))
            throw ValidationError("unknown metric '" + m +
                                  "' (choose from wigner_negativity, ng_measure, "
                                  "fidelity_gaussian, d_x, d_p)");

    struct Point {
        double variable;
        int n;
        double z;
    };
    std::vector<Point> points;
    if (args.variable == "z_abs") {
        if (args.ns.empty()) throw ValidationError("z_abs sweeps need --n values");
        if (!(args.start >= 0.0)) throw ValidationError("z_abs sweeps need --start >= 0");
        for (int i = 0; i < args.count; ++i) {
            const double v = args.start + (args.stop - args.start) * i / (args.count - 1.0);
            for (int n : args.ns) {
                if (n < 0) throw ValidationError("--n values must be nonnegative");
                points.push_back({v, n, v});
            }
        }
    } else {
        if (!args.ns.empty()) throw ValidationError("n sweeps take no --n list");
        if (!(args.z_fixed >= 0.0)) throw ValidationError("--z-abs must be nonnegative");
        const auto is_int = [](double v) { return v == std::floor(v); };
        if (!is_int(args.start) || !is_int(args.stop))
            throw ValidationError("n sweeps need integer --start/--stop");
        if (args.count != static_cast<int>(args.stop - args.start) + 1)
            throw ValidationError("n sweeps need --count equal to the integer span");
        for (int i = 0; i < args.count; ++i) {
            const int n = static_cast<int>(args.start) + i;
            if (n < 0) throw ValidationError("n sweeps need nonnegative n");
            points.push_back({static_cast<double>(n), n, args.z_fixed});
        }
    }

    const size_t nm = args.metrics.size();
    std::vector<double> values(points.size() * nm,
                               std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> warnings(points.size());
    parallel_for(static_cast<int>(points.size()), [&](int idx) {
        const Point& pt = points[static_cast<size_t>(idx)];
        for (size_t mi = 0; mi < nm; ++mi) {
            const std::string& metric = args.metrics[mi];
            double val = std::numeric_limits<double>::quiet_NaN();
            try {
                if (metric == "wigner_negativity") {
                    val = wigner_negativity(core_fock_vector(pt.n, pt.z), args.wn_tol);
                } else if (metric == "ng_measure") {
                    val = ng_measure(pt.n, pt.z);
                } else if (metric == "fidelity_gaussian") {
                    val = fidelity_gaussian(pt.n, pt.z);
                } else if (metric == "d_x") {
                    val = moments(pt.n, pt.z).d_x;
                } else {
                    val = moments(pt.n, pt.z).d_p;
                }
            } catch (const std::exception& e) {
                warnings[static_cast<size_t>(idx)] += "warning: " + metric + " failed at " +
                                                      args.variable + "=" + fmt17(pt.variable) +
                                                      ", n=" + std::to_string(pt.n) + ": " +
                                                      e.what() + "\n";
            }
            values[static_cast<size_t>(idx) * nm + mi] = val;
        }
    });

    std::string csv = "variable,n,metric,value\n";
    for (size_t idx = 0; idx < points.size(); ++idx) {
        for (size_t mi = 0; mi < nm; ++mi) {
            csv += fmt17(points[idx].variable);
            csv += ',';
            csv += std::to_string(points[idx].n);
            csv += ',';
            csv += args.metrics[mi];
            csv += ',';
            csv += fmt17(values[idx * nm + mi]);
            csv += '\n';
        }
    }
    for (const std::string& w : warnings)
        if (!w.empty()) std::fwrite(w.data(), 1, w.size(), stderr);
    write_output(args.out, csv);
    return 0;
}

// --------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::string z = "0";
    int n = 1;
    int starts = 24;
};

int cmd_optimize(const OptimizeArgs& args) {
    using namespace heraldlab;
    const cplx z = require_complex(args.z, "--z");
    OptimizeConfig cfg;
    cfg.starts = args.starts;
    const OptimizeResult res = optimize_probability(z, args.n, cfg);
    std::string out = "{\n";
    out += "  \"z\": \"" + fmt_complex(z) + "\",\n";
    out += "  \"n\": " + std::to_string(args.n) + ",\n";
    out += "  \"a_best\": \"" + fmt_complex(res.a_best) + "\",\n";
    out += "  \"p_best\": " + fmt17(res.p_best) + ",\n";
    out += "  \"evaluations\": " + std::to_string(res.evaluations);
    if (std::abs(z) == 0.0) {
        const RingSpec ring = ring_locus(args.n);
        const double dist =
            std::abs(std::abs(res.a_best - cplx(ring.center_re, 0.0)) - ring.radius);
        out += ",\n  \"ring_center\": " + fmt17(ring.center_re);
        out += ",\n  \"ring_radius\": " + fmt17(ring.radius);
        out += ",\n  \"ring_distance\": " + fmt17(dist);
    }
    out += "\n}\n";
    std::fwrite(out.data(), 1, out.size(), stdout);
    return 0;
}

// ----------------------------------------------------------------- wigner

struct WignerArgs {
    int n = 0;
    std::string z = "0";
    std::string R = "1";
    int dim = 0;
    double x_min = -8.0, x_max = 8.0, p_min = -8.0, p_max = 8.0;
    int nx = 161, np = 161;
    std::string out;
};

int cmd_wigner(const WignerArgs& args) {
    using namespace heraldlab;
    const OutputParams zr = make_output_params(require_complex(args.z, "--z"),
                                               require_complex(args.R, "--R"), cplx(0.0, 0.0));
    const FockVector v = output_fock_vector(zr, args.n, args.dim);
    const WignerGrid g =
        wigner_grid(v, args.x_min, args.x_max, args.p_min, args.p_max, args.nx, args.np);
    std::string csv = "x,p,w\n";
    csv.reserve(static_cast<size_t>(g.nx) * static_cast<size_t>(g.np) * 24);
    for (int ip = 0; ip < g.np; ++ip) {
        const double p = g.p_min + (g.p_max - g.p_min) * ip / (g.np - 1.0);
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x_min + (g.x_max - g.x_min) * ix / (g.nx - 1.0);
            csv += fmt17(x);
            csv += ',';
            csv += fmt17(p);
            csv += ',';
            csv += fmt17(g.values[static_cast<size_t>(ip) * g.nx + ix]);
            csv += '\n';
        }
    }
    write_output(args.out, csv);
    return 0;
}

// ----------------------------------------------------------- distribution

struct DistributionArgs {
    std::string a, b, c;
    int n_max = 40;
    std::string out;
};

int cmd_distribution(const DistributionArgs& args) {
    using namespace heraldlab;
    const TmegParams s =
        validate_tmeg(require_complex(args.a, "--a"), require_complex(args.b, "--b"),
                      require_complex(args.c, "--c"));
    const Distribution d = distribution(s, args.n_max);
    std::string csv = "n,P_n,tail\n";
    double remaining = 1.0;
    for (const ProbabilityResult& r : d.probs) {
        remaining -= r.p;
        csv += std::to_string(r.n);
        csv += ',';
        csv += fmt17(r.p);
        csv += ',';
        csv += fmt17(remaining);
        csv += '\n';
    }
    write_output(args.out, csv);
    return 0;
}

// --------------------------------------------------------------- selftest

int cmd_selftest(const std::string& level) {
    using namespace heraldlab;
    if (level != "quick" && level != "full")
        throw ValidationError("--level must be quick or full");
    SelftestOptions opt;
    opt.full = (level == "full");
    const SelftestReport rep = run_selftest(opt);
    size_t width = 0;
    for (const auto& l : rep.lines) width = std::max(width, l.name.size());
    std::string out;
    for (const auto& l : rep.lines) {
        out += l.name;
        out.append(width - l.name.size() + 2, ' ');
        out += l.pass ? "PASS" : "FAIL";
        out += "  ";
        out += l.detail;
        out += '\n';
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu checks, %zu failed, %.1f s\n", rep.lines.size(),
                  static_cast<size_t>(std::count_if(rep.lines.begin(), rep.lines.end(),
                                                    [](const SelftestLine& l) { return !l.pass; })),
                  rep.seconds);
    out += buf;
    std::fwrite(out.data(), 1, out.size(), stdout);
    return rep.all_pass() ? 0 : 4;
}

int emit_error(int code, const std::string& message) {
    const std::string payload =
        "{\"error\": {\"code\": " + std::to_string(code) + ", \"message\": \"" +
        json_escape(message) + "\"}}\n";
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    std::fprintf(stderr, "error: %s\n", message.c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heralded non-Gaussian state synthesis toolkit"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "full report for one input state and herald number");
    analyze->add_option("--a", an.a, "two-mode parameter a (complex, RE+IMi)")->required();
    analyze->add_option("--b", an.b, "two-mode parameter b (complex)")->required();
    analyze->add_option("--c", an.c, "two-mode parameter c (complex)")->required();
    analyze->add_option("--n", an.n, "herald photon number")->required();
    analyze->add_option("--wn-tol", an.wn_tol, "Wigner negativity tolerance");

    SweepArgs sw;
    CLI::App* sweep = app.add_subcommand("sweep", "metric curves over |z| or n (CSV)");
    sweep->add_option("--variable", sw.variable, "sweep variable: z_abs or n")->required();
    sweep->add_option("--start", sw.start, "first value")->required();
    sweep->add_option("--stop", sw.stop, "last value")->required();
    sweep->add_option("--count", sw.count, "number of points")->required();
    sweep->add_option("--n", sw.ns, "herald numbers (z_abs sweeps)")->delimiter(',');
    sweep->add_option("--z-abs", sw.z_fixed, "fixed |z| (n sweeps)");
    sweep->add_option("--metrics", sw.metrics, "comma-separated metric names")
        ->required()
        ->delimiter(',');
    sweep->add_option("--wn-tol", sw.wn_tol, "Wigner negativity tolerance");
    sweep->add_option("--out", sw.out, "output path (default stdout)");

    OptimizeArgs op;
    CLI::App* optimize =
        app.add_subcommand("optimize", "maximize heralding probability over complex a");
    optimize->add_option("--z", op.z, "core parameter z (complex)");
    optimize->add_option("--n", op.n, "herald photon number")->required();
    optimize->add_option("--starts", op.starts, "multistart budget");

    WignerArgs wg;
    CLI::App* wigner = app.add_subcommand("wigner", "Wigner function on a grid (CSV)");
    wigner->add_option("--n", wg.n, "herald photon number")->required();
    wigner->add_option("--z", wg.z, "core parameter z (complex)");
    wigner->add_option("--R", wg.R, "envelope parameter R (complex)");
    wigner->add_option("--dim", wg.dim, "Fock cutoff (0 = automatic)");
    wigner->add_option("--x-min", wg.x_min, "grid lower x bound");
    wigner->add_option("--x-max", wg.x_max, "grid upper x bound");
    wigner->add_option("--p-min", wg.p_min, "grid lower p bound");
    wigner->add_option("--p-max", wg.p_max, "grid upper p bound");
    wigner->add_option("--nx", wg.nx, "grid points along x");
    wigner->add_option("--np", wg.np, "grid points along p");
    wigner->add_option("--out", wg.out, "output path (default stdout)");

    DistributionArgs di;
    CLI::App* dist = app.add_subcommand("distribution", "photon-number probabilities (CSV)");
    dist->add_option("--a", di.a, "two-mode parameter a (complex)")->required();
    dist->add_option("--b", di.b, "two-mode parameter b (complex)")->required();
    dist->add_option("--c", di.c, "two-mode parameter c (complex)")->required();
    dist->add_option("--n-max", di.n_max, "largest herald number listed");
    dist->add_option("--out", di.out, "output path (default stdout)");

    std::string level = "quick";
    CLI::App* selftest = app.add_subcommand("selftest", "internal consistency checks");
    selftest->add_option("--level", level, "quick or full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        return emit_error(2, e.what());
    }

    try {
        if (analyze->parsed()) return cmd_analyze(an);
        if (sweep->parsed()) return cmd_sweep(sw);
        if (optimize->parsed()) return cmd_optimize(op);
        if (wigner->parsed()) return cmd_wigner(wg);
        if (dist->parsed()) return cmd_distribution(di);
        if (selftest->parsed()) return cmd_selftest(level);
    } catch (const heraldlab::ValidationError& e) {
        return emit_error(2, e.what());
    } catch (const heraldlab::InfeasibleError& e) {
        return emit_error(3, e.what());
    } catch (const heraldlab::AccuracyError& e) {
        return emit_error(4, e.what());
    } catch (const std::exception& e) {
        return emit_error(4, std::string("unexpected failure: ") + e.what());
    }
    return 0;
}
