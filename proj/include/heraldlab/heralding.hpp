#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "heraldlab/errors.hpp"
#include "heraldlab/gaussian_core.hpp"
#include "heraldlab/specfun.hpp"

namespace heraldlab {

enum class Parametrization { abc, za };

struct ProbabilityResult {
    int n;
    double p;
    Parametrization parametrization;
};

// Locus of heralding-probability maxima in the complex a plane at fixed z:
// a circle centered on the real axis.
struct RingSpec {
    int n;
    double center_re;
    double radius;
};

struct Distribution {
    std::vector<ProbabilityResult> probs;
    double tail;  // 1 - sum of the listed probabilities
};

namespace detail {

inline void require_herald(int n, const char* who) { require_order(n, who); }

// The hypergeometric factor shared by every probability form. Terminates for
// every integer n >= 0 and has all-positive terms.
inline double herald_2f1(int n, double zabs2) {
    return terminating_2f1(0.5 * (1.0 - n), -0.5 * n, 1.0, zabs2);
}

inline double clip_probability(double p, const char* who) {
    if (!(p >= 0.0)) throw AccuracyError(std::string(who) + ": probability underflowed below 0");
    if (p > 1.0) {
        if (p > 1.0 + 1e-9)
            throw AccuracyError(std::string(who) + ": probability exceeded 1 beyond rounding");
        p = 1.0;
    }
    return p;
}

}  // namespace detail

// Probability of heralding n photons, straight from the wavefunction
// parameters. Magnitudes are assembled in log space so large n cannot
// overflow before the final exponential.
inline ProbabilityResult probability_abc(const TmegParams& p, int n) {
    detail::require_herald(n, "probability_abc");
    const double det = p.a.real() * p.c.real() - p.b.real() * p.b.real();
    const cplx R = detail::output_R(p);
    const double re_r = R.real();
    if (!(re_r > 0.0))
        throw AccuracyError("probability_abc: Re[c - b^2/(a+1)] must be positive");
    const cplx z = 1.0 - (p.a * p.a - 1.0) / (p.b * p.b) * re_r;
    const double f1 = detail::herald_2f1(n, std::norm(z));
    const double base = std::norm(p.a + 1.0) * re_r;
    const double logp = std::log(2.0) + n * std::log(std::norm(p.b)) + 0.5 * std::log(det) -
                        (n + 0.5) * std::log(base) + std::log(f1);
    return {n, detail::clip_probability(std::exp(logp), "probability_abc"), Parametrization::abc};
}

// Same probability from (z, a) alone; independent of R, which only rescales
// the quadratures. Feasibility is gated by attempting the inverse map.
inline ProbabilityResult probability_za(cplx z, cplx a, int n) {
    detail::require_herald(n, "probability_za");
    invert_map(a, z, cplx(1.0, 0.0));  // throws if (a, z) is not realizable
    const cplx am1 = a - 1.0;
    const cplx ap1 = a + 1.0;
    const cplx zm = 1.0 - z;
    const double theta = std::arg(am1) - std::arg(zm);
    const double azm = std::abs(zm);
    double rad = (4.0 * a.real() * azm -
                  2.0 * std::abs(am1) *
                      (std::abs(ap1) - am1.imag() * std::sin(theta) - am1.real() * std::cos(theta))) /
                 (std::norm(ap1) * azm);
    if (rad < 0.0) {
        if (rad < -1e-12)
            throw InfeasibleError("probability_za: negative radicand, outside the realizable domain");
        rad = 0.0;
    }
    const double f1 = detail::herald_2f1(n, std::norm(z));
    const double p = std::sqrt(rad) * std::pow(std::abs(am1 / (ap1 * zm)), n) * f1;
    return {n, detail::clip_probability(p, "probability_za"), Parametrization::za};
}

// P_0 .. P_{n_max} plus the unassigned tail.
inline Distribution distribution(const TmegParams& p, int n_max) {
    detail::require_herald(n_max, "distribution");
    Distribution d;
    d.probs.reserve(static_cast<size_t>(n_max) + 1);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        d.probs.push_back(probability_abc(p, n));
        sum += d.probs.back().p;
    }
    d.tail = 1.0 - sum;
    return d;
}

// Circle of probability maxima at fixed z (location is z-independent; only
// the value on the ring changes with z). Degenerates to the excluded point
// a = 1 for n = 0, which has no ring.
inline RingSpec ring_locus(int n) {
    detail::require_herald(n, "ring_locus");
    if (n < 1)
        throw InfeasibleError("ring_locus: no ring exists for n = 0 (locus degenerates to a = 1)");
    const double nn = n;
    return {n, nn + 1.0 / (4.0 * nn + 2.0) + 0.5, 2.0 * nn * (nn + 1.0) / (2.0 * nn + 1.0)};
}

struct OptimizeConfig {
    int starts = 24;      // multistart budget
    int max_iter = 400;   // simplex iterations per start
    double tol = 1e-12;   // simplex size / value-spread stop
};

struct OptimizeResult {
    cplx a_best;
    double p_best;
    long evaluations;
};

namespace detail {

// Nelder-Mead in 2 variables, standard coefficients, deterministic.
inline std::tuple<double, double, double> nelder_mead_2d(
    const std::function<double(double, double)>& f, double x0, double y0, double step,
    int max_iter, double tol, long& evals) {
    struct V {
        double x, y, f;
    };
    auto ev = [&](double x, double y) {
        ++evals;
        return f(x, y);
    };
    V s[3] = {{x0, y0, 0.0}, {x0 + step, y0, 0.0}, {x0, y0 + step, 0.0}};
    for (auto& v : s) v.f = ev(v.x, v.y);
    auto order = [&] {
        std::sort(s, s + 3, [](const V& l, const V& r) {
            if (l.f != r.f) return l.f < r.f;
            if (l.x != r.x) return l.x < r.x;
            return l.y < r.y;
        });
    };
    order();
    for (int it = 0; it < max_iter; ++it) {
        const double size = std::max(std::hypot(s[1].x - s[0].x, s[1].y - s[0].y),
                                     std::hypot(s[2].x - s[0].x, s[2].y - s[0].y));
        if (size < tol && std::abs(s[2].f - s[0].f) < tol) break;
        const double cx = 0.5 * (s[0].x + s[1].x);
        const double cy = 0.5 * (s[0].y + s[1].y);
        V refl{cx + (cx - s[2].x), cy + (cy - s[2].y), 0.0};
        refl.f = ev(refl.x, refl.y);
        if (refl.f < s[0].f) {
            V exp_{cx + 2.0 * (cx - s[2].x), cy + 2.0 * (cy - s[2].y), 0.0};
            exp_.f = ev(exp_.x, exp_.y);
            s[2] = (exp_.f < refl.f) ? exp_ : refl;
        } else if (refl.f < s[1].f) {
            s[2] = refl;
        } else {
            const bool outside = refl.f < s[2].f;
            const V& base = outside ? refl : s[2];
            V con{cx + 0.5 * (base.x - cx), cy + 0.5 * (base.y - cy), 0.0};
            con.f = ev(con.x, con.y);
            if (con.f < std::min(refl.f, s[2].f)) {
                s[2] = con;
            } else {
                for (int i = 1; i < 3; ++i) {
                    s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
                    s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
                    s[i].f = ev(s[i].x, s[i].y);
                }
            }
        }
        order();
    }
    return {s[0].x, s[0].y, s[0].f};
}

}  // namespace detail

// Maximize the heralding probability over complex a at fixed z. Deterministic
// multistart (golden-ratio lattice over a feasibility-biased box) + simplex
// descent; infeasible trial points evaluate to a large sentinel.
inline OptimizeResult optimize_probability(cplx z, int n, const OptimizeConfig& cfg = {}) {
    detail::require_herald(n, "optimize_probability");
    if (n < 1) throw InfeasibleError("optimize_probability: n = 0 has no probability maximum ring");
    if (cfg.starts < 1) throw ValidationError("optimize_probability: starts must be positive");
    if (cfg.max_iter < 1) throw ValidationError("optimize_probability: max_iter must be positive");
    if (!(cfg.tol > 0.0)) throw ValidationError("optimize_probability: tol must be positive");

    long evals = 0;
    auto objective = [&](double re, double im) -> double {
        try {
            return -probability_za(z, cplx(re, im), n).p;
        } catch (const ValidationError&) {
            return 1e300;
        } catch (const InfeasibleError&) {
            return 1e300;
        }
    };

    const double re_span = 2.0 * n + 4.0;
    const double im_span = n + 2.0;
    bool any_feasible = false;
    double best_f = 1e300;
    double best_x = 0.0, best_y = 0.0;
    constexpr double golden = 0.6180339887498949;
    for (int s = 0; s < cfg.starts; ++s) {
        const double u = (s + 0.5) / cfg.starts;
        const double v = std::fmod(s * golden, 1.0);
        const double x0 = 0.15 + u * re_span;
        const double y0 = (v - 0.5) * 2.0 * im_span;
        ++evals;
        double f0;
        try {
            f0 = -probability_za(z, cplx(x0, y0), n).p;
        } catch (const ValidationError&) {
            continue;
        } catch (const InfeasibleError&) {
            continue;
        }
        any_feasible = true;
        (void)f0;
        auto [x, y, fv] = detail::nelder_mead_2d(objective, x0, y0, 0.25, cfg.max_iter, cfg.tol, evals);
        // Ties resolve lexicographically on (Re a, Im a) for determinism.
        if (fv < best_f - 1e-12 ||
            (fv < best_f + 1e-12 && std::tie(x, y) < std::tie(best_x, best_y))) {
            best_f = fv;
            best_x = x;
            best_y = y;
        }
    }
    if (!any_feasible)
        throw InfeasibleError("optimize_probability: no feasible starting point for this z");
    return {cplx(best_x, best_y), detail::clip_probability(-best_f, "optimize_probability"), evals};
}

}  // namespace heraldlab
