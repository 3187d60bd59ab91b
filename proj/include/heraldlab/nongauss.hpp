#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "heraldlab/errors.hpp"
#include "heraldlab/specfun.hpp"
#include "heraldlab/state_synth.hpp"

namespace heraldlab {

// Quadrature variances <x^2>, <p^2> of the core state (first moments vanish
// by parity).
struct MomentPair {
    double d_x;
    double d_p;
};

inline MomentPair moments(int n, double z_abs) {
    detail::require_order(n, "moments");
    if (!(z_abs >= 0.0)) throw ValidationError("moments: |z| must be nonnegative");
    const double t = z_abs * z_abs;
    double w = 0.0;
    if (n >= 2) {
        const double f1 = detail::herald_2f1(n, t);
        const double f2 = terminating_2f1(0.5 * (3.0 - n), 1.0 - 0.5 * n, 2.0, t);
        w = n * (n - 1.0) * z_abs * f2 / (2.0 * f1);
    }
    const double base = n + 0.5;
    const MomentPair m{base + (1.0 - z_abs) * w, base - (1.0 + z_abs) * w};
    // d_x stays at or above the vacuum variance and dominates d_p; d_p can
    // legitimately dip below vacuum (quadrature squeezing of the core) but
    // never reaches zero, and the uncertainty product keeps its floor.
    if (m.d_x < 0.5 - 1e-12 || !(m.d_p > 0.0) || m.d_x - m.d_p < -1e-12 ||
        m.d_x * m.d_p < 0.25 - 1e-12)
        throw AccuracyError("moments: computed moment pair violates physical bounds");
    return m;
}

namespace detail {

inline const std::array<double, 171>& factorial_table() {
    static const std::array<double, 171> table = [] {
        std::array<double, 171> f{};
        f[0] = 1.0;
        for (int k = 1; k <= 170; ++k) f[static_cast<size_t>(k)] = f[static_cast<size_t>(k) - 1] * k;
        return f;
    }();
    return table;
}

// <m1| rho_G |m2> for the zero-mean Gaussian state with covariance
// diag(d_x, d_p). Every power of the (d_x - d_p) gap is folded into one net
// exponent per term, so the d_x -> d_p limit is approached smoothly instead
// of through 0^0 corners.
inline double gauss_overlap_element(int m1, int m2, double dx, double dp) {
    if (((m1 ^ m2) & 1) != 0) return 0.0;  // the reference state has even parity
    const auto& fact = factorial_table();
    const double b1 = (2.0 * dx + 1.0) * (2.0 * dp + 1.0);
    const double b2 = 2.0 * dx * (2.0 * dp + 1.0);
    const double b3 = (2.0 * dx + 1.0) * 2.0 * dp;
    const double gap = dx - dp;
    const int mmin = std::min(m1, m2);
    double sum = 0.0;
    for (int k = 0; k <= mmin; ++k) {
        for (int q = 0; k + q <= mmin; ++q) {
            for (int q1 = 0; k + q + q1 <= mmin; ++q1) {
                const int s = k + q + q1;
                if (((m1 - s) & 1) || ((m2 - s) & 1)) continue;
                const int e = (m1 + m2) / 2 - s;  // never negative once parity passes
                double term = std::pow(b1, k) * std::pow(b2, q) * std::pow(b3, q1) /
                              (fact[static_cast<size_t>(k)] * fact[static_cast<size_t>(q)] *
                               fact[static_cast<size_t>(q1)] *
                               fact[static_cast<size_t>((m1 - s) / 2)] *
                               fact[static_cast<size_t>((m2 - s) / 2)]);
                if (e > 0) term *= std::pow(gap, e);
                sum += (k & 1) ? -term : term;
            }
        }
    }
    const double log_scale = std::log(2.0) + 0.5 * (log_factorial(m1) + log_factorial(m2)) -
                             (0.5 * (m1 + m2) + 0.5) * std::log(b1);
    return std::exp(log_scale) * sum;
}

// Closed form of the diagonal element at d_x = d_p = d. The alternating sum
// above cancels catastrophically in this limit, so it is never used there.
inline double equal_moments_fidelity(int n, double d) {
    if (n == 0) return 2.0 / (2.0 * d + 1.0);
    const double lo = 2.0 * d - 1.0;
    if (lo <= 0.0) return 0.0;
    return std::exp(std::log(2.0) + n * std::log(lo) - (n + 1.0) * std::log(2.0 * d + 1.0));
}

inline double clip_unit_interval(double v, double slack, const char* who) {
    if (v < 0.0) {
        if (v < -slack) throw AccuracyError(std::string(who) + ": value fell below 0");
        return 0.0;
    }
    if (v > 1.0) {
        if (v > 1.0 + slack) throw AccuracyError(std::string(who) + ": value exceeded 1");
        return 1.0;
    }
    return v;
}

}  // namespace detail

// Fidelity between the core state at (n, |z|) and the Gaussian reference
// sharing its covariance.
inline double fidelity_gaussian(int n, double z_abs) {
    detail::require_synth(n, "fidelity_gaussian");
    if (!(z_abs >= 0.0)) throw ValidationError("fidelity_gaussian: |z| must be nonnegative");
    MomentPair mp = moments(n, z_abs);
    double dx = mp.d_x;
    double dp = mp.d_p;
    double gap = dx - dp;
    if (gap == 0.0) return detail::equal_moments_fidelity(n, dx);
    const double scale = dx + dp;
    if (gap < 1e-8 * scale) {
        // tiny but nonzero gap: evaluate at a clamped split of the same total
        gap = 1e-8 * scale;
        dx = 0.5 * (scale + gap);
        dp = 0.5 * (scale - gap);
    }
    const FockSuperposition core = superposition_coeffs(n, z_abs);
    double fid = 0.0;
    for (size_t i = 0; i < core.coeffs.size(); ++i)
        for (size_t j = 0; j < core.coeffs.size(); ++j)
            fid += core.coeffs[i] * core.coeffs[j] *
                   detail::gauss_overlap_element(core.index_of(i), core.index_of(j), dx, dp);
    return detail::clip_unit_interval(fid, 1e-9, "fidelity_gaussian");
}

// Non-Gaussianity as fidelity shortfall from the best moment-matched Gaussian.
inline double ng_measure(int n, double z_abs) {
    return 1.0 - std::sqrt(fidelity_gaussian(n, z_abs));
}

// Value of ng_measure at z = 0, where it peaks over |z| for fixed n.
inline double ng_measure_max(int n) {
    if (n < 1) throw ValidationError("ng_measure_max: n must be at least 1");
    if (n > kMaxSynth)
        throw SizeError("ng_measure_max: n exceeds the synthesis maximum " +
                        std::to_string(kMaxSynth));
    return 1.0 -
           std::exp(0.5 * (n * std::log(static_cast<double>(n)) -
                           (n + 1.0) * std::log(static_cast<double>(n) + 1.0)));
}

namespace detail {

// Phase-space kernel of a Fock-basis vector under the convention
//   W(x, p) = (1/pi) Int e^{2ipy} psi*(x+y) psi(x-y) dy,
// which integrates to 1 over the plane. Radially it decomposes as
//   W(r, theta) = sig[0] + 2 Re sum_{d>=1} sig[d] e^{i d theta}.
// The associated-Laguerre recurrence runs on kernel-normalized values
// (each bounded by 1 in magnitude), so no intermediate can overflow at any
// supported dimension.
class WignerKernel {
public:
    explicit WignerKernel(const FockVector& v) : c_(v.amplitudes) {
        const int dim = v.dim();
        if (dim < 1) throw ValidationError("wigner: empty state vector");
        if (dim > 1024) throw SizeError("wigner: dim exceeds the supported maximum 1024");
        kmax_ = 0;
        for (int k = 0; k < dim; ++k)
            if (std::norm(c_[static_cast<size_t>(k)]) > 0.0) kmax_ = k;
        dmax_ = 0;
        for (int k = 0; k <= kmax_; ++k)
            for (int m = k; m <= kmax_; ++m)
                if (std::norm(c_[static_cast<size_t>(k)]) > 0.0 &&
                    std::norm(c_[static_cast<size_t>(m)]) > 0.0)
                    dmax_ = std::max(dmax_, m - k);
        u_cut_ = 4.0 * (kmax_ + 1) + 400.0;
    }

    int harmonics() const { return dmax_ + 1; }

    void radial_components(double r, std::vector<cplx>& sig) const {
        const double u = 2.0 * r * r;
        sig.assign(static_cast<size_t>(dmax_) + 1, cplx(0.0, 0.0));
        if (u > u_cut_) return;  // deep in the forbidden tail of every basis pair
        for (int d = 0; d <= dmax_; ++d) {
            double mkm1 = 0.0;
            double mk = (d == 0) ? std::exp(-0.5 * u)
                                 : std::exp(0.5 * (d * std::log(u) - log_factorial(d)) - 0.5 * u);
            cplx acc(0.0, 0.0);
            for (int k = 0; k + d <= kmax_; ++k) {
                const double w = (k & 1) ? -mk : mk;
                acc += std::conj(c_[static_cast<size_t>(k + d)]) * c_[static_cast<size_t>(k)] * w;
                const double kp1 = k + 1.0;
                const double mkp1 = ((2.0 * k + 1.0 + d - u) * std::sqrt(kp1 / (kp1 + d)) * mk -
                                     std::sqrt(k * (k + d) * kp1 / (kp1 + d)) * mkm1) /
                                    kp1;
                mkm1 = mk;
                mk = mkp1;
            }
            sig[static_cast<size_t>(d)] = acc / std::numbers::pi;
        }
    }

    // unit = e^{i theta} with theta the phase-space angle of (x, p).
    double value_from(const std::vector<cplx>& sig, cplx unit) const {
        double w = sig[0].real();
        cplx pw = unit;
        for (size_t d = 1; d < sig.size(); ++d) {
            w += 2.0 * (sig[d] * pw).real();
            pw *= unit;
        }
        return w;
    }

    double eval(double x, double p) const {
        std::vector<cplx> sig;
        const double r = std::hypot(x, p);
        radial_components(r, sig);
        const cplx unit = (r > 0.0) ? cplx(x / r, p / r) : cplx(1.0, 0.0);
        return value_from(sig, unit);
    }

private:
    std::vector<cplx> c_;
    int kmax_;
    int dmax_;
    double u_cut_;
};

struct PolarQuad {
    double total;  // integral of |W| over the disk
    double outer;  // contribution of the outermost radial cell
};

inline constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563,
                                      0.3399810435848563, 0.8611363115940526};
inline constexpr double kGaussW[4] = {0.34785484513745385, 0.6521451548625461,
                                      0.6521451548625461, 0.34785484513745385};

// Integral of |W| r dr dtheta over [r_lo, r_hi]: 4-point Gauss-Legendre in r,
// rectangle rule in theta (exact for trigonometric polynomials below the
// harmonic count, which the kernel respects away from its |.| kinks).
inline double polar_band_mass(const WignerKernel& ker, double r_lo, double r_hi, int cells,
                              int nth) {
    const double dr = (r_hi - r_lo) / cells;
    const double dth = 2.0 * std::numbers::pi / nth;
    const cplx rot = std::polar(1.0, dth);
    std::vector<cplx> sig;
    double total = 0.0;
    for (int i = 0; i < cells; ++i) {
        for (int g = 0; g < 4; ++g) {
            const double r = r_lo + (i + 0.5 + 0.5 * kGaussX[g]) * dr;
            ker.radial_components(r, sig);
            double ang = 0.0;
            cplx unit(1.0, 0.0);
            for (int j = 0; j < nth; ++j) {
                ang += std::abs(ker.value_from(sig, unit));
                unit *= rot;
            }
            total += 0.5 * kGaussW[g] * r * ang * dth * dr;
        }
    }
    return total;
}

inline PolarQuad polar_abs_integral(const WignerKernel& ker, double r_max, int nr, int nth) {
    PolarQuad q{0.0, 0.0};
    const double dr = r_max / nr;
    q.outer = polar_band_mass(ker, r_max - dr, r_max, 1, nth);
    q.total = polar_band_mass(ker, 0.0, r_max - dr, nr - 1, nth) + q.outer;
    return q;
}

}  // namespace detail

// Pointwise Wigner function of a Fock-basis state vector.
inline double wigner_eval(const FockVector& v, double x, double p) {
    return detail::WignerKernel(v).eval(x, p);
}

// Rectangular phase-space sampling, row-major with x fastest.
struct WignerGrid {
    double x_min, x_max, p_min, p_max;
    int nx, np;
    std::vector<double> values;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dp() const { return (p_max - p_min) / (np - 1); }
    // Plain Riemann mass; approaches 1 when the bounds capture the state.
    double riemann_mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * dx() * dp();
    }
};

inline WignerGrid wigner_grid(const FockVector& v, double x_min, double x_max, double p_min,
                              double p_max, int nx, int np) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(p_min) ||
        !std::isfinite(p_max) || !(x_min < x_max) || !(p_min < p_max))
        throw ValidationError("wigner_grid: bounds must be finite and ordered");
    if (nx < 2 || np < 2)
        throw ValidationError("wigner_grid: grid counts must be at least 2");
    if (nx > 2048 || np > 2048)
        throw SizeError("wigner_grid: grid counts exceed the supported maximum 2048");
    detail::WignerKernel ker(v);
    WignerGrid g{x_min, x_max, p_min, p_max, nx, np, {}};
    g.values.resize(static_cast<size_t>(nx) * static_cast<size_t>(np));
    std::vector<cplx> sig;
    for (int ip = 0; ip < np; ++ip) {
        const double p = p_min + (p_max - p_min) * ip / (np - 1.0);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = x_min + (x_max - x_min) * ix / (nx - 1.0);
            const double r = std::hypot(x, p);
            ker.radial_components(r, sig);
            const cplx unit = (r > 0.0) ? cplx(x / r, p / r) : cplx(1.0, 0.0);
            g.values[static_cast<size_t>(ip) * nx + ix] = ker.value_from(sig, unit);
        }
    }
    return g;
}

// Integrated negative mass of the Wigner function: Int |W| dx dp - 1.
// Adaptive polar quadrature; the disk grows until the outer annulus is
// negligible, then (nr, ntheta) refine until two successive totals agree.
inline double wigner_negativity(const FockVector& v, double tol = 1e-4) {
    if (!(tol >= 1e-10 && tol <= 0.1))
        throw ValidationError("wigner_negativity: tol must lie in [1e-10, 0.1]");
    detail::WignerKernel ker(v);
    int n_eff = 0;
    for (int k = 0; k < v.dim(); ++k)
        if (std::norm(v.amplitudes[static_cast<size_t>(k)]) > 1e-14) n_eff = k;
    double r_max = std::sqrt(2.0 * (4.0 * n_eff + 20.0));
    int nth = 256;
    for (int grow = 0;; ++grow) {
        if (grow >= 6)
            throw AccuracyError("wigner_negativity: radial domain failed to close");
        const double ring = detail::polar_band_mass(ker, 0.92 * r_max, r_max, 2, nth);
        if (ring < 0.1 * tol) break;
        r_max *= 2.0;
    }
    int nr = 128;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level < 7; ++level) {
        const double total = detail::polar_abs_integral(ker, r_max, nr, nth).total;
        if (!std::isnan(prev) && std::abs(total - prev) < 0.5 * tol) {
            double neg = total - 1.0;
            if (neg < 0.0) {
                if (neg < -10.0 * tol)
                    throw AccuracyError(
                        "wigner_negativity: integral fell below unit mass, estimate " +
                        std::to_string(neg));
                neg = 0.0;
            }
            return neg;
        }
        prev = total;
        nr *= 2;
        nth = std::min(2 * nth, 4096);
    }
    throw AccuracyError("wigner_negativity: refinement did not converge; achieved estimate " +
                        std::to_string(prev - 1.0));
}

}  // namespace heraldlab
