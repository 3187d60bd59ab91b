#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "heraldlab/errors.hpp"
#include "heraldlab/specfun.hpp"

namespace heraldlab {

// Two-mode entangled Gaussian wavefunction parameters:
//   Psi(x1, x2) ~ exp(-(a x1^2 + 2 b x1 x2 + c x2^2) / 2)
// Normalizable iff Re a > 0, Re c > 0, Re a Re c - (Re b)^2 > 0.
struct TmegParams {
    cplx a;
    cplx b;
    cplx c;
};

// Parameters of the heralded single-mode output. z controls the Fock-core
// shape, R the Gaussian envelope; a_free keeps the input a, which remains a
// free knob for the heralding probability at fixed (z, R).
struct OutputParams {
    cplx z;
    cplx R;
    cplx a_free;
};

// Gaussian dressing of the Fock-superposition core: squeeze magnitude r >= 0,
// squeeze phase phi in (-pi, pi], rotation angle rot = -arg(z)/2 - arg(1+R)
// (the second term compensates the squeeze's own per-level phase and is zero
// for real R > 0).
struct GaussianOp {
    double r;
    double phi;
    double rot;
};

inline TmegParams validate_tmeg(cplx a, cplx b, cplx c) {
    if (!(a.real() > 0.0)) throw ValidationError("Re[a] must be positive");
    if (!(c.real() > 0.0)) throw ValidationError("Re[c] must be positive");
    if (!(a.real() * c.real() - b.real() * b.real() > 0.0))
        throw ValidationError("Re[a] Re[c] - Re[b]^2 must be positive");
    if (b == cplx(0.0, 0.0))
        throw ValidationError("b must be nonzero (b = 0 factorizes: nothing is heralded)");
    if (a == cplx(1.0, 0.0))
        throw ValidationError("a must differ from 1 (the output map degenerates at a = 1)");
    return {a, b, c};
}

namespace detail {

// Envelope parameter of the conditioned mode.
inline cplx output_R(const TmegParams& p) { return p.c - p.b * p.b / (p.a + 1.0); }

inline double wrap_angle(double phi) {
    const double pi = std::numbers::pi;
    while (phi > pi) phi -= 2.0 * pi;
    while (phi <= -pi) phi += 2.0 * pi;
    return phi;
}

}  // namespace detail

inline OutputParams make_output_params(cplx z, cplx R, cplx a_free) {
    if (!(R.real() > 0.0)) throw ValidationError("Re[R] must be positive");
    if (z == cplx(1.0, 0.0)) throw ValidationError("z must differ from 1");
    // drop signed zeros so arg() at the branch cut cannot depend on the
    // arithmetic route that produced z or R
    const auto clean = [](cplx v) {
        double re = v.real(), im = v.imag();
        if (re == 0.0) re = 0.0;
        if (im == 0.0) im = 0.0;
        return cplx(re, im);
    };
    return {clean(z), clean(R), a_free};
}

// Forward map (a, b, c) -> (z, R). Note z depends on Re R only.
inline OutputParams map_to_output(const TmegParams& p) {
    const cplx R = detail::output_R(p);
    const cplx z = 1.0 - (p.a * p.a - 1.0) / (p.b * p.b) * R.real();
    return make_output_params(z, R, p.a);
}

// Inverse map: reconstruct a realizing (a, b, c) from (a, z, R), taking the
// principal square root for b (both signs realize the same output state).
inline TmegParams invert_map(cplx a, cplx z, cplx R) {
    if (!(R.real() > 0.0)) throw ValidationError("Re[R] must be positive");
    if (z == cplx(1.0, 0.0)) throw ValidationError("z must differ from 1");
    if (a == cplx(1.0, 0.0) || a == cplx(-1.0, 0.0))
        throw ValidationError("a must differ from +/-1");
    const cplx b2 = (a * a - 1.0) * R.real() / (1.0 - z);
    const cplx b = std::sqrt(b2);
    const cplx c = R + b2 / (a + 1.0);
    try {
        return validate_tmeg(a, b, c);
    } catch (const ValidationError& e) {
        throw InfeasibleError(std::string("no realizable two-mode Gaussian for these (a, z, R): ") +
                              e.what());
    }
}

namespace detail {

// exp(-R' x^2 / 2) envelope parameter of the squeezed vacuum S(r e^{i phi})|0>.
inline cplx squeezed_vacuum_envelope(double r, double phi) {
    const cplx tp = std::tanh(r) * std::exp(cplx(0.0, phi));
    return (1.0 - tp) / (1.0 + tp);
}

}  // namespace detail

// Decompose the Gaussian dressing encoded by (z, R) into squeeze + rotation.
// cosh r = |R + 1| / (2 sqrt(Re R)); the squeeze phase is fixed only up to
// the quadrant by that relation, so both candidates are probed against the
// squeezed-vacuum wavefunction envelope and the matching one is kept.
inline GaussianOp gaussian_ops_from(const OutputParams& zR) {
    const cplx R = zR.R;
    const double re_r = R.real();
    if (!(re_r > 0.0)) throw ValidationError("Re[R] must be positive");
    const double coshr = std::abs(R + 1.0) / (2.0 * std::sqrt(re_r));
    if (coshr < 1.0 - 1e-12)
        throw AccuracyError("gaussian_ops_from: cosh r fell below 1, inconsistent envelope");
    const double r = std::acosh(std::max(coshr, 1.0));
    const double phi0 = std::atan2(2.0 * R.imag(), std::norm(R) - 1.0);
    double best_phi = detail::wrap_angle(phi0);
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2; ++k) {
        const double cand = detail::wrap_angle(phi0 + k * std::numbers::pi);
        const cplx Rp = detail::squeezed_vacuum_envelope(r, cand);
        double err = 0.0;
        for (double x : {0.5, 1.0, 1.5}) {
            const cplx d = std::exp(-0.5 * Rp * x * x) - std::exp(-0.5 * R * x * x);
            err = std::max(err, std::abs(d));
        }
        if (err < best_err) {
            best_err = err;
            best_phi = cand;
        }
    }
    // arg(0) = 0, so z = 0 leaves the core unrotated. The -arg(1+R) term
    // cancels the phase the squeeze itself puts on each Fock level (a pure
    // squeeze yields a real Hermite argument sqrt(Re R') x; collapsing the
    // core sum into the single complex-argument Hermite of the closed form
    // fixes the per-level phase to exactly this angle). It vanishes for
    // real R > 0.
    const double rot = -0.5 * std::arg(zR.z) - std::arg(1.0 + R);
    return {r, best_phi, rot};
}

}  // namespace heraldlab
