#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "heraldlab/errors.hpp"
#include "heraldlab/gaussian_core.hpp"
#include "heraldlab/heralding.hpp"
#include "heraldlab/specfun.hpp"

namespace heraldlab {

// Synthesis works with factorial ratios that stay comfortably representable
// up to this herald number.
inline constexpr int kMaxSynth = 50;

// Fock-basis core of the heralded state: real coefficients A_m on
// m = parity, parity + 2, ..., n_herald.
struct FockSuperposition {
    int n_herald;
    int parity;  // n_herald mod 2
    std::vector<double> coeffs;

    int index_of(size_t i) const { return parity + 2 * static_cast<int>(i); }
};

// Dense Fock-basis amplitude vector. Invariant: the norm deficit of a
// physical state stays within the truncation tolerance.
struct FockVector {
    std::vector<cplx> amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm2() const {
        double s = 0.0;
        for (const cplx& c : amplitudes) s += std::norm(c);
        return s;
    }
};

namespace detail {

inline void require_synth(int n, const char* who) {
    if (n < 0) throw ValidationError(std::string(who) + ": n must be nonnegative");
    if (n > kMaxSynth)
        throw SizeError(std::string(who) + ": n exceeds the synthesis maximum " +
                        std::to_string(kMaxSynth));
}

}  // namespace detail

// Harmonic-oscillator eigenfunction psi_m(x), unit mass and frequency.
// Normalized recurrence; the coefficient form overflows long before m = 200.
inline double fock_wavefunction(int m, double x) {
    detail::require_order(m, "fock_wavefunction");
    double pm1 = 0.0;
    double pk = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    for (int k = 0; k < m; ++k) {
        const double pp1 =
            x * std::sqrt(2.0 / (k + 1.0)) * pk - std::sqrt(k / (k + 1.0)) * pm1;
        pm1 = pk;
        pk = pp1;
    }
    return pk;
}

// Core expansion coefficients A_m of the heralded state at |z|; normalized,
// same parity as n. The j = 0 term is taken as exactly 1 so z = 0 yields a
// clean unit weight on m = n.
inline FockSuperposition superposition_coeffs(int n, double z_abs) {
    detail::require_synth(n, "superposition_coeffs");
    if (!(z_abs >= 0.0))
        throw ValidationError("superposition_coeffs: |z| must be nonnegative");
    const double f1 = detail::herald_2f1(n, z_abs * z_abs);
    const double inv_sqrt_f1 = 1.0 / std::sqrt(f1);
    FockSuperposition s{n, n % 2, {}};
    s.coeffs.reserve(static_cast<size_t>(n / 2) + 1);
    for (int m = n % 2; m <= n; m += 2) {
        const int j = (n - m) / 2;
        const double poisson =
            (j == 0) ? 1.0 : std::pow(0.5 * z_abs, j) * std::exp(-log_factorial(j));
        const double ratio = std::exp(0.5 * (log_factorial(n) - log_factorial(m)));
        s.coeffs.push_back(poisson * ratio * inv_sqrt_f1);
    }
    return s;
}

// Heralded wavefunction straight from (a, b, c): Hermite factor with complex
// argument b x / sqrt(a^2 - 1), Gaussian envelope, probability-normalized.
inline cplx psi_out_abc(const TmegParams& p, int n, double x) {
    detail::require_synth(n, "psi_out_abc");
    const double pn = probability_abc(p, n).p;
    if (pn < 1e-300)
        throw AccuracyError("psi_out_abc: normalization underflow, P_" + std::to_string(n) +
                            " is numerically zero");
    const double det = p.a.real() * p.c.real() - p.b.real() * p.b.real();
    const cplx R = detail::output_R(p);
    const double log_norm = 0.25 * std::log(det) - 0.25 * std::log(std::numbers::pi) -
                            0.5 * (n * std::log(2.0) + log_factorial(n) + std::log(pn));
    const cplx shape = std::sqrt(2.0 * std::pow(p.a - 1.0, n) / std::pow(p.a + 1.0, n + 1));
    const cplx herm = hermite_eval(n, p.b * x / std::sqrt(p.a * p.a - 1.0));
    return std::exp(log_norm) * shape * std::exp(-0.5 * R * x * x) * herm;
}

// Same wavefunction in the reduced (z, R) parametrization.
inline cplx psi_out_zR(const OutputParams& zR, int n, double x) {
    detail::require_synth(n, "psi_out_zR");
    const double zabs = std::abs(zR.z);
    const double f1 = detail::herald_2f1(n, zabs * zabs);
    const double re_r = zR.R.real();
    const double log_norm = 0.25 * std::log(re_r) + 0.5 * n * std::log(std::abs(1.0 - zR.z)) -
                            0.25 * std::log(std::numbers::pi) -
                            0.5 * (n * std::log(2.0) + log_factorial(n) + std::log(f1));
    const cplx herm = hermite_eval(n, x * std::sqrt(re_r / (1.0 - zR.z)));
    return std::exp(log_norm) * std::exp(-0.5 * zR.R * x * x) * herm;
}

namespace detail {

inline int tail_start(int dim) { return dim - std::max(4, dim / 16); }

inline double tail_mass(const Eigen::VectorXcd& v) {
    double t = 0.0;
    for (int k = tail_start(static_cast<int>(v.size())); k < v.size(); ++k) t += std::norm(v(k));
    return t;
}

}  // namespace detail

// Truncated squeeze operator exp[(r/2)(e^{i phi} adag^2 - e^{-i phi} a^2)].
// The truncated generator stays exactly anti-Hermitian, so the exponential is
// exactly unitary and norm loss cannot signal truncation; instead the vacuum
// column tail (top max(4, dim/16) slots) must stay under 1e-10.
inline Eigen::MatrixXcd squeeze_matrix(double r, double phi, int dim) {
    if (dim < 2) throw ValidationError("squeeze_matrix: dim must be at least 2");
    if (dim > 4096) throw SizeError("squeeze_matrix: dim exceeds the supported maximum 4096");
    if (!(r >= 0.0)) throw ValidationError("squeeze_matrix: r must be nonnegative");
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
    const cplx up = 0.5 * r * std::exp(cplx(0.0, phi));
    for (int k = 0; k + 2 < dim; ++k) {
        const double s = std::sqrt((k + 1.0) * (k + 2.0));
        g(k + 2, k) = up * s;
        g(k, k + 2) = -std::conj(up) * s;
    }
    Eigen::MatrixXcd S = g.exp();
    const double leak = detail::tail_mass(S.col(0));
    if (leak > 1e-10)
        throw AccuracyError("squeeze_matrix: truncation leakage " + std::to_string(leak) +
                            " in the vacuum column; increase dim (try " + std::to_string(2 * dim) +
                            ")");
    return S;
}

// Diagonal of the rotation operator: entry k is e^{i phase k}.
inline Eigen::VectorXcd rotation_phases(double phase, int dim) {
    if (dim < 1) throw ValidationError("rotation_phases: dim must be positive");
    if (dim > 4096) throw SizeError("rotation_phases: dim exceeds the supported maximum 4096");
    Eigen::VectorXcd d(dim);
    for (int k = 0; k < dim; ++k) d(k) = std::exp(cplx(0.0, phase * k));
    return d;
}

// Full output state in the Fock basis: rotate the core, then squeeze.
// dim = 0 picks the default 4 n + 40.
inline FockVector output_fock_vector(const OutputParams& zR, int n, int dim = 0) {
    detail::require_synth(n, "output_fock_vector");
    if (dim == 0) dim = 4 * n + 40;
    if (dim < n + 2)
        throw ValidationError("output_fock_vector: dim must exceed the herald number");
    if (dim > 4096)
        throw SizeError("output_fock_vector: dim exceeds the supported maximum 4096");
    const FockSuperposition core = superposition_coeffs(n, std::abs(zR.z));
    const GaussianOp ops = gaussian_ops_from(zR);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (size_t i = 0; i < core.coeffs.size(); ++i) v(core.index_of(i)) = core.coeffs[i];
    v = v.cwiseProduct(rotation_phases(ops.rot, dim));
    v = squeeze_matrix(ops.r, ops.phi, dim) * v;
    const double leak = detail::tail_mass(v);
    if (leak > 1e-10)
        throw AccuracyError("output_fock_vector: truncation leakage " + std::to_string(leak) +
                            "; increase dim (try " + std::to_string(2 * dim) + ")");
    FockVector out;
    out.amplitudes.assign(v.data(), v.data() + dim);
    return out;
}

// Bare core as a Fock vector of dimension n + 1 (no Gaussian dressing).
inline FockVector core_fock_vector(int n, double z_abs) {
    const FockSuperposition s = superposition_coeffs(n, z_abs);
    FockVector v{std::vector<cplx>(static_cast<size_t>(n) + 1, cplx(0.0, 0.0))};
    for (size_t i = 0; i < s.coeffs.size(); ++i)
        v.amplitudes[static_cast<size_t>(s.index_of(i))] = s.coeffs[i];
    return v;
}

// Position wavefunction of a Fock-basis vector; single pass of the
// oscillator-eigenfunction recurrence.
inline cplx wavefunction_from_fock(const FockVector& v, double x) {
    if (v.dim() == 0) throw ValidationError("wavefunction_from_fock: empty state");
    double pm1 = 0.0;
    double pk = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    cplx acc = 0.0;
    for (int k = 0; k < v.dim(); ++k) {
        acc += v.amplitudes[static_cast<size_t>(k)] * pk;
        const double pp1 =
            x * std::sqrt(2.0 / (k + 1.0)) * pk - std::sqrt(k / (k + 1.0)) * pm1;
        pm1 = pk;
        pk = pp1;
    }
    return acc;
}

}  // namespace heraldlab
