#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "heraldlab/errors.hpp"
#include "heraldlab/gaussian_core.hpp"
#include "heraldlab/nongauss.hpp"
#include "heraldlab/specfun.hpp"
#include "heraldlab/state_synth.hpp"

namespace heraldlab {

// Everything in this header is a slow, formula-free cross-check: brute
// quadrature and dense matrix algebra only, no closed forms shared with the
// fast paths.

struct UniformGrid {
    double x0;
    double dx;
    int count;

    double x(int i) const { return x0 + dx * i; }
    double x_last() const { return x(count - 1); }
};

inline UniformGrid default_grid() { return {-12.0, 24.0 / 4095.0, 4096}; }

inline bool same_grid(const UniformGrid& a, const UniformGrid& b) {
    return a.x0 == b.x0 && a.dx == b.dx && a.count == b.count;
}

struct SampledWavefunction {
    UniformGrid grid;
    std::vector<cplx> values;
};

namespace detail {

// Composite Simpson weights; a trailing 3/8 panel absorbs an odd interval
// count. O(dx^4) on smooth integrands.
inline std::vector<double> quadrature_weights(int count, double dx) {
    if (count < 8) throw ValidationError("quadrature grid needs at least 8 points");
    std::vector<double> w(static_cast<size_t>(count), 0.0);
    const int intervals = count - 1;
    const int simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (int i = 0; i + 2 <= simpson_end; i += 2) {
        w[static_cast<size_t>(i)] += dx / 3.0;
        w[static_cast<size_t>(i) + 1] += 4.0 * dx / 3.0;
        w[static_cast<size_t>(i) + 2] += dx / 3.0;
    }
    if (simpson_end != intervals) {
        const double h = 3.0 * dx / 8.0;
        w[static_cast<size_t>(simpson_end)] += h;
        w[static_cast<size_t>(simpson_end) + 1] += 3.0 * h;
        w[static_cast<size_t>(simpson_end) + 2] += 3.0 * h;
        w[static_cast<size_t>(simpson_end) + 3] += h;
    }
    return w;
}

inline double peak_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& c : v) m = std::max(m, std::abs(c));
    return m;
}

inline void require_captured(const SampledWavefunction& f, const char* who) {
    const double peak = peak_abs(f.values);
    const double edge = std::max(std::abs(f.values.front()), std::abs(f.values.back()));
    if (!(peak > 0.0) || edge > 1e-10 * peak)
        throw AccuracyError(std::string(who) +
                            ": grid does not capture the state (boundary amplitude too large)");
}

}  // namespace detail

// Two-mode wavefunction value, direct from the defining exponential.
inline cplx tmeg_wavefunction(const TmegParams& p, double x1, double x2) {
    const double det = p.a.real() * p.c.real() - p.b.real() * p.b.real();
    const double pref = std::pow(det, 0.25) / std::sqrt(std::numbers::pi);
    return pref * std::exp(-0.5 * (p.a * x1 * x1 + 2.0 * p.b * x1 * x2 + p.c * x2 * x2));
}

// Herald by brute projection: integrate the two-mode wavefunction against the
// n-photon eigenfunction along mode 1. Returns the normalized conditional
// wavefunction of mode 2 and the heralding probability. The x1 integral
// marches e^{-b x1 x2} as a geometric recurrence per row, so the cost is one
// multiply-add per grid pair instead of an exp.
inline std::pair<SampledWavefunction, double> herald_by_projection(const TmegParams& p, int n,
                                                                   const UniformGrid& grid) {
    if (n < 0) throw ValidationError("herald_by_projection: n must be nonnegative");
    if (n > 10) throw SizeError("herald_by_projection: oracle supports n <= 10 only");
    if (grid.count < 64 || grid.count > 20000)
        throw ValidationError("herald_by_projection: grid count out of range");
    const auto w = detail::quadrature_weights(grid.count, grid.dx);
    const double xmax = std::max(std::abs(grid.x0), std::abs(grid.x_last()));
    // at least ~4 samples per oscillation of the x1 integrand
    const double freq = (std::abs(p.b) + 0.5 * std::abs(p.a.imag())) * xmax;
    if (freq * grid.dx > std::numbers::pi / 2.0)
        throw AccuracyError("herald_by_projection: grid cannot resolve the integrand oscillation");

    const size_t count = static_cast<size_t>(grid.count);
    std::vector<cplx> avec(count);
    for (size_t i = 0; i < count; ++i) {
        const double x1 = grid.x(static_cast<int>(i));
        avec[i] = std::exp(-0.5 * p.a * x1 * x1) * fock_wavefunction(n, x1) * w[i];
    }
    const double det = p.a.real() * p.c.real() - p.b.real() * p.b.real();
    const double pref = std::pow(det, 0.25) / std::sqrt(std::numbers::pi);

    SampledWavefunction out{grid, std::vector<cplx>(count)};
    for (size_t j = 0; j < count; ++j) {
        const double x2 = grid.x(static_cast<int>(j));
        cplx cross = std::exp(-p.b * grid.x0 * x2);
        const cplx step = std::exp(-p.b * grid.dx * x2);
        cplx acc(0.0, 0.0);
        for (size_t i = 0; i < count; ++i) {
            acc += avec[i] * cross;
            cross *= step;
        }
        out.values[j] = pref * std::exp(-0.5 * p.c * x2 * x2) * acc;
    }
    double prob = 0.0;
    for (size_t j = 0; j < count; ++j) prob += w[j] * std::norm(out.values[j]);
    detail::require_captured(out, "herald_by_projection");
    if (!(prob > 0.0))
        throw AccuracyError("herald_by_projection: projection has numerically zero weight");
    const double inv = 1.0 / std::sqrt(prob);
    for (cplx& vv : out.values) vv *= inv;
    return {std::move(out), prob};
}

// <f|g> on a shared grid.
inline cplx quad_overlap(const SampledWavefunction& f, const SampledWavefunction& g) {
    if (!same_grid(f.grid, g.grid))
        throw ValidationError("quad_overlap: wavefunctions live on different grids");
    const auto w = detail::quadrature_weights(f.grid.count, f.grid.dx);
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < w.size(); ++i) acc += w[i] * std::conj(f.values[i]) * g.values[i];
    return acc;
}

// Quadrature moments <x^2> and <p^2> of a sampled (zero-mean) wavefunction;
// derivatives by 4th-order central differences.
inline MomentPair moments_by_quadrature(const SampledWavefunction& f) {
    detail::require_captured(f, "moments_by_quadrature");
    const auto w = detail::quadrature_weights(f.grid.count, f.grid.dx);
    const size_t count = f.values.size();
    double nrm = 0.0, mean_x = 0.0, xx = 0.0;
    for (size_t i = 0; i < count; ++i) {
        const double x = f.grid.x(static_cast<int>(i));
        const double dens = w[i] * std::norm(f.values[i]);
        nrm += dens;
        mean_x += dens * x;
        xx += dens * x * x;
    }
    if (!(nrm > 0.0)) throw AccuracyError("moments_by_quadrature: zero norm");
    if (std::abs(mean_x / nrm) > 1e-8)
        throw AccuracyError("moments_by_quadrature: state has a nonzero position mean");
    std::vector<cplx> der(count, cplx(0.0, 0.0));
    const double inv12h = 1.0 / (12.0 * f.grid.dx);
    for (size_t i = 2; i + 2 < count; ++i)
        der[i] = (-f.values[i + 2] + 8.0 * f.values[i + 1] - 8.0 * f.values[i - 1] +
                  f.values[i - 2]) *
                 inv12h;
    double pp = 0.0, mean_p = 0.0;
    for (size_t i = 0; i < count; ++i) {
        pp += w[i] * std::norm(der[i]);
        mean_p += w[i] * (std::conj(f.values[i]) * der[i]).imag();
    }
    if (std::abs(mean_p / nrm) > 1e-8)
        throw AccuracyError("moments_by_quadrature: state has a nonzero momentum mean");
    return {xx / nrm, pp / nrm};
}

struct DensityMatrix {
    Eigen::MatrixXcd mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

// Zero-mean Gaussian reference as a dense truncated density matrix: squeezed
// thermal state with nu = sqrt(d_x d_p), r = ln(d_x/d_p)/4.
inline DensityMatrix gaussian_reference(const MomentPair& m, int dim) {
    if (!(m.d_x > 0.0) || !(m.d_p > 0.0))
        throw ValidationError("gaussian_reference: moments must be positive");
    if (m.d_x * m.d_p < 0.25 - 1e-12)
        throw InfeasibleError("gaussian_reference: covariance lies below the vacuum limit");
    if (dim < 8) throw ValidationError("gaussian_reference: dim must be at least 8");
    if (dim > 1024)
        throw SizeError("gaussian_reference: dim exceeds the supported maximum 1024");
    const double nu = std::sqrt(m.d_x * m.d_p);
    const double nbar = std::max(nu - 0.5, 0.0);
    const double q = nbar / (nbar + 1.0);
    if (std::pow(q, dim) > 1e-8)
        throw ValidationError("gaussian_reference: dim too small for this thermal occupancy");
    Eigen::VectorXd diag(dim);
    for (int k = 0; k < dim; ++k) diag(k) = std::pow(q, k) / (nbar + 1.0);
    const double rg = 0.25 * std::log(m.d_x / m.d_p);
    const Eigen::MatrixXcd S =
        squeeze_matrix(std::abs(rg), rg >= 0.0 ? 0.0 : std::numbers::pi, dim);
    DensityMatrix rho{S * diag.asDiagonal() * S.adjoint()};
    // construction-time invariants: Hermitian, near-unit trace, positive
    const double herm = (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12)
        throw AccuracyError("gaussian_reference: matrix lost Hermiticity");
    const double tr = rho.mat.trace().real();
    if (tr < 1.0 - 1e-8 || tr > 1.0 + 1e-12)
        throw AccuracyError("gaussian_reference: trace deficit exceeds tolerance");
    return rho;
}

// <v| rho |v> with clipping of rounding spill outside [0, 1].
inline double fidelity_by_matrix(const FockVector& v, const DensityMatrix& rho) {
    if (v.dim() != rho.dim())
        throw ValidationError("fidelity_by_matrix: state and matrix dimensions differ");
    Eigen::Map<const Eigen::VectorXcd> vec(v.amplitudes.data(), v.dim());
    const cplx raw = vec.dot(rho.mat * vec);  // dot conjugates its left argument
    if (std::abs(raw.imag()) > 1e-10)
        throw AccuracyError("fidelity_by_matrix: expectation has a non-real part");
    return detail::clip_unit_interval(raw.real(), 1e-10, "fidelity_by_matrix");
}

// Wigner value by direct quadrature of the defining integral. Evaluates on a
// grid node (x snaps within 1e-9) so psi(x +/- y) needs no interpolation.
inline double wigner_by_quadrature(const SampledWavefunction& f, double x, double p) {
    detail::require_captured(f, "wigner_by_quadrature");
    const int i0 = static_cast<int>(std::lround((x - f.grid.x0) / f.grid.dx));
    if (i0 < 0 || i0 >= f.grid.count)
        throw ValidationError("wigner_by_quadrature: x lies outside the grid");
    if (std::abs(f.grid.x(i0) - x) > 1e-9)
        throw ValidationError("wigner_by_quadrature: x must coincide with a grid node");
    if (std::abs(p) * 4.0 * f.grid.dx > std::numbers::pi)
        throw AccuracyError(
            "wigner_by_quadrature: momentum oscillation below 4 samples per wavelength");
    const int reach = std::min(i0, f.grid.count - 1 - i0);
    if (2 * reach + 1 < 8)
        throw AccuracyError("wigner_by_quadrature: probing too close to the grid edge");
    const auto w = detail::quadrature_weights(2 * reach + 1, f.grid.dx);
    cplx acc(0.0, 0.0);
    for (int j = -reach; j <= reach; ++j) {
        const double y = j * f.grid.dx;
        const cplx val = std::conj(f.values[static_cast<size_t>(i0 + j)]) *
                         f.values[static_cast<size_t>(i0 - j)];
        acc += w[static_cast<size_t>(j + reach)] * std::exp(cplx(0.0, 2.0 * p * y)) * val;
    }
    return acc.real() / std::numbers::pi;
}

}  // namespace heraldlab
