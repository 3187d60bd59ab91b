#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "heraldlab/errors.hpp"
#include "heraldlab/gaussian_core.hpp"
#include "heraldlab/heralding.hpp"
#include "heraldlab/nongauss.hpp"
#include "heraldlab/oracle.hpp"
#include "heraldlab/specfun.hpp"
#include "heraldlab/state_synth.hpp"

namespace heraldlab {

// reference_2f1 lets a test harness substitute the hypergeometric reference
// used by the cross-checks; the default is the library's own implementation,
// so a corrupted substitute must surface as failing lines.
struct SelftestOptions {
    bool full = false;
    std::function<double(double, double, double, double)> reference_2f1{};
};

struct SelftestLine {
    std::string name;
    bool pass;
    std::string detail;
};

struct SelftestReport {
    std::vector<SelftestLine> lines;
    double seconds = 0.0;

    bool all_pass() const {
        for (const auto& l : lines)
            if (!l.pass) return false;
        return true;
    }
};

namespace detail {

inline std::string fmt_dev(double dev, double tol) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max deviation %.3e (tol %.1e)", dev, tol);
    return buf;
}

// "" when dev <= tol, a diagnostic otherwise.
inline std::string gate(double dev, double tol) {
    return (dev <= tol) ? std::string() : fmt_dev(dev, tol);
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto ref2f1 = opt.reference_2f1
                            ? opt.reference_2f1
                            : [](double a, double b, double g, double t) {
                                  return terminating_2f1(a, b, g, t);
                              };
    SelftestReport rep;
    auto check = [&rep](const std::string& name, auto&& body) {
        SelftestLine line{name, false, {}};
        try {
            line.detail = body();
            line.pass = line.detail.empty();
            if (line.pass) line.detail = "ok";
        } catch (const std::exception& e) {
            line.pass = false;
            line.detail = std::string("exception: ") + e.what();
        }
        rep.lines.push_back(std::move(line));
    };

    check("specfun/recurrences", [&]() -> std::string {
        double dev = 0.0;
        // derivative identity dH_n/du = 2 n H_{n-1}, central differences
        const double h = 1e-6;
        for (int n : {3, 8, 15}) {
            for (cplx u : {cplx(0.7, 0.0), cplx(-1.2, 0.8), cplx(0.3, -1.1)}) {
                const cplx num = (hermite_eval(n, u + h) - hermite_eval(n, u - h)) / (2.0 * h);
                const cplx ana = 2.0 * static_cast<double>(n) * hermite_eval(n - 1, u);
                dev = std::max(dev, std::abs(num - ana) / std::max(1.0, std::abs(ana)));
            }
        }
        if (!detail::gate(dev, 1e-7).empty()) return detail::fmt_dev(dev, 1e-7);
        double lit = std::abs(hermite_eval(2, cplx(1.0, 0.0)) - cplx(2.0, 0.0));
        lit = std::max(lit, std::abs(hermite_eval(1, cplx(0.0, 1.0)) - cplx(0.0, 2.0)));
        lit = std::max(lit, std::abs(laguerre_eval(1, 2.0) - (-1.0)));
        lit = std::max(lit, std::abs(laguerre_eval(2, 1.0) - (-0.5)));
        const PolySeries h3 = hermite_series(3);  // 8u^3 - 12u
        lit = std::max(lit, std::abs(h3.coefficients[3] - 8.0));
        lit = std::max(lit, std::abs(h3.coefficients[1] + 12.0));
        return detail::gate(lit, 1e-12);
    });

    check("specfun/hypergeometric-reference", [&]() -> std::string {
        double dev = 0.0;
        for (int n = 0; n <= 8; ++n) {
            for (double t : {0.0, 0.25, 0.3, 0.5, 0.7, 1.0}) {
                const double lib = detail::herald_2f1(n, t);
                const double ref = ref2f1(0.5 * (1.0 - n), -0.5 * n, 1.0, t);
                dev = std::max(dev, std::abs(lib - ref) / std::max(1.0, std::abs(ref)));
            }
        }
        // frozen values of the heralding family
        dev = std::max(dev, std::abs(detail::herald_2f1(2, 0.25) - 1.125));
        dev = std::max(dev, std::abs(detail::herald_2f1(3, 0.5) - 1.75));
        return detail::gate(dev, 1e-12);
    });

    check("heralding/probability-reference", [&]() -> std::string {
        const TmegParams states[] = {
            validate_tmeg({2.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}),
            validate_tmeg({3.0, 0.0}, {2.0, 0.0}, {1.5, 0.0}),
            validate_tmeg({2.0, 0.4}, {1.0, -0.3}, {1.0, 0.2}),
            validate_tmeg({0.8, -0.2}, {0.5, 0.4}, {1.4, 0.0}),
        };
        double dev = 0.0;
        for (const TmegParams& s : states) {
            const double det = s.a.real() * s.c.real() - s.b.real() * s.b.real();
            const cplx R = detail::output_R(s);
            const cplx z = 1.0 - (s.a * s.a - 1.0) / (s.b * s.b) * R.real();
            for (int n = 0; n <= 6; ++n) {
                const double ref = 2.0 * std::pow(std::norm(s.b), n) * std::sqrt(det) /
                                   std::pow(std::norm(s.a + 1.0) * R.real(), n + 0.5) *
                                   ref2f1(0.5 * (1.0 - n), -0.5 * n, 1.0, std::norm(z));
                dev = std::max(dev, std::abs(probability_abc(s, n).p - ref));
            }
        }
        dev = std::max(dev,
                       std::abs(probability_abc(states[0], 1).p - 2.0 * std::pow(6.0, -1.5)));
        return detail::gate(dev, 1e-12);
    });

    check("heralding/parametrization-agreement", [&]() -> std::string {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double dev = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double re_a = 0.6 + 2.4 * U(rng);
            const double im_a = -0.8 + 1.6 * U(rng);
            const double re_c = 0.6 + 2.4 * U(rng);
            const double im_c = -0.8 + 1.6 * U(rng);
            const double rho = -0.85 + 1.7 * U(rng);
            const double im_b = -0.5 + 1.0 * U(rng);
            const cplx a(re_a, im_a), c(re_c, im_c);
            const cplx b(rho * std::sqrt(re_a * re_c), im_b);
            TmegParams s{};
            try {
                s = validate_tmeg(a, b, c);
            } catch (const ValidationError&) {
                continue;
            }
            const OutputParams zr = map_to_output(s);
            const int n = trial % 7;
            dev = std::max(dev,
                           std::abs(probability_abc(s, n).p - probability_za(zr.z, s.a, n).p));
        }
        return detail::gate(dev, 1e-10);
    });

    check("synthesis/superposition-normalization", [&]() -> std::string {
        double dev = 0.0;
        for (int n : {0, 1, 5, 12, 25}) {
            for (double z : {0.0, 0.5, 1.5, 3.0}) {
                const FockSuperposition s = superposition_coeffs(n, z);
                double sum = 0.0;
                for (double a : s.coeffs) sum += a * a;
                dev = std::max(dev, std::abs(sum - 1.0));
            }
        }
        return detail::gate(dev, 1e-12);
    });

    check("synthesis/squeeze-operator", [&]() -> std::string {
        const double r = 0.4, phi = 0.7;
        const int dim = 48;
        const Eigen::MatrixXcd S = squeeze_matrix(r, phi, dim);
        const double uni =
            (S.adjoint() * S - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (!detail::gate(uni, 1e-8).empty()) return "unitarity " + detail::fmt_dev(uni, 1e-8);
        // closed-form squeezed vacuum column
        const double th = std::tanh(r);
        double dev = 0.0;
        for (int m = 0; 2 * m < dim; ++m) {
            const cplx expect = std::exp(cplx(0.0, m * phi)) * std::pow(th, m) *
                                std::exp(0.5 * log_factorial(2 * m) - log_factorial(m) -
                                         m * std::log(2.0)) /
                                std::sqrt(std::cosh(r));
            dev = std::max(dev, std::abs(S(2 * m, 0) - expect));
        }
        for (int k = 1; k < dim; k += 2) dev = std::max(dev, std::abs(S(k, 0)));
        return detail::gate(dev, 1e-10);
    });

    check("synthesis/representation-equivalence", [&]() -> std::string {
        const TmegParams s = validate_tmeg({2.0, 0.0}, {1.0, 0.3}, {1.2, 0.0});
        const OutputParams zr = map_to_output(s);
        const UniformGrid grid = default_grid();
        const int n = 2;
        SampledWavefunction f{grid, std::vector<cplx>(static_cast<size_t>(grid.count))};
        SampledWavefunction g = f;
        for (int i = 0; i < grid.count; ++i) {
            f.values[static_cast<size_t>(i)] = psi_out_abc(s, n, grid.x(i));
            g.values[static_cast<size_t>(i)] = psi_out_zR(zr, n, grid.x(i));
        }
        const double dev_direct = std::abs(std::abs(quad_overlap(f, g)) - 1.0);
        if (!detail::gate(dev_direct, 1e-7).empty())
            return "closed forms: " + detail::fmt_dev(dev_direct, 1e-7);
        const FockVector v = output_fock_vector(zr, n);
        SampledWavefunction w{grid, std::vector<cplx>(static_cast<size_t>(grid.count))};
        for (int i = 0; i < grid.count; ++i)
            w.values[static_cast<size_t>(i)] = wavefunction_from_fock(v, grid.x(i));
        const double dev_fock = std::abs(std::abs(quad_overlap(g, w)) - 1.0);
        return detail::gate(dev_fock, 1e-6);
    });

    check("metrics/moment-identities", [&]() -> std::string {
        double dev = 0.0;
        for (int n = 0; n <= 12; ++n) {
            const MomentPair m = moments(n, 0.0);
            dev = std::max(dev, std::abs(m.d_x - (n + 0.5)));
            dev = std::max(dev, std::abs(m.d_p - (n + 0.5)));
        }
        const MomentPair m21 = moments(2, 1.0);
        dev = std::max(dev, std::abs(m21.d_x - 2.5));
        dev = std::max(dev, std::abs(m21.d_p - 7.0 / 6.0));
        // gap identity against the reference hypergeometric
        const int n = 4;
        const double z = 0.8;
        const MomentPair m = moments(n, z);
        const double gap_ref = n * (n - 1.0) * z *
                               ref2f1(0.5 * (3.0 - n), 1.0 - 0.5 * n, 2.0, z * z) /
                               ref2f1(0.5 * (1.0 - n), -0.5 * n, 1.0, z * z);
        dev = std::max(dev, std::abs((m.d_x - m.d_p) - gap_ref));
        return detail::gate(dev, 1e-12);
    });

    check("metrics/fidelity-consistency", [&]() -> std::string {
        double dev = std::abs(fidelity_gaussian(2, 0.0) - 4.0 / 27.0);
        dev = std::max(dev, std::abs(ng_measure_max(2) - (1.0 - std::sqrt(4.0 / 27.0))));
        dev = std::max(dev, std::abs(detail::gauss_overlap_element(1, 1, 1.5, 1.5) - 0.25));
        for (double z : {0.5, 2.0})
            dev = std::max(dev, std::abs(fidelity_gaussian(1, z) - 0.25));
        for (int n : {1, 2, 3, 6})
            dev = std::max(dev, std::abs(ng_measure(n, 0.0) - ng_measure_max(n)));
        return detail::gate(dev, 1e-12);
    });

    check("metrics/wigner-reference", [&]() -> std::string {
        FockVector vac{{cplx(1.0, 0.0)}};
        double dev0 = std::abs(wigner_eval(vac, 0.0, 0.0) - 1.0 / std::numbers::pi);
        if (!detail::gate(dev0, 1e-10).empty()) return "vacuum peak: " + detail::fmt_dev(dev0, 1e-10);
        FockVector one{{cplx(0.0, 0.0), cplx(1.0, 0.0)}};
        const double wn1 = wigner_negativity(one, 1e-4);
        // integral of |W_1| is 4 e^{-1/2} - 1; negativity subtracts the unit total mass
        const double expect1 = 4.0 * std::exp(-0.5) - 2.0;
        double dev = std::abs(wn1 - expect1);
        FockVector two{{cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)}};
        const double wn2 = wigner_negativity(two, 1e-4);
        // piecewise-exact integral of |L_2(2u)| e^{-u}
        auto anti = [](double u) { return -std::exp(-u) * (2.0 * u * u + 1.0); };
        const double um = 1.0 - std::sqrt(0.5), up = 1.0 + std::sqrt(0.5);
        const double expect2 = -2.0 * (anti(up) - anti(um));
        dev = std::max(dev, std::abs(wn2 - expect2));
        const WignerGrid grid = wigner_grid(one, -7.0, 7.0, -7.0, 7.0, 241, 241);
        dev = std::max(dev, std::abs(grid.riemann_mass() - 1.0) * 0.1);
        return detail::gate(dev, 5e-4);
    });

    if (opt.full) {
        check("oracle/herald-projection", [&]() -> std::string {
            const TmegParams states[] = {
                validate_tmeg({2.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}),
                validate_tmeg({1.6, 0.3}, {0.9, -0.4}, {1.3, 0.1}),
                validate_tmeg({0.9, 0.0}, {-0.6, 0.2}, {1.1, -0.3}),
            };
            const UniformGrid grid = default_grid();
            double dev_p = 0.0, dev_o = 0.0;
            for (const TmegParams& s : states) {
                for (int n : {0, 1, 3}) {
                    const auto [wf, prob] = herald_by_projection(s, n, grid);
                    dev_p = std::max(dev_p, std::abs(prob - probability_abc(s, n).p));
                    SampledWavefunction ref{grid,
                                            std::vector<cplx>(static_cast<size_t>(grid.count))};
                    for (int i = 0; i < grid.count; ++i)
                        ref.values[static_cast<size_t>(i)] = psi_out_abc(s, n, grid.x(i));
                    dev_o = std::max(dev_o, std::abs(std::abs(quad_overlap(wf, ref)) - 1.0));
                }
            }
            const double dev = std::max(dev_p, dev_o);
            return detail::gate(dev, 1e-6);
        });

        check("oracle/moments-by-quadrature", [&]() -> std::string {
            const UniformGrid grid = default_grid();
            double dev = 0.0;
            for (const auto& [n, z] : std::vector<std::pair<int, double>>{
                     {2, 1.0}, {3, 0.7}, {5, 0.3}, {4, 2.0}}) {
                const FockVector v = core_fock_vector(n, z);
                SampledWavefunction f{grid, std::vector<cplx>(static_cast<size_t>(grid.count))};
                for (int i = 0; i < grid.count; ++i)
                    f.values[static_cast<size_t>(i)] = wavefunction_from_fock(v, grid.x(i));
                const MomentPair q = moments_by_quadrature(f);
                const MomentPair m = moments(n, z);
                dev = std::max(dev, std::abs(q.d_x - m.d_x));
                dev = std::max(dev, std::abs(q.d_p - m.d_p));
            }
            return detail::gate(dev, 1e-7);
        });

        check("oracle/gaussian-reference", [&]() -> std::string {
            double dev = 0.0;
            {
                const DensityMatrix vac = gaussian_reference({0.5, 0.5}, 32);
                dev = std::max(dev, std::abs(vac.mat(0, 0).real() - 1.0));
            }
            {
                const DensityMatrix th = gaussian_reference({1.5, 1.5}, 96);
                dev = std::max(dev, std::abs(th.mat(1, 1).real() - 0.25));
                const double purity = (th.mat * th.mat).trace().real();
                dev = std::max(dev, std::abs(purity - 1.0 / 3.0));
            }
            {
                const MomentPair m{2.0, 0.8};
                const DensityMatrix sq = gaussian_reference(m, 128);
                const double nu = std::sqrt(m.d_x * m.d_p);
                const double purity = (sq.mat * sq.mat).trace().real();
                dev = std::max(dev, std::abs(purity - 1.0 / (2.0 * nu)));
            }
            if (!detail::gate(dev, 1e-8).empty()) return detail::fmt_dev(dev, 1e-8);
            // formula fidelity against the matrix route
            double dev2 = 0.0;
            for (const auto& [n, z] : std::vector<std::pair<int, double>>{{3, 0.7}, {2, 1.5}}) {
                const int dim = 128;
                FockVector v = core_fock_vector(n, z);
                v.amplitudes.resize(static_cast<size_t>(dim), cplx(0.0, 0.0));
                const double fm = fidelity_by_matrix(v, gaussian_reference(moments(n, z), dim));
                dev2 = std::max(dev2, std::abs(fm - fidelity_gaussian(n, z)));
            }
            return detail::gate(dev2, 1e-6);
        });

        check("metrics/negativity-dressing-invariance", [&]() -> std::string {
            double dev = 0.0;
            {
                const FockVector bare = core_fock_vector(2, 1.0);
                const double wn_bare = wigner_negativity(bare, 1e-4);
                const FockVector dressed = output_fock_vector(
                    make_output_params(cplx(-1.0, 0.0), cplx(0.8, 0.3), cplx(0.0, 0.0)), 2);
                dev = std::max(dev, std::abs(wigner_negativity(dressed, 2e-4) - wn_bare));
            }
            {
                FockVector fock3{std::vector<cplx>(4, cplx(0.0, 0.0))};
                fock3.amplitudes[3] = 1.0;
                const FockVector out = output_fock_vector(
                    make_output_params(cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)), 3);
                dev = std::max(dev,
                               std::abs(wigner_negativity(out, 2e-4) - wigner_negativity(fock3, 2e-4)));
            }
            return detail::gate(dev, 2e-3);
        });

        check("heralding/optimizer-ring", [&]() -> std::string {
            const OptimizeResult opt1 = optimize_probability(cplx(0.0, 0.0), 1);
            const RingSpec ring = ring_locus(1);
            const double dist =
                std::abs(std::abs(opt1.a_best - cplx(ring.center_re, 0.0)) - ring.radius);
            double dev = std::abs(opt1.p_best - 0.25) * 1e2;  // 1e-6 tolerance scaled to the gate
            dev = std::max(dev, dist);
            if (!detail::gate(dev, 1e-4).empty()) return detail::fmt_dev(dev, 1e-4);
            double pmin = 1.0, pmax = 0.0;
            for (int k = 0; k < 8; ++k) {
                const double th = 2.0 * std::numbers::pi * k / 8.0;
                const cplx a = cplx(ring.center_re, 0.0) + ring.radius * std::polar(1.0, th);
                const double p = probability_za(cplx(0.0, 0.0), a, 1).p;
                pmin = std::min(pmin, p);
                pmax = std::max(pmax, p);
            }
            return detail::gate(pmax - pmin, 1e-9);
        });

        check("oracle/wigner-quadrature-agreement", [&]() -> std::string {
            const OutputParams zr =
                make_output_params(cplx(-1.0, 0.0), cplx(2.0 / 3.0, 0.0), cplx(2.0, 0.0));
            const FockVector v = output_fock_vector(zr, 1);
            const UniformGrid grid = default_grid();
            SampledWavefunction f{grid, std::vector<cplx>(static_cast<size_t>(grid.count))};
            for (int i = 0; i < grid.count; ++i)
                f.values[static_cast<size_t>(i)] = wavefunction_from_fock(v, grid.x(i));
            double dev = 0.0;
            for (int ix : {1598, 2048, 2460}) {
                for (double p : {-0.9, 0.0, 0.7}) {
                    const double x = grid.x(ix);
                    dev = std::max(dev,
                                   std::abs(wigner_eval(v, x, p) - wigner_by_quadrature(f, x, p)));
                }
            }
            return detail::gate(dev, 1e-8);
        });
    }

    rep.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return rep;
}

}  // namespace heraldlab
