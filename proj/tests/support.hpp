#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "nlslab/catalog.hpp"
#include "nlslab/grid_field.hpp"
#include "nlslab/model.hpp"

namespace nlslab::testing {

/// max over |x| < frac·L of |i u_t + (linear) u - N(u) u|, with u_t by the
/// five-point centered difference of step dt.
inline double pde_residual(const std::function<Field1D(double)>& at, double t, const ModelSpec& m,
                           double dt = 1e-5, double frac = 0.8) {
    const Field1D u = at(t);
    const Field1D up = at(t + dt);
    const Field1D um = at(t - dt);
    const Field1D upp = at(t + 2.0 * dt);
    const Field1D umm = at(t - 2.0 * dt);
    const auto& g = u.grid();
    const auto uxx = spectral_derivative(u.values(), g, 2);
    CplxVec uxxxx;
    if (m.family == Family::Biharmonic) uxxxx = spectral_derivative(u.values(), g, 4);
    double worst = 0.0;
    for (int j = 0; j < g.points(); ++j) {
        if (std::abs(g.x(j)) > frac * g.length()) continue;
        const cplx ut = (8.0 * (up[j] - um[j]) - (upp[j] - umm[j])) / (12.0 * dt);
        const double s = std::norm(u[j]);
        cplx nl;
        cplx lin = uxx[j];
        switch (m.family) {
        case Family::PowerNLS: nl = m.epsilon * std::pow(s, m.p / 2.0) * u[j]; break;
        case Family::GrossPitaevskii: nl = m.epsilon * (std::pow(s, m.p / 2.0) - 1.0) * u[j]; break;
        case Family::LogNLS: nl = m.epsilon * std::log(s) * u[j]; break;
        case Family::CubicQuintic: nl = (m.lambda1 * s - m.lambda2 * s * s) * u[j]; break;
        case Family::Biharmonic:
            lin = m.mu * uxx[j] - uxxxx[j];
            nl = m.epsilon * std::pow(s, m.p / 2.0) * u[j];
            break;
        default: break;
        }
        worst = std::max(worst, std::abs(cplx{0.0, 1.0} * ut + lin - nl));
    }
    return worst;
}

inline std::function<Field1D(double)> sampler(const ExactSolution& s, const Grid1D& g) {
    return [s, g](double t) { return eval_exact(s, t, g); };
}

inline std::function<Field1D(double)> stokes_sampler(const ExactSolution& s, const Grid1D& g) {
    return [s, g](double t) { return stokes_frame(eval_exact(s, t, g)); };
}

/// Libration period of r'' = -U'(r), U = 1/(2r²) + 2 ln r, by direct
/// quadrature of dt = dr / sqrt(2(E - U)) between the turning points.
inline double hamiltonian_period(double r0, double v0) {
    auto U = [](double r) { return 0.5 / (r * r) + 2.0 * std::log(r); };
    const double E = 0.5 * v0 * v0 + U(r0);
    const double rs = 1.0 / std::sqrt(2.0);
    auto gap = [&](double r) { return E - U(r); };
    boost::math::tools::eps_tolerance<double> tol(60);
    std::uintmax_t it = 200;
    auto [a1, b1] = boost::math::tools::toms748_solve(gap, 1e-3, rs, tol, it);
    it = 200;
    auto [a2, b2] = boost::math::tools::toms748_solve(gap, rs, 50.0, tol, it);
    const double r1 = 0.5 * (a1 + b1), r2 = 0.5 * (a2 + b2);
    boost::math::quadrature::tanh_sinh<double> ts;
    // substitution r = c + h sin θ removes the inverse square-root endpoints
    const double c = 0.5 * (r1 + r2), h = 0.5 * (r2 - r1);
    auto integrand = [&](double th) {
        const double r = c + h * std::sin(th);
        const double g = gap(r);
        if (g <= 0.0) return 0.0;
        return h * std::cos(th) / std::sqrt(2.0 * g);
    };
    return 2.0 * ts.integrate(integrand, -std::numbers::pi / 2, std::numbers::pi / 2);
}

} // namespace nlslab::testing
