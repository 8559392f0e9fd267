#pragma once

// Ground states of -ΔQ + ωQ - Q^{p+1} = 0: the 1-D closed form, a
// Petviashvili fixed-point solver (spectral in 1-D, radial finite
// differences in 2-D), and a small JSON-backed threshold cache.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "fft.hpp"
#include "functionals.hpp"
#include "grid_field.hpp"
#include "virial_identities.hpp"

namespace nlslab {

struct GroundStateResult {
    double p = 2.0;
    int n = 1;
    double omega_eff = 1.0;
    double residual = 0.0; // sup |-ΔQ + ωQ - Q^{p+1}|
    double l2_norm = 0.0;  // ‖Q‖_{L²} (unsquared)
    int iterations = 0;
    RealVec coords;        // x (n = 1) or cell-centred radii (n = 2)
    RealVec values;
    std::optional<Field1D> profile; // n = 1 only
    ProfileNorms norms;
};

/// s_c = n/2 - 2/p.
inline double critical_regularity(double p, int n) { return n / 2.0 - 2.0 / p; }

namespace detail {

inline GroundStateResult finish_1d(const Grid1D& grid, RealVec q, double p, double omega, int iterations) {
    GroundStateResult r;
    r.p = p;
    r.n = 1;
    r.omega_eff = omega;
    r.iterations = iterations;
    CplxVec c(q.begin(), q.end());
    const auto qxx = spectral_derivative(c, grid, 2);
    double res = 0.0;
    for (int j = 0; j < grid.points(); ++j)
        res = std::max(res, std::abs(-qxx[j].real() + omega * q[j] - std::pow(std::abs(q[j]), p) * q[j]));
    r.residual = res;
    r.coords = grid.coordinates();
    r.values = std::move(q);
    r.profile.emplace(grid, std::move(c), BackgroundKind::Zero, 0.0);
    r.norms = profile_norms(*r.profile, p);
    r.norms.residual = res;
    r.l2_norm = std::sqrt(r.norms.mass);
    return r;
}

} // namespace detail

/// Q_ω(x) = ω^{1/p} ((p+2)/2)^{1/p} sech^{2/p}((p/2)√ω x).
inline GroundStateResult ground_state_1d_exact(double p, double omega, const Grid1D& grid) {
    if (!(p > 0.0) || !(omega > 0.0)) throw ParameterError("ground state requires p > 0 and omega > 0");
    const double amp = std::pow(omega * (p + 2.0) / 2.0, 1.0 / p);
    RealVec q(grid.points());
    for (int j = 0; j < grid.points(); ++j) {
        const double y = 0.5 * p * std::sqrt(omega) * std::abs(grid.x(j));
        // sech^{2/p}(y) = (2e^{-y}/(1 + e^{-2y}))^{2/p}
        q[j] = amp * std::pow(2.0 * std::exp(-y) / (1.0 + std::exp(-2.0 * y)), 2.0 / p);
    }
    return detail::finish_1d(grid, std::move(q), p, omega, 0);
}

struct SolverOptions {
    double tol = 1e-9;
    int max_iterations = 5000;
};

namespace detail {

/// Petviashvili iteration Q ← M^γ A⁻¹ Q^{p+1}, M = ⟨Q, AQ⟩ / ⟨Q, Q^{p+1}⟩,
/// γ = (p+1)/p, on a 1-D periodic grid with A = -∂ₓ² + ω.
inline GroundStateResult petviashvili_1d(double p, double omega, const Grid1D& grid, const SolverOptions& opt) {
    const int n = grid.points();
    const auto k = grid.wavenumbers();
    RealVec sym(n);
    for (int j = 0; j < n; ++j) sym[j] = k[j] * k[j] + omega;
    CplxVec q(n);
    for (int j = 0; j < n; ++j) q[j] = std::exp(-grid.x(j) * grid.x(j));
    const double gamma = (p + 1.0) / p;
    double residual = INFINITY;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        CplxVec nl(n);
        for (int j = 0; j < n; ++j) nl[j] = std::pow(std::abs(q[j]), p) * q[j].real();
        auto qh = fft::forward(q);
        auto nh = fft::forward(nl);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            num += sym[j] * std::norm(qh[j]);
            den += std::real(std::conj(qh[j]) * nh[j]);
        }
        if (!(den > 0.0)) throw NumericalError("ground-state iteration lost positivity");
        // residual of the current iterate
        CplxVec aq(n);
        for (int j = 0; j < n; ++j) aq[j] = sym[j] * qh[j];
        aq = fft::inverse(aq);
        residual = 0.0;
        for (int j = 0; j < n; ++j) residual = std::max(residual, std::abs(aq[j].real() - nl[j].real()));
        if (residual < opt.tol) {
            RealVec out(n);
            for (int j = 0; j < n; ++j) out[j] = q[j].real();
            return finish_1d(grid, std::move(out), p, omega, it);
        }
        const double scale = std::pow(num / den, gamma);
        for (int j = 0; j < n; ++j) nh[j] *= scale / sym[j];
        q = fft::inverse(nh);
        for (auto& z : q) z = z.real();
    }
    throw NumericalError("ground-state iteration did not converge (residual " + std::to_string(residual) + ")");
}

/// Same iteration for radial profiles in dimension n on cell centres
/// r_i = (i + ½)h of [0, R]: second-order finite differences, regularity
/// (zero flux) at r = 0 and Q = 0 beyond R, tridiagonal solves.
inline GroundStateResult petviashvili_radial(double p, int dim, double omega, double R, int cells,
                                             const SolverOptions& opt) {
    const double h = R / cells;
    RealVec r(cells), wface(cells + 1), wcell(cells);
    for (int i = 0; i < cells; ++i) {
        r[i] = (i + 0.5) * h;
        wcell[i] = std::pow(r[i], dim - 1);
    }
    for (int i = 0; i <= cells; ++i) wface[i] = std::pow(i * h, dim - 1);
    // A Q = -(1/w_i h²)[w_{i+½}(Q_{i+1} - Q_i) - w_{i-½}(Q_i - Q_{i-1})] + ω Q_i
    RealVec lower(cells, 0.0), diag(cells), upper(cells, 0.0);
    for (int i = 0; i < cells; ++i) {
        const double a = wface[i] / (wcell[i] * h * h);
        const double b = wface[i + 1] / (wcell[i] * h * h);
        diag[i] = a + b + omega;
        if (i > 0) lower[i] = -a;
        if (i + 1 < cells) upper[i] = -b;
    }
    auto apply = [&](const RealVec& q) {
        RealVec out(cells);
        for (int i = 0; i < cells; ++i) {
            out[i] = diag[i] * q[i];
            if (i > 0) out[i] += lower[i] * q[i - 1];
            if (i + 1 < cells) out[i] += upper[i] * q[i + 1];
        }
        return out;
    };
    auto solve = [&](RealVec rhs) {
        RealVec c(cells), d(cells);
        c[0] = upper[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for (int i = 1; i < cells; ++i) {
            const double m = diag[i] - lower[i] * c[i - 1];
            c[i] = upper[i] / m;
            d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
        }
        for (int i = cells - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
        return d;
    };
    RealVec q(cells);
    for (int i = 0; i < cells; ++i) q[i] = std::exp(-r[i] * r[i]);
    const double gamma = (p + 1.0) / p;
    double residual = INFINITY;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        RealVec nl(cells);
        for (int i = 0; i < cells; ++i) nl[i] = std::pow(std::abs(q[i]), p) * q[i];
        const RealVec aq = apply(q);
        double num = 0.0, den = 0.0;
        residual = 0.0;
        for (int i = 0; i < cells; ++i) {
            num += wcell[i] * q[i] * aq[i];
            den += wcell[i] * q[i] * nl[i];
            residual = std::max(residual, std::abs(aq[i] - nl[i]));
        }
        if (!(den > 0.0)) throw NumericalError("ground-state iteration lost positivity");
        if (residual < opt.tol) {
            GroundStateResult out;
            out.p = p;
            out.n = dim;
            out.omega_eff = omega;
            out.iterations = it;
            out.residual = residual;
            // surface measure of the unit sphere: 2 (n = 1), 2π (n = 2)
            const double surface = dim == 1 ? 2.0 : 2.0 * std::numbers::pi;
            double m = 0.0, lp = 0.0, grad = 0.0;
            for (int i = 0; i < cells; ++i) {
                m += wcell[i] * q[i] * q[i];
                lp += wcell[i] * std::pow(std::abs(q[i]), p + 2.0);
                const double next = i + 1 < cells ? q[i + 1] : 0.0;
                grad += wface[i + 1] * (next - q[i]) * (next - q[i]) / (h * h);
            }
            out.norms = {surface * grad * h, surface * m * h, surface * lp * h, residual};
            out.l2_norm = std::sqrt(out.norms.mass);
            out.coords = r;
            out.values = q;
            return out;
        }
        const double scale = std::pow(num / den, gamma);
        q = solve(nl);
        for (auto& v : q) v *= scale;
    }
    throw NumericalError("ground-state iteration did not converge (residual " + std::to_string(residual) + ")");
}

} // namespace detail

/// Iterative ground state. n = 1 works on the periodic grid; n = 2 reads the
/// grid as a radial mesh of grid.points() cells on [0, grid.length()], solves
/// again on twice as many cells, returns the fine profile and Richardson
/// extrapolates the norms.
inline GroundStateResult ground_state_imag_time(double p, int n, double omega_eff, const Grid1D& grid,
                                                double tol = 1e-9) {
    if (!(p > 0.0)) throw ParameterError("ground state requires p > 0");
    if (!(omega_eff > 0.0)) throw ParameterError("ground state requires omega_eff > 0");
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    if (n == 2 && !(p < energy_critical_power(n))) throw ParameterError("p must be below the energy-critical power");
    const SolverOptions opt{tol, 5000};
    if (n == 1) return detail::petviashvili_1d(p, omega_eff, grid, opt);
    if (n == 2) {
        const auto coarse = detail::petviashvili_radial(p, 2, omega_eff, grid.length(), grid.points(), opt);
        auto fine = detail::petviashvili_radial(p, 2, omega_eff, grid.length(), 2 * grid.points(), opt);
        auto extrapolate = [](double c, double f) { return (4.0 * f - c) / 3.0; };
        fine.norms.grad_sq = extrapolate(coarse.norms.grad_sq, fine.norms.grad_sq);
        fine.norms.mass = extrapolate(coarse.norms.mass, fine.norms.mass);
        fine.norms.lp = extrapolate(coarse.norms.lp, fine.norms.lp);
        fine.norms.residual = fine.residual = std::max(coarse.residual, fine.residual);
        fine.l2_norm = std::sqrt(fine.norms.mass);
        return fine;
    }
    throw ParameterError("ground states are computed for n = 1 and n = 2 only");
}

/// The supercritical comparison profile Q* at ω = 1 - s_c.
inline GroundStateResult ground_state_star(double p, int n, const Grid1D& grid, double tol = 1e-9) {
    return ground_state_imag_time(p, n, 1.0 - critical_regularity(p, n), grid, tol);
}

// --- thresholds -------------------------------------------------------------------

/// Norms of a ground state needed by the classifier. energy is the focusing
/// energy ‖∇Q‖² - 2/(p+2)‖Q‖^{p+2}.
struct Thresholds {
    double p = 0.0;
    int n = 1;
    double omega_eff = 1.0;
    double mass = 0.0;     // ‖Q‖²
    double grad_sq = 0.0;  // ‖∇Q‖²
    double lp = 0.0;       // ‖Q‖^{p+2}_{p+2}
    double energy = 0.0;
    double residual = 0.0;
    int N = 0;
    double L = 0.0;

    double l2_norm() const { return std::sqrt(mass); }
    double grad_norm() const { return std::sqrt(grad_sq); }
};

inline Thresholds thresholds_of(const GroundStateResult& g, const Grid1D& grid) {
    Thresholds t;
    t.p = g.p;
    t.n = g.n;
    t.omega_eff = g.omega_eff;
    t.mass = g.norms.mass;
    t.grad_sq = g.norms.grad_sq;
    t.lp = g.norms.lp;
    t.energy = g.norms.grad_sq - 2.0 / (g.p + 2.0) * g.norms.lp;
    t.residual = g.residual;
    t.N = grid.points();
    t.L = grid.length();
    return t;
}

inline void to_json(nlohmann::json& j, const Thresholds& t) {
    j = {{"p", t.p},       {"n", t.n},           {"omega_eff", t.omega_eff}, {"mass", t.mass},
         {"grad_sq", t.grad_sq}, {"lp", t.lp},   {"energy", t.energy},       {"residual", t.residual},
         {"N", t.N},       {"L", t.L}};
}

inline void from_json(const nlohmann::json& j, Thresholds& t) {
    j.at("p").get_to(t.p);
    j.at("n").get_to(t.n);
    j.at("omega_eff").get_to(t.omega_eff);
    j.at("mass").get_to(t.mass);
    j.at("grad_sq").get_to(t.grad_sq);
    j.at("lp").get_to(t.lp);
    j.at("energy").get_to(t.energy);
    j.at("residual").get_to(t.residual);
    j.at("N").get_to(t.N);
    j.at("L").get_to(t.L);
}

/// Thresholds keyed by (p, n, ω_eff, N, L). Read-only once populated.
class ThresholdCache {
public:
    using Key = std::tuple<double, int, double, int, double>;

    void insert(const Thresholds& t) { entries_[{t.p, t.n, t.omega_eff, t.N, t.L}] = t; }

    /// Any entry for (p, n) at ω_eff; the finest grid wins.
    std::optional<Thresholds> find(double p, int n, double omega_eff) const {
        std::optional<Thresholds> best;
        for (const auto& [k, t] : entries_)
            if (std::abs(t.p - p) < 1e-12 && t.n == n && std::abs(t.omega_eff - omega_eff) < 1e-12)
                if (!best || t.N > best->N) best = t;
        return best;
    }

    /// Q* entry for the mass-supercritical comparison.
    std::optional<Thresholds> find_star(double p, int n) const {
        return find(p, n, 1.0 - critical_regularity(p, n));
    }

    std::size_t size() const { return entries_.size(); }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [k, t] : entries_) arr.push_back(t);
        return {{"thresholds", arr}};
    }

    static ThresholdCache from_json(const nlohmann::json& j) {
        ThresholdCache c;
        for (const auto& e : j.at("thresholds")) c.insert(e.get<Thresholds>());
        return c;
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw Error("cannot write threshold cache '" + path + "'");
        os << to_json().dump(2) << '\n';
    }

    static ThresholdCache load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw Error("cannot read threshold cache '" + path + "'");
        try {
            return from_json(nlohmann::json::parse(is));
        } catch (const nlohmann::json::exception& e) {
            throw Error("malformed threshold cache '" + path + "': " + e.what());
        }
    }

private:
    std::map<Key, Thresholds> entries_;
};

inline void write_profile_csv(const std::string& path, const GroundStateResult& g) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path + "'");
    os << (g.n == 1 ? "x,Q\n" : "r,Q\n");
    char buf[64];
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.coords[i], g.values[i]);
        os << buf;
    }
}

} // namespace nlslab
