#pragma once

// Conserved quantities and virial functionals evaluated by quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "grid_field.hpp"
#include "model.hpp"

namespace nlslab {

/// Every functional the lab reports. Entries are populated when they apply
/// to the field's background and model family.
struct InvariantReport {
    double time = 0.0;
    std::optional<double> m;        // ∫|u|²
    std::optional<double> e;        // family energy
    std::optional<double> p;        // Im ∫ u_x ū
    std::optional<double> m_nz;     // ∫(|v|² - 1)
    std::optional<double> e_nz;     // ∫(|v_x|² - ½(|v|² - 1)²)
    std::optional<double> e_gp;     // ∫(|v_x|² - 2ε/(p+2) (1 - |v|^{p+2}))
    std::optional<double> p_nz;     // Im ∫ (v̄ - 1) v_x
    std::optional<double> p_tilde;  // Im ∫ x ū u_x  (Stokes: Im ∫ x (v̄ - 1) v_x)
    std::optional<double> variance; // ∫ x² |u|²
    std::optional<double> dnls_h;   // -Im ∫ ū u_x + ε/2 ∫|u|⁴
    std::optional<double> psi;      // Im ∫ cosh(√ω x) z
    std::vector<std::string> warnings;

    static constexpr std::array<std::string_view, 12> keys{"m",       "e",        "p",      "m_nz",
                                                           "e_nz",    "e_gp",     "p_nz",   "p_tilde",
                                                           "variance", "dnls_h",  "psi",    "t"};

    std::optional<double> get(std::string_view key) const {
        if (key == "m") return m;
        if (key == "e") return e;
        if (key == "p") return p;
        if (key == "m_nz") return m_nz;
        if (key == "e_nz") return e_nz;
        if (key == "e_gp") return e_gp;
        if (key == "p_nz") return p_nz;
        if (key == "p_tilde") return p_tilde;
        if (key == "variance") return variance;
        if (key == "dnls_h") return dnls_h;
        if (key == "psi") return psi;
        if (key == "t") return time;
        throw ParameterError("unknown invariant key '" + std::string(key) + "'");
    }
};

namespace detail {

inline RealVec abs_pow(std::span<const cplx> u, double q) {
    RealVec out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = std::pow(std::abs(u[j]), q);
    return out;
}

inline double integrate(const Grid1D& g, auto&& fn) {
    RealVec s(g.points());
    for (int j = 0; j < g.points(); ++j) s[j] = fn(j);
    return quadrature(s, g);
}

inline void require_background(const Field1D& f, BackgroundKind want, const char* what) {
    if (f.background() != want)
        throw ParameterError(std::string(what) + ": background mismatch (field is " + to_string(f.background()) +
                             ", expected " + to_string(want) + ")");
}

} // namespace detail

// --- elementary norms -------------------------------------------------------

inline double mass(const Field1D& f) {
    return detail::integrate(f.grid(), [&](int j) { return std::norm(f[j]); });
}

/// ∫|u|^q.
inline double lp_power(const Field1D& f, double q) {
    return detail::integrate(f.grid(), [&](int j) { return std::pow(std::abs(f[j]), q); });
}

inline double gradient_sq(const Field1D& f) {
    const auto ux = spectral_derivative(f.values(), f.grid(), 1);
    return detail::integrate(f.grid(), [&](int j) { return std::norm(ux[j]); });
}

inline double laplacian_sq(const Field1D& f) {
    const auto uxx = spectral_derivative(f.values(), f.grid(), 2);
    return detail::integrate(f.grid(), [&](int j) { return std::norm(uxx[j]); });
}

/// Im ∫ u_x ū.
inline double momentum(const Field1D& f) {
    const auto ux = spectral_derivative(f.values(), f.grid(), 1);
    return detail::integrate(f.grid(), [&](int j) { return std::imag(ux[j] * std::conj(f[j])); });
}

/// Family energy for zero-background fields.
inline double energy(const Field1D& f, const ModelSpec& model) {
    const double eps = model.epsilon;
    const double p = model.p;
    switch (model.family) {
    case Family::PowerNLS:
        return gradient_sq(f) + 2.0 * eps / (p + 2.0) * lp_power(f, p + 2.0);
    case Family::CubicQuintic:
        return gradient_sq(f) + 0.5 * model.lambda1 * lp_power(f, 4.0) - model.lambda2 / 3.0 * lp_power(f, 6.0);
    case Family::Biharmonic:
        return laplacian_sq(f) + model.mu * gradient_sq(f) + 2.0 * eps / (p + 2.0) * lp_power(f, p + 2.0);
    case Family::LogNLS:
        // Hamiltonian of i u_t = -Δu + ε log(|u|²) u
        return gradient_sq(f) + eps * detail::integrate(f.grid(), [&](int j) {
                   const double s = std::norm(f[j]);
                   return s > 0.0 ? s * (std::log(s) - 1.0) : 0.0;
               });
    case Family::DerivativeNLS:
    case Family::GrossPitaevskii:
        break;
    }
    throw ParameterError(std::string("no zero-background energy for family ") + to_string(model.family));
}

/// H[u] = -Im ∫ ū u_x + ε/2 ∫|u|⁴.
inline double dnls_hamiltonian(const Field1D& f, int epsilon) {
    const auto ux = spectral_derivative(f.values(), f.grid(), 1);
    const double im = detail::integrate(f.grid(), [&](int j) { return std::imag(std::conj(f[j]) * ux[j]); });
    return -im + 0.5 * epsilon * lp_power(f, 4.0);
}

// --- virials ------------------------------------------------------------------

inline constexpr double kVirialBoundaryTol = 1e-8;
inline constexpr double kVarianceBoundaryTol = 1e-12;

namespace detail {

inline double boundary_max(const Grid1D& g, auto&& fn) {
    return std::max(std::abs(fn(0)), std::abs(fn(g.points() - 1)));
}

} // namespace detail

/// Im ∫ x ū u_x.
inline double virial_P_tilde(const Field1D& f) {
    detail::require_background(f, BackgroundKind::Zero, "virial_P_tilde");
    const auto& g = f.grid();
    const auto ux = spectral_derivative(f.values(), g, 1);
    const double edge = detail::boundary_max(g, [&](int j) { return g.x(j) * std::abs(f[j]) * std::abs(ux[j]); });
    if (edge > kVirialBoundaryTol) throw NumericalError("virial weight unbounded");
    return detail::integrate(g, [&](int j) { return g.x(j) * std::imag(std::conj(f[j]) * ux[j]); });
}

/// Im ∫ x (v̄ - 1) v_x on a Stokes field in the co-moving frame.
inline double virial_P_nz(const Field1D& v) {
    detail::require_background(v, BackgroundKind::Stokes, "virial_P_nz");
    const auto& g = v.grid();
    const auto vx = spectral_derivative(v.values(), g, 1);
    const double edge =
        detail::boundary_max(g, [&](int j) { return g.x(j) * std::abs(v[j] - 1.0) * std::abs(vx[j]); });
    if (edge > kVirialBoundaryTol) throw NumericalError("virial weight unbounded");
    return detail::integrate(g, [&](int j) { return g.x(j) * std::imag(std::conj(v[j] - 1.0) * vx[j]); });
}

/// Im ∫ x v̄ v_x on a Stokes field in the co-moving frame. Its time
/// derivative is the binomial Gross-Pitaevskii virial identity.
inline double gp_virial(const Field1D& v) {
    detail::require_background(v, BackgroundKind::Stokes, "gp_virial");
    const auto& g = v.grid();
    const auto vx = spectral_derivative(v.values(), g, 1);
    const double edge = detail::boundary_max(g, [&](int j) { return g.x(j) * std::abs(v[j]) * std::abs(vx[j]); });
    if (edge > kVirialBoundaryTol) throw NumericalError("virial weight unbounded");
    return detail::integrate(g, [&](int j) { return g.x(j) * std::imag(std::conj(v[j]) * vx[j]); });
}

/// ∫ x |u|² (derivative-NLS virial).
inline double dnls_virial(const Field1D& f) {
    detail::require_background(f, BackgroundKind::Zero, "dnls_virial");
    const auto& g = f.grid();
    const double edge = detail::boundary_max(g, [&](int j) { return g.x(j) * std::norm(f[j]); });
    if (edge > kVirialBoundaryTol) throw NumericalError("virial weight unbounded");
    return detail::integrate(g, [&](int j) { return g.x(j) * std::norm(f[j]); });
}

/// ∫ x² |u|².
inline double variance(const Field1D& f) {
    detail::require_background(f, BackgroundKind::Zero, "variance");
    const auto& g = f.grid();
    const double edge = detail::boundary_max(g, [&](int j) { return g.x(j) * g.x(j) * std::norm(f[j]); });
    if (edge > kVarianceBoundaryTol) throw NumericalError("variance weight overwhelms decay");
    return detail::integrate(g, [&](int j) { return g.x(j) * g.x(j) * std::norm(f[j]); });
}

/// Im ∫ cosh(√ω x) z(x) dx, with the hyperbolic weight combined with |z| in
/// log space.
inline double weighted_virial_psi(const Field1D& z, double omega) {
    if (!(omega > 0.0)) throw ParameterError("weighted virial requires omega > 0");
    const auto& g = z.grid();
    const double s = std::sqrt(omega);
    auto log_cosh = [](double y) {
        const double a = std::abs(y);
        return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    };
    auto weighted = [&](int j) {
        const double mod = std::abs(z[j]);
        if (mod == 0.0) return 0.0;
        return std::exp(log_cosh(s * g.x(j)) + std::log(mod)) * (z[j].imag() / mod);
    };
    auto edge_mag = [&](int j) {
        const double mod = std::abs(z[j]);
        return mod == 0.0 ? 0.0 : std::exp(log_cosh(s * g.x(j)) + std::log(mod));
    };
    if (std::max(edge_mag(0), edge_mag(g.points() - 1)) > 1e-10)
        throw NumericalError("weight overwhelms decay");
    return detail::integrate(g, weighted);
}

// --- reports ------------------------------------------------------------------

/// Mass, momentum, family energy and the zero-background virials.
/// Virial/variance entries stay empty when their decay check fails.
inline InvariantReport invariants_zero_bc(const Field1D& f, const ModelSpec& model) {
    detail::require_background(f, BackgroundKind::Zero, "invariants_zero_bc");
    if (model.family == Family::GrossPitaevskii)
        throw ParameterError("invariants_zero_bc: Gross-Pitaevskii fields live on the Stokes background");
    InvariantReport r;
    r.time = f.time();
    r.m = mass(f);
    r.p = momentum(f);
    if (model.family == Family::DerivativeNLS)
        r.dnls_h = dnls_hamiltonian(f, model.epsilon);
    else
        r.e = energy(f, model);
    try {
        r.p_tilde = virial_P_tilde(f);
    } catch (const NumericalError& e) {
        r.warnings.emplace_back(std::string("p_tilde: ") + e.what());
    }
    try {
        r.variance = variance(f);
    } catch (const NumericalError& e) {
        r.warnings.emplace_back(std::string("variance: ") + e.what());
    }
    return r;
}

enum class TailCorrection { None, Algebraic };

struct NonzeroOptions {
    bool remove_stokes_phase = false;
    TailCorrection tail = TailCorrection::None;
};

/// Coefficient c of the |v|² - 1 ≈ c/x² tail, fitted at the two boundary samples.
inline double algebraic_tail_coefficient(const Field1D& v) {
    const auto& g = v.grid();
    const double left = (std::norm(v[0]) - 1.0) * g.x(0) * g.x(0);
    const int last = g.points() - 1;
    const double right = (std::norm(v[last]) - 1.0) * g.x(last) * g.x(last);
    return 0.5 * (left + right);
}

/// Nonzero-background invariants of a Stokes field in the co-moving frame
/// v = e^{-it}u (or with the phase removal requested).
///
/// With TailCorrection::Algebraic the |x| > L contributions of a c/x² tail of
/// |v|² - 1 are added analytically: 2c/L to m_nz, 2εc/L to e_gp (its leading
/// term is -(q+1)(|v|²-1)), and -c²/(3L³) to e_nz.
inline InvariantReport invariants_nonzero_bc(const Field1D& field,
                                             const ModelSpec& model = ModelSpec::gross_pitaevskii(-1, 2.0),
                                             NonzeroOptions opt = {}) {
    detail::require_background(field, BackgroundKind::Stokes, "invariants_nonzero_bc");
    if (model.family != Family::GrossPitaevskii)
        throw ParameterError("invariants_nonzero_bc expects a Gross-Pitaevskii model");
    const Field1D v = opt.remove_stokes_phase ? stokes_frame(field) : field;
    const auto& g = v.grid();
    {
        const double drift = std::max(std::abs(v[0] - 1.0), std::abs(v[g.points() - 1] - 1.0));
        if (v.boundary_tol() && drift > std::max(*v.boundary_tol(), 1e-6))
            throw NumericalError("field is not in the Stokes frame (v does not tend to 1); request phase removal");
    }
    const auto vx = spectral_derivative(v.values(), g, 1);
    const double eps = model.epsilon;
    const double p = model.p;

    InvariantReport r;
    r.time = v.time();
    double m_nz = detail::integrate(g, [&](int j) { return std::norm(v[j]) - 1.0; });
    double e_nz = detail::integrate(g, [&](int j) {
        const double s = std::norm(v[j]) - 1.0;
        return std::norm(vx[j]) - 0.5 * s * s;
    });
    double e_gp = detail::integrate(g, [&](int j) {
        return std::norm(vx[j]) - 2.0 * eps / (p + 2.0) * (1.0 - std::pow(std::abs(v[j]), p + 2.0));
    });
    const double p_nz = detail::integrate(g, [&](int j) { return std::imag(std::conj(v[j] - 1.0) * vx[j]); });

    if (opt.tail == TailCorrection::Algebraic) {
        const double c = algebraic_tail_coefficient(v);
        const double L = g.length();
        if (std::abs(c) < 1e-12)
            r.warnings.emplace_back("tail correction requested for a field without algebraic tail");
        m_nz += 2.0 * c / L;
        e_gp += 2.0 * eps * c / L;
        e_nz += -c * c / (3.0 * L * L * L);
    }
    r.m_nz = m_nz;
    r.e_nz = e_nz;
    r.e_gp = e_gp;
    r.p_nz = p_nz;
    try {
        r.p_tilde = virial_P_nz(v);
    } catch (const NumericalError& e) {
        r.warnings.emplace_back(std::string("p_tilde: ") + e.what());
    }
    return r;
}

// --- trajectories ---------------------------------------------------------------

/// Time series of invariants and the model virial along a simulated orbit.
struct TrajectoryDiagnostics {
    std::vector<double> times;
    std::vector<InvariantReport> reports;
    std::vector<double> virial;
    std::string virial_name;
    std::vector<double> peak_intensity; // max |u|², or max ||v|² - 1| on a Stokes background
    std::optional<Field1D> initial_field;
    std::optional<Field1D> final_field;
    double monotone_fraction = 0.0;
    std::optional<double> blowup_time;
    std::size_t log_clamp_count = 0;
};

/// Fraction of consecutive increments carrying the majority sign; zero
/// increments count against it.
inline double monotone_fraction(std::span<const double> series) {
    if (series.size() < 2) return 0.0;
    std::size_t up = 0, down = 0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double d = series[i] - series[i - 1];
        if (!std::isfinite(d)) continue;
        if (d > 0) ++up;
        else if (d < 0) ++down;
    }
    return static_cast<double>(std::max(up, down)) / static_cast<double>(series.size() - 1);
}

/// max_k |value_k - value_0| / max(1, |value_0|) for one report key, or the
/// virial series with key "virial".
inline double conservation_drift(const TrajectoryDiagnostics& traj, std::string_view key) {
    std::vector<double> values;
    if (key == "virial") {
        values = traj.virial;
    } else {
        for (const auto& r : traj.reports) {
            const auto v = r.get(key);
            if (!v) throw ParameterError("invariant '" + std::string(key) + "' is not populated in this trajectory");
            values.push_back(*v);
        }
    }
    if (values.size() < 2) throw ParameterError("conservation_drift needs at least two samples");
    const double v0 = values.front();
    double drift = 0.0;
    for (double v : values) drift = std::max(drift, std::abs(v - v0));
    return drift / std::max(1.0, std::abs(v0));
}

} // namespace nlslab
