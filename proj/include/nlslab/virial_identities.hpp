#pragma once

// Closed-form right-hand sides of the virial time derivatives, the
// term-by-term decomposition of the Gross-Pitaevskii virial, Pohozaev
// residuals, the sharp Gagliardo-Nirenberg constant, and finite-difference
// harnesses that compare them against measured derivatives.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"
#include "functionals.hpp"
#include "grid_field.hpp"
#include "model.hpp"

namespace nlslab {

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double dt_used = 0.0;
    std::string solution_id;
    double t = 0.0;

    static IdentityCheck make(double lhs, double rhs, double dt, std::string id = {}, double t = 0.0) {
        IdentityCheck c;
        c.lhs = lhs;
        c.rhs = rhs;
        c.abs_residual = std::abs(lhs - rhs);
        c.rel_residual = c.abs_residual / std::max(1.0, std::abs(rhs));
        c.dt_used = dt;
        c.solution_id = std::move(id);
        c.t = t;
        return c;
    }
};

namespace detail {

inline void require_family(const ModelSpec& m, Family f, const char* op) {
    if (m.family != f)
        throw ParameterError(std::string(op) + ": family mismatch (model is " + to_string(m.family) + ", expected " +
                             to_string(f) + ")");
}

inline std::int64_t binomial(int n, int k) {
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// ∫ (|v|² - 1)^k.
inline double density_moment(const Field1D& v, int k) {
    return integrate(v.grid(), [&](int j) { return std::pow(std::norm(v[j]) - 1.0, k); });
}

inline double gp_mass(const Field1D& v) { return density_moment(v, 1); }

inline double gp_energy(const Field1D& v, const ModelSpec& m) {
    return invariants_nonzero_bc(v, m).e_gp.value();
}

} // namespace detail

// --- power NLS ----------------------------------------------------------------

/// 2‖∇u‖² + ε np/(p+2) ‖u‖^{p+2}_{p+2}.
inline double rhs_power_nls(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::PowerNLS, "rhs_power_nls");
    detail::require_background(f, BackgroundKind::Zero, "rhs_power_nls");
    return 2.0 * gradient_sq(f) + m.epsilon * (m.n * m.p / (m.p + 2.0)) * lp_power(f, m.p + 2.0);
}

/// 2E - ε (4 - np)/(p+2) ‖u‖^{p+2}_{p+2}.
inline double rhs_power_nls_energy_form(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::PowerNLS, "rhs_power_nls_energy_form");
    detail::require_background(f, BackgroundKind::Zero, "rhs_power_nls_energy_form");
    return 2.0 * energy(f, m) - m.epsilon * ((4.0 - m.n * m.p) / (m.p + 2.0)) * lp_power(f, m.p + 2.0);
}

// --- Gross-Pitaevskii ---------------------------------------------------------

namespace detail {

inline void require_gp(const Field1D& v, const ModelSpec& m, const char* op) {
    require_family(m, Family::GrossPitaevskii, op);
    require_background(v, BackgroundKind::Stokes, op);
    const double q = m.p / 2.0;
    if (std::abs(q - std::round(q)) > 1e-12 || q < 1.0) throw ParameterError("even powers only");
}

} // namespace detail

/// Binomial form: 2E - εnM + ε(4/(p+2) - n)∫(1 - |v|^{p+2})
///                - εn Σ_{k=1}^{q} C(q,k)/(k+1) ∫(|v|² - 1)^{k+1},
/// with E, M the Gross-Pitaevskii energy and mass. Equals d/dt Im ∫ x v̄ v_x.
inline double rhs_gp_nz(const Field1D& v, const ModelSpec& m) {
    detail::require_gp(v, m, "rhs_gp_nz");
    const int q = m.gp_q();
    const double eps = m.epsilon;
    const double n = m.n;
    const double e = detail::gp_energy(v, m);
    const double mass = detail::gp_mass(v);
    const double defect =
        detail::integrate(v.grid(), [&](int j) { return 1.0 - std::pow(std::abs(v[j]), m.p + 2.0); });
    double sum = 0.0;
    for (int k = 1; k <= q; ++k)
        sum += static_cast<double>(detail::binomial(q, k)) * detail::density_moment(v, k + 1) / (k + 1.0);
    return 2.0 * e - eps * n * mass + eps * (4.0 / (m.p + 2.0) - n) * defect - eps * n * sum;
}

/// Cubic (p = 2) expansion: 2E - εnM + ε(1 - n)∫(1 - |v|⁴) - (εn/2)∫(|v|² - 1)².
inline double rhs_gp_nz_cubic_expanded(const Field1D& v, const ModelSpec& m) {
    detail::require_gp(v, m, "rhs_gp_nz_cubic_expanded");
    if (m.gp_q() != 1) throw ParameterError("cubic expansion needs p = 2");
    const double eps = m.epsilon;
    const double n = m.n;
    const double defect = detail::integrate(v.grid(), [&](int j) { return 1.0 - std::pow(std::norm(v[j]), 2); });
    return 2.0 * detail::gp_energy(v, m) - eps * n * detail::gp_mass(v) + eps * (1.0 - n) * defect -
           0.5 * eps * n * detail::density_moment(v, 2);
}

/// Quintic (p = 4) regroupings exactly as published:
///   n = 1: 2E + (ε/2)∫s²
///   n = 2: 2E + 2εM + (2ε/3)∫s²(|v|² + 1) + (5ε/3)∫s²,   s = |v|² - 1.
/// Both drop the factor C(2,1) = 2 and so differ from rhs_gp_nz by (εn/2)∫s².
inline double rhs_gp_nz_quintic_published(const Field1D& v, const ModelSpec& m) {
    detail::require_gp(v, m, "rhs_gp_nz_quintic_published");
    if (m.gp_q() != 2) throw ParameterError("quintic regrouping needs p = 4");
    const double eps = m.epsilon;
    const double e = detail::gp_energy(v, m);
    if (m.n == 1) return 2.0 * e + 0.5 * eps * detail::density_moment(v, 2);
    if (m.n == 2) {
        const double s2 = detail::density_moment(v, 2);
        const double s3 = detail::density_moment(v, 3);
        // ∫s²(|v|²+1) = ∫s³ + 2∫s²
        return 2.0 * e + 2.0 * eps * detail::gp_mass(v) + 2.0 * eps / 3.0 * (s3 + 2.0 * s2) + 5.0 * eps / 3.0 * s2;
    }
    throw ParameterError("quintic regrouping is given for n = 1, 2 only");
}

/// Quintic regroupings recomputed from the binomial form:
///   n = 1: 2E
///   n = 2: 2E + 2εM + (2ε/3)∫s²(|v|² + 1) + (2ε/3)∫s².
inline double rhs_gp_nz_quintic_regrouped(const Field1D& v, const ModelSpec& m) {
    detail::require_gp(v, m, "rhs_gp_nz_quintic_regrouped");
    if (m.gp_q() != 2) throw ParameterError("quintic regrouping needs p = 4");
    const double eps = m.epsilon;
    const double e = detail::gp_energy(v, m);
    if (m.n == 1) return 2.0 * e;
    if (m.n == 2) {
        const double s2 = detail::density_moment(v, 2);
        const double s3 = detail::density_moment(v, 3);
        return 2.0 * e + 2.0 * eps * detail::gp_mass(v) + 2.0 * eps / 3.0 * (s3 + 2.0 * s2) + 2.0 * eps / 3.0 * s2;
    }
    throw ParameterError("quintic regrouping is given for n = 1, 2 only");
}

struct AppendixTerms {
    double I = 0.0;
    double II = 0.0;
    double III = 0.0;
    double residual() const { return std::abs(I + II + III); }
    double relative_residual() const {
        const double scale = std::abs(I) + std::abs(II) + std::abs(III);
        return scale > 0.0 ? residual() / scale : 0.0;
    }
};

/// I = i∫x(v̄_x v_t - v_x v̄_t) with v_t by centered differences of
/// `at(t ± dt)`, II = (n - 2)∫|∇v|², III = εn Σ C(q,k)/(k+1) ∫(|v|² - 1)^{k+1}.
/// `at` returns v-frame Stokes fields. Throws NumericalError when |I+II+III|
/// exceeds `tol` relative to |I|+|II|+|III|.
inline AppendixTerms appendix_terms(const std::function<Field1D(double)>& at, double t, const ModelSpec& m,
                                    double dt, double tol) {
    const Field1D v = at(t);
    detail::require_gp(v, m, "appendix_terms");
    const Field1D vp = at(t + dt);
    const Field1D vm = at(t - dt);
    const auto& g = v.grid();
    const auto vx = spectral_derivative(v.values(), g, 1);

    AppendixTerms out;
    out.I = detail::integrate(g, [&](int j) {
        const cplx vt = (vp[j] - vm[j]) / (2.0 * dt);
        // i(a - conj(a)) = -2 Im a with a = v̄_x v_t
        return -2.0 * g.x(j) * std::imag(std::conj(vx[j]) * vt);
    });
    out.II = (m.n - 2.0) * detail::integrate(g, [&](int j) { return std::norm(vx[j]); });
    double sum = 0.0;
    for (int k = 1; k <= m.gp_q(); ++k)
        sum += static_cast<double>(detail::binomial(m.gp_q(), k)) * detail::density_moment(v, k + 1) / (k + 1.0);
    out.III = m.epsilon * m.n * sum;
    if (out.relative_residual() > tol)
        throw NumericalError("appendix closure failed: I = " + std::to_string(out.I) + ", II = " +
                             std::to_string(out.II) + ", III = " + std::to_string(out.III) +
                             ", |I+II+III| = " + std::to_string(out.residual()) +
                             ", relative = " + std::to_string(out.relative_residual()));
    return out;
}

// --- other families -------------------------------------------------------------

/// 2E₁ + λ₁(n/2 - 1)‖u‖⁴₄ - (2/3)λ₂(n - 1)‖u‖⁶₆.
inline double rhs_cubic_quintic(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::CubicQuintic, "rhs_cubic_quintic");
    detail::require_background(f, BackgroundKind::Zero, "rhs_cubic_quintic");
    return 2.0 * energy(f, m) + m.lambda1 * (m.n / 2.0 - 1.0) * lp_power(f, 4.0) -
           2.0 / 3.0 * m.lambda2 * (m.n - 1.0) * lp_power(f, 6.0);
}

/// 2E₁ - 3λ₁²/(64|λ₂|) ∫|u|², a lower bound for the n = 3 right-hand side
/// when λ₁, λ₂ < 0.
inline double cubic_quintic_lower_bound(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::CubicQuintic, "cubic_quintic_lower_bound");
    return 2.0 * energy(f, m) - 3.0 * m.lambda1 * m.lambda1 / (64.0 * std::abs(m.lambda2)) * mass(f);
}

/// 4‖Δu‖² + 2μ‖∇u‖² + ε np/(p+2) ‖u‖^{p+2}.
inline double rhs_biharmonic(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::Biharmonic, "rhs_biharmonic");
    detail::require_background(f, BackgroundKind::Zero, "rhs_biharmonic");
    return 4.0 * laplacian_sq(f) + 2.0 * m.mu * gradient_sq(f) +
           m.epsilon * (m.n * m.p / (m.p + 2.0)) * lp_power(f, m.p + 2.0);
}

/// 4E₂ - 2μ‖∇u‖² + ε (np - 8)/(p+2) ‖u‖^{p+2}.
inline double rhs_biharmonic_energy_form(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::Biharmonic, "rhs_biharmonic_energy_form");
    detail::require_background(f, BackgroundKind::Zero, "rhs_biharmonic_energy_form");
    return 4.0 * energy(f, m) - 2.0 * m.mu * gradient_sq(f) +
           m.epsilon * ((m.n * m.p - 8.0) / (m.p + 2.0)) * lp_power(f, m.p + 2.0);
}

/// d/dt ∫x|u|² = -2H - (ε/2)‖u‖⁴₄.
inline double rhs_dnls(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::DerivativeNLS, "rhs_dnls");
    detail::require_background(f, BackgroundKind::Zero, "rhs_dnls");
    return -2.0 * dnls_hamiltonian(f, m.epsilon) - 0.5 * m.epsilon * lp_power(f, 4.0);
}

/// 2‖∇u‖² + εn M.
inline double rhs_log_nls(const Field1D& f, const ModelSpec& m) {
    detail::require_family(m, Family::LogNLS, "rhs_log_nls");
    detail::require_background(f, BackgroundKind::Zero, "rhs_log_nls");
    return 2.0 * gradient_sq(f) + m.epsilon * m.n * mass(f);
}

// --- ground-state identities ----------------------------------------------------

/// Norms of a ground-state profile in dimension n: ‖∇Q‖², ‖Q‖², ‖Q‖^{p+2}_{p+2}.
struct ProfileNorms {
    double grad_sq = 0.0;
    double mass = 0.0;
    double lp = 0.0;
    double residual = 0.0; // elliptic residual of the profile, 0 if exact
};

inline ProfileNorms profile_norms(const Field1D& q, double p) {
    return {gradient_sq(q), mass(q), lp_power(q, p + 2.0), 0.0};
}

struct PohozaevResiduals {
    double multiplier = 0.0; // ‖∇Q‖² - ‖Q‖^{p+2} + ω‖Q‖²
    double dilation = 0.0;   // (n-2)‖∇Q‖² - 2n/(p+2)‖Q‖^{p+2} + nω‖Q‖²
};

/// Both identities, each scaled by the sum of the magnitudes of its terms.
inline PohozaevResiduals pohozaev_residuals(const ProfileNorms& q, double p, int n, double omega) {
    const double a1 = q.grad_sq, b1 = q.lp, c1 = omega * q.mass;
    const double a2 = (n - 2.0) * q.grad_sq, b2 = 2.0 * n / (p + 2.0) * q.lp, c2 = n * omega * q.mass;
    PohozaevResiduals r;
    r.multiplier = std::abs(a1 - b1 + c1) / std::max(1.0, std::abs(a1) + std::abs(b1) + std::abs(c1));
    r.dilation = std::abs(a2 - b2 + c2) / std::max(1.0, std::abs(a2) + std::abs(b2) + std::abs(c2));
    return r;
}

inline PohozaevResiduals pohozaev_residuals(const Field1D& q, double p, double omega) {
    return pohozaev_residuals(profile_norms(q, p), p, 1, omega);
}

struct GNConstant {
    double p = 0.0;
    int n = 1;
    double k_opt_pow = 0.0; // K_opt^{p+2}

    /// ‖∇f‖^{np/2} ‖f‖^{2-(n-2)p/2} (unsquared norms).
    double norm_product(double grad_norm, double l2_norm) const {
        return std::pow(grad_norm, n * p / 2.0) * std::pow(l2_norm, 2.0 - (n - 2.0) * p / 2.0);
    }
    /// Right-hand side of the sharp inequality, K^{p+2} times norm_product.
    double bound(double grad_norm, double l2_norm) const { return k_opt_pow * norm_product(grad_norm, l2_norm); }
};

inline constexpr double kGroundStateTol = 1e-6;

/// K_opt^{p+2} = ‖Q‖^{p+2}_{p+2} / (‖∇Q‖^{np/2} ‖Q‖^{2-(n-2)p/2}).
inline GNConstant gn_constant(double p, int n, const ProfileNorms& q) {
    if (q.residual > kGroundStateTol)
        throw NumericalError("gn_constant: ground state not converged (residual " + std::to_string(q.residual) + ")");
    GNConstant k{p, n, 0.0};
    k.k_opt_pow = q.lp / k.norm_product(std::sqrt(q.grad_sq), std::sqrt(q.mass));
    return k;
}

// --- finite-difference harnesses --------------------------------------------------

inline constexpr double kIdentityDt = 1e-5;

/// Centered difference of `virial` at t; if the residual against `rhs`
/// exceeds `tol`, retries with Richardson extrapolation over dt and dt/2.
inline IdentityCheck check_identity(const std::function<double(double)>& virial, double rhs, double t,
                                    double dt = kIdentityDt, double tol = 1e-5, std::string id = {}) {
    auto centered = [&](double h) { return (virial(t + h) - virial(t - h)) / (2.0 * h); };
    const double d1 = centered(dt);
    auto check = IdentityCheck::make(d1, rhs, dt, id, t);
    if (check.rel_residual <= tol) return check;
    const double d2 = centered(dt / 2.0);
    const double rich = (4.0 * d2 - d1) / 3.0;
    auto refined = IdentityCheck::make(rich, rhs, dt / 2.0, id, t);
    return refined.rel_residual < check.rel_residual ? refined : check;
}

/// Fourth-order centered derivative of a uniformly sampled series at index i.
inline double series_derivative(const std::vector<double>& y, std::size_t i, double h) {
    if (i < 2 || i + 2 >= y.size()) throw ParameterError("series_derivative: index too close to the ends");
    return (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
}

} // namespace nlslab
