#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"

namespace nlslab {

enum class Family { PowerNLS, GrossPitaevskii, CubicQuintic, Biharmonic, DerivativeNLS, LogNLS };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::PowerNLS: return "power";
    case Family::GrossPitaevskii: return "gp";
    case Family::CubicQuintic: return "cubic-quintic";
    case Family::Biharmonic: return "biharmonic";
    case Family::DerivativeNLS: return "dnls";
    case Family::LogNLS: return "log";
    }
    return "?";
}

inline std::optional<Family> family_from_string(std::string_view s) {
    for (Family f : {Family::PowerNLS, Family::GrossPitaevskii, Family::CubicQuintic, Family::Biharmonic,
                     Family::DerivativeNLS, Family::LogNLS})
        if (s == to_string(f)) return f;
    return std::nullopt;
}

/// Energy-critical power: infinity for n <= 2, 4/(n-2) otherwise.
inline double energy_critical_power(int n) {
    return n <= 2 ? std::numeric_limits<double>::infinity() : 4.0 / (n - 2);
}

/// Biharmonic critical power: infinity for n <= 4, 8/(n-4) otherwise.
inline double biharmonic_critical_power(int n) {
    return n <= 4 ? std::numeric_limits<double>::infinity() : 8.0 / (n - 4);
}

/// Mass-critical power 4/n.
inline double mass_critical_power(int n) { return 4.0 / n; }

/// Which NLS family and its parameters.
///
///   PowerNLS         i u_t + Δu = ε|u|^p u
///   GrossPitaevskii  i v_t + Δv = ε(|v|^p - 1) v,  p = 2q
///   CubicQuintic     i u_t + Δu = λ₁|u|²u - λ₂|u|⁴u,  λ₁λ₂ > 0
///   Biharmonic       i u_t + μΔu - Δ²u = ε|u|^p u
///   DerivativeNLS    i u_t + u_xx - iε(|u|²u)_x = 0
///   LogNLS           i u_t + Δu = ε log(|u|²) u
struct ModelSpec {
    Family family = Family::PowerNLS;
    int epsilon = -1;
    double p = 2.0;
    int n = 1;
    double mu = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    static ModelSpec power(int eps, double p, int n = 1) { return validated({Family::PowerNLS, eps, p, n}); }
    static ModelSpec gross_pitaevskii(int eps, double p, int n = 1) {
        return validated({Family::GrossPitaevskii, eps, p, n});
    }
    static ModelSpec cubic_quintic(double l1, double l2, int n = 1) {
        return validated({Family::CubicQuintic, -1, 2.0, n, 0.0, l1, l2});
    }
    static ModelSpec biharmonic(int eps, double p, double mu, int n = 1) {
        return validated({Family::Biharmonic, eps, p, n, mu});
    }
    static ModelSpec dnls(int eps) { return validated({Family::DerivativeNLS, eps, 2.0, 1}); }
    static ModelSpec log_nls(int eps, int n = 1) { return validated({Family::LogNLS, eps, 2.0, n}); }

    /// q = p/2 for the Gross-Pitaevskii family.
    int gp_q() const { return static_cast<int>(std::lround(p / 2.0)); }

    void validate() const {
        if (epsilon != 1 && epsilon != -1) throw ParameterError("epsilon must be +1 or -1");
        if (n < 1) throw ParameterError("dimension n must be positive");
        switch (family) {
        case Family::PowerNLS:
            if (!(p > 0.0) || !(p < energy_critical_power(n)))
                throw ParameterError("power NLS requires 0 < p < p_n* (energy-critical power)");
            break;
        case Family::GrossPitaevskii: {
            const double q = p / 2.0;
            if (!(p > 0.0) || std::abs(q - std::round(q)) > 1e-12)
                throw ParameterError("even powers only: Gross-Pitaevskii requires p = 2q, q a positive integer");
            break;
        }
        case Family::CubicQuintic:
            if (!(lambda1 * lambda2 > 0.0))
                throw ParameterError("cubic-quintic requires lambda1 * lambda2 > 0");
            break;
        case Family::Biharmonic:
            if (!(p > 0.0) || !(p < biharmonic_critical_power(n)))
                throw ParameterError("biharmonic NLS requires 0 < p < p_n**");
            break;
        case Family::DerivativeNLS:
            if (n != 1) throw ParameterError("derivative NLS is one-dimensional");
            break;
        case Family::LogNLS:
            break;
        }
    }

private:
    static ModelSpec validated(ModelSpec m) {
        m.validate();
        return m;
    }
};

} // namespace nlslab
