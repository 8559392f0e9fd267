#pragma once

// One-dimensional pseudospectral evolution for the six model families:
// Strang splitting with exact Fourier multipliers and pointwise nonlinear
// phases, and integrating-factor RK4 for the derivative nonlinearity.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "functionals.hpp"
#include "grid_field.hpp"
#include "model.hpp"

namespace nlslab {

enum class Scheme { StrangSplit, RK4Pseudospectral };

inline const char* to_string(Scheme s) { return s == Scheme::StrangSplit ? "strang" : "rk4"; }

inline std::optional<Scheme> scheme_from_string(std::string_view s) {
    if (s == "strang") return Scheme::StrangSplit;
    if (s == "rk4") return Scheme::RK4Pseudospectral;
    return std::nullopt;
}

/// Largest accepted step. Both schemes treat dispersion exactly, so the bound
/// only limits the nonlinear substep; the DNLS run additionally checks
/// dt·(2k_max/3)·max|u|² ≤ 2.5 on its initial data.
inline constexpr double kMaxStableDt = 0.05;

struct EvolveConfig {
    double dt = 1e-4;
    double t_end = 1.0;
    int sample_stride = 1;
    Scheme scheme = Scheme::StrangSplit;
    double log_floor = 1e-12;
    std::optional<bool> dealias; // default: on for p >= 4 and DNLS
    double amplitude_cap = 1e6;
    double tail_threshold = 1e-6; // spectral energy fraction above k_max/2

    static Scheme default_scheme(const ModelSpec& m) {
        return m.family == Family::DerivativeNLS ? Scheme::RK4Pseudospectral : Scheme::StrangSplit;
    }

    bool dealias_for(const ModelSpec& m) const {
        if (dealias) return *dealias;
        return m.family == Family::DerivativeNLS || (m.family != Family::LogNLS && m.p >= 4.0);
    }

    void validate(const ModelSpec& m) const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
        if (dt > kMaxStableDt) throw ParameterError("dt exceeds the stability bound " + std::to_string(kMaxStableDt));
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ParameterError("t_end must be positive");
        if (sample_stride < 1) throw ParameterError("sample_stride must be >= 1");
        if (!(log_floor > 0.0)) throw ParameterError("log_floor must be positive");
        if (m.family == Family::DerivativeNLS && scheme != Scheme::RK4Pseudospectral)
            throw ParameterError("derivative NLS requires the rk4 scheme");
        if (m.family == Family::GrossPitaevskii && scheme != Scheme::StrangSplit)
            throw ParameterError("Gross-Pitaevskii requires the strang scheme");
        if (m.n != 1) throw ParameterError("grid evolution is one-dimensional (n = 1)");
    }
};

/// Thrown by the stepper; carries the last finite state.
class BlowUpError : public NumericalError {
public:
    BlowUpError(double t, std::string reason, std::optional<Field1D> last)
        : NumericalError("blow-up detected at t = " + std::to_string(t) + " (" + reason + ")"), time_(t),
          last_(std::move(last)) {}
    double time() const { return time_; }
    const std::optional<Field1D>& last_field() const { return last_; }

private:
    double time_;
    std::optional<Field1D> last_;
};

/// Precomputed multipliers for a fixed (grid, model, dt). Advances raw
/// samples in place; Gross-Pitaevskii samples are v with v → 1.
class Stepper {
public:
    Stepper(const Grid1D& grid, const ModelSpec& model, const EvolveConfig& cfg, double dt)
        : grid_(grid), model_(model), cfg_(cfg), dt_(dt), k_(grid.wavenumbers()) {
        const int n = grid.points();
        const double kcut = 2.0 / 3.0 * grid.k_max();
        const bool dealias = cfg.dealias_for(model);
        mask_.assign(n, 1.0);
        if (dealias)
            for (int j = 0; j < n; ++j)
                if (std::abs(k_[j]) > kcut) mask_[j] = 0.0;
        full_.resize(n);
        half_.resize(n);
        for (int j = 0; j < n; ++j) {
            const double w = dispersion(k_[j]);
            full_[j] = std::polar(1.0, -w * dt) * mask_[j];
            half_[j] = std::polar(1.0, -w * dt / 2.0) * mask_[j];
        }
    }

    double dt() const { return dt_; }
    std::size_t clamp_count() const { return clamps_; }
    double last_tail_fraction() const { return tail_; }

    /// One step of size dt. Throws BlowUpError (time stamp t + dt) on
    /// non-finite values, amplitude above the cap, or spectral tail growth.
    void advance(CplxVec& u, double t) {
        const CplxVec backup = u;
        if (cfg_.scheme == Scheme::StrangSplit)
            strang(u);
        else
            rk4(u);
        check(u, backup, t + dt_);
    }

private:
    double dispersion(double k) const {
        if (model_.family == Family::Biharmonic) return model_.mu * k * k + k * k * k * k;
        return k * k;
    }

    /// Pointwise potential N(u) in i u_t + (linear) = N(u) u.
    double potential(const cplx& z) {
        const double s = std::norm(z);
        switch (model_.family) {
        case Family::PowerNLS:
        case Family::Biharmonic:
            return model_.epsilon * (model_.p == 2.0 ? s : std::pow(s, model_.p / 2.0));
        case Family::GrossPitaevskii:
            return model_.epsilon * ((model_.p == 2.0 ? s : std::pow(s, model_.p / 2.0)) - 1.0);
        case Family::CubicQuintic:
            return model_.lambda1 * s - model_.lambda2 * s * s;
        case Family::LogNLS: {
            const double floor2 = cfg_.log_floor * cfg_.log_floor;
            if (s < floor2) {
                ++clamps_;
                return model_.epsilon * std::log(floor2);
            }
            return model_.epsilon * std::log(s);
        }
        case Family::DerivativeNLS:
            break;
        }
        throw ParameterError("no pointwise potential for derivative NLS");
    }

    void phase(CplxVec& u, double h) {
        for (auto& z : u) z *= std::polar(1.0, -potential(z) * h);
    }

    void linear(CplxVec& u, const CplxVec& mult) {
        const bool shift = model_.family == Family::GrossPitaevskii;
        if (shift)
            for (auto& z : u) z -= 1.0;
        auto spec = fft::forward(u);
        double total = 0.0, high = 0.0;
        const double khalf = grid_.k_max() / 2.0;
        for (std::size_t j = 0; j < spec.size(); ++j) {
            spec[j] *= mult[j];
            const double e = std::norm(spec[j]);
            total += e;
            if (std::abs(k_[j]) > khalf) high += e;
        }
        tail_ = total > 0.0 ? high / total : 0.0;
        u = fft::inverse(spec);
        if (shift)
            for (auto& z : u) z += 1.0;
    }

    void strang(CplxVec& u) {
        phase(u, dt_ / 2.0);
        linear(u, full_);
        phase(u, dt_ / 2.0);
    }

    /// Fourier-space nonlinear term of û_t = -i ω(k) û + N̂.
    CplxVec nonlinear_hat(const CplxVec& uhat) {
        CplxVec u = fft::inverse(uhat);
        CplxVec nl(u.size());
        if (model_.family == Family::DerivativeNLS) {
            for (std::size_t j = 0; j < u.size(); ++j) nl[j] = std::norm(u[j]) * u[j];
            auto spec = fft::forward(nl);
            const int n = grid_.points();
            for (int j = 0; j < n; ++j) {
                const double kk = (j == n / 2) ? 0.0 : k_[j];
                spec[j] *= cplx{0.0, kk} * static_cast<double>(model_.epsilon) * mask_[j];
            }
            return spec;
        }
        for (std::size_t j = 0; j < u.size(); ++j) nl[j] = cplx{0.0, -potential(u[j])} * u[j];
        auto spec = fft::forward(nl);
        for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= mask_[j];
        return spec;
    }

    void rk4(CplxVec& u) {
        const double h = dt_;
        const std::size_t n = u.size();
        CplxVec a = fft::forward(u);
        for (std::size_t j = 0; j < n; ++j) a[j] *= mask_[j];
        const CplxVec k1 = nonlinear_hat(a);
        CplxVec tmp(n);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = half_[j] * (a[j] + 0.5 * h * k1[j]);
        const CplxVec k2 = nonlinear_hat(tmp);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = half_[j] * a[j] + 0.5 * h * k2[j];
        const CplxVec k3 = nonlinear_hat(tmp);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = full_[j] * a[j] + h * half_[j] * k3[j];
        const CplxVec k4 = nonlinear_hat(tmp);
        double total = 0.0, high = 0.0;
        const double khalf = grid_.k_max() / 2.0;
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = full_[j] * a[j] + h / 6.0 * (full_[j] * k1[j] + 2.0 * half_[j] * (k2[j] + k3[j]) + k4[j]);
            const double e = std::norm(a[j]);
            total += e;
            if (std::abs(k_[j]) > khalf) high += e;
        }
        tail_ = total > 0.0 ? high / total : 0.0;
        u = fft::inverse(a);
    }

    void check(const CplxVec& u, const CplxVec& backup, double t) {
        const bool shift = model_.family == Family::GrossPitaevskii;
        std::string reason;
        for (const auto& z : u) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                reason = "non-finite field";
                break;
            }
            if (std::abs(shift ? z - 1.0 : z) > cfg_.amplitude_cap) {
                reason = "amplitude above cap";
                break;
            }
        }
        if (reason.empty() && tail_ > cfg_.tail_threshold) reason = "spectral tail fraction " + std::to_string(tail_);
        if (reason.empty()) return;
        std::optional<Field1D> last;
        try {
            last.emplace(grid_, backup, shift ? BackgroundKind::Stokes : BackgroundKind::Zero, t - dt_, std::nullopt);
        } catch (const Error&) {
        }
        throw BlowUpError(t, reason, std::move(last));
    }

    Grid1D grid_;
    ModelSpec model_;
    EvolveConfig cfg_;
    double dt_;
    RealVec k_;
    RealVec mask_;
    CplxVec full_, half_;
    std::size_t clamps_ = 0;
    double tail_ = 0.0;
};

namespace detail {

inline void require_evolution_background(const Field1D& f, const ModelSpec& m) {
    const auto want = m.family == Family::GrossPitaevskii ? BackgroundKind::Stokes : BackgroundKind::Zero;
    require_background(f, want, "evolve");
}

} // namespace detail

/// One step of size dt (negative dt runs backwards).
inline Field1D step(const Field1D& f, const ModelSpec& model, double dt, const EvolveConfig& cfg) {
    if (dt == 0.0 || !std::isfinite(dt)) throw ParameterError("step size must be nonzero");
    detail::require_evolution_background(f, model);
    Stepper st(f.grid(), model, cfg, dt);
    CplxVec u(f.values().begin(), f.values().end());
    st.advance(u, f.time());
    return Field1D(f.grid(), std::move(u), f.background(), f.time() + dt, f.boundary_tol());
}

/// The virial whose sign rules apply to the family.
inline std::string virial_name(const ModelSpec& m) {
    switch (m.family) {
    case Family::GrossPitaevskii: return "gp_virial";
    case Family::DerivativeNLS: return "dnls_virial";
    default: return "p_tilde";
    }
}

inline double model_virial(const Field1D& f, const ModelSpec& m) {
    switch (m.family) {
    case Family::GrossPitaevskii: return gp_virial(f);
    case Family::DerivativeNLS: return dnls_virial(f);
    default: return virial_P_tilde(f);
    }
}

inline InvariantReport model_invariants(const Field1D& f, const ModelSpec& m) {
    return m.family == Family::GrossPitaevskii ? invariants_nonzero_bc(f, m) : invariants_zero_bc(f, m);
}

/// Advances f0 to t_end with dt adjusted to t_end / round(t_end / dt),
/// sampling every sample_stride steps and at the final step. Blow-up ends the
/// run early and is recorded, not thrown.
inline TrajectoryDiagnostics evolve(const Field1D& f0, const ModelSpec& model, const EvolveConfig& cfg) {
    model.validate();
    cfg.validate(model);
    detail::require_evolution_background(f0, model);
    const auto& grid = f0.grid();
    const long steps = std::max(1L, std::lround(cfg.t_end / cfg.dt));
    const double h = cfg.t_end / static_cast<double>(steps);
    if (model.family == Family::DerivativeNLS) {
        const double amp = sup_norm(f0.values());
        if (h * (2.0 / 3.0) * grid.k_max() * amp * amp > 2.5)
            throw ParameterError("dt too large for the derivative nonlinearity at this amplitude and resolution");
    }

    Stepper st(grid, model, cfg, h);
    TrajectoryDiagnostics traj;
    traj.virial_name = virial_name(model);
    traj.initial_field = f0;
    const bool stokes = model.family == Family::GrossPitaevskii;

    auto sample = [&](const CplxVec& u, double t) {
        Field1D f(grid, u, f0.background(), t, f0.boundary_tol());
        traj.times.push_back(t);
        traj.reports.push_back(model_invariants(f, model));
        try {
            traj.virial.push_back(model_virial(f, model));
        } catch (const NumericalError&) {
            traj.virial.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        double peak = 0.0;
        for (const auto& z : u) peak = std::max(peak, stokes ? std::abs(std::norm(z) - 1.0) : std::norm(z));
        traj.peak_intensity.push_back(peak);
        traj.final_field = std::move(f);
    };

    CplxVec u(f0.values().begin(), f0.values().end());
    const double t0 = f0.time();
    sample(u, t0);
    for (long s = 1; s <= steps; ++s) {
        const double t = t0 + static_cast<double>(s - 1) * h;
        try {
            st.advance(u, t);
        } catch (const BlowUpError& e) {
            traj.blowup_time = e.time();
            break;
        }
        if (s % cfg.sample_stride == 0 || s == steps) sample(u, t0 + static_cast<double>(s) * h);
    }
    traj.monotone_fraction = monotone_fraction(traj.virial);
    traj.log_clamp_count = st.clamp_count();
    return traj;
}

/// Mean spacing of the major local maxima (within `level` of the global
/// range from the top) of a uniformly sampled series, each refined by a
/// parabola through its neighbours. nullopt with fewer than two maxima.
inline std::optional<double> detect_period(const std::vector<double>& times, const std::vector<double>& values,
                                           double level = 0.1) {
    if (times.size() != values.size() || values.size() < 3) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double cut = *hi - level * (*hi - *lo);
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double a = values[i - 1], b = values[i], c = values[i + 1];
        if (b >= cut && b > a && b >= c) {
            const double denom = a - 2.0 * b + c;
            const double off = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
            const double h = times[i + 1] - times[i];
            peaks.push_back(times[i] + off * h);
        }
    }
    if (peaks.size() < 2) return std::nullopt;
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

} // namespace nlslab
