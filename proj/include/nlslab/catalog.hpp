#pragma once

// Closed-form NLS solutions: standing waves, the Satsuma-Yajima breather,
// the Peregrine, Kuznetsov-Ma and Akhmediev solutions on the Stokes
// background, the log-NLS Gausson and the Gaussian log-NLS breather.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "error.hpp"
#include "grid_field.hpp"
#include "model.hpp"

namespace nlslab {

// ---------------------------------------------------------------------------
// r_alpha orbit of the log-NLS breather
// ---------------------------------------------------------------------------

/// Outcome of integrating the breather width equation.
enum class OrbitStatus { Periodic, Constant, Escaped, NotClosed };

inline const char* to_string(OrbitStatus s) {
    switch (s) {
    case OrbitStatus::Periodic: return "periodic";
    case OrbitStatus::Constant: return "degenerate/constant";
    case OrbitStatus::Escaped: return "orbit escaped";
    case OrbitStatus::NotClosed: return "non-periodic";
    }
    return "?";
}

/// Width r(t) and phase Φ(t) of the Gaussian log-NLS breather.
///
///   r'' = 1/r³ - 2b/r,   r(0) = Re α,  r'(0) = Im α
///   Φ'  = 1/(2r²) + b ln(r/Re α) - b,  Φ(0) = 0
///
/// `branch` is b. For i u_t + u_xx = ε log(|u|²) u the breather uses b = -ε;
/// b = +1 is the bounded (periodic) branch with equilibrium r* = 1/√2.
class RAlphaOrbit {
public:
    using State = std::array<double, 3>; // r, r', Φ

    std::complex<double> alpha() const { return alpha_; }
    int branch() const { return branch_; }
    OrbitStatus status() const { return status_; }
    std::optional<double> period() const { return period_; }
    std::optional<double> escape_time() const { return escape_time_; }
    double t_end() const { return times_.back(); }
    double tolerance() const { return tol_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<State>& checkpoints() const { return states_; }

    /// Right-hand side of (r, r', Φ)' on this branch.
    auto rhs() const {
        const double b = branch_;
        const double ar = alpha_.real();
        return [b, ar](const State& y, State& dy, double) {
            const double r = y[0];
            dy[0] = y[1];
            dy[1] = 1.0 / (r * r * r) - 2.0 * b / r;
            dy[2] = 0.5 / (r * r) + b * std::log(r / ar) - b;
        };
    }

    /// r, r', Φ at time t in [0, t_end].
    State at(double t) const {
        if (!(t >= 0.0) || t > t_end() + 1e-12)
            throw ParameterError("time " + std::to_string(t) + " outside the integrated orbit span [0, " +
                                 std::to_string(t_end()) + "]");
        std::size_t k = static_cast<std::size_t>(std::floor(t / spacing_));
        if (k >= states_.size()) k = states_.size() - 1;
        State y = states_[k];
        const double h = (t - times_[k]) / substeps_;
        if (h == 0.0) return y;
        boost::numeric::odeint::runge_kutta_fehlberg78<State> rk;
        double tt = times_[k];
        for (int i = 0; i < substeps_; ++i) {
            rk.do_step(rhs(), y, tt, h);
            tt += h;
        }
        return y;
    }

    double r(double t) const { return at(t)[0]; }

    /// Effective potential U with r'' = -U'(r): U = 1/(2r²) + 2b ln r.
    static double potential(double r, int branch) { return 0.5 / (r * r) + 2.0 * branch * std::log(r); }

    friend RAlphaOrbit solve_r_alpha(std::complex<double> alpha, int epsilon_branch, double t_max, double tol);

private:

    double rotation(const State& y) const { return std::atan2(y[1], y[0] - equilibrium_); }

    std::complex<double> alpha_;
    int branch_ = 1;
    double tol_ = 1e-10;
    double spacing_ = 0.01;
    int substeps_ = 4;
    double equilibrium_ = 0.0;
    OrbitStatus status_ = OrbitStatus::NotClosed;
    std::optional<double> period_;
    std::optional<double> escape_time_;
    std::vector<double> times_;
    std::vector<State> states_;
};

/// Integrates the width equation adaptively (controlled Runge-Kutta-Fehlberg
/// 7(8)) onto uniform checkpoints, detecting the first return to the initial
/// phase-space point or escape to infinity.
inline RAlphaOrbit solve_r_alpha(std::complex<double> alpha, int epsilon_branch, double t_max, double tol) {
    namespace ode = boost::numeric::odeint;
    if (!(alpha.real() > 0.0)) throw ParameterError("r_alpha requires Re(alpha) > 0");
    if (!(tol > 0.0)) throw ParameterError("r_alpha tolerance must be positive");
    if (epsilon_branch != 1 && epsilon_branch != -1) throw ParameterError("epsilon_branch must be +1 or -1");
    if (!(t_max > 0.0)) throw ParameterError("t_max must be positive");

    RAlphaOrbit orbit;
    orbit.alpha_ = alpha;
    orbit.branch_ = epsilon_branch;
    orbit.tol_ = tol;
    orbit.equilibrium_ = epsilon_branch > 0 ? 1.0 / std::sqrt(2.0 * epsilon_branch) : 0.0;

    const RAlphaOrbit::State y0{alpha.real(), alpha.imag(), 0.0};
    orbit.times_.push_back(0.0);
    orbit.states_.push_back(y0);

    if (epsilon_branch > 0 && std::abs(y0[0] - orbit.equilibrium_) < tol && std::abs(y0[1]) < tol) {
        orbit.status_ = OrbitStatus::Constant;
        const int steps = static_cast<int>(std::ceil(t_max / orbit.spacing_));
        for (int k = 1; k <= steps; ++k) {
            const double t = k * orbit.spacing_;
            // Φ' = 1/(2r²) + ln(r/α_r) - 1 integrates exactly at the fixed point
            const double dphi = 0.5 / (y0[0] * y0[0]) - 1.0;
            orbit.times_.push_back(t);
            orbit.states_.push_back({y0[0], 0.0, dphi * t});
        }
        return orbit;
    }

    // substeps for fixed-step evaluation between checkpoints: resolve the
    // fastest local time scale r² with margin
    double r_min = y0[0];

    auto stepper = ode::make_controlled(tol * 1e-3, tol * 1e-3, ode::runge_kutta_fehlberg78<RAlphaOrbit::State>());
    const auto rhs = orbit.rhs();
    RAlphaOrbit::State y = y0;
    double winding = 0.0;
    double last_angle = orbit.rotation(y0);
    const int steps = static_cast<int>(std::ceil(t_max / orbit.spacing_));
    std::optional<std::size_t> bracket;

    for (int k = 1; k <= steps; ++k) {
        const double t0 = (k - 1) * orbit.spacing_;
        const double t1 = k * orbit.spacing_;
        ode::integrate_adaptive(stepper, rhs, y, t0, t1, orbit.spacing_ / 8);
        orbit.times_.push_back(t1);
        orbit.states_.push_back(y);
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || y[0] <= 0.0 || y[0] > 1e150) {
            orbit.status_ = OrbitStatus::Escaped;
            orbit.escape_time_ = t1;
            orbit.times_.pop_back();
            orbit.states_.pop_back();
            break;
        }
        r_min = std::min(r_min, y[0]);
        // With b <= 0 the force 1/r³ - 2b/r is positive for every r, so an
        // outward-moving orbit never turns back.
        if (epsilon_branch <= 0 && y[1] > 0.0) {
            orbit.status_ = OrbitStatus::Escaped;
            orbit.escape_time_ = t1;
            break;
        }
        if (epsilon_branch > 0 && !bracket) {
            const double a = orbit.rotation(y);
            double d = a - last_angle;
            if (d > std::numbers::pi) d -= 2 * std::numbers::pi;
            if (d < -std::numbers::pi) d += 2 * std::numbers::pi;
            winding += d;
            last_angle = a;
            if (std::abs(winding) >= 2 * std::numbers::pi) bracket = orbit.times_.size() - 2;
        }
    }
    orbit.substeps_ = std::max(4, static_cast<int>(std::ceil(orbit.spacing_ / (0.05 * r_min * r_min))));

    if (orbit.status_ == OrbitStatus::Escaped) return orbit;
    if (!bracket) {
        orbit.status_ = OrbitStatus::NotClosed;
        return orbit;
    }

    // Bisection on the accumulated rotation inside the bracketing interval.
    const std::size_t kb = *bracket;
    double wind_before = 0.0;
    {
        double la = orbit.rotation(orbit.states_[0]);
        for (std::size_t i = 1; i <= kb; ++i) {
            const double a = orbit.rotation(orbit.states_[i]);
            double d = a - la;
            if (d > std::numbers::pi) d -= 2 * std::numbers::pi;
            if (d < -std::numbers::pi) d += 2 * std::numbers::pi;
            wind_before += d;
            la = a;
        }
    }
    const double target = winding > 0 ? 2 * std::numbers::pi : -2 * std::numbers::pi;
    const double base_angle = orbit.rotation(orbit.states_[kb]);
    auto excess = [&](double t) {
        double d = orbit.rotation(orbit.at(t)) - base_angle;
        if (d > std::numbers::pi) d -= 2 * std::numbers::pi;
        if (d < -std::numbers::pi) d += 2 * std::numbers::pi;
        return std::abs(wind_before + d) - std::abs(target);
    };
    double lo = orbit.times_[kb];
    double hi = orbit.times_[kb + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0 ? lo : hi) = mid;
    }
    const double period = 0.5 * (lo + hi);
    const auto yT = orbit.at(period);
    const double mismatch = std::abs(yT[0] - y0[0]) + std::abs(yT[1] - y0[1]);
    if (mismatch < std::max(tol, 1e-12)) {
        orbit.status_ = OrbitStatus::Periodic;
        orbit.period_ = period;
    } else {
        orbit.status_ = OrbitStatus::NotClosed;
    }
    return orbit;
}

// ---------------------------------------------------------------------------
// Exact solutions
// ---------------------------------------------------------------------------

enum class SolutionKind { StandingWave, SatsumaYajima, Peregrine, KuznetsovMa, Akhmediev, Gausson, LogBreather };

/// Translation, phase and scaling symmetry applied on top of a solution:
/// e^{iθ} λ^{2/p} u(λ²t, λ(x - x₀)).
struct Symmetry {
    double shift = 0.0;
    double phase = 0.0;
    double scale = 1.0;
};

struct ExactSolution {
    SolutionKind kind = SolutionKind::SatsumaYajima;
    double omega = 1.0;           // StandingWave, Gausson
    double p = 2.0;               // StandingWave power
    double a = 1.0;               // KuznetsovMa, Akhmediev
    std::complex<double> alpha{}; // LogBreather
    std::shared_ptr<const RAlphaOrbit> orbit;
    Symmetry symmetry{};

    static ExactSolution standing_wave(double omega, double p) {
        if (!(omega > 0.0)) throw ParameterError("standing wave requires omega > 0");
        if (!(p > 0.0)) throw ParameterError("standing wave requires p > 0");
        ExactSolution s;
        s.kind = SolutionKind::StandingWave;
        s.omega = omega;
        s.p = p;
        return s;
    }
    static ExactSolution satsuma_yajima() { return {}; }
    static ExactSolution peregrine() {
        ExactSolution s;
        s.kind = SolutionKind::Peregrine;
        return s;
    }
    static ExactSolution kuznetsov_ma(double a) {
        if (!(a > 0.5)) throw ParameterError("Kuznetsov-Ma requires a > 1/2");
        ExactSolution s;
        s.kind = SolutionKind::KuznetsovMa;
        s.a = a;
        return s;
    }
    static ExactSolution akhmediev(double a) {
        if (!(a > 0.0 && a < 0.5)) throw ParameterError("Akhmediev requires 0 < a < 1/2");
        ExactSolution s;
        s.kind = SolutionKind::Akhmediev;
        s.a = a;
        return s;
    }
    static ExactSolution gausson(double omega) {
        ExactSolution s;
        s.kind = SolutionKind::Gausson;
        s.omega = omega;
        return s;
    }
    /// Log-NLS breather of i u_t + u_xx = -log(|u|²) u; the orbit is
    /// integrated on the periodic branch over [0, t_max].
    static ExactSolution log_breather(std::complex<double> alpha, double t_max = 10.0, double tol = 1e-10) {
        if (!(alpha.real() > 0.0)) throw ParameterError("log breather requires Re(alpha) > 0");
        ExactSolution s;
        s.kind = SolutionKind::LogBreather;
        s.alpha = alpha;
        s.orbit = std::make_shared<RAlphaOrbit>(solve_r_alpha(alpha, +1, t_max, tol));
        return s;
    }

    ExactSolution transformed(Symmetry sym) const {
        ExactSolution s = *this;
        s.symmetry = sym;
        return s;
    }

    /// Power of the nonlinearity that fixes the scaling exponent 2/p.
    double power() const { return kind == SolutionKind::StandingWave ? p : 2.0; }

    BackgroundKind background() const {
        switch (kind) {
        case SolutionKind::Peregrine:
        case SolutionKind::KuznetsovMa:
        case SolutionKind::Akhmediev: return BackgroundKind::Stokes;
        default: return BackgroundKind::Zero;
        }
    }

    /// The equation this solution satisfies, in the lab frame.
    ModelSpec model() const {
        switch (kind) {
        case SolutionKind::StandingWave: return ModelSpec::power(-1, p, 1);
        case SolutionKind::Gausson:
        case SolutionKind::LogBreather: return ModelSpec::log_nls(-1, 1);
        default: return ModelSpec::power(-1, 2.0, 1);
        }
    }

    std::string id() const;
};

namespace detail {

inline cplx near_singular_guard(cplx num, cplx den) {
    if (std::abs(den) < 1e-14) throw NumericalError("near-singular evaluation");
    return num / den;
}

inline cplx sech_pow(double y, double e) { return std::pow(2.0 / (std::exp(y) + std::exp(-y)), e); }

// u(t, x) before the symmetry transform.
inline cplx eval_point(const ExactSolution& s, double t, double x) {
    using std::cos, std::sin, std::cosh, std::exp, std::sqrt;
    const cplx I{0.0, 1.0};
    switch (s.kind) {
    case SolutionKind::StandingWave: {
        const double p = s.p, w = s.omega;
        const double amp = std::pow(w, 1.0 / p) * std::pow((p + 2.0) / 2.0, 1.0 / p);
        return std::polar(1.0, w * t) * amp * sech_pow(0.5 * p * sqrt(w) * x, 2.0 / p).real();
    }
    case SolutionKind::SatsumaYajima: {
        // numerator and denominator divided by e^{4|x|} to stay finite
        const double ax = std::abs(x);
        auto ch = [ax](double c) { return 0.5 * (exp((c - 4.0) * ax) + exp((-c - 4.0) * ax)); };
        // carrier e^{it}: without it the profile does not solve the cubic equation
        const cplx num = 4.0 * std::numbers::sqrt2 * std::polar(1.0, t) * (ch(3.0) + 3.0 * std::polar(1.0, 8.0 * t) * ch(1.0));
        const double den = ch(4.0) + 4.0 * ch(2.0) + 3.0 * cos(8.0 * t) * exp(-4.0 * ax);
        return near_singular_guard(num, den);
    }
    case SolutionKind::Peregrine: {
        const cplx frac = near_singular_guard(4.0 * (1.0 + 2.0 * I * t), 1.0 + 4.0 * t * t + 2.0 * x * x);
        return std::polar(1.0, t) * (1.0 - frac);
    }
    case SolutionKind::KuznetsovMa: {
        const double a = s.a;
        const double al = sqrt(8.0 * a * (2.0 * a - 1.0));
        const double be = sqrt(2.0 * (2.0 * a - 1.0));
        const double den = al * cosh(be * x) - std::numbers::sqrt2 * be * cos(al * t);
        if (std::isinf(den)) return std::polar(1.0, t);
        const cplx num = std::numbers::sqrt2 * be * (be * be * cos(al * t) + I * al * sin(al * t));
        return std::polar(1.0, t) * (1.0 - near_singular_guard(num, den));
    }
    case SolutionKind::Akhmediev: {
        const double a = s.a;
        const double be = sqrt(8.0 * a * (1.0 - 2.0 * a));
        const double al = sqrt(2.0 * (1.0 - 2.0 * a));
        const cplx num = al * al * cosh(be * t) + I * be * std::sinh(be * t);
        const double den = sqrt(2.0 * a) * cos(al * x) - cosh(be * t);
        return std::polar(1.0, t) * (1.0 + near_singular_guard(num, den));
    }
    case SolutionKind::Gausson:
        return std::polar(exp(0.5 * (s.omega + 1.0) - 0.5 * x * x), s.omega * t);
    case SolutionKind::LogBreather:
        break;
    }
    throw ParameterError("log breather is evaluated on whole grids");
}

} // namespace detail

/// Assembles the log-NLS breather from its orbit at time t.
inline Field1D eval_log_breather(const RAlphaOrbit& orbit, double t, const Grid1D& grid) {
    const auto [r, rdot, phi] = orbit.at(t);
    const double ar = orbit.alpha().real();
    const double amp = std::sqrt(ar / r);
    CplxVec v(grid.points());
    for (int j = 0; j < grid.points(); ++j) {
        const double x = grid.x(j);
        const cplx expo{0.5 - x * x / (4.0 * r * r), -phi + rdot / r * x * x / 4.0};
        v[j] = amp * std::exp(expo);
    }
    return Field1D(grid, std::move(v), BackgroundKind::Zero, t);
}

/// Pointwise evaluation of a catalog solution at time t.
inline Field1D eval_exact(const ExactSolution& sol, double t, const Grid1D& grid) {
    const auto& sym = sol.symmetry;
    if (sym.scale != 1.0) {
        if (!(sym.scale > 0.0)) throw ParameterError("scaling factor must be positive");
        if (sol.background() == BackgroundKind::Stokes)
            throw ParameterError("scaling changes the Stokes background; only lambda = 1 is allowed");
        if (sol.kind == SolutionKind::Gausson || sol.kind == SolutionKind::LogBreather)
            throw ParameterError("scaling is not a symmetry of the logarithmic NLS");
    }
    const double lam = sym.scale;
    const double amp = std::pow(lam, 2.0 / sol.power());
    const cplx rot = std::polar(amp, sym.phase);
    const double ts = lam * lam * t;

    std::optional<double> boundary_tol = kDefaultStokesBoundaryTol;
    if (sol.kind == SolutionKind::Akhmediev) boundary_tol = std::nullopt; // spatially periodic background

    if (sol.kind == SolutionKind::LogBreather) {
        if (!sol.orbit) throw ParameterError("log breather has no orbit");
        if (sym.shift == 0.0 && sym.phase == 0.0) return eval_log_breather(*sol.orbit, ts, grid);
        const auto [r, rdot, phi] = sol.orbit->at(ts);
        const double ar = sol.alpha.real();
        CplxVec v(grid.points());
        for (int j = 0; j < grid.points(); ++j) {
            const double x = grid.x(j) - sym.shift;
            const cplx expo{0.5 - x * x / (4.0 * r * r), -phi + rdot / r * x * x / 4.0};
            v[j] = rot * std::sqrt(ar / r) * std::exp(expo);
        }
        return Field1D(grid, std::move(v), BackgroundKind::Zero, t);
    }

    CplxVec v(grid.points());
    for (int j = 0; j < grid.points(); ++j)
        v[j] = rot * detail::eval_point(sol, ts, lam * (grid.x(j) - sym.shift));
    return Field1D(grid, std::move(v), sol.background(), t, boundary_tol);
}

/// Main time period, or nullopt for the time-aperiodic Peregrine and
/// Akhmediev solutions (and log breathers whose orbit did not close).
/// Satsuma-Yajima and Stokes-background periods refer to e^{-it}u, i.e. they
/// are periods of |u| modulo the unit carrier.
inline std::optional<double> exact_period(const ExactSolution& sol) {
    const double lam2 = sol.symmetry.scale * sol.symmetry.scale;
    switch (sol.kind) {
    case SolutionKind::SatsumaYajima: return std::numbers::pi / 4.0 / lam2;
    case SolutionKind::KuznetsovMa: return 2.0 * std::numbers::pi / std::sqrt(8.0 * sol.a * (2.0 * sol.a - 1.0));
    case SolutionKind::StandingWave:
    case SolutionKind::Gausson: return 2.0 * std::numbers::pi / sol.omega / lam2;
    case SolutionKind::LogBreather: return sol.orbit ? sol.orbit->period() : std::nullopt;
    case SolutionKind::Peregrine:
    case SolutionKind::Akhmediev: return std::nullopt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Registry and string ids ("kuznetsov-ma:a=1.0")
// ---------------------------------------------------------------------------

struct CatalogEntry {
    std::string id;
    std::string parameters;
    BackgroundKind background;
    std::string period;
};

inline std::vector<CatalogEntry> catalog_entries() {
    return {
        {"standing-wave", "omega > 0, p > 0 (defaults omega=1, p=2)", BackgroundKind::Zero, "2pi/omega"},
        {"satsuma-yajima", "none", BackgroundKind::Zero, "pi/4"},
        {"peregrine", "none", BackgroundKind::Stokes, "aperiodic"},
        {"kuznetsov-ma", "a > 1/2", BackgroundKind::Stokes, "2pi/alpha, alpha = sqrt(8a(2a-1))"},
        {"akhmediev", "0 < a < 1/2", BackgroundKind::Stokes, "aperiodic"},
        {"gausson", "omega real (default 1)", BackgroundKind::Zero, "2pi/omega"},
        {"log-breather", "ar > 0, ai real (alpha = ar + i ai)", BackgroundKind::Zero, "period of r_alpha"},
    };
}

inline std::string format_catalog_table() {
    std::ostringstream os;
    os << "id               background  parameters                                period\n";
    for (const auto& e : catalog_entries()) {
        std::string id = e.id, bg = to_string(e.background), par = e.parameters;
        id.resize(std::max<std::size_t>(id.size(), 16), ' ');
        bg.resize(std::max<std::size_t>(bg.size(), 11), ' ');
        par.resize(std::max<std::size_t>(par.size(), 41), ' ');
        os << id << ' ' << bg << ' ' << par << ' ' << e.period << '\n';
    }
    return os.str();
}

/// Parses "name" or "name:key=value,key=value".
inline ExactSolution parse_catalog_id(std::string_view text) {
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    std::map<std::string, double> kv;
    if (colon != std::string_view::npos) {
        std::string rest(text.substr(colon + 1));
        std::istringstream is(rest);
        std::string item;
        while (std::getline(is, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParameterError("catalog parameter '" + item + "' is not key=value");
            try {
                kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw ParameterError("catalog parameter '" + item + "' has a non-numeric value");
            }
        }
    }
    auto get = [&](const std::string& k, double def) {
        auto it = kv.find(k);
        if (it == kv.end()) return def;
        double v = it->second;
        kv.erase(it);
        return v;
    };
    ExactSolution s;
    if (name == "standing-wave") {
        const double w = get("omega", 1.0);
        s = ExactSolution::standing_wave(w, get("p", 2.0));
    } else if (name == "satsuma-yajima") {
        s = ExactSolution::satsuma_yajima();
    } else if (name == "peregrine") {
        s = ExactSolution::peregrine();
    } else if (name == "kuznetsov-ma") {
        s = ExactSolution::kuznetsov_ma(get("a", 1.0));
    } else if (name == "akhmediev") {
        s = ExactSolution::akhmediev(get("a", 0.25));
    } else if (name == "gausson") {
        s = ExactSolution::gausson(get("omega", 1.0));
    } else if (name == "log-breather") {
        const double ar = get("ar", 1.0);
        const double ai = get("ai", 0.0);
        s = ExactSolution::log_breather({ar, ai}, get("tmax", 10.0));
    } else {
        throw ParameterError("unknown catalog id '" + name + "'");
    }
    Symmetry sym;
    sym.shift = get("x0", 0.0);
    sym.phase = get("theta", 0.0);
    sym.scale = get("lambda", 1.0);
    if (!kv.empty()) throw ParameterError("unknown catalog parameter '" + kv.begin()->first + "' for " + name);
    if (sym.shift != 0.0 || sym.phase != 0.0 || sym.scale != 1.0) s = s.transformed(sym);
    return s;
}

inline std::string ExactSolution::id() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case SolutionKind::StandingWave: os << "standing-wave:omega=" << omega << ",p=" << p; break;
    case SolutionKind::SatsumaYajima: os << "satsuma-yajima"; break;
    case SolutionKind::Peregrine: os << "peregrine"; break;
    case SolutionKind::KuznetsovMa: os << "kuznetsov-ma:a=" << a; break;
    case SolutionKind::Akhmediev: os << "akhmediev:a=" << a; break;
    case SolutionKind::Gausson: os << "gausson:omega=" << omega; break;
    case SolutionKind::LogBreather: os << "log-breather:ar=" << alpha.real() << ",ai=" << alpha.imag(); break;
    }
    return os.str();
}

} // namespace nlslab
