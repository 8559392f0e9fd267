#pragma once

// Uniform periodic 1-D grids, sampled complex fields, spectral derivatives
// and trapezoidal quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"

namespace nlslab {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;
using CplxVec = std::vector<cplx>;

/// Periodic grid on [-L, L) with N points, x_j = -L + j dx.
class Grid1D {
public:
    Grid1D(double half_width, int points) : length_(half_width), points_(points) {
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw ParameterError("grid half-width L must be positive and finite");
        if (points < 16 || (points & (points - 1)) != 0)
            throw ParameterError("grid point count N must be a power of two >= 16, got " +
                                 std::to_string(points));
        dx_ = 2.0 * half_width / points;
    }

    double length() const { return length_; }
    int points() const { return points_; }
    double dx() const { return dx_; }
    double x(int j) const { return -length_ + j * dx_; }

    RealVec coordinates() const {
        RealVec xs(points_);
        for (int j = 0; j < points_; ++j) xs[j] = x(j);
        return xs;
    }

    /// Angular wavenumbers in FFT order.
    RealVec wavenumbers() const {
        RealVec k(points_);
        const double base = std::numbers::pi / length_;
        for (int j = 0; j < points_; ++j) {
            const int m = j < points_ / 2 ? j : j - points_;
            k[j] = base * m;
        }
        return k;
    }

    double k_max() const { return std::numbers::pi / dx_; }

    friend bool operator==(const Grid1D& a, const Grid1D& b) {
        return a.length_ == b.length_ && a.points_ == b.points_;
    }

private:
    double length_;
    int points_;
    double dx_;
};

/// Boundary condition at spatial infinity: decay to zero, or the Stokes
/// plane wave e^{it}.
enum class BackgroundKind { Zero, Stokes };

inline const char* to_string(BackgroundKind b) { return b == BackgroundKind::Zero ? "zero" : "stokes"; }

inline constexpr double kDefaultStokesBoundaryTol = 1e-6;

/// Complex samples u(t, x_j) on a grid. Immutable after construction.
///
/// Stokes fields are checked at the two outermost samples: ||u| - 1| must be
/// below the boundary tolerance. Spatially periodic backgrounds (which never
/// approach a plane wave) opt out with `std::nullopt`.
class Field1D {
public:
    Field1D(Grid1D grid, CplxVec values, BackgroundKind background, double time,
            std::optional<double> boundary_tol = kDefaultStokesBoundaryTol)
        : grid_(grid), values_(std::move(values)), background_(background), time_(time),
          boundary_tol_(boundary_tol) {
        if (static_cast<int>(values_.size()) != grid_.points())
            throw ParameterError("field has " + std::to_string(values_.size()) +
                                 " samples, grid expects " + std::to_string(grid_.points()));
        for (const auto& v : values_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("field contains non-finite samples");
        if (background_ == BackgroundKind::Stokes && boundary_tol_) {
            const double left = std::abs(std::abs(values_.front()) - 1.0);
            const double right = std::abs(std::abs(values_.back()) - 1.0);
            if (std::max(left, right) > *boundary_tol_)
                throw NumericalError("Stokes field does not approach unit modulus at the boundary (|(|u|-1)| = " +
                                     std::to_string(std::max(left, right)) + ")");
        }
    }

    const Grid1D& grid() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    const CplxVec& data() const { return values_; }
    BackgroundKind background() const { return background_; }
    double time() const { return time_; }
    std::optional<double> boundary_tol() const { return boundary_tol_; }
    int size() const { return grid_.points(); }
    const cplx& operator[](int j) const { return values_[j]; }

    Field1D with_values(CplxVec values) const {
        return Field1D(grid_, std::move(values), background_, time_, boundary_tol_);
    }
    Field1D with_time(double t) const { return Field1D(grid_, values_, background_, t, boundary_tol_); }

private:
    Grid1D grid_;
    CplxVec values_;
    BackgroundKind background_;
    double time_;
    std::optional<double> boundary_tol_;
};

/// Periodic trapezoidal rule dx * sum(samples).
inline double quadrature(std::span<const double> samples, const Grid1D& grid) {
    if (static_cast<int>(samples.size()) != grid.points())
        throw ParameterError("quadrature: sample count does not match grid");
    double sum = 0.0;
    for (double s : samples) {
        if (!std::isfinite(s)) throw NumericalError("non-finite integrand");
        sum += s;
    }
    return grid.dx() * sum;
}

/// Spectral derivative of raw samples; order 1, 2 or 4.
inline CplxVec spectral_derivative(std::span<const cplx> values, const Grid1D& grid, int order) {
    if (order != 1 && order != 2 && order != 4)
        throw ParameterError("spectral derivative order must be 1, 2 or 4, got " + std::to_string(order));
    const int n = grid.points();
    auto spec = fft::forward(values);
    const auto k = grid.wavenumbers();
    for (int j = 0; j < n; ++j) {
        switch (order) {
        case 1:
            spec[j] *= (j == n / 2) ? cplx{0.0} : cplx{0.0, k[j]};
            break;
        case 2:
            spec[j] *= -k[j] * k[j];
            break;
        default:
            spec[j] *= k[j] * k[j] * k[j] * k[j];
            break;
        }
    }
    return fft::inverse(spec);
}

/// Field version: (ik)^order applied in frequency space; the time stamp is
/// kept. The derivative of a Stokes field decays, so the result is a
/// zero-background field.
inline Field1D spectral_derivative(const Field1D& f, int order) {
    return Field1D(f.grid(), spectral_derivative(f.values(), f.grid(), order), BackgroundKind::Zero,
                   f.time());
}

/// Removes the Stokes phase: v = e^{-it} u.
inline Field1D stokes_frame(const Field1D& u) {
    const cplx rot = std::polar(1.0, -u.time());
    CplxVec v(u.values().begin(), u.values().end());
    for (auto& z : v) z *= rot;
    return u.with_values(std::move(v));
}

inline Field1D sample_field(const Grid1D& grid, BackgroundKind bg, double t, auto&& fn) {
    CplxVec v(grid.points());
    for (int j = 0; j < grid.points(); ++j) v[j] = fn(grid.x(j));
    return Field1D(grid, std::move(v), bg, t);
}

inline double l2_distance(std::span<const cplx> a, std::span<const cplx> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s);
}

inline double l2_norm(std::span<const cplx> a) {
    double s = 0.0;
    for (const auto& z : a) s += std::norm(z);
    return std::sqrt(s);
}

inline double sup_norm(std::span<const cplx> a) {
    double m = 0.0;
    for (const auto& z : a) m = std::max(m, std::abs(z));
    return m;
}

} // namespace nlslab
