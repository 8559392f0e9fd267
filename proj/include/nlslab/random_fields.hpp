#pragma once

// Seeded band-limited complex Gaussian fields with a Gaussian decay envelope.

#include <cmath>
#include <cstdint>
#include <random>

#include "grid_field.hpp"

namespace nlslab {

struct RandomFieldSpec {
    std::uint64_t seed = 0;
    int modes = 6;             // Fourier modes per sign, k = π m / 8
    double amplitude = 1.0;    // peak modulus after normalization
    double envelope = 25.0;    // e^{-x²/envelope}
};

/// u(x) = A e^{-x²/envelope} Σ_m c_m e^{i k_m x} / max|Σ|, c_m standard complex normal.
inline CplxVec random_profile(const Grid1D& grid, const RandomFieldSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> coeff;
    std::vector<double> ks;
    for (int m = -spec.modes; m <= spec.modes; ++m) {
        const double re = normal(rng);
        const double im = normal(rng);
        coeff.emplace_back(re, im);
        ks.push_back(std::numbers::pi * m / 8.0);
    }
    CplxVec v(grid.points());
    double peak = 0.0;
    for (int j = 0; j < grid.points(); ++j) {
        const double x = grid.x(j);
        cplx s{0.0};
        for (std::size_t m = 0; m < coeff.size(); ++m) s += coeff[m] * std::polar(1.0, ks[m] * x);
        v[j] = s * std::exp(-x * x / spec.envelope);
        peak = std::max(peak, std::abs(v[j]));
    }
    if (peak > 0.0)
        for (auto& z : v) z *= spec.amplitude / peak;
    return v;
}

inline Field1D random_field(const Grid1D& grid, const RandomFieldSpec& spec) {
    return Field1D(grid, random_profile(grid, spec), BackgroundKind::Zero, 0.0);
}

/// 1 + random perturbation: a Stokes-background field already in the v-frame.
inline Field1D random_stokes_field(const Grid1D& grid, const RandomFieldSpec& spec) {
    auto w = random_profile(grid, spec);
    for (auto& z : w) z += 1.0;
    return Field1D(grid, std::move(w), BackgroundKind::Stokes, 0.0);
}

} // namespace nlslab
