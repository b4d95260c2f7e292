#pragma once

// Extremum of a scalar function over [a,b]: uniform grid scan followed by
// golden-section refinement inside the bracketing interval.

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

namespace phsdecay {

inline constexpr int kDefaultGridSize = 1001;
inline constexpr double kRefineWidthRel = 1e-10;

/// Default grid resolution, overridable through PHS_DECAY_GRID.
inline int default_grid_size() {
    if (const char* env = std::getenv("PHS_DECAY_GRID")) {
        const int g = std::atoi(env);
        if (g >= 2) return g;
    }
    return kDefaultGridSize;
}

struct ScanExtremum {
    double arg = 0.0;
    double value = 0.0;
};

/// Minimum of f over grid_size uniform samples of [a,b], no refinement.
inline ScanExtremum scan_minimum_coarse(const std::function<double(double)>& f,
                                        double a, double b, int grid_size) {
    if (grid_size < 2) throw std::domain_error("grid_size must be >= 2");
    ScanExtremum best{a, f(a)};
    for (int i = 1; i < grid_size; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / (grid_size - 1);
        const double v = f(x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

/// Minimum over [a,b]: coarse scan, then golden-section on the bracketing
/// interval down to width 1e-10*(b-a).
inline ScanExtremum scan_minimum(const std::function<double(double)>& f,
                                 double a, double b, int grid_size) {
    const ScanExtremum coarse = scan_minimum_coarse(f, a, b, grid_size);
    const double h = (b - a) / (grid_size - 1);
    double lo = std::max(a, coarse.arg - h);
    double hi = std::min(b, coarse.arg + h);

    constexpr double invphi = 0.6180339887498949;
    const double tol = kRefineWidthRel * (b - a);
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    ScanExtremum refined = (f1 <= f2) ? ScanExtremum{x1, f1} : ScanExtremum{x2, f2};
    return refined.value < coarse.value ? refined : coarse;
}

inline ScanExtremum scan_maximum_coarse(const std::function<double(double)>& f,
                                        double a, double b, int grid_size) {
    ScanExtremum m = scan_minimum_coarse([&](double x) { return -f(x); }, a, b,
                                         grid_size);
    return {m.arg, -m.value};
}

inline ScanExtremum scan_maximum(const std::function<double(double)>& f,
                                 double a, double b, int grid_size) {
    ScanExtremum m = scan_minimum([&](double x) { return -f(x); }, a, b,
                                  grid_size);
    return {m.arg, -m.value};
}

}  // namespace phsdecay
