#pragma once

// Scalar multiplier functions m(x) used to build the perturbed Lyapunov
// functional. Three closed-form families plus a sampled fallback.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace phsdecay {

enum class MultiplierFamily { Linear, Exponential, Affine, Sampled };

inline const char* to_string(MultiplierFamily f) {
    switch (f) {
        case MultiplierFamily::Linear: return "linear";
        case MultiplierFamily::Exponential: return "exponential";
        case MultiplierFamily::Affine: return "affine";
        default: return "sampled";
    }
}

class MultiplierSpec {
public:
    /// m(x) = x - x0
    static MultiplierSpec linear(double x0) {
        MultiplierSpec m;
        m.family_ = MultiplierFamily::Linear;
        m.p0_ = x0;
        return m;
    }

    /// m(x) = C * exp(beta * (x - a))
    static MultiplierSpec exponential(double C, double beta, double a) {
        if (C <= 0.0) throw std::domain_error("exponential multiplier needs C > 0");
        MultiplierSpec m;
        m.family_ = MultiplierFamily::Exponential;
        m.p0_ = C;
        m.p1_ = beta;
        m.p2_ = a;
        return m;
    }

    /// m(x) = q*x + d
    static MultiplierSpec affine(double q, double d) {
        MultiplierSpec m;
        m.family_ = MultiplierFamily::Affine;
        m.p0_ = q;
        m.p1_ = d;
        return m;
    }

    static MultiplierSpec sampled(std::vector<double> grid,
                                  std::vector<double> values,
                                  std::vector<double> derivatives) {
        if (grid.size() < 2 || grid.size() != values.size() ||
            grid.size() != derivatives.size())
            throw std::invalid_argument("sampled multiplier needs >= 2 matching samples");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::invalid_argument("sampled multiplier grid must increase");
        MultiplierSpec m;
        m.family_ = MultiplierFamily::Sampled;
        m.grid_ = std::move(grid);
        m.values_ = std::move(values);
        m.derivs_ = std::move(derivatives);
        return m;
    }

    MultiplierFamily family() const { return family_; }

    double eval(double x) const {
        switch (family_) {
            case MultiplierFamily::Linear: return x - p0_;
            case MultiplierFamily::Exponential:
                return p0_ * std::exp(p1_ * (x - p2_));
            case MultiplierFamily::Affine: return p0_ * x + p1_;
            default: return interp(values_, x);
        }
    }

    double derivative(double x) const {
        switch (family_) {
            case MultiplierFamily::Linear: return 1.0;
            case MultiplierFamily::Exponential: return p1_ * eval(x);
            case MultiplierFamily::Affine: return p0_;
            default: return interp(derivs_, x);
        }
    }

    /// True when m > 0 on (a,b] (sampled at a fine grid; m(a) = 0 allowed).
    bool positive_on(double a, double b, int grid_size = 1001) const {
        for (int i = 1; i < grid_size; ++i) {
            const double x = a + (b - a) * static_cast<double>(i) / (grid_size - 1);
            if (!(eval(x) > 0.0)) return false;
        }
        return eval(a) >= 0.0;
    }

    std::string describe() const {
        char buf[96];
        switch (family_) {
            case MultiplierFamily::Linear:
                std::snprintf(buf, sizeof(buf), "m(x)=x-%.12g", p0_);
                break;
            case MultiplierFamily::Exponential:
                std::snprintf(buf, sizeof(buf), "m(x)=%.12g*exp(%.12g*(x-%.12g))",
                              p0_, p1_, p2_);
                break;
            case MultiplierFamily::Affine:
                std::snprintf(buf, sizeof(buf), "m(x)=%.12g*x+%.12g", p0_, p1_);
                break;
            default:
                std::snprintf(buf, sizeof(buf), "m(x)=sampled[%zu]", grid_.size());
                break;
        }
        return buf;
    }

    // Family parameters (meaning depends on family).
    double param0() const { return p0_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

private:
    double interp(const std::vector<double>& v, double x) const {
        if (x < grid_.front() - 1e-12 || x > grid_.back() + 1e-12)
            throw std::domain_error("multiplier sample lookup outside its grid");
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
        hi = std::clamp<std::size_t>(hi, 1, grid_.size() - 1);
        const std::size_t lo = hi - 1;
        const double t = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
        return (1.0 - t) * v[lo] + t * v[hi];
    }

    MultiplierFamily family_ = MultiplierFamily::Linear;
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
    std::vector<double> grid_, values_, derivs_;
};

}  // namespace phsdecay
