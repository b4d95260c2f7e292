#pragma once

// Matrix-valued coefficient L(x): either closed-form entries in the
// expression grammar (analytic derivative) or a uniform sample table
// (linear interpolation, 4th-order finite-difference derivative).

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "phsdecay/expression.hpp"

namespace phsdecay {

enum class DerivativeMode { Analytic, FiniteDifference };

class CoefficientFunction {
public:
    CoefficientFunction() = default;

    /// Closed-form entries; one expression string per matrix entry.
    static CoefficientFunction from_expressions(
        const std::vector<std::vector<std::string>>& entries) {
        CoefficientFunction cf;
        cf.mode_ = DerivativeMode::Analytic;
        const std::size_t n = entries.size();
        cf.n_ = static_cast<int>(n);
        cf.exprs_.resize(n);
        cf.dexprs_.resize(n);
        cf.expr_text_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (entries[i].size() != n)
                throw std::invalid_argument("coefficient matrix is not square");
            cf.exprs_[i].resize(n);
            cf.dexprs_[i].resize(n);
            cf.expr_text_[i] = entries[i];
            for (std::size_t j = 0; j < n; ++j) {
                cf.exprs_[i][j] = parse_expression(entries[i][j]);
                cf.dexprs_[i][j] = cf.exprs_[i][j]->derivative();
            }
        }
        return cf;
    }

    /// Constant matrix.
    static CoefficientFunction from_constant(const Eigen::MatrixXd& value) {
        if (value.rows() != value.cols())
            throw std::invalid_argument("coefficient matrix is not square");
        std::vector<std::vector<std::string>> entries(value.rows());
        for (Eigen::Index i = 0; i < value.rows(); ++i)
            for (Eigen::Index j = 0; j < value.cols(); ++j)
                entries[i].push_back(constant_expression(value(i, j))->str());
        return from_expressions(entries);
    }

    /// Uniform sample table; grid must be strictly increasing.
    static CoefficientFunction from_samples(
        const std::vector<double>& grid,
        const std::vector<Eigen::MatrixXd>& samples) {
        if (grid.size() < 2 || grid.size() != samples.size())
            throw std::invalid_argument("sample table needs >= 2 matching entries");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::invalid_argument("sample grid must be strictly increasing");
        const Eigen::Index n = samples.front().rows();
        for (const auto& s : samples)
            if (s.rows() != n || s.cols() != n)
                throw std::invalid_argument("inconsistent sample matrix shapes");
        CoefficientFunction cf;
        cf.mode_ = DerivativeMode::FiniteDifference;
        cf.n_ = static_cast<int>(n);
        cf.grid_ = grid;
        cf.samples_ = samples;
        cf.build_fd_derivatives();
        return cf;
    }

    int dim() const { return n_; }
    DerivativeMode derivative_mode() const { return mode_; }
    bool is_expression_backed() const { return !exprs_.empty(); }

    const std::vector<std::vector<std::string>>& expression_text() const {
        return expr_text_;
    }
    const std::vector<double>& sample_grid() const { return grid_; }
    const std::vector<Eigen::MatrixXd>& sample_values() const { return samples_; }

    Eigen::MatrixXd eval(double x) const {
        if (is_expression_backed()) {
            Eigen::MatrixXd m(n_, n_);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    m(i, j) = exprs_[i][j]->eval(x);
            return m;
        }
        return interpolate(samples_, x);
    }

    Eigen::MatrixXd derivative(double x) const {
        if (is_expression_backed()) {
            Eigen::MatrixXd m(n_, n_);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    m(i, j) = dexprs_[i][j]->eval(x);
            return m;
        }
        return interpolate(dsamples_, x);
    }

    /// True when every entry is at most affine in x (checked by second
    /// differences at a few probe points).
    bool is_affine_on(double a, double b) const {
        const double h = (b - a) / 8.0;
        for (int k = 1; k <= 6; ++k) {
            const double x = a + k * h;
            const Eigen::MatrixXd second =
                eval(x - h) - 2.0 * eval(x) + eval(x + h);
            const double scale = eval(x).cwiseAbs().maxCoeff() + 1.0;
            if (second.cwiseAbs().maxCoeff() > 1e-9 * scale * h) return false;
        }
        return true;
    }

private:
    void build_fd_derivatives() {
        // 4th-order central differences on the uniform table, one-sided at
        // the ends; falls back to 2nd order when the table is short.
        const int m = static_cast<int>(grid_.size());
        const double h = (grid_.back() - grid_.front()) / (m - 1);
        dsamples_.resize(m);
        auto& s = samples_;
        if (m < 6) {
            for (int i = 0; i < m; ++i) {
                if (i == 0)
                    dsamples_[i] = (s[1] - s[0]) / h;
                else if (i == m - 1)
                    dsamples_[i] = (s[m - 1] - s[m - 2]) / h;
                else
                    dsamples_[i] = (s[i + 1] - s[i - 1]) / (2 * h);
            }
            return;
        }
        for (int i = 0; i < m; ++i) {
            if (i >= 2 && i <= m - 3) {
                dsamples_[i] =
                    (-s[i + 2] + 8.0 * s[i + 1] - 8.0 * s[i - 1] + s[i - 2]) /
                    (12.0 * h);
            } else if (i < 2) {
                dsamples_[i] = (-25.0 * s[i] + 48.0 * s[i + 1] - 36.0 * s[i + 2] +
                                16.0 * s[i + 3] - 3.0 * s[i + 4]) /
                               (12.0 * h);
            } else {
                dsamples_[i] = (25.0 * s[i] - 48.0 * s[i - 1] + 36.0 * s[i - 2] -
                                16.0 * s[i - 3] + 3.0 * s[i - 4]) /
                               (12.0 * h);
            }
        }
    }

    Eigen::MatrixXd interpolate(const std::vector<Eigen::MatrixXd>& values,
                                double x) const {
        if (x < grid_.front() - 1e-12 || x > grid_.back() + 1e-12)
            throw std::domain_error("x=" + std::to_string(x) +
                                    " outside sample table range");
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
        if (hi == 0) hi = 1;
        if (hi >= grid_.size()) hi = grid_.size() - 1;
        const std::size_t lo = hi - 1;
        const double t = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
        return (1.0 - t) * values[lo] + t * values[hi];
    }

    int n_ = 0;
    DerivativeMode mode_ = DerivativeMode::Analytic;
    std::vector<std::vector<Expression::Ptr>> exprs_;
    std::vector<std::vector<Expression::Ptr>> dexprs_;
    std::vector<std::vector<std::string>> expr_text_;
    std::vector<double> grid_;
    std::vector<Eigen::MatrixXd> samples_;
    std::vector<Eigen::MatrixXd> dsamples_;
};

}  // namespace phsdecay
