#pragma once

// Dense two-phase simplex with Bland's rule. Sized for grasp problems
// (tens of rows, a few hundred columns).

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "sabd/errors.hpp"

namespace sabd {

enum class Relation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

/// maximize c.x subject to A x (rel) b, x >= 0.
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<Relation> rel;
    Eigen::VectorXd c;
};

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
};

namespace detail {

class Tableau {
public:
    Tableau(Eigen::MatrixXd t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

    Eigen::MatrixXd& t() { return t_; }
    std::vector<int>& basis() { return basis_; }

    // Objective row holds reduced costs; entering column has a negative entry.
    LpStatus run(int columns, const std::vector<bool>& allowed, double eps, int max_iter, int& iterations) {
        const auto m = static_cast<int>(basis_.size());
        const int rhs = static_cast<int>(t_.cols()) - 1;
        while (iterations < max_iter) {
            int enter = -1;
            for (int j = 0; j < columns; ++j)
                if (allowed[static_cast<std::size_t>(j)] && t_(m, j) < -eps) {
                    enter = j;
                    break;
                }
            if (enter < 0) return LpStatus::optimal;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                const double a = t_(i, enter);
                if (a <= eps) continue;
                const double ratio = t_(i, rhs) / a;
                if (ratio < best - 1e-12 ||
                    (ratio <= best + 1e-12 && leave >= 0 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return LpStatus::unbounded;
            pivot(leave, enter);
            ++iterations;
        }
        return LpStatus::iteration_limit;
    }

    void pivot(int row, int col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f != 0.0) t_.row(i) -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

private:
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp, double eps = 1e-9, int max_iterations = 100000) {
    const auto m = static_cast<int>(lp.A.rows());
    const auto n = static_cast<int>(lp.A.cols());
    if (lp.b.size() != m || static_cast<int>(lp.rel.size()) != m || lp.c.size() != n)
        throw ConfigurationError("linear program dimensions do not agree");

    // columns: originals, one slack/surplus per inequality, one artificial per >= or = row
    Eigen::MatrixXd a = lp.A;
    Eigen::VectorXd b = lp.b;
    std::vector<Relation> rel = lp.rel;
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) {
            a.row(i) *= -1.0;
            b[i] = -b[i];
            if (rel[static_cast<std::size_t>(i)] == Relation::less_equal)
                rel[static_cast<std::size_t>(i)] = Relation::greater_equal;
            else if (rel[static_cast<std::size_t>(i)] == Relation::greater_equal)
                rel[static_cast<std::size_t>(i)] = Relation::less_equal;
        }
    }
    int slacks = 0, artificials = 0;
    for (auto r : rel) {
        if (r != Relation::equal) ++slacks;
        if (r != Relation::less_equal) ++artificials;
    }
    const int cols = n + slacks + artificials;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols + 1);
    std::vector<int> basis(static_cast<std::size_t>(m));
    std::vector<bool> is_artificial(static_cast<std::size_t>(cols), false);
    int s = n, art = n + slacks;
    for (int i = 0; i < m; ++i) {
        t.row(i).head(n) = a.row(i);
        t(i, cols) = b[i];
        const auto r = rel[static_cast<std::size_t>(i)];
        if (r == Relation::less_equal) {
            t(i, s) = 1.0;
            basis[static_cast<std::size_t>(i)] = s++;
        } else {
            if (r == Relation::greater_equal) t(i, s++) = -1.0;
            t(i, art) = 1.0;
            is_artificial[static_cast<std::size_t>(art)] = true;
            basis[static_cast<std::size_t>(i)] = art++;
        }
    }

    LpResult out;
    detail::Tableau tab(std::move(t), std::move(basis));
    auto& T = tab.t();
    std::vector<bool> allowed(static_cast<std::size_t>(cols), true);

    if (artificials > 0) {
        // phase 1: maximise -sum(artificials)
        T.row(m).setZero();
        for (int i = 0; i < m; ++i)
            if (is_artificial[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(i)])]) T.row(m) -= T.row(i);
        for (int j = 0; j < cols; ++j)
            if (is_artificial[static_cast<std::size_t>(j)]) T(m, j) = 0.0;
        const auto st = tab.run(cols, allowed, eps, max_iterations, out.iterations);
        if (st == LpStatus::iteration_limit) {
            out.status = st;
            return out;
        }
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (-T(m, cols) > 1e-9 * scale) {
            out.status = LpStatus::infeasible;
            return out;
        }
        for (int i = 0; i < m; ++i) {
            if (!is_artificial[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(i)])]) continue;
            for (int j = 0; j < n + slacks; ++j)
                if (std::abs(T(i, j)) > eps) {
                    tab.pivot(i, j);
                    break;
                }
        }
        for (int j = 0; j < cols; ++j)
            if (is_artificial[static_cast<std::size_t>(j)]) allowed[static_cast<std::size_t>(j)] = false;
    }

    // phase 2: reduced costs of the real objective
    T.row(m).setZero();
    for (int j = 0; j < n; ++j) T(m, j) = -lp.c[j];
    for (int i = 0; i < m; ++i) {
        const int bi = tab.basis()[static_cast<std::size_t>(i)];
        if (bi < n && lp.c[bi] != 0.0) T.row(m) += lp.c[bi] * T.row(i);
    }
    out.status = tab.run(cols, allowed, eps, max_iterations, out.iterations);
    out.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
        const int bi = tab.basis()[static_cast<std::size_t>(i)];
        if (bi < n) out.x[bi] = std::max(0.0, T(i, cols));
    }
    out.value = lp.c.dot(out.x);
    return out;
}

}  // namespace sabd
