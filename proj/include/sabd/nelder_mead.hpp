#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace sabd {

struct NelderMeadOptions {
    double f_tol = 1e-6;          // spread of the simplex values
    double x_tol = 1e-5;          // simplex extent around the best vertex
    int max_iterations = 200;
    double initial_step = 0.1;    // fraction of the box width, or absolute when unbounded
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Box-constrained Nelder-Mead; trial points are projected onto [lo, hi].
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                    const NelderMeadOptions& opt = {}) {
    const int n = static_cast<int>(x0.size());
    auto project = [&](Eigen::VectorXd x) { return x.cwiseMax(lo).cwiseMin(hi); };
    NelderMeadResult out;
    if (n == 0) {
        out.x = x0;
        out.f = f(x0);
        out.converged = true;
        return out;
    }
    x0 = project(x0);
    std::vector<Eigen::VectorXd> s(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> fv(static_cast<std::size_t>(n + 1));
    for (int i = 0; i < n; ++i) {
        const double width = hi[i] - lo[i];
        double step = std::isfinite(width) ? opt.initial_step * width : opt.initial_step;
        if (step == 0.0) continue;
        Eigen::VectorXd v = x0;
        v[i] += step;
        if (v[i] > hi[i]) v[i] = x0[i] - step;
        s[static_cast<std::size_t>(i + 1)] = project(v);
    }
    for (int i = 0; i <= n; ++i) fv[static_cast<std::size_t>(i)] = f(s[static_cast<std::size_t>(i)]);

    std::vector<int> idx(static_cast<std::size_t>(n + 1));
    auto sort = [&] {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)]; });
    };
    auto at = [&](int k) -> Eigen::VectorXd& { return s[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])]; };
    auto fat = [&](int k) -> double& { return fv[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])]; };

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        sort();
        double extent = 0.0;
        for (int k = 1; k <= n; ++k) extent = std::max(extent, (at(k) - at(0)).cwiseAbs().maxCoeff());
        if (fat(n) - fat(0) <= opt.f_tol && extent <= opt.x_tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < n; ++k) centroid += at(k);
        centroid /= n;
        const Eigen::VectorXd xr = project(centroid + (centroid - at(n)));
        const double fr = f(xr);
        if (fr < fat(0)) {
            const Eigen::VectorXd xe = project(centroid + 2.0 * (centroid - at(n)));
            const double fe = f(xe);
            if (fe < fr) {
                at(n) = xe;
                fat(n) = fe;
            } else {
                at(n) = xr;
                fat(n) = fr;
            }
            continue;
        }
        if (fr < fat(n - 1)) {
            at(n) = xr;
            fat(n) = fr;
            continue;
        }
        const bool outside = fr < fat(n);
        const Eigen::VectorXd xc = outside ? project(centroid + 0.5 * (xr - centroid))
                                           : project(centroid + 0.5 * (at(n) - centroid));
        const double fc = f(xc);
        if (fc < std::min(fr, fat(n))) {
            at(n) = xc;
            fat(n) = fc;
            continue;
        }
        for (int k = 1; k <= n; ++k) {
            at(k) = project(at(0) + 0.5 * (at(k) - at(0)));
            fat(k) = f(at(k));
        }
    }
    sort();
    out.x = at(0);
    out.f = fat(0);
    out.iterations = it;
    return out;
}

}  // namespace sabd
