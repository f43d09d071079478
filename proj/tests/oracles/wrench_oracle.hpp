#pragma once

// Brute-force check of the wrench LP through the support function of the
// reachable wrench set K = sum_c cap_c * conv(0, edges_c):
//   h(u) = sum_c cap_c * max(0, max_e u . w_ce)
// For any u with u . r = 1, h(u) bounds the achievable scale of r from
// above; the smallest such bound is the scale itself.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using V3 = Eigen::Vector3d;
using V6 = Eigen::Matrix<double, 6, 1>;
using M6 = Eigen::Matrix<double, 6, 6>;

struct PointContact {
    V3 position;  // mm
    V3 normal;    // unit, into the object
    double mu = 0.5;
    double cap = std::numeric_limits<double>::infinity();
};

inline std::vector<V6> edge_wrenches(const PointContact& c, const V3& center, int edges) {
    const V3 n = c.normal.normalized();
    const V3 helper = std::abs(n.x()) < 0.9 ? V3::UnitX() : V3::UnitY();
    const V3 t1 = n.cross(helper).normalized();
    const V3 t2 = n.cross(t1);
    std::vector<V6> out;
    for (int k = 0; k < edges; ++k) {
        const double a = 2.0 * M_PI * k / edges;
        const V3 f = n + c.mu * (std::cos(a) * t1 + std::sin(a) * t2);
        V6 w;
        w.head<3>() = f;
        w.tail<3>() = (1e-3 * (c.position - center)).cross(f);
        out.push_back(w);
    }
    return out;
}

class WrenchSet {
public:
    WrenchSet(const std::vector<PointContact>& contacts, const V3& center, int edges = 8) {
        for (const auto& c : contacts) {
            columns_.push_back(edge_wrenches(c, center, edges));
            caps_.push_back(c.cap);
        }
    }

    double support(const V6& u) const {
        double h = 0.0;
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            double best = 0.0;
            for (const auto& w : columns_[c]) best = std::max(best, u.dot(w));
            if (best <= 0.0) continue;
            if (!std::isfinite(caps_[c])) return std::numeric_limits<double>::infinity();
            h += caps_[c] * best;
        }
        return h;
    }

    /// Smoothed support (log-sum-exp at temperature tau) plus a log barrier
    /// keeping u . w < 0 on uncapped contacts. False outside the barrier's domain.
    bool smoothed(const V6& u, double tau, double& f, V6& g, M6& hess) const {
        f = 0.0;
        g.setZero();
        hess.setZero();
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            const auto& ws = columns_[c];
            if (!std::isfinite(caps_[c])) {
                for (const auto& w : ws) {
                    const double a = u.dot(w);
                    if (a >= 0.0) return false;
                    f -= tau * std::log(-a);
                    g -= tau * w / a;
                    hess += tau * w * w.transpose() / (a * a);
                }
                continue;
            }
            double top = 0.0;
            std::vector<double> s(ws.size());
            for (std::size_t e = 0; e < ws.size(); ++e) top = std::max(top, s[e] = u.dot(ws[e]) / tau);
            double z = std::exp(-top);
            for (double x : s) z += std::exp(x - top);
            f += caps_[c] * tau * (top + std::log(z));
            V6 mean = V6::Zero();
            M6 second = M6::Zero();
            for (std::size_t e = 0; e < ws.size(); ++e) {
                const double p = std::exp(s[e] - top) / z;
                mean += p * ws[e];
                second += p * ws[e] * ws[e].transpose();
            }
            g += caps_[c] * mean;
            hess += caps_[c] / tau * (second - mean * mean.transpose());
        }
        return true;
    }

    std::vector<V6> uncapped_edges() const {
        std::vector<V6> out;
        for (std::size_t c = 0; c < columns_.size(); ++c)
            if (!std::isfinite(caps_[c])) out.insert(out.end(), columns_[c].begin(), columns_[c].end());
        return out;
    }

    /// Random point of K: each contact spends a random share of its cap on
    /// a random convex combination of its edges.
    template <class Rng>
    V6 sample(Rng& rng, double infinite_cap = 50.0) const {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        V6 k = V6::Zero();
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            const double cap = std::isfinite(caps_[c]) ? caps_[c] : infinite_cap;
            std::vector<double> w(columns_[c].size());
            double sum = 0.0;
            for (auto& x : w) sum += (x = -std::log(1.0 - u01(rng)));
            const double share = u01(rng) * cap;
            for (std::size_t e = 0; e < w.size(); ++e) k += share * w[e] / sum * columns_[c][e];
        }
        return k;
    }

private:
    std::vector<std::vector<V6>> columns_;
    std::vector<double> caps_;
};

namespace detail {

/// Unit s in the plane coordinates with max_e (B s) . w_e < 0 over the given
/// edges, found by Newton on a smoothed max with a log barrier for |s| < 1.
inline std::optional<Eigen::Matrix<double, 5, 1>> interior_direction(const std::vector<V6>& edges,
                                                                     const Eigen::Matrix<double, 6, 5>& b) {
    using V5 = Eigen::Matrix<double, 5, 1>;
    using M5 = Eigen::Matrix<double, 5, 5>;
    std::vector<V5> a;
    for (const auto& w : edges) a.push_back(b.transpose() * w.normalized());
    auto worst = [&](const V5& s) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& e : a) m = std::max(m, e.dot(s));
        return m;
    };
    auto eval = [&](const V5& s, double tau, V5* g, M5* h) {
        const double q = s.squaredNorm();
        if (q >= 1.0) return std::numeric_limits<double>::infinity();
        const double top = worst(s);
        double z = 0.0;
        for (const auto& e : a) z += std::exp((e.dot(s) - top) / tau);
        const double f = top + tau * std::log(z) - tau * std::log(1.0 - q);
        if (g) {
            V5 mean = V5::Zero();
            M5 second = M5::Zero();
            for (const auto& e : a) {
                const double p = std::exp((e.dot(s) - top) / tau) / z;
                mean += p * e;
                second += p * e * e.transpose();
            }
            *g = mean + 2.0 * tau * s / (1.0 - q);
            *h = (second - mean * mean.transpose()) / tau + tau * (2.0 * M5::Identity() / (1.0 - q) +
                                                                  4.0 * s * s.transpose() / ((1.0 - q) * (1.0 - q)));
        }
        return f;
    };
    V5 s = V5::Zero();
    for (double tau = 0.1; tau > 1e-9; tau *= 0.3) {
        for (int it = 0; it < 60; ++it) {
            V5 g;
            M5 h;
            const double f = eval(s, tau, &g, &h);
            const V5 step = -(h + 1e-14 * M5::Identity()).ldlt().solve(g);
            const double dec = -g.dot(step);
            if (!(dec > 1e-16)) break;
            double t = 1.0;
            while (t > 1e-12 && !(eval(s + t * step, tau, nullptr, nullptr) <= f - 0.25 * t * dec)) t *= 0.5;
            if (t <= 1e-12) break;
            s += t * step;
        }
        if (worst(s) < -1e-12) return s;
    }
    return std::nullopt;
}

}  // namespace detail

/// Upper bound on the largest s with s * r in K, capped at max_scale. The
/// best of `directions` random directions seeds a smoothed interior-point
/// Newton descent of h over the plane u . r = 1; the bound reported is the
/// exact h at the best point visited.
inline double gauge_upper_bound(const WrenchSet& set, const V6& r, double max_scale, int directions = 10000,
                                std::uint64_t seed = 1) {
    if (r.norm() < 1e-12) return max_scale;
    M6 q = M6::Identity();
    q.col(0) = r.normalized();
    Eigen::HouseholderQR<M6> qr(q);
    const M6 basis = qr.householderQ();
    const Eigen::Matrix<double, 6, 5> b = basis.rightCols<5>();
    const V6 u0 = r / r.squaredNorm();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    V6 start = V6::Zero();
    for (int i = 0; i < directions; ++i) {
        V6 u;
        for (int k = 0; k < 6; ++k) u[k] = gauss(rng);
        const double ur = u.dot(r);
        if (std::abs(ur) < 1e-12) continue;
        u /= ur;
        const double h = set.support(u);
        if (h < best) {
            best = h;
            start = u;
        }
    }
    if (!std::isfinite(best)) {
        const auto d = detail::interior_direction(set.uncapped_edges(), b);
        if (!d) return max_scale;
        // push u0 along d far enough that every uncapped edge sees u . w < 0
        double lambda = 0.0;
        for (const auto& w : set.uncapped_edges())
            lambda = std::max(lambda, u0.dot(w) / -(b * *d).dot(w));
        V6 u = u0 + (2.0 * lambda + 1e-9) * (b * *d);
        best = set.support(u);
        start = u;
        if (!std::isfinite(best)) return max_scale;
    }

    Eigen::Matrix<double, 5, 1> t = b.transpose() * (start - u0);
    const double f_scale = std::max(best, 1e-3);
    for (double tau = 0.1 * f_scale; tau > 1e-13 * f_scale; tau *= 0.25) {
        for (int it = 0; it < 80; ++it) {
            double f;
            V6 g;
            M6 hess;
            if (!set.smoothed(u0 + b * t, tau, f, g, hess)) break;
            const Eigen::Matrix<double, 5, 1> gt = b.transpose() * g;
            Eigen::Matrix<double, 5, 5> ht = b.transpose() * hess * b;
            ht += 1e-14 * (1.0 + ht.trace()) * Eigen::Matrix<double, 5, 5>::Identity();
            const Eigen::Matrix<double, 5, 1> step = -ht.ldlt().solve(gt);
            const double decrement = -gt.dot(step);
            if (!(decrement > 1e-18 * (1.0 + std::abs(f)))) break;
            double a = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls, a *= 0.5) {
                double f2;
                V6 g2;
                M6 h2;
                if (set.smoothed(u0 + b * (t + a * step), tau, f2, g2, h2) && f2 <= f - 0.25 * a * decrement) {
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
            t += a * step;
            best = std::min(best, set.support(u0 + b * t));
        }
    }
    return std::min(std::max(best, 0.0), max_scale);
}

}  // namespace oracle
