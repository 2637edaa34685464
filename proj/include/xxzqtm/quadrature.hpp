#pragma once

#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "xxzqtm/error.hpp"

namespace xxzqtm {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order{0};
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n) {
    QuadratureRule r;
    r.order = n;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

}  // namespace detail

// Gauss-Legendre rule on [-1, 1]; cached per order
inline const QuadratureRule& gauss_legendre(int n) {
    static std::mutex mtx;
    static std::map<int, QuadratureRule> cache;
    if (n < 1) throw error(errc::domain, "gauss_legendre: order must be positive");
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

inline QuadratureRule gauss_legendre(int n, double a, double b) {
    const QuadratureRule& ref = gauss_legendre(n);
    QuadratureRule r;
    r.order = n;
    r.nodes.resize(n);
    r.weights.resize(n);
    double c = 0.5 * (a + b), d = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = c + d * ref.nodes[i];
        r.weights[i] = d * ref.weights[i];
    }
    return r;
}

// Composite rule over consecutive breakpoints.
inline QuadratureRule composite_rule(const std::vector<double>& breaks, int n) {
    QuadratureRule r;
    r.order = n;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        QuadratureRule p = gauss_legendre(n, breaks[k], breaks[k + 1]);
        r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
        r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
    }
    return r;
}

// Breakpoints on [lo, hi]: uniform spacing `fine` within `reach` of each
// centre, never wider than `coarse` elsewhere.
inline std::vector<double> graded_breaks(double lo, double hi, const std::vector<double>& centres, double fine,
                                         int reach, double coarse) {
    std::vector<double> pts{lo, hi};
    for (double c : centres)
        for (int k = -reach; k <= reach; ++k) {
            double x = c + k * fine;
            if (x > lo && x < hi) pts.push_back(x);
        }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out{pts.front()};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double x = pts[i];
        double gap = x - out.back();
        if (gap > coarse * 1.0001) {
            int m = static_cast<int>(std::ceil(gap / coarse));
            double step = gap / m, start = out.back();
            for (int j = 1; j < m; ++j) out.push_back(start + j * step);
        }
        if (x - out.back() > 1e-12) out.push_back(x);
    }
    return out;
}

}  // namespace xxzqtm
