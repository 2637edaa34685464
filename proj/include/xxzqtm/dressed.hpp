#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"
#include "xxzqtm/quadrature.hpp"

namespace xxzqtm {

// Solution of (id + K) f = g on [-Q, Q] by Nystrom collocation at the
// Gauss-Legendre nodes.
struct FredholmSolution {
    double Q{0.0};
    QuadratureRule rule;
    std::vector<double> values;
    double residual{0.0};
    double rcond{1.0};

    // f(lambda) = g(lambda) - int K(lambda - mu) f(mu) dmu
    template <class G>
    cplx continue_to(cplx lambda, const G& g, const ModelParams& p) const {
        cplx s = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j)
            s += kernel_K(lambda - rule.nodes[j], p) * rule.weights[j] * values[j];
        return cplx(g(lambda)) - s;
    }
};

namespace detail {

inline Eigen::MatrixXd nystrom_matrix(const QuadratureRule& r, const ModelParams& p) {
    const int n = r.order;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    if (p.free_fermion()) return A;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) += kernel_K(r.nodes[i] - r.nodes[j], p).real() * r.weights[j];
    return A;
}

}  // namespace detail

template <class G>
FredholmSolution solve_fredholm(const G& g, double Q, const ModelParams& p, int N = 64) {
    if (!(Q > 0.0)) throw error(errc::domain, "solve_fredholm: Q must be positive");
    if (N < 8) throw error(errc::domain, "solve_fredholm: order below 8");
    FredholmSolution s;
    s.Q = Q;
    s.rule = gauss_legendre(N, -Q, Q);
    Eigen::MatrixXd A = detail::nystrom_matrix(s.rule, p);
    Eigen::VectorXd b(N);
    for (int i = 0; i < N; ++i) b(i) = std::real(cplx(g(cplx(s.rule.nodes[i], 0.0))));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    s.rcond = lu.rcond();
    if (!(s.rcond > 1e-13)) {
        throw error(errc::convergence,
                    "solve_fredholm: near-singular discretisation, rcond=" + std::to_string(s.rcond));
    }
    Eigen::VectorXd f = lu.solve(b);
    s.values.assign(f.data(), f.data() + N);
    s.residual = (A * f - b).cwiseAbs().maxCoeff();
    return s;
}

// epsilon(Q|Q): dressed energy on [-Q, Q] evaluated at the endpoint
inline double dressed_energy_at_boundary(double Q, const ModelParams& p, int N = 64) {
    auto g = [&](cplx l) { return bare_energy(l, p); };
    FredholmSolution s = solve_fredholm(g, Q, p, N);
    return s.continue_to(cplx(Q, 0.0), g, p).real();
}

inline double find_fermi_boundary(const ModelParams& p, double tol = 1e-14, int N = 64) {
    if (!(p.h > 0.0 && p.h < p.saturation_field()))
        throw error(errc::regime, "find_fermi_boundary: field outside (0, 4J(1+delta))");
    double lo = 1e-6, hi = 10.0;
    double flo = dressed_energy_at_boundary(lo, p, N), fhi = dressed_energy_at_boundary(hi, p, N);
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) throw error(errc::regime, "find_fermi_boundary: Fermi boundary beyond bracket");
    for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, hi); ++it) {
        // secant proposal, fall back to bisection when it leaves the bracket
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        double mid = 0.5 * (lo + hi);
        if (!(x > lo && x < hi) || it % 3 == 2) x = mid;
        double fx = dressed_energy_at_boundary(x, p, N);
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

struct DressedData {
    ModelParams params;
    double q{0.0};
    int N{64};
    FredholmSolution eps, eps_deriv, Z, p_deriv;
    double vF{0.0};
    double Zq{1.0};
    double max_residual{0.0};

    cplx eps_at(cplx l) const {
        return eps.continue_to(l, [&](cplx x) { return bare_energy(x, params); }, params);
    }
    cplx eps_deriv_at(cplx l) const {
        return eps_deriv.continue_to(l, [&](cplx x) { return bare_energy_deriv(x, params); }, params);
    }
    cplx Z_at(cplx l) const {
        return Z.continue_to(l, [](cplx) { return cplx(1.0); }, params);
    }
    cplx p_deriv_at(cplx l) const {
        return p_deriv.continue_to(l, [&](cplx x) { return bare_momentum_deriv(x, params); }, params);
    }
    // p(lambda) = int_0^lambda p'(mu) dmu along the straight segment
    cplx p_at(cplx l, int n = 48) const {
        const QuadratureRule& r = gauss_legendre(n);
        cplx s = 0.0;
        for (int i = 0; i < n; ++i) s += r.weights[i] * p_deriv_at(0.5 * l * (1.0 + r.nodes[i]));
        return 0.5 * l * s;
    }
};

inline DressedData dressed_quantities(const ModelParams& p, int N = 64) {
    DressedData d;
    d.params = p;
    d.N = N;
    d.q = find_fermi_boundary(p, 1e-14, N);
    d.eps = solve_fredholm([&](cplx l) { return bare_energy(l, p); }, d.q, p, N);
    d.eps_deriv = solve_fredholm([&](cplx l) { return bare_energy_deriv(l, p); }, d.q, p, N);
    d.Z = solve_fredholm([](cplx) { return cplx(1.0); }, d.q, p, N);
    d.p_deriv = solve_fredholm([&](cplx l) { return bare_momentum_deriv(l, p); }, d.q, p, N);
    d.max_residual = std::max({d.eps.residual, d.eps_deriv.residual, d.Z.residual, d.p_deriv.residual});
    d.vF = (d.eps_deriv_at(d.q) / d.p_deriv_at(d.q)).real();
    d.Zq = d.Z_at(d.q).real();
    return d;
}

}  // namespace xxzqtm
