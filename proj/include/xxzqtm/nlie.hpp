#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "xxzqtm/contour.hpp"
#include "xxzqtm/dressed.hpp"
#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"

namespace xxzqtm {

struct ExcitationConfig {
    std::vector<int> p_plus, p_minus, h_plus, h_minus;

    int holes() const { return static_cast<int>(h_plus.size() + h_minus.size()); }
    int particles() const { return static_cast<int>(p_plus.size() + p_minus.size()); }
    int spin() const { return holes() - particles(); }
    bool empty() const { return holes() == 0 && particles() == 0; }

    void validate() const {
        for (const auto* v : {&p_plus, &p_minus, &h_plus, &h_minus}) {
            for (std::size_t i = 0; i < v->size(); ++i) {
                if ((*v)[i] < 0) throw error(errc::domain, "ExcitationConfig: negative quantum number");
                if (i > 0 && (*v)[i] <= (*v)[i - 1])
                    throw error(errc::domain, "ExcitationConfig: quantum numbers must increase strictly");
            }
        }
        if (std::abs(spin()) > 2) throw error(errc::domain, "ExcitationConfig: |pseudo-spin| above 2");
    }

    static ExcitationConfig single_hole(int sigma = 1) {
        ExcitationConfig c;
        (sigma > 0 ? c.h_plus : c.h_minus).push_back(0);
        return c;
    }
};

struct Root {
    cplx x;
    int sigma{1};
    int quantum{0};
    bool hole{true};

    cplx target(double T) const {
        double s = hole ? -sigma : sigma;
        return s * 2.0 * pi * T * (quantum + 0.5) * I;
    }
};

struct SolverOptions {
    double tol{1e-10};
    int max_sweeps{200};
    double alpha{0.5};
    int max_retrace{40};
    double zero_tol{1e-10};
    ContourOptions contour{};
};

namespace detail {

// int_{-inf}^{xe} K(x) dx along the horizontal line through xe, Re xe <= 0
inline cplx kernel_tail_left(cplx xe, const ModelParams& p) {
    if (p.free_fermion()) return 0.0;
    const double z = p.zeta;
    cplx e = std::exp(2.0 * xe);
    return (std::log(1.0 - e * std::exp(-2.0 * I * z)) - std::log(1.0 - e * std::exp(2.0 * I * z))) / (2.0 * pi * I);
}

// int_{xs}^{+inf} K(x) dx, Re xs >= 0
inline cplx kernel_tail_right(cplx xs, const ModelParams& p) { return kernel_tail_left(-xs, p); }

}  // namespace detail

struct NlieSolution {
    ModelParams params;
    Contour contour;
    int spin{0};
    std::vector<Root> roots;
    std::vector<cplx> u, Ln;
    double residual{0.0};
    double quantization_residual{0.0};
    cplx monodromy{0.0};
    int iterations{0};
    int retraces{0};
    std::vector<std::string> warnings;

    cplx driving(cplx l) const {
        cplx theta_sum = 0.0;
        for (const Root& r : roots) theta_sum += (r.hole ? -1.0 : 1.0) * bare_phase(l - r.x, params);
        return bare_energy(l, params) - I * pi * double(spin) * params.T - I * params.T * theta_sum;
    }
    cplx driving_deriv(cplx l) const {
        cplx k = 0.0;
        for (const Root& r : roots) k += (r.hole ? -1.0 : 1.0) * kernel_K(l - r.x, params);
        return bare_energy_deriv(l, params) - I * params.T * 2.0 * pi * k;
    }

    // oint K(lambda - mu) Ln(mu) dmu, tails beyond |Re| = L included
    cplx convolve(cplx l) const { return convolve_with(l, Ln); }

    // K(l - mu) = sin 2z/(2 pi) 4AB / ((A - B)^2 + 4AB sin^2 z), A = e^{2l}, B = e^{2mu}
    cplx convolve_with(cplx l, const std::vector<cplx>& f) const {
        if (params.free_fermion()) return 0.0;
        const double z = params.zeta, s2 = std::sin(z) * std::sin(z);
        const cplx A = std::exp(2.0 * l);
        cplx s = 0.0;
        for (std::size_t j = 0; j < contour.size(); ++j) {
            cplx ab = A * contour.e2[j], d = A - contour.e2[j];
            s += ab / (d * d + 4.0 * ab * s2) * contour.weights[j] * f[j];
        }
        return 4.0 * std::sin(2 * z) / (2 * pi) * s + tail_terms(l, f);
    }

    cplx tail_terms(cplx l, const std::vector<cplx>& f) const {
        const Contour& c = contour;
        const ModelParams& p = params;
        cplx s = 0.0;
        s -= f[c.top_right_index()] * detail::kernel_tail_left(l - cplx(c.L, c.top_right_height()), p);
        s -= f[c.top_left_index()] * detail::kernel_tail_right(l - cplx(-c.L, c.top_left_height()), p);
        s += f[c.bottom_left_index()] * detail::kernel_tail_right(l - cplx(-c.L, c.bottom_left_height()), p);
        s += f[c.bottom_right_index()] * detail::kernel_tail_left(l - cplx(c.L, c.bottom_right_height()), p);
        return s;
    }

    cplx convolve_deriv(cplx l) const {
        if (params.free_fermion()) return 0.0;
        const Contour& c = contour;
        const ModelParams& p = params;
        cplx s = 0.0;
        const double s2 = std::sin(p.zeta) * std::sin(p.zeta);
        const cplx A = std::exp(2.0 * l), A2 = A * A;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const cplx B = c.e2[j], ab = A * B, d = A - B, den = d * d + 4.0 * ab * s2;
            s += ab * (A2 - B * B) / (den * den) * c.weights[j] * Ln[j];
        }
        s *= -8.0 * std::sin(2 * p.zeta) / (2 * pi);
        s -= Ln[c.top_right_index()] * kernel_K(l - cplx(c.L, c.top_right_height()), p);
        s += Ln[c.top_left_index()] * kernel_K(l - cplx(-c.L, c.top_left_height()), p);
        s -= Ln[c.bottom_left_index()] * kernel_K(l - cplx(-c.L, c.bottom_left_height()), p);
        s += Ln[c.bottom_right_index()] * kernel_K(l - cplx(c.L, c.bottom_right_height()), p);
        return s;
    }

    // continuation of u off the nodes
    cplx u_at(cplx l) const { return driving(l) - params.T * convolve(l); }
    cplx u_deriv_at(cplx l) const { return driving_deriv(l) - params.T * convolve_deriv(l); }

    std::vector<cplx> u_deriv_nodes() const {
        std::vector<cplx> d(contour.size());
        for (std::size_t i = 0; i < contour.size(); ++i) d[i] = u_deriv_at(contour.nodes[i]);
        return d;
    }
};

// ln(1 + e^{-u/T}) on each path, continued from the first node of the path
inline std::vector<cplx> contour_log(const std::vector<cplx>& u, const Contour& c, double T) {
    std::vector<cplx> out(u.size());
    auto principal = [T](cplx v) { return principal_log1p_exp(v, T); };
    auto run = [&](std::size_t b, std::size_t e) {
        if (b >= e) return;
        out[b] = principal(u[b]);
        for (std::size_t i = b + 1; i < e; ++i) {
            cplx v = principal(u[i]);
            double k = std::round((out[i - 1] - v).imag() / (2 * pi));
            out[i] = v + 2.0 * pi * k * I;
        }
    };
    run(0, c.n_top);
    run(c.n_top, u.size());
    return out;
}

// Ln at node `target` by integrating (-u'/T)/(1+e^{u/T}) along the contour
// from node `anchor`, where the principal logarithm is used.
inline cplx eval_Ln(const NlieSolution& sol, std::size_t target, std::size_t anchor) {
    const Contour& c = sol.contour;
    const double T = sol.params.T;
    const std::size_t n = c.size();
    const QuadratureRule& g = gauss_legendre(6);
    auto integrand = [&](cplx l) { return -sol.u_deriv_at(l) / T / (1.0 + std::exp(sol.u_at(l) / T)); };
    cplx acc = principal_log1p_exp(sol.u[anchor], T);
    std::size_t i = anchor;
    while (i != target) {
        std::size_t j = (i + 1) % n;
        cplx a = c.nodes[i], b = c.nodes[j];
        double lo = std::min(sol.u[i].real(), sol.u[j].real()) / T;
        if (j == c.n_top || j == 0) {
            // vertical closure at Re = -+L, as in check_monodromy
            acc += principal_log1p_exp(sol.u[j], T) - principal_log1p_exp(sol.u[i], T);
        } else if (lo > 45.0) {
            acc += 0.5 * (b - a) * (integrand(a) + integrand(b));
        } else {
            // sub-steps on which u/T moves by at most about 1/2
            int m = 1 + static_cast<int>(std::abs(sol.u[j] - sol.u[i]) / T / 0.5);
            for (int k = 0; k < m; ++k) {
                cplx x0 = a + (b - a) * double(k) / double(m), x1 = a + (b - a) * double(k + 1) / double(m);
                for (int r = 0; r < g.order; ++r)
                    acc += 0.5 * (x1 - x0) * g.weights[r] * integrand(0.5 * (x0 + x1) + 0.5 * (x1 - x0) * g.nodes[r]);
            }
        }
        i = j;
    }
    return acc;
}

namespace detail {

template <class U, class Up>
cplx newton_complex(const U& f, const Up& fp, cplx z, double tol, int maxit = 60, double max_step = 0.1) {
    for (int it = 0; it < maxit; ++it) {
        cplx d = fp(z);
        if (!(std::abs(d) > 1e-14)) throw error(errc::convergence, "newton: vanishing derivative");
        cplx dz = f(z) / d;
        if (std::abs(dz) > max_step) dz *= max_step / std::abs(dz);
        z -= dz;
        if (std::abs(dz) < tol) return z;
    }
    return z;
}

inline Eigen::MatrixXcd nlie_matrix(const NlieSolution& s) {
    const Contour& c = s.contour;
    const std::size_t n = c.size();
    Eigen::MatrixXcd M(n, n);
    std::vector<cplx> e(n, 0.0);
    // K(l - m) = sin 2z/(2 pi) * 4AB / ((A - B)^2 + 4AB sin^2 z), A = e^{2l}, B = e^{2m}
    const double z = s.params.zeta, pref = std::sin(2 * z) / (2 * pi), s2 = std::sin(z) * std::sin(z);
    const std::vector<cplx>& A = c.e2;
    for (std::size_t i = 0; i < n; ++i) {
        cplx li = c.nodes[i];
        for (std::size_t j = 0; j < n; ++j) {
            cplx ab = A[i] * A[j], d = A[i] - A[j];
            M(i, j) = pref * 4.0 * ab / (d * d + 4.0 * ab * s2) * c.weights[j];
        }
        for (std::size_t j : {c.top_right_index(), c.top_left_index(), c.bottom_left_index(), c.bottom_right_index()}) {
            e[j] = 1.0;
            M(i, j) += s.tail_terms(li, e);
            e[j] = 0.0;
        }
    }
    return M;
}

inline double solve_fixed_point(NlieSolution& s, const SolverOptions& o, const Eigen::MatrixXcd& M) {
    const Contour& c = s.contour;
    const std::size_t n = c.size();
    const double T = s.params.T;
    Eigen::VectorXcd drv(n), lnv(n), conv(n);
    double err = 1e300;
    for (int sweep = 0; sweep < o.max_sweeps; ++sweep) {
        s.Ln = contour_log(s.u, c, T);
        for (std::size_t i = 0; i < n; ++i) {
            drv(i) = s.driving(c.nodes[i]);
            lnv(i) = s.Ln[i];
        }
        if (!s.params.free_fermion()) conv.noalias() = M * lnv;
        else conv.setZero();
        err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx un = drv(i) - T * conv(i);
            err = std::max(err, std::abs(un - s.u[i]));
            s.u[i] = (1.0 - o.alpha) * s.u[i] + o.alpha * un;
        }
        ++s.iterations;
        // roots follow the current iterate
        if (!s.roots.empty()) {
            s.Ln = contour_log(s.u, c, T);
            for (Root& r : s.roots) {
                cplx tgt = r.target(T);
                r.x = newton_complex([&](cplx x) { return s.u_at(x) - tgt; }, [&](cplx x) { return s.u_deriv_at(x); },
                                     r.x, 1e-14, 8);
            }
        }
        if (err < o.tol) break;
    }
    // final residual with u fixed
    s.Ln = contour_log(s.u, c, T);
    for (std::size_t i = 0; i < n; ++i) lnv(i) = s.Ln[i];
    if (!s.params.free_fermion()) conv.noalias() = M * lnv;
    else conv.setZero();
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(s.driving(c.nodes[i]) - T * conv(i) - s.u[i]));
    return res;
}

inline void check_roots(NlieSolution& s) {
    for (std::size_t a = 0; a < s.roots.size(); ++a) {
        for (std::size_t b = a + 1; b < s.roots.size(); ++b)
            if (std::abs(s.roots[a].x - s.roots[b].x) < 1e-6)
                throw error(errc::collision, "solve_excited: two roots collided");
        if (std::abs(s.u_deriv_at(s.roots[a].x)) < 1e-8)
            throw error(errc::convergence, "solve_excited: u' vanishes at a root");
    }
    s.quantization_residual = 0.0;
    for (const Root& r : s.roots) {
        s.quantization_residual = std::max(s.quantization_residual, std::abs(s.u_at(r.x) - r.target(s.params.T)));
        if (s.contour.distance_to(r.x) < 1e-3) s.warnings.push_back("root within 1e-3 of the contour");
        bool inside = s.contour.encloses(r.x);
        if (r.hole && !inside) s.warnings.push_back("hole root outside the contour");
        if (!r.hole && inside) s.warnings.push_back("particle root inside the contour");
    }
}

}  // namespace detail

// Shared driver for dominant and excited states.
inline NlieSolution solve_nlie(const DressedData& d, const ExcitationConfig& cfg, const SolverOptions& o = {}) {
    cfg.validate();
    const ModelParams& p = d.params;
    const double T = p.T;
    NlieSolution s;
    s.params = p;
    s.spin = cfg.spin();

    // initial roots from the dressed energy
    auto add_roots = [&](const std::vector<int>& qs, int sigma, bool hole) {
        for (int k : qs) {
            Root r{cplx(sigma * d.q, 0.0), sigma, k, hole};
            cplx tgt = r.target(T) + I * pi * double(s.spin) * T;
            r.x = detail::newton_complex([&](cplx x) { return d.eps_at(x) - tgt; },
                                         [&](cplx x) { return d.eps_deriv_at(x); }, r.x, 1e-14, 200);
            s.roots.push_back(r);
        }
    };
    add_roots(cfg.h_plus, 1, true);
    add_roots(cfg.h_minus, -1, true);
    add_roots(cfg.p_plus, 1, false);
    add_roots(cfg.p_minus, -1, false);

    auto u0 = [&](cplx l) { return s.driving(l) - bare_energy(l, p) + d.eps_at(l); };
    auto u0p = [&](cplx l) { return s.driving_deriv(l) - bare_energy_deriv(l, p) + d.eps_deriv_at(l); };
    cplx qm = detail::newton_complex(u0, u0p, cplx(-d.q, 0.0), 1e-14, 200);
    cplx qp = detail::newton_complex(u0, u0p, cplx(d.q, 0.0), 1e-14, 200);

    bool first = true;
    NlieSolution prev;
    for (int outer = 0; outer < o.max_retrace; ++outer) {
        double slope = std::max(std::abs(u0p(qp)), std::abs(u0p(qm)));
        if (!first) slope = std::max(std::abs(prev.u_deriv_at(qp)), std::abs(prev.u_deriv_at(qm)));
        double fine = o.contour.fine_factor * pi * T / slope;
        s.contour = build_contour(qm, qp, p, fine, o.contour);
        s.u.resize(s.contour.size());
        for (std::size_t i = 0; i < s.contour.size(); ++i)
            s.u[i] = first ? u0(s.contour.nodes[i]) : prev.u_at(s.contour.nodes[i]);
        Eigen::MatrixXcd M = p.free_fermion() ? Eigen::MatrixXcd() : detail::nlie_matrix(s);
        s.residual = detail::solve_fixed_point(s, o, M);
        s.retraces = outer;
        first = false;
        prev = s;
        cplx qm2 = detail::newton_complex([&](cplx x) { return s.u_at(x); }, [&](cplx x) { return s.u_deriv_at(x); },
                                          qm, 1e-15);
        cplx qp2 = detail::newton_complex([&](cplx x) { return s.u_at(x); }, [&](cplx x) { return s.u_deriv_at(x); },
                                          qp, 1e-15);
        double moved = std::max(std::abs(qm2 - qm), std::abs(qp2 - qp));
        qm = qm2;
        qp = qp2;
        if (moved < o.zero_tol && s.residual < o.tol) break;
        if (outer + 1 == o.max_retrace)
            throw error(errc::convergence, "solve_nlie: contour did not settle, last shift " + std::to_string(moved));
    }
    if (!(s.residual < o.tol))
        throw error(errc::convergence, "solve_nlie: no convergence, residual " + std::to_string(s.residual));
    s.monodromy = check_monodromy(s.u, s.u_deriv_nodes(), s.contour, T);
    detail::check_roots(s);
    return s;
}

// NLIE defect of a converged solution re-evaluated on a contour with a different
// panel layout through the same zeros; guards against collocation artifacts
inline double offgrid_defect(const NlieSolution& sol, ContourOptions o) {
    const ModelParams& p = sol.params;
    double slope = std::max(std::abs(sol.u_deriv_at(sol.contour.q_plus)), std::abs(sol.u_deriv_at(sol.contour.q_minus)));
    Contour c = build_contour(sol.contour.q_minus, sol.contour.q_plus, p, o.fine_factor * pi * p.T / slope, o);
    NlieSolution t = sol;
    t.contour = c;
    t.u.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) t.u[i] = sol.u_at(c.nodes[i]);
    t.Ln = contour_log(t.u, c, p.T);
    double d = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        d = std::max(d, std::abs(t.driving(c.nodes[i]) - p.T * t.convolve(c.nodes[i]) - t.u[i]));
    return d;
}

inline ContourOptions shifted_layout(ContourOptions o) {
    o.panel_order = o.panel_order * 3 / 4;
    o.fine_factor *= 0.61;
    o.grading = 1.17;
    return o;
}

inline NlieSolution solve_dominant(const DressedData& d, const SolverOptions& o = {}) {
    return solve_nlie(d, ExcitationConfig{}, o);
}

inline NlieSolution solve_excited(const DressedData& d, const ExcitationConfig& cfg, const SolverOptions& o = {}) {
    return solve_nlie(d, cfg, o);
}

}  // namespace xxzqtm
