#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <vector>

#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"
#include "xxzqtm/quadrature.hpp"

namespace xxzqtm {

struct ContourOptions {
    double cutoff{40.0};     // truncation: L = max|Re q_u| + cutoff/2
    int panel_order{16};
    double coarse{1.0};      // widest panel
    double fine_factor{0.7}; // panel width at a Fermi point, in units of pi T/|u'|
    double grading{1.25};    // geometric growth of panel widths away from a Fermi point
    double top_shift{0.0};   // rigid vertical shift of the upper path
};

// Closed integration contour made of two parallel paths. The upper path runs
// right to left through q_u^- and q_u^+, the lower one is the upper path moved
// down by i pi/2 and runs left to right. The two are joined at Re = +-infinity.
struct Contour {
    cplx q_minus, q_plus;
    double L{0.0};
    double cutoff{40.0};
    double shift{0.0};
    std::vector<cplx> nodes;
    std::vector<cplx> weights;  // d(lambda) including orientation
    std::vector<cplx> e2;       // exp(2 lambda) at the nodes
    std::size_t n_top{0};

    std::size_t size() const { return nodes.size(); }
    bool on_top(std::size_t i) const { return i < n_top; }

    double a() const { return q_minus.real(); }
    double b() const { return q_plus.real(); }

    double height(double s) const {
        double em = q_minus.imag(), ep = q_plus.imag();
        double t = std::clamp((s - a()) / (b() - a()), 0.0, 1.0);
        return em + (ep - em) * t * t * t * (10.0 - 15.0 * t + 6.0 * t * t) + shift;
    }
    double height_deriv(double s) const {
        double t = (s - a()) / (b() - a());
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return (q_plus.imag() - q_minus.imag()) * 30.0 * t * t * (1.0 - t) * (1.0 - t) / (b() - a());
    }
    cplx top_point(double s) const { return {s, height(s)}; }
    cplx bottom_point(double s) const { return {s, height(s) - shift - pi / 2}; }

    // heights of the four tails beyond |Re| = L
    double top_left_height() const { return q_minus.imag() + shift; }
    double top_right_height() const { return q_plus.imag() + shift; }
    double bottom_left_height() const { return q_minus.imag() - pi / 2; }
    double bottom_right_height() const { return q_plus.imag() - pi / 2; }

    std::size_t top_right_index() const { return 0; }
    std::size_t top_left_index() const { return n_top - 1; }
    std::size_t bottom_left_index() const { return n_top; }
    std::size_t bottom_right_index() const { return nodes.size() - 1; }

    // winding number of the closed polygon through the nodes
    int winding(cplx z) const {
        double total = 0.0;
        const std::size_t n = nodes.size();
        for (std::size_t i = 0; i < n; ++i) {
            cplx a0 = nodes[i] - z, a1 = nodes[(i + 1) % n] - z;
            total += std::arg(a1 / a0);
        }
        return static_cast<int>(std::lround(total / (2 * pi)));
    }
    bool encloses(cplx z) const { return winding(z) != 0; }

    double distance_to(cplx z) const {
        double d = 1e300;
        for (cplx n : nodes) d = std::min(d, std::abs(n - z));
        return d;
    }
};

inline std::vector<double> fermi_breaks(double lo, double hi, const std::vector<double>& centres,
                                        double fine, const ContourOptions& o) {
    std::vector<double> pts{lo, hi};
    for (double c : centres) {
        if (c > lo && c < hi) pts.push_back(c);
        for (int sgn : {-1, 1}) {
            double x = 0.0, w = fine;
            while (x < hi - lo) {
                x += std::min(w, o.coarse);
                double y = c + sgn * x;
                if (y > lo && y < hi) pts.push_back(y);
                if (w >= o.coarse) break;
                w *= o.grading;
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out{pts.front()};
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] - out.back() > 1e-9) out.push_back(pts[i]);
    return graded_breaks(out.front(), out.back(), out, o.coarse, 0, o.coarse);
}

inline double coarse_width(const ModelParams& p, const ContourOptions& o) {
    double w = o.coarse;
    if (!p.free_fermion()) w = std::min({w, p.zeta, 2.0 * (pi / 2 - p.zeta)});
    return std::min(w, p.zeta);
}

// fine: panel width next to the Fermi points (of order pi T/|u'(q_u)|)
inline Contour build_contour(cplx qm, cplx qp, const ModelParams& p, double fine, const ContourOptions& opt = {},
                             bool guard_poles = true) {
    if (!(qp.real() > qm.real())) throw error(errc::tracing, "build_contour: zeros not ordered along Re");
    if (guard_poles && (std::abs(qm.imag()) >= p.zeta / 2 || std::abs(qp.imag()) >= p.zeta / 2))
        throw error(errc::tracing, "build_contour: zeros too close to the poles of the bare energy");
    Contour c;
    c.q_minus = qm;
    c.q_plus = qp;
    c.cutoff = opt.cutoff;
    c.shift = opt.top_shift;
    c.L = std::max(std::abs(qm.real()), std::abs(qp.real())) + opt.cutoff / 2;
    ContourOptions o = opt;
    o.coarse = coarse_width(p, opt);
    std::vector<double> tb = fermi_breaks(-c.L, c.L, {qm.real(), qp.real()}, std::min(fine, o.coarse), o);
    QuadratureRule top = composite_rule(tb, o.panel_order);
    std::vector<double> bb = graded_breaks(-c.L, c.L, {qm.real(), qp.real()}, o.coarse, 0, o.coarse);
    QuadratureRule bot = composite_rule(bb, o.panel_order);

    const std::size_t nt = top.nodes.size(), nb = bot.nodes.size();
    c.nodes.resize(nt + nb);
    c.weights.resize(nt + nb);
    for (std::size_t k = 0; k < nt; ++k) {
        std::size_t j = nt - 1 - k;
        double s = top.nodes[j];
        c.nodes[k] = c.top_point(s);
        c.weights[k] = -top.weights[j] * cplx(1.0, c.height_deriv(s));
    }
    for (std::size_t k = 0; k < nb; ++k) {
        double s = bot.nodes[k];
        c.nodes[nt + k] = c.bottom_point(s);
        c.weights[nt + k] = bot.weights[k] * cplx(1.0, c.height_deriv(s));
    }
    c.n_top = nt;
    c.e2.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) c.e2[i] = std::exp(2.0 * c.nodes[i]);
    return c;
}

// closed contour integral of f over the nodes
template <class F>
cplx contour_integral(const Contour& c, const F& f) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c.weights[i] * f(c.nodes[i], i);
    return s;
}

// oint (-u'/T) / (1 + e^{u/T}) dmu
template <class U, class Up>
cplx check_monodromy(const U& u, const Up& du, const Contour& c, double T) {
    return contour_integral(c, [&](cplx l, std::size_t) {
        cplx v = u(l);
        return -du(l) / T / (1.0 + std::exp(v / T));
    });
}

namespace detail {

inline cplx log1p_small(cplx w) { return std::abs(w) < 1e-8 ? w * (1.0 - 0.5 * w) : std::log(1.0 + w); }

}  // namespace detail

inline cplx principal_log1p_exp(cplx u, double T) {
    cplx x = u / T;
    return x.real() >= 0.0 ? detail::log1p_small(std::exp(-x)) : -x + detail::log1p_small(std::exp(x));
}

// Nodal version for a solved auxiliary function. The two paths are joined at
// Re = +-L by vertical pieces on which Re u > 0, so their contribution is the
// difference of principal logarithms at the end nodes.
inline cplx check_monodromy(const std::vector<cplx>& u, const std::vector<cplx>& du, const Contour& c, double T) {
    cplx s = contour_integral(c, [&](cplx, std::size_t i) { return -du[i] / T / (1.0 + std::exp(u[i] / T)); });
    auto P = [&](std::size_t i) { return principal_log1p_exp(u[i], T); };
    s += P(c.bottom_left_index()) - P(c.top_left_index());
    s += P(c.top_right_index()) - P(c.bottom_right_index());
    return s;
}

// ---------------------------------------------------------------------------
// Level set {Re f = 0} traced through two seeds.

struct LevelSetBranch {
    int label{0};  // -1 near -q, +1 near +q
    cplx zero;
    double axis_crossing{std::nan("")};  // where the level line meets the real axis
    std::vector<cplx> nodes;
    std::vector<double> s;  // arclength parameter, zero at the seed
};

struct LevelSet {
    LevelSetBranch minus, plus;
};

struct TraceOptions {
    double step{0.01};
    double tol{1e-12};
    double cutoff{40.0};
    double margin{1e-3};
    int nodes_per_branch{256};
    int max_steps{20000};
};

namespace detail {

// Newton on Re f along the gradient direction conj(f')
template <class F, class Fp>
cplx project_level(const F& f, const Fp& fp, cplx z, double tol) {
    for (int it = 0; it < 60; ++it) {
        cplx d = fp(z);
        double nd = std::norm(d);
        if (!(nd > 1e-28)) throw error(errc::tracing, "trace_level_set: vanishing derivative");
        cplx dz = -f(z).real() * std::conj(d) / nd;
        z += dz;
        if (std::abs(dz) < tol) return z;
    }
    throw error(errc::tracing, "trace_level_set: corrector stalled");
}

template <class F, class Fp>
std::vector<cplx> trace_half(const F& f, const Fp& fp, cplx z0, double dir, const ModelParams& p,
                             const TraceOptions& o) {
    std::vector<cplx> pts{z0};
    cplx z = z0;
    const double strip = p.zeta / 2 - o.margin;
    for (int k = 0; k < o.max_steps; ++k) {
        cplx d = fp(z);
        // Im f grows along i conj(f')
        cplx t = dir * I * std::conj(d) / std::abs(d);
        cplx zn = project_level(f, fp, z + o.step * t, o.tol);
        if (std::abs(zn.imag()) >= strip) break;
        z = zn;
        pts.push_back(z);
        if (std::abs(f(z).imag()) / p.T > o.cutoff) break;
    }
    return pts;
}

inline std::vector<cplx> resample(const std::vector<cplx>& pts, int n, std::vector<double>& s_out, double s0) {
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + std::abs(pts[i] - pts[i - 1]);
    std::vector<cplx> out(n);
    s_out.resize(n);
    for (int k = 0; k < n; ++k) {
        double target = s.back() * k / (n - 1);
        auto it = std::upper_bound(s.begin(), s.end(), target);
        std::size_t j = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - s.begin(), 1), s.size() - 1);
        double w = (s[j] == s[j - 1]) ? 0.0 : (target - s[j - 1]) / (s[j] - s[j - 1]);
        out[k] = pts[j - 1] + w * (pts[j] - pts[j - 1]);
        s_out[k] = target - s0;
    }
    return out;
}

template <class F, class Fp>
LevelSetBranch trace_branch(const F& f, const Fp& fp, cplx seed, int label, const ModelParams& p,
                            const TraceOptions& o) {
    LevelSetBranch br;
    br.label = label;
    if (std::abs(fp(seed)) < 1e-10) throw error(errc::tracing, "trace_level_set: degenerate seed");
    br.zero = seed;
    for (int it = 0; it < 100; ++it) {
        cplx dz = f(br.zero) / fp(br.zero);
        if (std::abs(dz) > o.step * 10) dz *= o.step * 10 / std::abs(dz);
        br.zero -= dz;
        if (std::abs(dz) < o.tol) break;
        if (it == 99) throw error(errc::tracing, "trace_level_set: seed refinement stalled");
    }
    double x = br.zero.real();
    for (int it = 0; it < 60; ++it) {
        double g = f(cplx(x, 0.0)).real(), gp = fp(cplx(x, 0.0)).real();
        if (!(std::abs(gp) > 1e-14)) break;
        double dx = g / gp;
        x -= dx;
        if (std::abs(dx) < o.tol) {
            br.axis_crossing = x;
            break;
        }
    }
    std::vector<cplx> down = trace_half(f, fp, br.zero, -1.0, p, o);
    std::vector<cplx> up = trace_half(f, fp, br.zero, 1.0, p, o);
    std::vector<cplx> all(down.rbegin(), down.rend());
    all.insert(all.end(), up.begin() + 1, up.end());
    double s0 = 0.0;
    for (std::size_t i = 1; i < down.size(); ++i) s0 += std::abs(down[i] - down[i - 1]);
    std::vector<cplx> r = resample(all, o.nodes_per_branch, br.s, s0);
    for (cplx& z : r) z = project_level(f, fp, z, o.tol);
    br.nodes = std::move(r);
    return br;
}

}  // namespace detail

template <class F, class Fp>
LevelSet trace_level_set(const F& f, const Fp& fp, cplx seed_minus, cplx seed_plus, const ModelParams& p,
                         const TraceOptions& o = {}) {
    LevelSet ls;
    ls.minus = detail::trace_branch(f, fp, seed_minus, -1, p, o);
    ls.plus = detail::trace_branch(f, fp, seed_plus, +1, p, o);
    return ls;
}

template <class F>
void write_level_set_csv(std::ostream& os, const LevelSet& ls, const F& f) {
    os << "branch,s,re_lambda,im_lambda,re_u,im_u\n";
    for (const LevelSetBranch* b : {&ls.minus, &ls.plus})
        for (std::size_t i = 0; i < b->nodes.size(); ++i) {
            cplx v = f(b->nodes[i]);
            os << (b->label < 0 ? "-" : "+") << ',' << b->s[i] << ',' << b->nodes[i].real() << ','
               << b->nodes[i].imag() << ',' << v.real() << ',' << v.imag() << '\n';
        }
}

}  // namespace xxzqtm
