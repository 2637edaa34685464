#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "xxzqtm/contour.hpp"
#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"

namespace xxzqtm {

namespace ff {

inline void require_free_fermion(const ModelParams& p) {
    if (!p.free_fermion()) throw error(errc::regime, "free-fermion formulas need delta = 0");
}

inline double fermi_point(const ModelParams& p) { return 0.5 * std::acosh(4.0 * p.J / p.h); }

// ln|coth y| without overflow or cancellation
inline double log_abs_coth(double y) {
    double a = std::abs(y);
    if (a == 0.0) return INFINITY;
    double e = std::exp(-2.0 * a);
    return std::log1p(e) - std::log(-std::expm1(-2.0 * a));
}

inline cplx log_coth(cplx w) {
    cplx e = std::exp(w.real() >= 0.0 ? -2.0 * w : 2.0 * w);
    cplx c = (1.0 + e) / (1.0 - e);
    return std::log(w.real() >= 0.0 ? c : -c);
}

}  // namespace ff

// Per-site exponent: integral over C_h of p0' ln|coth(eps0/2T)| / 2pi.
// Negative; the decay rate is its negation.
inline double ff_exponent_rate(const ModelParams& p) {
    ff::require_free_fermion(p);
    using boost::math::quadrature::tanh_sinh;
    tanh_sinh<double> ts;
    const double J = p.J, h = p.h, T = p.T;
    const double q = ff::fermi_point(p);
    const double X = std::max(q, 1.0) + 25.0 * std::max(1.0, T / J);
    const double c2q = std::cosh(2.0 * q);
    auto sech2 = [](double x) { return 1.0 / std::cosh(2.0 * x); };

    // lower line: eps0 = h + 4J sech 2x, p0' = -2 sech 2x
    double i1 = ts.integrate([&](double x) { return sech2(x) * ff::log_abs_coth((h + 4 * J * sech2(x)) / (2 * T)); },
                             0.0, X);
    // real line, written in the offset d = x - q so that eps0 is accurate near q
    auto f2 = [&](double d) {
        double y = 4 * J * std::sinh(2 * q + d) * std::sinh(d) / (T * c2q * std::cosh(2 * q + 2 * d));
        return sech2(q + d) * ff::log_abs_coth(y);
    };
    double i2 = ts.integrate(f2, -q, 0.0) + ts.integrate(f2, 0.0, X - q);
    return -(2.0 / pi) * (i1 + i2);
}

enum class PhiVariant { printed, mu_argument };

struct FFContours {
    Contour outer;
    std::vector<cplx> inner_nodes, inner_weights;  // C_h'
    std::size_t inner_n_top{0};
    std::vector<cplx> g_outer, g_inner;
    double offset{0.0};
};

namespace ff {

// point near (guess_re, guess_im) where eps0 = -i pi T frac
inline cplx eps0_crossing(const ModelParams& p, double guess_re, double guess_im, double frac) {
    cplx z(guess_re, guess_im);
    const cplx tgt = -I * pi * p.T * frac;
    for (int it = 0; it < 100; ++it) {
        cplx dz = (bare_energy(z, p) - tgt) / bare_energy_deriv(z, p);
        if (std::abs(dz) > 0.05) dz *= 0.05 / std::abs(dz);
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
    }
    return z;
}

inline std::vector<cplx> unwrapped_log_coth(const std::vector<cplx>& nodes, std::size_t n_top, const ModelParams& p) {
    std::vector<cplx> g(nodes.size());
    auto run = [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            cplx v = log_coth(bare_energy(nodes[i], p) / (2.0 * p.T));
            if (i > b) v += 2.0 * pi * I * std::round((g[i - 1] - v).imag() / (2 * pi));
            g[i] = v;
        }
    };
    run(0, n_top);
    run(n_top, nodes.size());
    return g;
}

}  // namespace ff

// C_h as a closed path: the upper path crosses the level lines of eps0 where
// eps0 = -i pi T/2 (above -q, below q), the lower path is the upper one moved
// down by i pi/2. C_h' runs inside it: its upper path crosses at
// eps0 = -3i pi T/4 near q and -i pi T/4 near -q, its lower path is the outer
// lower path moved up.
inline FFContours ff_contours(const ModelParams& p, int panel_order = 16, double width_factor = 1.0) {
    ff::require_free_fermion(p);
    const double q = ff::fermi_point(p);
    const double slope = std::abs(bare_energy_deriv(cplx(q, 0.0), p));
    const double y = pi * p.T / slope;
    cplx zm = ff::eps0_crossing(p, -q, y / 2, 0.5);
    cplx zp = ff::eps0_crossing(p, q, -y / 2, 0.5);
    cplx wm = ff::eps0_crossing(p, -q, y / 4, 0.25);
    cplx wp = ff::eps0_crossing(p, q, -3 * y / 4, 0.75);

    Contour probe_out, probe_in;
    probe_out.q_minus = zm;
    probe_out.q_plus = zp;
    probe_in.q_minus = wm;
    probe_in.q_plus = wp;
    double gap = 1e300;
    const double L = std::max(q, 1.0) + 25.0 * std::max(1.0, p.T / p.J);
    for (int k = 0; k <= 4000; ++k) {
        double s = -L + 2 * L * k / 4000.0;
        gap = std::min(gap, probe_out.height(s) - probe_in.height(s));
    }
    if (!(gap > 1e-3)) throw error(errc::collision, "ff_contours: nested offset below 1e-3");

    ContourOptions o;
    o.panel_order = panel_order;
    o.coarse = std::min(1.0, width_factor * gap);
    FFContours f;
    f.offset = gap;
    o.cutoff = 2.0 * (L - std::max(std::abs(zm.real()), std::abs(zp.real())));
    f.outer = build_contour(zm, zp, p, o.coarse, o, false);
    const Contour& c = f.outer;
    for (cplx pt : {cplx(-q, 0.0), cplx(q, -pi / 2)})
        if (!c.encloses(pt)) throw error(errc::tracing, "ff_contours: interior point left outside");
    for (cplx pt : {cplx(q, 0.0), cplx(-q, -pi / 2)})
        if (c.encloses(pt)) throw error(errc::tracing, "ff_contours: exterior point enclosed");

    o.cutoff = 2.0 * (L - std::max(std::abs(wm.real()), std::abs(wp.real())));
    Contour in = build_contour(wm, wp, p, o.coarse, o, false);
    f.inner_n_top = in.n_top;
    f.inner_nodes.assign(in.nodes.begin(), in.nodes.begin() + in.n_top);
    f.inner_weights.assign(in.weights.begin(), in.weights.begin() + in.n_top);
    for (std::size_t i = c.n_top; i < c.size(); ++i) {
        f.inner_nodes.push_back(c.nodes[i] + I * (gap / 2));
        f.inner_weights.push_back(c.weights[i]);
    }
    f.g_outer = ff::unwrapped_log_coth(c.nodes, c.n_top, p);
    f.g_inner = ff::unwrapped_log_coth(f.inner_nodes, f.inner_n_top, p);
    return f;
}

// int_{C_h'} dl/2i pi int_{C_h} dm/2i pi coth'(l - m) g(l) g(m), with the
// constant ln coth(h/2T) removed from g (it integrates to zero).
inline cplx ff_double_integral(const FFContours& f, const ModelParams& p) {
    const double c = ff::log_abs_coth(p.h / (2 * p.T));
    const Contour& C = f.outer;
    // keep the nodes where g - c is not negligible
    struct Node {
        cplx e2, wg;
    };
    auto collect = [&](const std::vector<cplx>& nodes, const std::vector<cplx>& w, const std::vector<cplx>& g) {
        double gmax = 0.0;
        for (const cplx& v : g) gmax = std::max(gmax, std::abs(v - c));
        std::vector<Node> out;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            cplx d = g[i] - c;
            if (std::abs(d) > 1e-18 * gmax) out.push_back({std::exp(2.0 * nodes[i]), w[i] * d});
        }
        return out;
    };
    std::vector<Node> in = collect(f.inner_nodes, f.inner_weights, f.g_inner);
    std::vector<Node> out = collect(C.nodes, C.weights, f.g_outer);
    // coth'(l - m) = -1/sinh^2(l - m) = -4 e^{2l} e^{2m} / (e^{2l} - e^{2m})^2
    cplx total = 0.0;
    for (const Node& a : in) {
        cplx row = 0.0;
        for (const Node& b : out) {
            cplx d = a.e2 - b.e2;
            row += b.wg * b.e2 / (d * d);
        }
        total += a.wg * a.e2 * row;
    }
    return -4.0 * total / ((2.0 * pi * I) * (2.0 * pi * I));
}

inline cplx ff_phi(cplx lambda, const ModelParams& p, const FFContours& f, PhiVariant v = PhiVariant::mu_argument) {
    ff::require_free_fermion(p);
    const Contour& C = f.outer;
    cplx s = 0.0;
    for (std::size_t j = 0; j < C.size(); ++j) {
        cplx mu = C.nodes[j];
        cplx ker = std::sinh(lambda + mu + I * pi / 4.0) / std::sinh(lambda - mu - I * pi / 4.0);
        cplx g = v == PhiVariant::mu_argument ? f.g_outer[j] : cplx(1.0);
        s += C.weights[j] / (2 * pi) * bare_momentum_deriv(mu, p) * g * ker;
    }
    if (v == PhiVariant::printed) {
        cplx e = bare_energy(lambda, p);
        if (std::abs(e) < 1e-12) throw error(errc::domain, "ff_phi: ln coth diverges at a Fermi point");
        s *= ff::log_coth(e / (2.0 * p.T));
    }
    return -0.5 * I * bare_momentum_deriv(lambda, p) * std::exp(s);
}

inline cplx ff_phi(cplx lambda, const ModelParams& p, PhiVariant v) {
    return ff_phi(lambda, p, ff_contours(p), v);
}

struct FFConstant {
    cplx C;
    cplx phi;
    cplx double_integral;
    double offset{0.0};
    std::size_t nodes{0};
};

inline FFConstant ff_constant(const ModelParams& p, PhiVariant v = PhiVariant::mu_argument, int panel_order = 16,
                              double width_factor = 1.0) {
    FFContours f = ff_contours(p, panel_order, width_factor);
    const double q = ff::fermi_point(p);
    FFConstant r;
    r.phi = ff_phi(cplx(-q, 0.0), p, f, v);
    r.double_integral = ff_double_integral(f, p);
    r.offset = f.offset;
    r.nodes = f.outer.size();
    r.C = 2.0 * p.T * r.phi / bare_energy_deriv(cplx(-q, 0.0), p) * std::exp(-r.double_integral);
    return r;
}

inline bool ff_in_regime(int m, double t, const ModelParams& p) { return m > 4.0 * p.J * t; }

// (-1)^m C(T,h) exp(m * rate); callers check ff_in_regime for the t dependence
inline cplx ff_leading(int m, double t, const ModelParams& p, const FFConstant& c, double rate,
                       std::vector<std::string>* warnings = nullptr) {
    ff::require_free_fermion(p);
    if (m < 1) throw error(errc::domain, "ff_leading: m must be positive");
    if (!ff_in_regime(m, t, p) && warnings) warnings->push_back("m <= 4Jt, outside the space-like regime");
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * c.C * std::exp(m * rate);
}

// amplitude T A / u'(x) with A = eps0'(-q) C / T
inline cplx ff_leading_amplitude(const ModelParams& p, const FFConstant& c) {
    const double q = ff::fermi_point(p);
    cplx e = bare_energy_deriv(cplx(-q, 0.0), p);
    cplx A = e / p.T * c.C;
    return p.T * A / e;
}

}  // namespace xxzqtm
