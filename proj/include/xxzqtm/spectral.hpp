#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "xxzqtm/dressed.hpp"
#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"
#include "xxzqtm/nlie.hpp"

namespace xxzqtm {

namespace detail {

// oint f'(mu) Ln(mu) dmu / (2 pi i) on the solution's own contour
template <class F>
cplx contour_moment(const NlieSolution& s, const F& fprime) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < s.contour.size(); ++i) acc += s.contour.weights[i] * fprime(s.contour.nodes[i]) * s.Ln[i];
    return acc / (2.0 * pi * I);
}

template <class F, class Fp>
cplx effective_quantity(const NlieSolution& sol, const NlieSolution& dom, const F& f, const Fp& fp) {
    if (!dom.roots.empty()) throw error(errc::domain, "effective quantity: reference state carries roots");
    cplx roots = 0.0;
    for (const Root& r : sol.roots) roots += (r.hole ? -1.0 : 1.0) * f(r.x);
    return roots - contour_moment(sol, fp) + contour_moment(dom, fp);
}

}  // namespace detail

inline cplx dominant_momentum_reference(const NlieSolution& dom) {
    const ModelParams& p = dom.params;
    return -detail::contour_moment(dom, [&](cplx l) { return bare_momentum_deriv(l, p); });
}

inline cplx dominant_energy_reference(const NlieSolution& dom) {
    const ModelParams& p = dom.params;
    return -detail::contour_moment(dom, [&](cplx l) { return bare_energy_deriv(l, p); });
}

inline cplx effective_momentum(const NlieSolution& sol, const NlieSolution& dom) {
    const ModelParams& p = sol.params;
    return detail::effective_quantity(
        sol, dom, [&](cplx l) { return bare_momentum(l, p); }, [&](cplx l) { return bare_momentum_deriv(l, p); });
}

inline cplx effective_energy(const NlieSolution& sol, const NlieSolution& dom) {
    const ModelParams& p = sol.params;
    return detail::effective_quantity(
        sol, dom, [&](cplx l) { return bare_energy(l, p); }, [&](cplx l) { return bare_energy_deriv(l, p); });
}

struct SpectralObservables {
    ModelParams params;
    double t_over_m{0.0};
    cplx P{0.0}, E{0.0}, P_D{0.0}, E_D{0.0};
    cplx delta{0.0};
    double decay_rate{0.0};
    double oscillation{0.0};
    double q{0.0}, vF{0.0}, Zq{1.0};
    double residual{0.0};
    double monodromy{0.0};
    int iterations{0};
    cplx root{0.0};
    int hole_side{1};
    cplx mirror_delta{0.0};
    std::vector<std::string> warnings;

    cplx delta_at(double tm) const { return P + tm * E; }
};

struct CorrlenOptions {
    SolverOptions solver{};
    bool compare_mirror{true};
    int fredholm_order{64};
};

namespace detail {

inline void fill_delta(SpectralObservables& o) {
    o.delta = o.delta_at(o.t_over_m);
    o.decay_rate = o.delta.imag();
    o.oscillation = o.delta.real();
}

}  // namespace detail

// Dominant inverse correlation length from a prepared dressed state
inline SpectralObservables dominant_corrlen(const DressedData& d, double t_over_m, const CorrlenOptions& co = {}) {
    SpectralObservables o;
    o.params = d.params;
    o.t_over_m = t_over_m;
    o.q = d.q;
    o.vF = d.vF;
    o.Zq = d.Zq;
    if (std::abs(d.vF * t_over_m) >= 1.0) o.warnings.push_back("|vF t/m| >= 1, outside the space-like cone");

    NlieSolution dom = solve_dominant(d, co.solver);
    o.P_D = dominant_momentum_reference(dom);
    o.E_D = dominant_energy_reference(dom);

    auto evaluate = [&](int sigma) {
        NlieSolution ex = solve_excited(d, ExcitationConfig::single_hole(sigma), co.solver);
        SpectralObservables r = o;
        r.P = effective_momentum(ex, dom);
        r.E = effective_energy(ex, dom);
        r.residual = std::max(dom.residual, ex.residual);
        r.monodromy = std::max(std::abs(dom.monodromy), std::abs(ex.monodromy));
        r.iterations = dom.iterations + ex.iterations;
        r.root = ex.roots.front().x;
        r.hole_side = sigma;
        for (const auto& w : ex.warnings) r.warnings.push_back(w);
        detail::fill_delta(r);
        return r;
    };

    SpectralObservables best = evaluate(1);
    if (co.compare_mirror) {
        SpectralObservables mirror = evaluate(-1);
        best.mirror_delta = mirror.delta;
        if (mirror.delta.imag() < best.delta.imag() - 1e-12) {
            mirror.mirror_delta = best.delta;
            best = mirror;
        }
    }
    return best;
}

inline SpectralObservables dominant_corrlen(const ModelParams& p, double t_over_m, const CorrlenOptions& co = {}) {
    p.validate();
    return dominant_corrlen(dressed_quantities(p, co.fredholm_order), t_over_m, co);
}

inline cplx leading_asymptote(const SpectralObservables& obs, int m, cplx amplitude = 1.0) {
    if (m < 1) throw error(errc::domain, "leading_asymptote: m must be positive");
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * amplitude * std::exp(I * double(m) * obs.delta);
}

// P minus its low-temperature limit built from the dressed momentum at the actual roots
inline cplx momentum_deviation(const NlieSolution& sol, const NlieSolution& dom, const DressedData& d) {
    cplx lead = 0.0;
    for (const Root& r : sol.roots) lead += (r.hole ? -1.0 : 1.0) * d.p_at(r.x);
    lead += double(sol.spin) * d.p_at(d.q);
    return effective_momentum(sol, dom) - lead;
}

inline cplx energy_deviation(const NlieSolution& sol, const NlieSolution& dom, const DressedData& d) {
    cplx lead = 0.0;
    for (const Root& r : sol.roots) lead += (r.hole ? -1.0 : 1.0) * d.eps_at(r.x);
    return effective_energy(sol, dom) - lead;
}

}  // namespace xxzqtm
