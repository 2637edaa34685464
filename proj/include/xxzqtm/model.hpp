#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include "xxzqtm/error.hpp"

namespace xxzqtm {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct ModelParams {
    double J{1.0};
    double delta{0.0};
    double h{1.0};
    double T{0.1};
    double zeta{pi / 2};
    double pole_guard{1e-8};

    static ModelParams make(double J, double delta, double h, double T) {
        ModelParams p;
        p.J = J;
        p.delta = delta;
        p.h = h;
        p.T = T;
        p.validate();
        p.zeta = delta == 0.0 ? pi / 2 : std::acos(delta);
        return p;
    }

    void validate() const {
        std::ostringstream msg;
        if (!(J > 0.0)) msg << "J must be positive; ";
        if (!(delta >= 0.0 && delta < 1.0)) msg << "delta must lie in [0,1); ";
        if (!(T > 0.0)) msg << "T must be positive; ";
        if (!(h > 0.0 && h < 4.0 * J * (1.0 + delta))) msg << "h must lie in (0, 4J(1+delta)); ";
        std::string m = msg.str();
        if (!m.empty()) throw error(errc::regime, m.substr(0, m.size() - 2));
    }

    bool free_fermion() const { return delta == 0.0; }
    double saturation_field() const { return 4.0 * J * (1.0 + delta); }
    // half-width of the strip on which the inner branch of the bare phase is used
    double inner_width() const { return std::min(zeta, pi - zeta); }
};

// shift Im(lambda) into (-pi/2, pi/2]
inline cplx reduce_strip(cplx l) {
    double k = std::ceil(l.imag() / pi - 0.5);
    return {l.real(), l.imag() - k * pi};
}

namespace detail {

inline bool near_mod_ipi(cplx l, double b, double r) {
    return std::abs(reduce_strip(l - I * b)) < r;
}

inline void guard(bool bad, const char* what) {
    if (bad) throw error(errc::domain, what);
}

}  // namespace detail

inline cplx kernel_K(cplx l, const ModelParams& p) {
    if (p.free_fermion()) return 0.0;
    const double z = p.zeta;
    detail::guard(detail::near_mod_ipi(l, z, p.pole_guard) || detail::near_mod_ipi(l, -z, p.pole_guard),
                  "kernel_K: argument at a pole");
    return std::sin(2 * z) / (2 * pi * std::sinh(l - I * z) * std::sinh(l + I * z));
}

inline cplx kernel_K_deriv(cplx l, const ModelParams& p) {
    if (p.free_fermion()) return 0.0;
    const double z = p.zeta;
    cplx d = std::sinh(l - I * z) * std::sinh(l + I * z);
    return -std::sin(2 * z) / (2 * pi) * std::sinh(2.0 * l) / (d * d);
}

inline cplx bare_energy(cplx l, const ModelParams& p) {
    const double z = p.zeta;
    detail::guard(detail::near_mod_ipi(l, z / 2, p.pole_guard) || detail::near_mod_ipi(l, -z / 2, p.pole_guard),
                  "bare_energy: argument at a pole");
    return p.h - 2 * p.J * std::sin(z) * std::sin(z) / (std::sinh(l + I * z / 2.0) * std::sinh(l - I * z / 2.0));
}

inline cplx bare_energy_deriv(cplx l, const ModelParams& p) {
    const double z = p.zeta;
    cplx d = std::sinh(l + I * z / 2.0) * std::sinh(l - I * z / 2.0);
    return 2 * p.J * std::sin(z) * std::sin(z) * std::sinh(2.0 * l) / (d * d);
}

inline cplx bare_momentum(cplx l, const ModelParams& p) {
    const double z = p.zeta;
    detail::guard(detail::near_mod_ipi(l, z / 2, p.pole_guard) || detail::near_mod_ipi(l, -z / 2, p.pole_guard),
                  "bare_momentum: argument at a branch point");
    return I * std::log(std::sinh(I * z / 2.0 + l) / std::sinh(I * z / 2.0 - l));
}

inline cplx bare_momentum_deriv(cplx l, const ModelParams& p) {
    const double z = p.zeta;
    double s = std::sin(z / 2);
    cplx sh = std::sinh(l);
    return std::sin(z) / (s * s + sh * sh);
}

// Both branches of the bare phase. On the outer branch the constant offset
// makes the function continuous with the inner one through Re(lambda) < 0.
inline cplx bare_phase(cplx l, const ModelParams& p) {
    if (p.free_fermion()) return 0.0;
    const double z = p.zeta;
    l = reduce_strip(l);
    const double m = p.inner_width();
    detail::guard(std::abs(std::abs(l.imag()) - m) < p.pole_guard, "bare_phase: argument on a branch line");
    if (std::abs(l.imag()) < m) return I * std::log(std::sinh(I * z + l) / std::sinh(I * z - l));
    double sg = (pi - 2 * z) > 0 ? 1.0 : ((pi - 2 * z) < 0 ? -1.0 : 0.0);
    return -pi * sg + I * std::log(std::sinh(I * z + l) / std::sinh(l - I * z));
}

}  // namespace xxzqtm
