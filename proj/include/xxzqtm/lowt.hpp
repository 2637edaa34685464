#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <ostream>
#include <tuple>
#include <vector>

#include "xxzqtm/dressed.hpp"
#include "xxzqtm/error.hpp"
#include "xxzqtm/model.hpp"

namespace xxzqtm {

struct LowTConfig {
    std::vector<int> p_plus, p_minus, h_plus, h_minus;

    int n_p(int sigma) const { return static_cast<int>((sigma > 0 ? p_plus : p_minus).size()); }
    int n_h(int sigma) const { return static_cast<int>((sigma > 0 ? h_plus : h_minus).size()); }
    int ell(int sigma) const { return sigma * (n_p(sigma) - n_h(sigma)); }

    // sum_a (k_a - (a-1)) over both lists of one branch
    long packing_offset(int sigma) const {
        long s = 0;
        for (const auto* v : {sigma > 0 ? &p_plus : &p_minus, sigma > 0 ? &h_plus : &h_minus})
            for (std::size_t a = 0; a < v->size(); ++a) s += (*v)[a] - static_cast<long>(a);
        return s;
    }

    void validate() const {
        for (const auto* v : {&p_plus, &p_minus, &h_plus, &h_minus})
            for (std::size_t i = 0; i < v->size(); ++i) {
                if ((*v)[i] < 0) throw error(errc::domain, "LowTConfig: negative integer");
                if (i > 0 && (*v)[i] <= (*v)[i - 1]) throw error(errc::domain, "LowTConfig: lists must increase strictly");
            }
        if (n_p(1) + n_p(-1) + 1 != n_h(1) + n_h(-1))
            throw error(errc::domain, "LowTConfig: sector requires one more hole than particles");
    }

    auto key() const { return std::tie(p_plus, p_minus, h_plus, h_minus); }
    bool operator==(const LowTConfig& o) const { return key() == o.key(); }
    bool operator<(const LowTConfig& o) const { return key() < o.key(); }
};

// Delta_0 split into its pieces; the integer parts are exact
struct Delta0 {
    cplx value{0.0};
    cplx first{0.0}, second{0.0};
    long packing_plus{0}, packing_minus{0};
    long pairs_plus{0}, pairs_minus{0};
};

inline Delta0 delta0_parts(const LowTConfig& c, double vF, double Zq, double t_over_m) {
    c.validate();
    const double tau = vF * t_over_m;
    const cplx pref = 2.0 * pi * I / vF;
    Delta0 r;
    r.pairs_plus = long(c.n_p(1)) * c.n_h(1);
    r.pairs_minus = long(c.n_p(-1)) * c.n_h(-1);
    r.packing_plus = c.packing_offset(1);
    r.packing_minus = c.packing_offset(-1);
    double a = Zq * c.ell(-1) - tau / (2.0 * Zq);
    double b1 = a * a + (1.0 - tau * tau) / (4.0 * Zq * Zq) + double(r.pairs_plus) * (1.0 + tau) +
                double(r.pairs_minus) * (1.0 - tau);
    double b2 = double(r.packing_plus) * (1.0 + tau) + double(r.packing_minus) * (1.0 - tau);
    r.first = pref * b1;
    r.second = pref * b2;
    r.value = r.first + r.second;
    return r;
}

inline cplx delta0(const LowTConfig& c, const DressedData& d, double t_over_m) {
    return delta0_parts(c, d.vF, d.Zq, t_over_m).value;
}

namespace detail {

inline void subsets(int M, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= M - (k - static_cast<int>(cur.size())); ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

inline std::vector<LowTConfig> configs_with_holes(int nh, int M) {
    std::vector<LowTConfig> out;
    const int np = nh - 1;
    std::vector<std::vector<std::vector<int>>> sub(std::max(nh, 1) + 1);
    for (int k = 0; k <= nh; ++k) subsets(M, k, sub[k]);
    for (int hp = 0; hp <= nh; ++hp)
        for (int pp = 0; pp <= np; ++pp)
            for (const auto& a : sub[pp])
                for (const auto& b : sub[np - pp])
                    for (const auto& c : sub[hp])
                        for (const auto& e : sub[nh - hp]) out.push_back(LowTConfig{a, b, c, e});
    return out;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace detail

// all sector configurations with at most n_max holes and integers in [0, M-1]
inline std::vector<LowTConfig> enumerate_configs(int n_max, int M) {
    if (n_max < 1 || M < 1) throw error(errc::domain, "enumerate_configs: bounds must be positive");
    std::vector<std::future<std::vector<LowTConfig>>> parts;
    for (int nh = 1; nh <= n_max; ++nh) parts.push_back(std::async(std::launch::async, detail::configs_with_holes, nh, M));
    std::vector<LowTConfig> all;
    for (auto& f : parts) {
        auto v = f.get();
        all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    }
    return all;
}

inline std::uint64_t expected_config_count(int n_max, int M) {
    double s = 0.0;
    for (int nh = 1; nh <= n_max; ++nh) s += detail::binomial(2 * M, nh) * detail::binomial(2 * M, nh - 1);
    return static_cast<std::uint64_t>(std::llround(s));
}

struct LowTMinimum {
    LowTConfig config;
    cplx value{0.0};
    std::vector<LowTConfig> ties;
    std::uint64_t enumerated{0};
};

inline LowTMinimum minimize_im_delta0(double vF, double Zq, double t_over_m, int n_max = 3, int M = 6,
                                      double tie_tol = 1e-12) {
    if (n_max < 1 || M < 1) throw error(errc::domain, "minimize_im_delta0: bounds must be positive");
    auto all = enumerate_configs(n_max, M);
    LowTMinimum best;
    best.enumerated = all.size();
    double bmin = 1e300;
    for (const auto& c : all) bmin = std::min(bmin, delta0_parts(c, vF, Zq, t_over_m).value.imag());
    double scale = std::max(1.0, std::abs(bmin));
    for (const auto& c : all) {
        cplx v = delta0_parts(c, vF, Zq, t_over_m).value;
        if (v.imag() <= bmin + tie_tol * scale) best.ties.push_back(c);
    }
    std::sort(best.ties.begin(), best.ties.end());
    best.config = best.ties.front();
    best.value = delta0_parts(best.config, vF, Zq, t_over_m).value;
    if (best.ties.size() == 1) best.ties.clear();
    return best;
}

inline LowTMinimum minimize_im_delta0(const DressedData& d, double t_over_m, int n_max = 3, int M = 6) {
    return minimize_im_delta0(d.vF, d.Zq, t_over_m, n_max, M);
}

inline void write_int_list(std::ostream& os, const std::vector<int>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
}

inline void write_lowt_csv(std::ostream& os, const std::vector<LowTConfig>& cs, double vF, double Zq, double t_over_m) {
    os << "p_plus,p_minus,h_plus,h_minus,ell_minus,ell_plus,ReDelta0,ImDelta0\n";
    os.precision(17);
    for (const auto& c : cs) {
        cplx v = delta0_parts(c, vF, Zq, t_over_m).value;
        for (const auto* l : {&c.p_plus, &c.p_minus, &c.h_plus, &c.h_minus}) {
            write_int_list(os, *l);
            os << ',';
        }
        os << c.ell(-1) << ',' << c.ell(1) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

}  // namespace xxzqtm
