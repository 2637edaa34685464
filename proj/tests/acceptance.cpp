// Acceptance run: one PASS/FAIL line per criterion.
// Exit status is zero when the failing set equals known_failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "xxzqtm/xxzqtm.hpp"

using namespace xxzqtm;

namespace {

// threshold clause of criterion 4 cannot hold: q(0.999 h_c) is about 0.022 at delta = 0
const std::set<int> known_failures{4};

std::set<int> failed;
double max_monodromy = 0.0;
int monodromy_count = 0;
std::function<void()> deferred9;

void report(int id, bool pass, const std::string& detail) {
    std::printf("%s %2d  %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) failed.insert(id);
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void certify(const NlieSolution& s) {
    max_monodromy = std::max(max_monodromy, std::abs(s.monodromy));
    ++monodromy_count;
}

double sup_defect(const NlieSolution& s, double spin) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.contour.size(); ++i)
        d = std::max(d, std::abs(s.u[i] - (bare_energy(s.contour.nodes[i], s.params) - I * pi * spin * s.params.T)));
    return d;
}

void criterion1() {
    double worst = 0.0, slowest = 0.0;
    for (double h : {0.5, 1.0, 3.0})
        for (double T : {0.1, 0.5, 1.0}) {
            auto t0 = std::chrono::steady_clock::now();
            auto d = dressed_quantities(ModelParams::make(1, 0.0, h, T));
            auto dom = solve_dominant(d);
            auto ex = solve_excited(d, ExcitationConfig::single_hole(1));
            slowest = std::max(slowest, seconds_since(t0));
            worst = std::max({worst, sup_defect(dom, 0), sup_defect(ex, 1)});
            certify(dom);
            certify(ex);
        }
    report(1, worst < 1e-10 && slowest < 5.0,
           fmt("free fermion: sup|u - eps0 + i pi s T| = %.2e over 9 points, slowest point %.2f s", worst, slowest));
}

void criterion2() {
    double worst = 0.0, slowest = 0.0;
    for (double T : {0.2, 0.5, 1.0}) {
        auto t0 = std::chrono::steady_clock::now();
        auto p = ModelParams::make(1, 0.0, 1.0, T);
        auto d = dressed_quantities(p);
        auto dom = solve_dominant(d);
        auto ex = solve_excited(d, ExcitationConfig::single_hole(1));
        double im = effective_momentum(ex, dom).imag();
        double rate = ff_exponent_rate(p);
        slowest = std::max(slowest, seconds_since(t0));
        worst = std::max(worst, std::abs(im + rate) / std::abs(rate));
        certify(dom);
        certify(ex);
    }
    report(2, worst < 1e-6 && slowest < 30.0,
           fmt("Im Delta_dom vs free-fermion rate: max rel err %.2e, slowest point %.2f s", worst, slowest));
}

void criteria3and9() {
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> Ts{0.2, 0.1, 0.05};
    std::vector<cplx> ratio;
    std::vector<double> dev;
    double vF = 0.0, Zq = 0.0;
    for (double T : Ts) {
        auto d = dressed_quantities(ModelParams::make(1, 0.5, 1.0, T));
        vF = d.vF;
        Zq = d.Zq;
        auto dom = solve_dominant(d);
        auto ex = solve_excited(d, ExcitationConfig::single_hole(1));
        certify(dom);
        certify(ex);
        ratio.push_back(effective_momentum(ex, dom) / T);
        dev.push_back(std::abs(momentum_deviation(ex, dom, d)));
    }
    double elapsed = seconds_since(t0);
    // halving T: first-order then second-order elimination
    cplx r1 = 2.0 * ratio[1] - ratio[0], r2 = 2.0 * ratio[2] - ratio[1];
    cplx rich = (4.0 * r2 - r1) / 3.0;
    cplx target = I * pi / (2.0 * vF * Zq * Zq);
    double rel = std::abs(rich - target) / std::abs(target);
    report(3, rel < 0.05 && elapsed < 300.0,
           fmt("Delta_dom/T = %.10fi, %.10fi, %.10fi; Richardson %.10f%+.10fi vs i pi/(2 vF Z^2) = %.10fi, "
               "rel err %.2e, %.1f s",
               ratio[0].imag(), ratio[1].imag(), ratio[2].imag(), rich.real(), rich.imag(), target.imag(), rel,
               elapsed));

    double s1 = std::log(dev[0] / dev[1]) / std::log(2.0), s2 = std::log(dev[1] / dev[2]) / std::log(2.0);
    double fit = std::log(dev[0] / dev[2]) / std::log(4.0);
    bool ok = std::abs(s1 - 1) <= 0.2 && std::abs(s2 - 1) <= 0.2 && std::abs(fit - 1) <= 0.2;
    deferred9 = [=] {
        report(9, ok,
               fmt("|P - sum of dressed momenta| = %.3e, %.3e, %.3e at T = 0.2, 0.1, 0.05; slopes %.3f, %.3f, fit %.3f",
                   dev[0], dev[1], dev[2], s1, s2, fit));
    };
}

void criterion4() {
    double closed = 0.0;
    for (double h : {0.5, 1.0, 2.0, 3.0}) {
        double q = find_fermi_boundary(ModelParams::make(1, 0.0, h, 0.1));
        closed = std::max(closed, std::abs(q - 0.5 * std::acosh(4.0 / h)));
    }
    std::string thr;
    bool below = true;
    for (double delta : {0.0, 0.5}) {
        double h = 0.999 * 4.0 * (1.0 + delta);
        double q = find_fermi_boundary(ModelParams::make(1, delta, h, 0.1));
        below = below && q < 1e-2;
        thr += fmt(" q(delta=%.1f) = %.5f;", delta, q);
    }
    report(4, closed < 1e-9 && below,
           fmt("closed form max err %.2e; threshold at 0.999 h_c:%s need < 1e-2, the exact value at delta=0 is "
               "arccosh(1/0.999)/2 = %.5f",
               closed, thr.c_str(), 0.5 * std::acosh(1.0 / 0.999)));
}

void criterion5() {
    double res = 0.0, parity = 0.0, edge = 0.0;
    for (double delta : {0.3, 0.5, 0.8}) {
        auto d = dressed_quantities(ModelParams::make(1, delta, 1.0, 0.1), 64);
        for (const FredholmSolution* f : {&d.eps, &d.eps_deriv, &d.Z, &d.p_deriv}) res = std::max(res, f->residual);
        for (double x : {0.1, 0.37, 0.6, 0.9 * d.q}) {
            parity = std::max(parity, std::abs(d.eps_at(x) - d.eps_at(-x)));
            parity = std::max(parity, std::abs(d.Z_at(x) - d.Z_at(-x)));
            parity = std::max(parity, std::abs(d.p_at(x) + d.p_at(-x)));
        }
        edge = std::max({edge, std::abs(d.eps_at(d.q)), std::abs(d.eps_at(-d.q))});
    }
    auto p = ModelParams::make(1, 0.5, 0.02, 0.1);
    auto ref = dressed_quantities(p, 256);
    auto err = [&](int n) {
        auto d = dressed_quantities(p, n);
        return std::abs(d.Zq - ref.Zq) + std::abs(d.eps_at(0.3) - ref.eps_at(0.3));
    };
    double e32 = err(32), e64 = err(64);
    bool ok = res < 1e-10 && parity < 1e-12 && edge < 1e-8 && e32 / e64 >= 1e2;
    report(5, ok,
           fmt("residual %.2e, parity %.2e, |eps(+-q)| %.2e; N=32->64 errors %.2e -> %.2e (factor %.1e, h=0.02, "
               "q=%.3f)",
               res, parity, edge, e32, e64, e32 / e64, ref.q));
}

void criterion6() {
    report(6, max_monodromy < 1e-8,
           fmt("%d solutions from criteria 1-3, max |monodromy| %.2e", monodromy_count, max_monodromy));
}

void criterion7() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    double worst = 0.0;
    std::uint64_t n = 0;
    const LowTConfig target{{}, {}, {0}, {}};
    for (double delta : {0.3, 0.5, 0.8}) {
        auto d = dressed_quantities(ModelParams::make(1, delta, 1.0, 0.1));
        for (double tau : {0.0, 0.4, -0.4}) {
            auto m = minimize_im_delta0(d, tau / d.vF, 3, 6);
            n = m.enumerated;
            double exact = pi / (2.0 * d.vF * d.Zq * d.Zq);
            ok = ok && m.config == target && m.ties.empty() && m.value.real() == 0.0;
            worst = std::max(worst, std::abs(m.value.imag() - exact) / exact);
        }
    }
    double elapsed = seconds_since(t0);
    report(7, ok && worst < 1e-15 && elapsed < 10.0,
           fmt("argmin h_plus=[0] at 9 points, %llu configurations each, max rel dev from i pi/(2 vF Z^2) %.1e, "
               "%.2f s",
               static_cast<unsigned long long>(n), worst, elapsed));
}

void criterion8() {
    CorrlenOptions co;
    co.compare_mirror = false;
    auto d = dressed_quantities(ModelParams::make(1, 0.5, 1.0, 0.1));
    auto o = dominant_corrlen(d, 0.0, co);
    double worst = 0.0;
    for (double tm : {-0.3, -0.1, 0.1, 0.3}) {
        auto s = dominant_corrlen(d, tm, co);
        worst = std::max(worst, std::abs(s.delta - o.delta - tm * o.E));
    }
    double ulp = std::numeric_limits<double>::epsilon() * std::abs(o.delta);
    report(8, worst <= 4 * ulp, fmt("max |Delta(t/m) - Delta(0) - (t/m) E| = %.2e (|Delta| eps = %.2e)", worst, ulp));
}

std::string slurp(const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion10() {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("xxzqtm_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = XXZQTM_CLI_PATH;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"corrlen --delta 0.5 --h 1.0 --J 1.0 --T 0.1 --t-over-m 0.0", "json"},
        {"sweep --delta 0,0.5 --h 1 --T 0.2 --t-over-m 0,0.1 --jobs 3", "csv"},
        {"lowt-scan --delta 0.3 --h 1 --nmax 2 --M 4", "csv"},
        {"ff-oracle --J 1.0 --h 1.0 --T 0.5", "csv"},
    };
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::string out[2];
        int st[2];
        for (int k = 0; k < 2; ++k) {
            fs::path f = dir / (std::to_string(i) + "_" + std::to_string(k) + "." + runs[i].second);
            std::string cmd = "\"" + cli + "\" " + runs[i].first + " --format " + runs[i].second + " --no-meta -o \"" +
                              f.string() + "\"";
            st[k] = std::system(cmd.c_str());
            out[k] = slurp(f);
        }
        bool same = st[0] == 0 && st[1] == 0 && !out[0].empty() && out[0] == out[1];
        ok = ok && same;
        detail += fmt("%s%s %zu B %s", i ? "; " : "", runs[i].first.substr(0, runs[i].first.find(' ')).c_str(),
                      out[0].size(), same ? "identical" : "DIFFER");
    }
    fs::remove_all(dir);
    report(10, ok, detail);
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criteria3and9();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    deferred9();
    criterion10();
    std::string list;
    for (int f : failed) list += " " + std::to_string(f);
    std::printf("summary: %zu of 10 failed%s; known failures:", failed.size(), list.c_str());
    for (int f : known_failures) std::printf(" %d", f);
    std::printf("; %.1f s\n", seconds_since(t0));
    return failed == known_failures ? 0 : 1;
}
