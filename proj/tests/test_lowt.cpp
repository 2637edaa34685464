#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "xxzqtm/lowt.hpp"

using namespace xxzqtm;

namespace {

const double vF = 5.11076992, Zq = 0.86982353;

LowTConfig hp0() { return LowTConfig{{}, {}, {0}, {}}; }

}  // namespace

TEST(LowTConfig, Validation) {
    EXPECT_NO_THROW(hp0().validate());
    EXPECT_THROW((LowTConfig{{}, {}, {0}, {0}}.validate()), error);
    EXPECT_THROW((LowTConfig{{}, {}, {2, 1}, {}}.validate()), error);
    LowTConfig c{{1}, {}, {0}, {3}};
    EXPECT_EQ(c.ell(1), 0);
    EXPECT_EQ(c.ell(-1), 1);
    EXPECT_EQ(c.packing_offset(1), 1);
    EXPECT_EQ(c.packing_offset(-1), 3);
}

TEST(Delta0, MinimisingConfiguration) {
    for (double tm : {0.0, 0.4 / vF, -0.4 / vF}) {
        auto d = delta0_parts(hp0(), vF, Zq, tm);
        EXPECT_NEAR(d.value.real(), 0.0, 1e-15);
        EXPECT_NEAR(d.value.imag(), pi / (2 * vF * Zq * Zq), 1e-14);
        EXPECT_EQ(d.packing_plus, 0);
        EXPECT_EQ(d.pairs_plus, 0);
    }
}

TEST(Delta0, PackedListsHaveNoSecondPart) {
    LowTConfig c{{0, 1}, {0}, {0, 1, 2}, {0}};
    auto d = delta0_parts(c, vF, Zq, 0.1);
    EXPECT_EQ(d.second, cplx(0.0));
    EXPECT_EQ(d.packing_plus, 0);
    EXPECT_EQ(d.packing_minus, 0);
}

TEST(Delta0, RaisingTheHole) {
    const double tm = 0.07;
    cplx a = delta0_parts(hp0(), vF, Zq, tm).value;
    cplx b = delta0_parts(LowTConfig{{}, {}, {1}, {}}, vF, Zq, tm).value;
    cplx ref = 2.0 * pi * I / vF * (1.0 + vF * tm);
    EXPECT_LT(std::abs((b - a) - ref), 1e-13);
}

TEST(Delta0, MirrorIsHigher) {
    cplx a = delta0_parts(hp0(), vF, Zq, 0.0).value;
    cplx b = delta0_parts(LowTConfig{{}, {}, {}, {0}}, vF, Zq, 0.0).value;
    EXPECT_GT(b.imag(), a.imag());
    EXPECT_NEAR(b.imag() - a.imag(), 2 * pi / vF * Zq * Zq, 1e-13);
}

TEST(Enumeration, CountMatchesBinomials) {
    for (int nmax : {1, 2, 3}) {
        for (int M : {3, 5, 6}) {
            auto all = enumerate_configs(nmax, M);
            EXPECT_EQ(all.size(), expected_config_count(nmax, M));
            std::set<LowTConfig> uniq(all.begin(), all.end());
            EXPECT_EQ(uniq.size(), all.size());
            for (const auto& c : all) {
                c.validate();
                for (const auto* v : {&c.p_plus, &c.p_minus, &c.h_plus, &c.h_minus})
                    for (int k : *v) EXPECT_LT(k, M);
            }
        }
    }
    EXPECT_EQ(expected_config_count(3, 6), 12u + 66u * 12u + 220u * 66u);
}

TEST(Enumeration, SecondPartNonNegative) {
    for (const auto& c : enumerate_configs(3, 5))
        for (double tau : {0.0, 0.5, -0.9}) EXPECT_GE(delta0_parts(c, vF, Zq, tau / vF).second.imag(), 0.0);
}

TEST(Minimiser, ArgminIsSingleHoleOnPlusBranch) {
    for (double tau : {0.0, 0.4, -0.4}) {
        auto m = minimize_im_delta0(vF, Zq, tau / vF, 3, 5);
        EXPECT_EQ(m.config, hp0());
        EXPECT_TRUE(m.ties.empty());
        EXPECT_NEAR(m.value.imag(), pi / (2 * vF * Zq * Zq), 1e-14);
        EXPECT_EQ(m.enumerated, expected_config_count(3, 5));
    }
}

TEST(Minimiser, TiesAreReported) {
    // single holes on the two branches tie at vF t/m = Z^2(q)
    auto m = minimize_im_delta0(4.0, std::sqrt(0.5), 0.5 / 4.0, 2, 3);
    ASSERT_EQ(m.ties.size(), 2u);
    EXPECT_EQ(m.config, m.ties.front());
    EXPECT_EQ(m.ties[0], (LowTConfig{{}, {}, {}, {0}}));
    EXPECT_EQ(m.ties[1], hp0());
}

TEST(Minimiser, MirrorTakesOverBeyondZSquared) {
    auto m = minimize_im_delta0(vF, Zq, 0.9 / vF, 3, 5);
    EXPECT_EQ(m.config, (LowTConfig{{}, {}, {}, {0}}));
}

TEST(Minimiser, Deterministic) {
    auto a = minimize_im_delta0(vF, Zq, 0.03, 3, 6);
    auto b = minimize_im_delta0(vF, Zq, 0.03, 3, 6);
    EXPECT_EQ(a.config, b.config);
    EXPECT_EQ(a.value, b.value);
}

TEST(LowTCsv, Header) {
    std::ostringstream os;
    write_lowt_csv(os, {hp0(), LowTConfig{{0}, {}, {0, 2}, {}}}, vF, Zq, 0.0);
    std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "p_plus,p_minus,h_plus,h_minus,ell_minus,ell_plus,ReDelta0,ImDelta0");
    EXPECT_NE(s.find("0,,0 2,,"), std::string::npos);
}
