#include <gtest/gtest.h>

#include <cmath>

#include "xxzqtm/model.hpp"

using namespace xxzqtm;

namespace {

ModelParams at_zeta(double zeta, double h = 1.0) {
    return ModelParams::make(1.0, zeta == pi / 2 ? 0.0 : std::cos(zeta), h, 0.1);
}

void expect_near(cplx a, cplx b, double tol) {
    EXPECT_NEAR(a.real(), b.real(), tol);
    EXPECT_NEAR(a.imag(), b.imag(), tol);
}

}  // namespace

TEST(ModelParams, ZetaFromDelta) {
    EXPECT_EQ(ModelParams::make(1, 0.0, 1, 0.1).zeta, pi / 2);
    EXPECT_NEAR(ModelParams::make(1, 0.5, 1, 0.1).zeta, pi / 3, 1e-15);
}

TEST(ModelParams, RegimeChecks) {
    EXPECT_THROW(ModelParams::make(1, 1.5, 1, 0.1).validate(), error);
    EXPECT_THROW(ModelParams::make(1, -0.2, 1, 0.1).validate(), error);
    EXPECT_THROW(ModelParams::make(1, 0.5, 6.0, 0.1).validate(), error);
    EXPECT_THROW(ModelParams::make(1, 0.5, 1, 0.0).validate(), error);
    EXPECT_THROW(ModelParams::make(0, 0.5, 1, 0.1).validate(), error);
    EXPECT_NO_THROW(ModelParams::make(1, 0.5, 1, 0.1).validate());
    try {
        ModelParams::make(1, 1.5, 1, 0.1).validate();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::regime);
        EXPECT_EQ(e.exit_status(), 2);
    }
}

TEST(Kernel, VanishesAtFreeFermion) {
    auto p = at_zeta(pi / 2);
    EXPECT_EQ(kernel_K(cplx(0.37, 0.1), p), cplx(0.0));
    EXPECT_EQ(kernel_K(cplx(-1.2, 0.0), p), cplx(0.0));
}

TEST(Kernel, ValueAtOrigin) {
    auto p = at_zeta(pi / 3);
    EXPECT_NEAR(kernel_K(0.0, p).real(), 0.183776298473930683, 1e-15);
    expect_near(kernel_K(cplx(0.3, 0.2), p), cplx(0.169067616958190506, -0.0263310465443963332), 1e-14);
}

TEST(Kernel, PoleGuard) {
    auto p = at_zeta(pi / 3);
    EXPECT_THROW(kernel_K(cplx(0.0, pi / 3), p), error);
    EXPECT_THROW(kernel_K(cplx(0.0, -pi / 3 + pi), p), error);
    EXPECT_NO_THROW(kernel_K(cplx(0.0, pi / 3 + 1e-6), p));
}

TEST(Kernel, EvenAndPeriodic) {
    auto p = at_zeta(1.1);
    for (double x : {-2.0, -0.7, 0.1, 0.9}) {
        for (double y : {-0.3, 0.0, 0.25}) {
            cplx l(x, y);
            cplx k = kernel_K(l, p);
            EXPECT_LT(std::abs(kernel_K(-l, p) - k), 1e-12 * std::abs(k));
            EXPECT_LT(std::abs(kernel_K(l + I * pi, p) - k), 1e-12);
            cplx e = bare_energy(l, p);
            EXPECT_LT(std::abs(bare_energy(-l, p) - e), 1e-12 * std::abs(e));
            EXPECT_LT(std::abs(bare_energy(l + I * pi, p) - e), 1e-12 * std::abs(e));
        }
    }
}

TEST(Kernel, DerivativeMatchesDifference) {
    auto p = at_zeta(pi / 3);
    cplx l(0.4, 0.15);
    double h = 1e-5;
    cplx fd = (kernel_K(l + h, p) - kernel_K(l - h, p)) / (2 * h);
    EXPECT_LT(std::abs(fd - kernel_K_deriv(l, p)), 1e-8);
}

TEST(BareEnergy, Values) {
    auto p = at_zeta(pi / 3);
    EXPECT_NEAR(bare_energy(0.0, p).real(), 1.0 - 4.0 * 1.5, 1e-13);
    expect_near(bare_energy(cplx(0.3, 0.2), p), cplx(-3.31198955387689635, 1.80617318465995485), 1e-13);
    auto f = at_zeta(pi / 2);
    for (double x : {0.0, 0.3, 1.7}) EXPECT_NEAR(bare_energy(x, f).real(), 1.0 - 4.0 / std::cosh(2 * x), 1e-13);
    EXPECT_THROW(bare_energy(cplx(0.0, pi / 6), p), error);
}

TEST(BareEnergy, DerivativeMatchesDifference) {
    auto p = at_zeta(0.9);
    cplx l(-0.6, 0.1);
    double h = 1e-5;
    cplx fd = (bare_energy(l + h, p) - bare_energy(l - h, p)) / (2 * h);
    EXPECT_LT(std::abs(fd - bare_energy_deriv(l, p)), 1e-7);
}

TEST(BareMomentum, OddAndDerivative) {
    auto p = at_zeta(pi / 3);
    EXPECT_EQ(bare_momentum(0.0, p), cplx(0.0));
    expect_near(bare_momentum(cplx(0.3, 0.2), p), cplx(1.03369946165378059, 0.503938614435189307), 1e-13);
    for (double x : {0.2, 0.8, 2.5}) EXPECT_NEAR(bare_momentum(-x, p).real(), -bare_momentum(x, p).real(), 1e-13);
    EXPECT_NEAR(bare_momentum_deriv(0.0, p).real(), 2.0 / std::tan(pi / 6), 1e-13);
    auto f = at_zeta(pi / 2);
    for (double x : {0.0, 0.4, 1.3}) {
        EXPECT_NEAR(bare_momentum_deriv(x, f).real(), 2.0 / std::cosh(2 * x), 1e-13);
        double h = 1e-5;
        double fd = (bare_momentum(x + h, f) - bare_momentum(x - h, f)).real() / (2 * h);
        EXPECT_NEAR(fd, 2.0 / std::cosh(2 * x), 1e-8);
    }
    EXPECT_THROW(bare_momentum(cplx(0.0, -pi / 6), p), error);
}

TEST(BarePhase, InnerBranch) {
    auto p = at_zeta(pi / 3);
    EXPECT_EQ(bare_phase(0.0, p), cplx(0.0));
    EXPECT_NEAR(bare_phase(0.3, p).real(), 0.333259807505916663, 1e-14);
    expect_near(bare_phase(cplx(0.3, 0.2), p), cplx(0.349288871411248690, 0.207830347435761450), 1e-13);
    for (double x : {0.1, 0.7, 1.9}) EXPECT_NEAR(bare_phase(-x, p).real(), -bare_phase(x, p).real(), 1e-13);
    double h = 1e-5;
    cplx fd = (bare_phase(0.3 + h, p) - bare_phase(0.3 - h, p)) / (2 * h);
    EXPECT_LT(std::abs(fd - 2 * pi * kernel_K(0.3, p)), 1e-8);
}

TEST(BarePhase, VanishesAtFreeFermion) {
    auto f = at_zeta(pi / 2);
    for (double x : {-1.0, 0.0, 0.5}) EXPECT_EQ(bare_phase(x, f), cplx(0.0));
}

TEST(BarePhase, BranchLineRejected) {
    auto p = at_zeta(pi / 3);
    EXPECT_THROW(bare_phase(cplx(0.2, pi / 3), p), error);
}

TEST(BarePhase, OuterBranchDerivative) {
    auto p = at_zeta(pi / 3);
    cplx l(0.3, 1.2);
    double h = 1e-5;
    cplx fd = (bare_phase(l + h, p) - bare_phase(l - h, p)) / (2 * h);
    EXPECT_LT(std::abs(fd - 2 * pi * kernel_K(l, p)), 1e-7);
}
