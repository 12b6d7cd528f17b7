#include <bpd/core/special.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace sp = bpd::special;

TEST(Special, ZetaAtKnownPoints) {
    EXPECT_NEAR(sp::riemann_zeta(2.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-14);
    EXPECT_NEAR(sp::riemann_zeta(4.0), std::pow(std::numbers::pi, 4) / 90.0, 1e-14);
    // Continuation below s = 1 (reference values from mpmath, 30 digits).
    EXPECT_NEAR(sp::riemann_zeta(0.5), -1.4603545088095868129, 1e-13);
    EXPECT_NEAR(sp::riemann_zeta(0.75), -3.4412853869452228944, 1e-13);
    EXPECT_NEAR(sp::riemann_zeta(0.0), -0.5, 1e-13);
}

TEST(Special, DirichletBeta) {
    EXPECT_NEAR(sp::dirichlet_beta(1.0), std::numbers::pi / 4.0, 1e-14);
    EXPECT_NEAR(sp::dirichlet_beta(2.0), 0.91596559417721901505, 1e-14);  // Catalan
    EXPECT_NEAR(sp::dirichlet_beta(3.0), std::pow(std::numbers::pi, 3) / 32.0, 1e-14);
    EXPECT_NEAR(sp::dirichlet_beta(0.5), 0.66769145718960917666, 1e-13);
    EXPECT_NEAR(sp::dirichlet_beta(0.75), 0.73210721762739718388, 1e-13);
}

TEST(Special, SquareLatticeZeta) {
    EXPECT_NEAR(sp::square_lattice_zeta(1.0), -3.9002649200019558828, 1e-12);
    EXPECT_NEAR(sp::square_lattice_zeta(1.2), -5.4275166847668126734, 1e-12);
    EXPECT_NEAR(sp::square_lattice_zeta(1.5), -10.077559478793152101, 1e-11);
    EXPECT_NEAR(sp::square_lattice_zeta(1.8), -28.868274394811642908, 1e-10);
    EXPECT_THROW(sp::square_lattice_zeta(2.0), bpd::InvalidArgument);
    EXPECT_THROW(sp::square_lattice_zeta(0.0), bpd::InvalidArgument);
}

// The correction predicts the punctured lattice sum over a large disk:
// h^2 sum_{0<|m|h<=R} |hm|^{-q} ~ 2 pi R^{2-q}/(2-q) + Z(q) h^{2-q} (+ boundary noise).
TEST(Special, LatticeSelfTermMatchesPuncturedSum) {
    const double q = 1.5;
    const int m = 400;
    const double h = 1.0 / m;
    double s = 0.0;
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
            if ((i == 0 && j == 0) || i * i + j * j > m * m) continue;
            s += std::pow(h * std::hypot(i, j), -q);
        }
    s *= h * h;
    const double exact = 2.0 * std::numbers::pi / (2.0 - q);
    const double corrected = s + sp::lattice_self_term(q, h);
    EXPECT_LT(std::abs(corrected - exact), 0.2 * std::abs(s - exact));
    EXPECT_LT(std::abs(corrected - exact) / exact, 1e-3);
}
