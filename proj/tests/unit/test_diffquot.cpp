#include <bpd/diffquot.hpp>
#include <bpd/measures.hpp>
#include <bpd/rational.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

using bpd::Complex;
using bpd::RationalFunction;

namespace {
const Complex I(0.0, 1.0);

// Independent route: repeated forward differences of the node values.
template <class F>
Complex newton_forward(const F& f, Complex x0, Complex h, int t) {
    std::vector<Complex> v;
    for (int s = 0; s <= t; ++s) v.push_back(f(x0 + static_cast<double>(s) * h));
    for (int k = 0; k < t; ++k)
        for (int s = 0; s + 1 < static_cast<int>(v.size()) - k; ++s) v[s] = (v[s + 1] - v[s]) / h;
    return v[0];
}

double factorial(int t) {
    double f = 1;
    for (int k = 2; k <= t; ++k) f *= k;
    return f;
}

Complex random_step(bpd::Xorshift64Star& g) {
    const double r = std::pow(10.0, -2.0 * g.uniform01());  // |h| in (0.01, 1]
    return std::polar(r, 2 * std::numbers::pi * g.uniform01());
}
}  // namespace

TEST(DiffQuot, Examples) {
    const auto z2 = RationalFunction::monomial(2);
    EXPECT_EQ(bpd::diff_quotient(z2, 0.0, 0.5, 2).value, Complex(2.0));
    EXPECT_EQ(bpd::diff_quotient(z2, 0.0, Complex(0.25, 0.5), 2).value, Complex(2.0));
    EXPECT_EQ(bpd::diff_quotient(RationalFunction::monomial(1), 0.0, 0.5, 2).value, Complex(0.0));
    const auto f = RationalFunction::pole(1.0, 1, -1.0);  // 1/(1 - z)
    EXPECT_NEAR(std::abs(bpd::diff_quotient(f, 0.0, 0.1, 1).value - (1.0 / 0.9 - 1.0) / 0.1), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(bpd::diff_quotient(f, 0.0, 0.1, 1).value - 10.0 / 9.0), 0.0, 1e-13);
}

TEST(DiffQuot, Errors) {
    const auto f = RationalFunction::pole(0.5);
    EXPECT_THROW(bpd::diff_quotient(f, 0.0, 0.0, 1), bpd::InvalidArgument);
    EXPECT_THROW(bpd::diff_quotient(f, 0.0, 0.1, 0), bpd::InvalidArgument);
    EXPECT_THROW(bpd::diff_quotient(f, 0.0, 0.25, 2), bpd::NodeEvaluationError);
    EXPECT_THROW(bpd::diff_quotient(f, 0.0, 0.1, 31), bpd::OutOfRangeError);
    EXPECT_THROW(bpd::compose_check(f, 0.0, 0.1, 1), bpd::InvalidArgument);
}

TEST(DiffQuot, MatchesRepeatedForwardDifferences) {
    bpd::Xorshift64Star g(8);
    const auto f = RationalFunction::pole(Complex(2.0, 1.0), 2, Complex(0.5, -1)) + RationalFunction::pole(-3.0);
    for (int t = 1; t <= 6; ++t) {
        const Complex h = 0.3 * random_step(g);
        const Complex a = bpd::diff_quotient(f, 0.1, h, t).value;
        const Complex b = newton_forward(f, 0.1, h, t);
        EXPECT_LE(std::abs(a - b), 1e-9 * bpd::difference_scale(f, 0.1, h, t)) << t;
    }
}

TEST(DiffQuot, PolynomialExactness) {
    bpd::Xorshift64Star g(2024);
    for (int t = 1; t <= 6; ++t)
        for (int trial = 0; trial < 50; ++trial) {
            const Complex h = random_step(g);
            const auto zt = RationalFunction::monomial(t);
            const Complex v = bpd::diff_quotient(zt, 0.0, h, t).value;
            ASSERT_LE(std::abs(v - factorial(t)), 1e-10 * factorial(t)) << "t=" << t << " h=" << h;
            const Complex x0(2 * g.uniform01() - 1, 2 * g.uniform01() - 1);
            const Complex vx = bpd::diff_quotient(zt, x0, h, t).value;
            ASSERT_LE(std::abs(vx - factorial(t)), 1e-10 * bpd::difference_scale(zt, x0, h, t));
            std::vector<Complex> c(static_cast<std::size_t>(t));
            for (auto& a : c) a = Complex(g.uniform01(), g.uniform01());
            const auto low = RationalFunction::polynomial(c);
            ASSERT_LE(std::abs(bpd::diff_quotient(low, x0, h, t).value),
                      1e-10 * bpd::difference_scale(low, x0, h, t));
        }
}

TEST(DiffQuot, ComposeIdentity) {
    const auto z3 = RationalFunction::polynomial({1.0, -2.0, Complex(0, 3), 0.5});
    EXPECT_LE(bpd::compose_check(z3, 0.3, 0.2, 3), 1e-12);
    const auto f = RationalFunction::pole(2.0);
    EXPECT_LE(bpd::compose_check(f, 0.0, 0.05 * I, 4), 1e-10 * bpd::difference_scale(f, 0.0, 0.05 * I, 4));
    EXPECT_LE(bpd::compose_check(f, 0.0, 0.1, 2), 1e-13 * bpd::difference_scale(f, 0.0, 0.1, 2));

    const auto disk = bpd::build_disk(0.0, 1.0, 64);
    const auto battery = bpd::default_battery(disk);
    bpd::Xorshift64Star g(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto& f = battery[static_cast<std::size_t>(trial) % battery.size()].f;
        const int t = 2 + trial % 5;
        const Complex h = random_step(g) * 0.15;
        const Complex x0 = std::polar(0.5 * g.uniform01(), 6.28 * g.uniform01());
        ASSERT_LE(bpd::compose_check(f, x0, h, t), 1e-10 * bpd::difference_scale(f, x0, h, t));
    }
}

TEST(DiffQuot, PascalIdentityExactInIntegers) {
    for (int t = 2; t <= 30; ++t)
        for (int s = 1; s <= t - 1; ++s)
            ASSERT_EQ(bpd::binomial(t - 1, s - 1) + bpd::binomial(t - 1, s), bpd::binomial(t, s));
    EXPECT_EQ(bpd::binomial(30, 15), 155117520);
    EXPECT_EQ(bpd::binomial(6, 2), 15);
    EXPECT_EQ(bpd::binomial(5, 7), 0);
    EXPECT_THROW(bpd::binomial(31, 2), bpd::OutOfRangeError);
}

TEST(DiffQuot, KernelFactorization) {
    const auto k = bpd::kernel_factorization(1.0, 0.0, 3.0, 1);
    ASSERT_EQ(k.terms.size(), 1u);
    EXPECT_NEAR(std::abs(k.terms[0] - 1.0 / 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(k.remainder - 1.0 / 6.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(k.total() - 0.5), 0.0, 1e-15);

    const auto same = bpd::kernel_factorization(0.2, 0.2, 1.0, 4);
    EXPECT_EQ(same.remainder, Complex(0.0));
    for (std::size_t m = 1; m < same.terms.size(); ++m) EXPECT_EQ(same.terms[m], Complex(0.0));
    EXPECT_NEAR(std::abs(same.total() - 1.0 / 0.8), 0.0, 1e-15);

    bpd::Xorshift64Star g(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Complex z(4 * g.uniform01() - 2, 4 * g.uniform01() - 2);
        const Complex x(g.uniform01() - 0.5, g.uniform01() - 0.5), x0(g.uniform01() - 0.5, g.uniform01() - 0.5);
        const int t = 1 + trial % 8;
        const Complex want = 1.0 / (z - x);
        ASSERT_LE(std::abs(bpd::kernel_factorization(x, x0, z, t).total() - want), 1e-12 * std::abs(want));
    }
    EXPECT_THROW(bpd::kernel_factorization(1.0, 0.0, 1.0, 2), bpd::SingularPointError);
    EXPECT_THROW(bpd::kernel_factorization(1.0, 0.0, 0.0, 2), bpd::SingularPointError);
}

TEST(DiffQuot, ConvergenceTable) {
    const auto f = RationalFunction::pole(1.0, 1, -1.0);
    const auto rows = bpd::convergence_table(f, 0.0, 2, {0.1, 0.01, 0.001, 0.0001}, 2.0);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_GT(rows[0].abs_error, rows[1].abs_error);
    EXPECT_GT(rows[1].abs_error, rows[2].abs_error);
    EXPECT_LT(rows[2].abs_error, 1e-2);

    const auto p = RationalFunction::polynomial({1.0, 2.0, 3.0});
    for (const auto& r : bpd::convergence_table(p, 0.4, 2, {0.5, Complex(0, 0.1), 0.01}, 6.0))
        EXPECT_LE(r.abs_error, 1e-9);

    const auto one = bpd::convergence_table(RationalFunction::monomial(2), 1.0, 1, {0.1}, 2.0);
    EXPECT_NEAR(one[0].value.real(), 2.1, 1e-13);
    EXPECT_NEAR(one[0].abs_error, 0.1, 1e-13);

    std::ostringstream os;
    bpd::write_convergence_csv(os, one);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "h_re,h_im,value_re,value_im,abs_error");
}

TEST(DiffQuot, SampledFunctionNearestCell) {
    auto d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 65));
    std::vector<Complex> v;
    for (const auto& c : d->cells()) v.push_back(c.center * c.center);
    const bpd::SampledFunction s(d, v);
    const auto& c = d->cells()[100];
    EXPECT_EQ(s(c.center + Complex(0.4, -0.4) * d->cell_width()), c.center * c.center);
    EXPECT_THROW(s(5.0), bpd::NodeEvaluationError);
    // exact on the lattice: second difference of z^2 along cell steps
    const Complex h = d->cell_width() * 3.0;
    EXPECT_NEAR(std::abs(bpd::diff_quotient(s, 0.0, h, 2).value - 2.0), 0.0, 1e-9);
    EXPECT_THROW(bpd::diff_quotient(s, 0.0, 0.6, 2), bpd::NodeEvaluationError);
}
