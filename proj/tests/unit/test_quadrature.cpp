#include <bpd/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>

using bpd::Complex;
using bpd::WeightFunction;

namespace {
constexpr double kPi = std::numbers::pi;
const Complex I(0.0, 1.0);

bpd::RegionPtr unit_disk(int n) { return std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, n)); }

// Continuum values for w = 1 on the unit disk, by polar rays from x:
// the boundary distance along direction phi is rho(phi) = -x.phi + sqrt(1 - |x|^2 + (x.phi)^2).
double rho_max(Complex x, double phi) {
    const double b = x.real() * std::cos(phi) + x.imag() * std::sin(phi);
    return -b + std::sqrt(1.0 - std::norm(x) + b * b);
}

template <class F>
double trapezoid_periodic(F&& f, int n = 20000) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += f(2.0 * kPi * k / n);
    return s * 2.0 * kPi / n;
}
}  // namespace

TEST(Quadrature, ConjugateExponent) {
    EXPECT_DOUBLE_EQ(bpd::conjugate_exponent(3.0), 1.5);
    EXPECT_NEAR(bpd::conjugate_exponent(4.0), 4.0 / 3.0, 1e-15);
    EXPECT_THROW(bpd::conjugate_exponent(2.0), bpd::OutOfRangeError);
    EXPECT_THROW(bpd::conjugate_exponent(1.5), bpd::OutOfRangeError);
}

TEST(Quadrature, WeightValidation) {
    auto d = unit_disk(32);
    EXPECT_THROW(WeightFunction::constant(d, 1.0, 2.0), bpd::OutOfRangeError);
    EXPECT_THROW(WeightFunction::constant(d, 1.0, 1.0), bpd::OutOfRangeError);
    EXPECT_NO_THROW(WeightFunction::constant(d, 1.0, 2.5, bpd::QPolicy::exploratory));
    EXPECT_THROW(WeightFunction(d, std::vector<Complex>(3), 1.5), bpd::InvalidArgument);
    std::vector<Complex> bad(d->filled_count(), 1.0);
    bad[0] = Complex(std::nan(""), 0.0);
    EXPECT_THROW(WeightFunction(d, bad, 1.5), bpd::InvalidArgument);
}

TEST(Quadrature, Integrate) {
    auto d = unit_disk(512);
    const auto w = WeightFunction::constant(d, 1.0 / kPi, 1.5);
    EXPECT_NEAR(std::abs(bpd::integrate(w, [](Complex) { return Complex(1.0); }) - 1.0), 0.0, 0.005);
    const auto zero = WeightFunction::constant(d, 0.0, 1.5);
    EXPECT_EQ(bpd::integrate(zero, [](Complex z) { return z * z + 1.0; }), Complex(0.0));
    const auto one = WeightFunction::constant(d, 1.0, 1.5);
    EXPECT_LE(std::abs(bpd::integrate(one, [](Complex z) { return z; })), 1e-3 * kPi);
}

TEST(Quadrature, IntegrateIsLinear) {
    auto d = unit_disk(64);
    bpd::Xorshift64Star g(4);
    auto rnd = [&] { return Complex(2 * g.uniform01() - 1, 2 * g.uniform01() - 1); };
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> a(d->filled_count()), b(a.size()), f(a.size()), h(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rnd();
            b[i] = rnd();
            f[i] = rnd();
            h[i] = rnd();
        }
        const Complex s = rnd(), t = rnd();
        const WeightFunction wa(d, a, 1.5), wb(d, b, 1.5);
        std::vector<Complex> ab(a.size()), fh(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            ab[i] = s * a[i] + t * b[i];
            fh[i] = s * f[i] + t * h[i];
        }
        const WeightFunction wab(d, ab, 1.5);
        const Complex lhs_w = bpd::integrate(wab, f);
        const Complex rhs_w = s * bpd::integrate(wa, f) + t * bpd::integrate(wb, f);
        EXPECT_LE(std::abs(lhs_w - rhs_w), 1e-12 * (std::abs(s) + std::abs(t)) * d->area() * 4);
        const Complex lhs_f = bpd::integrate(wa, fh);
        const Complex rhs_f = s * bpd::integrate(wa, f) + t * bpd::integrate(wa, h);
        EXPECT_LE(std::abs(lhs_f - rhs_f), 1e-12 * (std::abs(s) + std::abs(t)) * d->area() * 4);
    }
}

TEST(Quadrature, CauchyTransformOfDisk) {
    auto d = unit_disk(1024);
    const auto w = WeightFunction::constant(d, 1.0, 1.5);
    EXPECT_LE(std::abs(bpd::cauchy_transform(w, 0.0)), 1e-3);
    for (Complex x : {Complex(0.25), Complex(0.5), Complex(0.5) * I}) {
        // polar oracle: int e^{-i phi} rho(phi) dphi
        const double re = trapezoid_periodic([&](double p) { return std::cos(p) * rho_max(x, p); });
        const double im = -trapezoid_periodic([&](double p) { return std::sin(p) * rho_max(x, p); });
        EXPECT_NEAR(std::abs(Complex(re, im) + kPi * std::conj(x)), 0.0, 1e-9);
        EXPECT_LE(std::abs(bpd::cauchy_transform(w, x) + kPi * std::conj(x)), 0.01 * kPi) << x;
    }
    EXPECT_LE(std::abs(bpd::cauchy_transform(w, 2.0) + kPi / 2.0), 0.01 * kPi);
}

TEST(Quadrature, CauchyTransformConvergesAtCenteredPoint) {
    std::vector<double> err;
    for (int n : {129, 257, 513, 1025}) {
        const auto w = WeightFunction::constant(unit_disk(n), 1.0, 1.5);
        err.push_back(std::abs(bpd::cauchy_transform(w, 0.5) + kPi * 0.5));
    }
    const double order = std::log2(err.front() / err.back()) / 3.0;
    EXPECT_GE(order, 1.0);
}

TEST(Quadrature, NewtonianPotential) {
    auto d = unit_disk(1024);
    const auto w = WeightFunction::constant(d, 1.0, 1.5);
    const double at0 = bpd::newtonian_potential(w, 0.0);
    EXPECT_NEAR(at0, 2 * kPi, 0.01 * 2 * kPi);
    EXPECT_GT(at0, bpd::newtonian_potential(w, 3.0));
    EXPECT_EQ(bpd::newtonian_potential(WeightFunction::constant(d, 0.0, 1.5), 0.3), 0.0);
    // off-center interior point against the polar oracle int rho dphi
    const Complex x(0.3, 0.2);
    const double want = trapezoid_periodic([&](double p) { return rho_max(x, p); });
    EXPECT_NEAR(bpd::newtonian_potential(w, x), want, 0.01 * want);
}

TEST(Quadrature, SingularCellIntegral) {
    EXPECT_NEAR(bpd::singular_cell_integral(1.5, 1.0), 4 * kPi, 1e-13);
    EXPECT_NEAR(bpd::singular_cell_integral(1.0, 1.0), 2 * kPi, 1e-13);
    EXPECT_EQ(bpd::singular_cell_integral(1.5, 0.0), 0.0);
    EXPECT_THROW(bpd::singular_cell_integral(2.0, 1.0), bpd::DivergentIntegralError);
    EXPECT_THROW(bpd::singular_cell_integral(2.5, 1.0), bpd::DivergentIntegralError);
}

TEST(Quadrature, SingularWeightIntegralOnDisk) {
    auto d = unit_disk(1024);
    const auto w = WeightFunction::constant(d, 1.0, 1.5);
    EXPECT_NEAR(bpd::singular_weight_integral(w, 0.0, 1.5), 4 * kPi, 0.01 * 4 * kPi);
    EXPECT_EQ(bpd::singular_weight_integral(WeightFunction::constant(d, 0.0, 1.5), 0.0, 1.5), 0.0);
    // off-center target (not a lattice point): equal-area fallback, polar oracle
    const Complex x(0.25, -0.1);
    ASSERT_FALSE(d->at_cell_center(x));
    const double want = trapezoid_periodic([&](double p) { return 2.0 * std::sqrt(rho_max(x, p)); });
    EXPECT_NEAR(bpd::singular_weight_integral(w, x, 1.5), want, 0.01 * want);
}

TEST(Quadrature, SingularClosedFormConvergesWithOrderAtLeastOne) {
    for (double q : {1.2, 1.5, 1.8}) {
        std::vector<double> err;
        const double exact = bpd::singular_cell_integral(q, 1.0);
        for (int n : {128, 256, 512, 1024}) {
            const auto w = WeightFunction::constant(unit_disk(n), 1.0, q);
            err.push_back(std::abs(bpd::singular_weight_integral(w, 0.0, q) - exact) / exact);
        }
        EXPECT_LE(err.back(), 0.01);
        EXPECT_GE(std::log2(err.front() / err.back()) / 3.0, 1.0) << "q=" << q;
    }
}

TEST(Quadrature, SingularWeightIntegralScaling) {
    auto d = unit_disk(128);
    const auto w = WeightFunction::conj_power(d, 1.0 / kPi, 0.1, 1, 1.5);
    const Complex c(-1.7, 0.6);
    const double base = bpd::singular_weight_integral(w, Complex(0.2, 0.3), 1.5);
    const double scaled = bpd::singular_weight_integral(w.scaled(c), Complex(0.2, 0.3), 1.5);
    EXPECT_NEAR(scaled, std::pow(std::abs(c), 1.5) * base, 1e-12 * scaled);
    EXPECT_TRUE(std::isfinite(bpd::singular_weight_integral(w, d->cells()[10].center, 1.9)));
}

TEST(Quadrature, BatchMatchesPointEvaluations) {
    auto d = unit_disk(96);
    const auto w = WeightFunction::sample(
        d, [](Complex z) { return std::conj(z) * 0.7 + Complex(0.1, -0.3) * z * z + 1.0; }, 1.4);
    const auto ch = bpd::cauchy_transform_all(w);
    const auto np = bpd::newtonian_potential_all(w);
    const auto sw = bpd::singular_weight_integral_all(w, 1.4);
    const auto& cells = d->cells();
    for (std::size_t i = 0; i < cells.size(); i += 37) {
        const Complex x = cells[i].center;
        const Complex c = bpd::cauchy_transform(w, x);
        EXPECT_LE(std::abs(ch[i] - c), 1e-10 * (1 + std::abs(c)));
        EXPECT_NEAR(np[i], bpd::newtonian_potential(w, x), 1e-10 * np[i]);
        EXPECT_NEAR(sw[i], bpd::singular_weight_integral(w, x, 1.4), 1e-10 * sw[i]);
    }
}

TEST(Quadrature, DeterministicAcrossThreadCounts) {
    auto d = unit_disk(301);
    const auto w = WeightFunction::conj_power(d, 2.0 / kPi, 0.0, 1, 1.5);
    bpd::parallel::set_thread_count(1);
    const Complex a = bpd::cauchy_transform(w, 0.3);
    const double b = bpd::singular_weight_integral(w, 0.3, 1.5);
    bpd::parallel::set_thread_count(4);
    const Complex a4 = bpd::cauchy_transform(w, 0.3);
    const double b4 = bpd::singular_weight_integral(w, 0.3, 1.5);
    bpd::parallel::set_thread_count(0);
    EXPECT_EQ(a, a4);
    EXPECT_EQ(b, b4);
}

TEST(Quadrature, Wgt1RoundTrip) {
    auto d = unit_disk(40);
    const auto w = WeightFunction::conj_power(d, Complex(0.3, 0.1), Complex(0.1, 0.0), 2, 1.5);
    const auto text = w.to_wgt1();
    const auto back = WeightFunction::from_wgt1(text, d);
    EXPECT_EQ(back.values(), w.values());
    EXPECT_EQ(back.q(), w.q());
    EXPECT_EQ(back.tag(), w.tag());
    EXPECT_EQ(back.to_wgt1(), text);
    auto other = unit_disk(42);
    EXPECT_THROW(WeightFunction::from_wgt1(text, other), bpd::FormatError);
}
