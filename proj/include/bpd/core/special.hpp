#pragma once

// Zeta-type constants for singular lattice sums.
//
// For 0 < q < 2 the punctured midpoint sum over the square lattice hZ^2,
//     h^2 * sum_{m != 0} |h m|^{-q} g(h m),
// differs from the integral of |x|^{-q} g over the plane by
//     h^{2-q} * Z(q) * g(0) + O(h^{4-q}),
// where Z(q) = 4 zeta(q/2) beta(q/2) is the analytically continued Epstein
// zeta function of the square lattice. Subtracting that term restores
// second-order accuracy for a target sitting on a lattice point.

#include <array>
#include <cmath>
#include <numbers>

#include <bpd/core/errors.hpp>

namespace bpd::special {

/// Hurwitz zeta zeta(s, a) = sum_{k>=0} (k + a)^{-s} for real s != 1, a > 0,
/// by Euler-Maclaurin summation (analytic continuation for s < 1).
inline double hurwitz_zeta(double s, double a) {
    if (s == 1.0) throw InvalidArgument("hurwitz_zeta: pole at s = 1");
    if (!(a > 0.0)) throw InvalidArgument("hurwitz_zeta: a must be positive");
    // B_{2j} / (2j)!, j = 1..10
    static constexpr std::array<double, 10> kBernoulliOverFactorial = {
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
        -3617.0 / 510.0 / 20922789888000.0,
        43867.0 / 798.0 / 6402373705728000.0,
        -174611.0 / 330.0 / 2432902008176640000.0,
    };
    constexpr int N = 40;
    double head = 0.0;
    for (int k = N - 1; k >= 0; --k) head += std::pow(k + a, -s);
    const double x = N + a;
    double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    double rising = s;                 // s (s+1) ... (s+2j-2)
    double xpow = std::pow(x, -s - 1.0);  // x^{-s-2j+1}
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        tail += kBernoulliOverFactorial[j] * rising * xpow;
        const double k = 2.0 * static_cast<double>(j + 1);
        rising *= (s + k - 1.0) * (s + k);
        xpow /= x * x;
    }
    return head + tail;
}

inline double riemann_zeta(double s) { return hurwitz_zeta(s, 1.0); }

/// Dirichlet beta function beta(s) = sum_{k>=0} (-1)^k (2k+1)^{-s}.
inline double dirichlet_beta(double s) {
    // the two Hurwitz poles cancel at s = 1
    if (s == 1.0) return 0.25 * std::numbers::pi;
    return std::pow(4.0, -s) * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75));
}

/// Z(q) = 4 zeta(q/2) beta(q/2); finite and negative for 0 < q < 2.
inline double square_lattice_zeta(double q) {
    if (!(q > 0.0 && q < 2.0)) throw InvalidArgument("square_lattice_zeta: need 0 < q < 2");
    const double s = 0.5 * q;
    return 4.0 * riemann_zeta(s) * dirichlet_beta(s);
}

/// Contribution to assign to the punctured lattice point when integrating
/// |z - x|^{-q} g(z) with x on the lattice: -Z(q) h^{2-q} (multiply by g(x)).
inline double lattice_self_term(double q, double h) {
    return -square_lattice_zeta(q) * std::pow(h, 2.0 - q);
}

}  // namespace bpd::special
