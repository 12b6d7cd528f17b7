#pragma once

/**
 * @file rational.hpp
 * @brief Rational functions in partial-fraction form.
 *
 *   f(z) = sum_j sum_{m=1..m_j} a_{j,m} / (z - p_j)^m  +  sum_k c_k z^k
 *
 * Differentiation is closed-form in this representation, and pole
 * bookkeeping is exact: sums merge pole terms whose locations compare equal.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/parallel.hpp>
#include <bpd/core/text.hpp>
#include <bpd/region.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace bpd {

struct PoleTerm {
    Complex location;
    /// coefficients[m-1] multiplies 1 / (z - location)^m.
    std::vector<Complex> coefficients;

    int order() const noexcept { return static_cast<int>(coefficients.size()); }
    friend bool operator==(const PoleTerm&, const PoleTerm&) = default;
};

class RationalFunction {
public:
    RationalFunction() = default;

    RationalFunction(std::vector<PoleTerm> poles, std::vector<Complex> poly)
        : poles_(std::move(poles)), poly_(std::move(poly)) {
        for (std::size_t i = 0; i < poles_.size(); ++i) {
            if (poles_[i].coefficients.empty()) throw InvalidArgument("RationalFunction: pole order must be >= 1");
            for (std::size_t j = 0; j < i; ++j)
                if (poles_[j].location == poles_[i].location)
                    throw InvalidArgument("RationalFunction: duplicate pole location");
        }
    }

    static RationalFunction constant(Complex c) { return RationalFunction({}, {c}); }
    static RationalFunction polynomial(std::vector<Complex> coeffs) { return RationalFunction({}, std::move(coeffs)); }
    /// z^k
    static RationalFunction monomial(int k, Complex coeff = 1.0) {
        std::vector<Complex> c(static_cast<std::size_t>(k) + 1, 0.0);
        c.back() = coeff;
        return polynomial(std::move(c));
    }
    /// coeff / (z - p)^order
    static RationalFunction pole(Complex p, int order = 1, Complex coeff = 1.0) {
        if (order < 1) throw InvalidArgument("RationalFunction::pole: order must be >= 1");
        std::vector<Complex> c(static_cast<std::size_t>(order), 0.0);
        c.back() = coeff;
        return RationalFunction({PoleTerm{p, std::move(c)}}, {});
    }

    const std::vector<PoleTerm>& poles() const noexcept { return poles_; }
    const std::vector<Complex>& poly() const noexcept { return poly_; }

    bool is_polynomial() const noexcept { return poles_.empty(); }

    /// Index of the highest nonzero polynomial coefficient, -1 for none.
    int poly_degree() const noexcept {
        for (int k = static_cast<int>(poly_.size()) - 1; k >= 0; --k)
            if (poly_[static_cast<std::size_t>(k)] != Complex(0.0)) return k;
        return -1;
    }

    Complex eval(Complex z) const {
        Complex total = 0.0;
        for (const auto& term : poles_) {
            if (z == term.location)
                throw PoleEvaluationError("evaluation at pole " + text::format_complex(term.location));
            const Complex w = 1.0 / (z - term.location);
            Complex acc = 0.0;
            for (auto it = term.coefficients.rbegin(); it != term.coefficients.rend(); ++it) acc = (acc + *it) * w;
            total += acc;
        }
        Complex p = 0.0;
        for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) p = p * z + *it;
        return total + p;
    }

    Complex operator()(Complex z) const { return eval(z); }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        RationalFunction out = a;
        for (const auto& term : b.poles_) {
            auto it = std::find_if(out.poles_.begin(), out.poles_.end(),
                                   [&](const PoleTerm& t) { return t.location == term.location; });
            if (it == out.poles_.end()) {
                out.poles_.push_back(term);
                continue;
            }
            if (it->coefficients.size() < term.coefficients.size()) it->coefficients.resize(term.coefficients.size(), 0.0);
            for (std::size_t m = 0; m < term.coefficients.size(); ++m) it->coefficients[m] += term.coefficients[m];
        }
        if (out.poly_.size() < b.poly_.size()) out.poly_.resize(b.poly_.size(), 0.0);
        for (std::size_t k = 0; k < b.poly_.size(); ++k) out.poly_[k] += b.poly_[k];
        return out;
    }

    friend RationalFunction operator*(Complex c, const RationalFunction& f) {
        RationalFunction out = f;
        for (auto& term : out.poles_)
            for (auto& a : term.coefficients) a *= c;
        for (auto& a : out.poly_) a *= c;
        return out;
    }

    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
        return a + Complex(-1.0) * b;
    }

    friend bool operator==(const RationalFunction&, const RationalFunction&) = default;

    /// Textual form: one `pole <re> <im> <order> <c1re> <c1im> ...` line per
    /// pole and a `poly <c0re> <c0im> ...` line. Round-trips exactly.
    std::string to_text() const {
        std::ostringstream os;
        for (const auto& term : poles_) {
            os << "pole " << text::format_double(term.location.real()) << ' '
               << text::format_double(term.location.imag()) << ' ' << term.order();
            for (const auto& a : term.coefficients)
                os << ' ' << text::format_double(a.real()) << ' ' << text::format_double(a.imag());
            os << '\n';
        }
        os << "poly";
        for (const auto& a : poly_) os << ' ' << text::format_double(a.real()) << ' ' << text::format_double(a.imag());
        os << '\n';
        return os.str();
    }

    /// Parses one `pole ...` or `poly ...` line into this function (adding to it).
    void add_text_line(const std::string& line) {
        auto tok = text::split_ws(line);
        if (tok.empty()) return;
        if (tok[0] == "pole") {
            if (tok.size() < 4) throw FormatError("pole line needs location and order");
            const Complex loc(text::parse_double(tok[1]), text::parse_double(tok[2]));
            const long long order = text::parse_int(tok[3]);
            if (order < 1) throw FormatError("pole order must be >= 1");
            if (tok.size() != 4 + 2 * static_cast<std::size_t>(order))
                throw FormatError("pole line has the wrong number of coefficients");
            std::vector<Complex> coeffs;
            for (long long m = 0; m < order; ++m)
                coeffs.emplace_back(text::parse_double(tok[4 + 2 * m]), text::parse_double(tok[5 + 2 * m]));
            for (const auto& t : poles_)
                if (t.location == loc) throw FormatError("duplicate pole location in text");
            poles_.push_back(PoleTerm{loc, std::move(coeffs)});
        } else if (tok[0] == "poly") {
            if ((tok.size() - 1) % 2 != 0) throw FormatError("poly line needs re/im pairs");
            std::vector<Complex> coeffs;
            for (std::size_t k = 1; k < tok.size(); k += 2)
                coeffs.emplace_back(text::parse_double(tok[k]), text::parse_double(tok[k + 1]));
            *this = *this + polynomial(std::move(coeffs));
        } else {
            throw FormatError("unknown rational-function line '" + tok[0] + "'");
        }
    }

    static RationalFunction from_text(std::istream& in) {
        RationalFunction f;
        std::string line;
        while (text::next_line(in, line)) f.add_text_line(line);
        return f;
    }
    static RationalFunction from_text(const std::string& s) {
        std::istringstream in(s);
        return from_text(in);
    }

private:
    std::vector<PoleTerm> poles_;
    std::vector<Complex> poly_;
};

inline Complex eval(const RationalFunction& f, Complex z) { return f.eval(z); }

/// Exact t-th derivative, term by term. t = 0 returns f unchanged.
inline RationalFunction derivative(const RationalFunction& f, int t) {
    if (t < 0) throw InvalidArgument("derivative: order must be non-negative");
    if (t == 0) return f;
    std::vector<PoleTerm> poles;
    for (const auto& term : f.poles()) {
        // d^t/dz^t (z-p)^{-m} = (-1)^t m (m+1) ... (m+t-1) (z-p)^{-(m+t)}
        PoleTerm d{term.location, std::vector<Complex>(term.coefficients.size() + static_cast<std::size_t>(t), 0.0)};
        for (std::size_t i = 0; i < term.coefficients.size(); ++i) {
            const int m = static_cast<int>(i) + 1;
            double factor = (t % 2 == 0) ? 1.0 : -1.0;
            for (int k = 0; k < t; ++k) factor *= m + k;
            d.coefficients[i + static_cast<std::size_t>(t)] = factor * term.coefficients[i];
        }
        poles.push_back(std::move(d));
    }
    std::vector<Complex> poly;
    const auto& c = f.poly();
    for (std::size_t k = static_cast<std::size_t>(t); k < c.size(); ++k) {
        double factor = 1.0;
        for (int j = 0; j < t; ++j) factor *= static_cast<double>(k - static_cast<std::size_t>(j));
        poly.push_back(factor * c[k]);
    }
    return RationalFunction(std::move(poles), std::move(poly));
}

/// Ascending coefficients of sum_m (d_m / m!) (z - x0)^m.
inline std::vector<Complex> taylor_polynomial(Complex x0, const std::vector<Complex>& d) {
    std::vector<Complex> out(d.size(), 0.0);
    std::vector<Complex> neg_pow(d.size(), 1.0);
    for (std::size_t k = 1; k < d.size(); ++k) neg_pow[k] = neg_pow[k - 1] * (-x0);
    double factorial = 1.0;
    for (std::size_t m = 0; m < d.size(); ++m) {
        if (m > 0) factorial *= static_cast<double>(m);
        const Complex a = d[m] / factorial;
        // (z - x0)^m = sum_k C(m,k) z^k (-x0)^{m-k}
        double binom = 1.0;
        for (std::size_t k = 0; k <= m; ++k) {
            if (k > 0) binom = binom * static_cast<double>(m - k + 1) / static_cast<double>(k);
            out[k] += a * binom * neg_pow[m - k];
        }
    }
    return out;
}

/// g = f - sum_{m=0..t} (d_m / m!) (z - x0)^m. Same poles as f.
inline RationalFunction taylor_correct(const RationalFunction& f, Complex x0, const std::vector<Complex>& d) {
    if (std::all_of(d.begin(), d.end(), [](Complex v) { return v == Complex(0.0); })) return f;
    return f - RationalFunction::polynomial(taylor_polynomial(x0, d));
}

/// Poles closer than guard_cells cell diagonals to a filled cell center are rejected.
inline constexpr double kDefaultPoleGuard = 1.0;

inline void check_poles_off(const RationalFunction& f, const Region& region, double guard_cells = kDefaultPoleGuard) {
    const double limit = guard_cells * region.cell_diagonal();
    const int reach = static_cast<int>(std::ceil(limit / region.cell_width())) + 1;
    for (const auto& term : f.poles()) {
        const auto g = region.lattice_index(term.location);
        for (int r = g.row - reach; r <= g.row + reach; ++r)
            for (int c = g.col - reach; c <= g.col + reach; ++c) {
                if (!region.filled(r, c)) continue;
                if (std::abs(region.center(r, c) - term.location) <= limit)
                    throw PoleOnSetError("pole " + text::format_complex(term.location) +
                                         " lies on or within the guard distance of the region");
            }
    }
}

/// Discrete L^p norm (sum_cells |f(center)|^p cell_area)^{1/p}.
inline double lp_norm(const RationalFunction& f, const Region& region, double p,
                      double guard_cells = kDefaultPoleGuard) {
    if (!(p >= 1.0)) throw OutOfRangeError("lp_norm: p must be >= 1");
    check_poles_off(f, region, guard_cells);
    const auto& cells = region.cells();
    const double s = parallel::sum<double>(cells.size(), [&](std::size_t i) {
        return std::pow(std::abs(f.eval(cells[i].center)), p);
    });
    return std::pow(s * region.cell_area(), 1.0 / p);
}

}  // namespace bpd
