#pragma once

/**
 * @file quadrature.hpp
 * @brief Midpoint-rule integration over Region cells, including the weakly
 *        singular kernels 1/(z - x), 1/|z - x| and 1/|z - x|^q.
 *
 * Every sum runs over the filled cells in row-major order with compensated
 * summation in fixed-size chunks (see core/parallel.hpp), so results are
 * bit-identical for any worker count.
 *
 * Singular cell. The cell containing the target x is dropped from the sum and
 * replaced by a self term:
 *   - 1/(z - x): zero (principal value over a symmetric neighborhood).
 *   - 1/|z - x|^q with x at a cell center (SingularRule::lattice_corrected):
 *     -Z(q) h^{2-q}, the Epstein-zeta correction of the punctured lattice sum,
 *     which removes the O(h^{2-q}) error term.
 *   - otherwise: the closed form 2 pi r^{2-q} / (2 - q) over the equal-area
 *     disk centered at x, r = h / sqrt(pi).
 * The weight factor is frozen at the singular cell's value in both cases.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/lattice_fft.hpp>
#include <bpd/core/parallel.hpp>
#include <bpd/core/special.hpp>
#include <bpd/core/text.hpp>
#include <bpd/region.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace bpd {

/// Named analytic formula a weight was sampled from (kept for provenance).
struct ClosedFormTag {
    std::string name;
    std::vector<double> params;
    friend bool operator==(const ClosedFormTag&, const ClosedFormTag&) = default;
};

enum class QPolicy {
    strict,       ///< q must lie in (1, 2)
    exploratory,  ///< any q > 0 accepted; reports flag the run
};

/// A complex density on the filled cells of a region, asserted to lie in L^q.
class WeightFunction {
public:
    WeightFunction(RegionPtr region, std::vector<Complex> values, double q, QPolicy policy = QPolicy::strict,
                   std::optional<ClosedFormTag> tag = std::nullopt)
        : region_(std::move(region)), values_(std::move(values)), q_(q), policy_(policy), tag_(std::move(tag)) {
        if (!region_) throw InvalidArgument("WeightFunction: null region");
        if (values_.size() != region_->filled_count())
            throw InvalidArgument("WeightFunction: value count does not match the region's filled cells");
        for (const auto& v : values_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw InvalidArgument("WeightFunction: non-finite value");
        if (policy_ == QPolicy::strict && !(q_ > 1.0 && q_ < 2.0))
            throw OutOfRangeError("WeightFunction: q must lie in (1, 2), got " + text::format_double(q_));
        if (!(q_ > 0.0)) throw OutOfRangeError("WeightFunction: q must be positive");
    }

    /// Samples fn(center) on every filled cell.
    template <class Fn>
    static WeightFunction sample(RegionPtr region, Fn&& fn, double q, QPolicy policy = QPolicy::strict,
                                 std::optional<ClosedFormTag> tag = std::nullopt) {
        std::vector<Complex> v(region->filled_count());
        const auto& cells = region->cells();
        parallel::for_each_index(cells.size(), [&](std::size_t i) { v[i] = fn(cells[i].center); });
        return WeightFunction(std::move(region), std::move(v), q, policy, std::move(tag));
    }

    static WeightFunction constant(RegionPtr region, Complex c, double q, QPolicy policy = QPolicy::strict) {
        const auto n = region->filled_count();
        return WeightFunction(std::move(region), std::vector<Complex>(n, c), q, policy,
                              ClosedFormTag{"constant", {c.real(), c.imag()}});
    }

    /// coeff * conj(z - x0)^t.
    static WeightFunction conj_power(RegionPtr region, Complex coeff, Complex x0, int t, double q,
                                     QPolicy policy = QPolicy::strict) {
        ClosedFormTag tag{"conj_power", {coeff.real(), coeff.imag(), x0.real(), x0.imag(), static_cast<double>(t)}};
        return sample(
            std::move(region),
            [&](Complex z) {
                const Complex w = std::conj(z - x0);
                Complex p = 1.0;
                for (int k = 0; k < t; ++k) p *= w;
                return coeff * p;
            },
            q, policy, std::move(tag));
    }

    const RegionPtr& region() const noexcept { return region_; }
    const std::vector<Complex>& values() const noexcept { return values_; }
    double q() const noexcept { return q_; }
    QPolicy policy() const noexcept { return policy_; }
    bool exploratory() const noexcept { return policy_ == QPolicy::exploratory; }
    const std::optional<ClosedFormTag>& tag() const noexcept { return tag_; }

    /// Value on the filled cell containing z, or 0 outside the region.
    Complex at(Complex z) const {
        auto k = region_->filled_index_of(z);
        return k ? values_[static_cast<std::size_t>(*k)] : Complex(0.0);
    }

    WeightFunction scaled(Complex c) const {
        std::vector<Complex> v(values_);
        for (auto& x : v) x *= c;
        return WeightFunction(region_, std::move(v), q_, policy_);
    }

    /// (sum |w|^q cell_area)^{1/q}
    double lq_norm() const {
        const double s = parallel::sum<double>(values_.size(), [&](std::size_t i) { return std::pow(std::abs(values_[i]), q_); });
        return std::pow(s * region_->cell_area(), 1.0 / q_);
    }

    std::string to_wgt1() const;
    /// Parses WGT1 text; the header checksum must match `region`.
    static WeightFunction from_wgt1(std::istream& in, RegionPtr region, QPolicy policy = QPolicy::strict);
    static WeightFunction from_wgt1(const std::string& s, RegionPtr region, QPolicy policy = QPolicy::strict) {
        std::istringstream in(s);
        return from_wgt1(in, std::move(region), policy);
    }

private:
    RegionPtr region_;
    std::vector<Complex> values_;
    double q_;
    QPolicy policy_;
    std::optional<ClosedFormTag> tag_;
};

inline std::string WeightFunction::to_wgt1() const {
    std::ostringstream os;
    os << "WGT1\n";
    os << "region " << region_->checksum() << '\n';
    os << "q " << text::format_double(q_) << '\n';
    if (tag_) {
        os << "tag " << tag_->name;
        for (double v : tag_->params) os << ' ' << text::format_double(v);
        os << '\n';
    }
    os << "count " << values_.size() << '\n';
    for (const auto& v : values_) os << text::format_double(v.real()) << ' ' << text::format_double(v.imag()) << '\n';
    return os.str();
}

inline WeightFunction WeightFunction::from_wgt1(std::istream& in, RegionPtr region, QPolicy policy) {
    std::string line;
    if (!text::next_line(in, line) || line != "WGT1") throw FormatError("missing WGT1 magic");
    auto sum = text::split_ws(detail::expect_key(in, "region"));
    if (sum.size() != 1) throw FormatError("malformed region checksum line");
    if (sum[0] != region->checksum()) throw FormatError("WGT1 region checksum does not match the supplied region");
    auto qtok = text::split_ws(detail::expect_key(in, "q"));
    if (qtok.size() != 1) throw FormatError("malformed q line");
    const double q = text::parse_double(qtok[0]);
    std::optional<ClosedFormTag> tag;
    if (!text::next_line(in, line)) throw FormatError("truncated WGT1 header");
    auto tok = text::split_ws(line);
    if (!tok.empty() && tok[0] == "tag") {
        if (tok.size() < 2) throw FormatError("tag line needs a name");
        ClosedFormTag t{tok[1], {}};
        for (std::size_t k = 2; k < tok.size(); ++k) t.params.push_back(text::parse_double(tok[k]));
        tag = std::move(t);
        if (!text::next_line(in, line)) throw FormatError("truncated WGT1 header");
        tok = text::split_ws(line);
    }
    if (tok.size() != 2 || tok[0] != "count") throw FormatError("expected count line");
    const long long count = text::parse_int(tok[1]);
    if (count != static_cast<long long>(region->filled_count()))
        throw FormatError("WGT1 count does not match the region's filled cells");
    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(count));
    for (long long k = 0; k < count; ++k) {
        if (!text::next_line(in, line)) throw FormatError("truncated WGT1 values");
        auto v = text::split_ws(line);
        if (v.size() != 2) throw FormatError("WGT1 value lines need two numbers");
        values.emplace_back(text::parse_double(v[0]), text::parse_double(v[1]));
    }
    return WeightFunction(std::move(region), std::move(values), q, policy, std::move(tag));
}

// ---------------------------------------------------------------------------
// Exponents and closed forms

/// q = p / (p - 1); defined here only for p > 2, where q lies in (1, 2).
inline double conjugate_exponent(double p) {
    if (!(p > 2.0) || !std::isfinite(p))
        throw OutOfRangeError("conjugate_exponent: p must satisfy 2 < p < inf, got " + text::format_double(p));
    return p / (p - 1.0);
}

/// Integral of |z - x|^{-q} over the disk B(x, r): 2 pi r^{2-q} / (2 - q).
inline double singular_cell_integral(double q, double r) {
    if (q >= 2.0) throw DivergentIntegralError("singular_cell_integral: |z|^-q is not integrable near 0 for q >= 2");
    if (!(q > 0.0)) throw InvalidArgument("singular_cell_integral: q must be positive");
    if (r < 0.0) throw InvalidArgument("singular_cell_integral: radius must be non-negative");
    if (r == 0.0) return 0.0;
    return 2.0 * std::numbers::pi * std::pow(r, 2.0 - q) / (2.0 - q);
}

enum class SingularRule {
    lattice_corrected,  ///< zeta correction when x is a cell center, equal-area disk otherwise
    equal_area_disk,    ///< always the equal-area disk closed form
};

/// Self term for the cell containing x under kernel |z - x|^{-q}
/// (to be multiplied by the frozen weight factor).
inline double singular_self_term(const Region& region, Complex x, double q,
                                 SingularRule rule = SingularRule::lattice_corrected) {
    const double h = region.cell_width();
    if (rule == SingularRule::lattice_corrected && region.at_cell_center(x)) return special::lattice_self_term(q, h);
    return singular_cell_integral(q, h / std::sqrt(std::numbers::pi));
}

// ---------------------------------------------------------------------------
// Point evaluations

/// sum_cells f(c) w(c) cell_area, with f given by its per-cell values.
inline Complex integrate(const WeightFunction& w, std::span<const Complex> f) {
    const auto& v = w.values();
    if (f.size() != v.size()) throw InvalidArgument("integrate: f must have one value per filled cell");
    return parallel::sum<Complex>(v.size(), [&](std::size_t i) { return f[i] * v[i]; }) * w.region()->cell_area();
}

/// sum_cells f(center) w(center) cell_area for a callable f.
template <class Fn>
    requires std::invocable<Fn, Complex>
Complex integrate(const WeightFunction& w, Fn&& f) {
    const auto& v = w.values();
    const auto& cells = w.region()->cells();
    return parallel::sum<Complex>(v.size(), [&](std::size_t i) { return Complex(f(cells[i].center)) * v[i]; }) *
           w.region()->cell_area();
}

namespace detail {
inline std::size_t singular_index(const Region& region, Complex x) {
    auto k = region.filled_index_of(x);
    return k ? static_cast<std::size_t>(*k) : static_cast<std::size_t>(-1);
}
}  // namespace detail

/// Cauchy transform  k^(x) = int w(z) / (z - x) dA.
inline Complex cauchy_transform(const WeightFunction& w, Complex x) {
    const Region& region = *w.region();
    const auto& cells = region.cells();
    const auto& v = w.values();
    const std::size_t skip = detail::singular_index(region, x);
    return parallel::sum<Complex>(v.size(),
                                  [&](std::size_t i) {
                                      if (i == skip) return Complex(0.0);
                                      return v[i] / (cells[i].center - x);
                                  }) *
           region.cell_area();
}

/// int |w(z)|^q / |z - x|^q dA  (q in (1, 2) unless w is exploratory).
inline double singular_weight_integral(const WeightFunction& w, Complex x, double q,
                                       SingularRule rule = SingularRule::lattice_corrected) {
    if (w.policy() == QPolicy::strict && !(q > 1.0 && q < 2.0))
        throw OutOfRangeError("singular_weight_integral: q must lie in (1, 2)");
    if (q >= 2.0) throw DivergentIntegralError("singular_weight_integral: divergent for q >= 2");
    const Region& region = *w.region();
    const auto& cells = region.cells();
    const auto& v = w.values();
    const std::size_t skip = detail::singular_index(region, x);
    const double s = parallel::sum<double>(v.size(), [&](std::size_t i) {
        if (i == skip) return 0.0;
        return std::pow(std::abs(v[i]) / std::abs(cells[i].center - x), q);
    });
    double total = s * region.cell_area();
    if (skip != static_cast<std::size_t>(-1))
        total += std::pow(std::abs(v[skip]), q) * singular_self_term(region, x, q, rule);
    return total;
}

/// Newtonian potential  k~(x) = int |w(z)| / |z - x| dA.
inline double newtonian_potential(const WeightFunction& w, Complex x,
                                  SingularRule rule = SingularRule::lattice_corrected) {
    const Region& region = *w.region();
    const auto& cells = region.cells();
    const auto& v = w.values();
    const std::size_t skip = detail::singular_index(region, x);
    const double s = parallel::sum<double>(v.size(), [&](std::size_t i) {
        if (i == skip) return 0.0;
        return std::abs(v[i]) / std::abs(cells[i].center - x);
    });
    double total = s * region.cell_area();
    if (skip != static_cast<std::size_t>(-1)) total += std::abs(v[skip]) * singular_self_term(region, x, 1.0, rule);
    return total;
}

// ---------------------------------------------------------------------------
// All filled cell centers at once (FFT lattice correlation).
// Results are indexed like Region::cells().

namespace detail {

inline std::vector<Complex> scatter(const Region& region, const std::vector<Complex>& per_cell) {
    const auto n = static_cast<std::size_t>(region.resolution());
    std::vector<Complex> grid(n * n, 0.0);
    const auto& cells = region.cells();
    for (std::size_t i = 0; i < cells.size(); ++i)
        grid[static_cast<std::size_t>(cells[i].row) * n + static_cast<std::size_t>(cells[i].col)] = per_cell[i];
    return grid;
}

inline std::vector<Complex> gather(const Region& region, const std::vector<Complex>& grid) {
    const auto n = static_cast<std::size_t>(region.resolution());
    const auto& cells = region.cells();
    std::vector<Complex> out(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        out[i] = grid[static_cast<std::size_t>(cells[i].row) * n + static_cast<std::size_t>(cells[i].col)];
    return out;
}

/// sum_j data_j h^2 |c_j - c_i|^{-q}, with the self term for j = i.
inline std::vector<double> lattice_power_sum(const Region& region, const std::vector<Complex>& data, double q,
                                             SingularRule rule) {
    const double h = region.cell_width();
    const double a = region.cell_area();
    const double self = rule == SingularRule::lattice_corrected
                            ? special::lattice_self_term(q, h)
                            : singular_cell_integral(q, h / std::sqrt(std::numbers::pi));
    fft::LatticeCorrelator corr(region.resolution());
    auto grid = corr.correlate(scatter(region, data), [&](int dr, int dc) -> Complex {
        if (dr == 0 && dc == 0) return self / a;
        return std::pow(h * std::hypot(static_cast<double>(dr), static_cast<double>(dc)), -q);
    });
    auto g = gather(region, grid);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].real() * a;
    return out;
}

}  // namespace detail

inline std::vector<Complex> cauchy_transform_all(const WeightFunction& w) {
    const Region& region = *w.region();
    const double h = region.cell_width();
    fft::LatticeCorrelator corr(region.resolution());
    auto grid = corr.correlate(detail::scatter(region, w.values()), [&](int dr, int dc) -> Complex {
        if (dr == 0 && dc == 0) return 0.0;
        return 1.0 / Complex(h * dc, h * dr);
    });
    auto out = detail::gather(region, grid);
    for (auto& v : out) v *= region.cell_area();
    return out;
}

inline std::vector<double> singular_weight_integral_all(const WeightFunction& w, double q,
                                                        SingularRule rule = SingularRule::lattice_corrected) {
    if (w.policy() == QPolicy::strict && !(q > 1.0 && q < 2.0))
        throw OutOfRangeError("singular_weight_integral_all: q must lie in (1, 2)");
    std::vector<Complex> data(w.values().size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::pow(std::abs(w.values()[i]), q);
    return detail::lattice_power_sum(*w.region(), data, q, rule);
}

inline std::vector<double> newtonian_potential_all(const WeightFunction& w,
                                                   SingularRule rule = SingularRule::lattice_corrected) {
    std::vector<Complex> data(w.values().size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::abs(w.values()[i]);
    return detail::lattice_power_sum(*w.region(), data, 1.0, rule);
}

}  // namespace bpd
