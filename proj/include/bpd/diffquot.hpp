#pragma once

/**
 * @file diffquot.hpp
 * @brief Forward difference quotients of order t along complex steps h:
 *
 *   Delta_h^t f(x0) = h^{-t} sum_{s=0..t} (-1)^{t-s} C(t, s) f(x0 + s h),
 *
 * together with the nested form Delta_h^1(Delta_h^{t-1} f) and the partial
 * fraction expansion of the Cauchy kernel about x0.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/summation.hpp>
#include <bpd/core/text.hpp>
#include <bpd/region.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace bpd {

template <class F>
concept Evaluable = requires(const F& f, Complex z) {
    { f(z) } -> std::convertible_to<Complex>;
};

/// Per-cell samples read back by nearest cell: z maps to the lattice cell whose
/// square contains it. Points outside the filled cells are not evaluable.
class SampledFunction {
public:
    SampledFunction(RegionPtr region, std::vector<Complex> values)
        : region_(std::move(region)), values_(std::move(values)) {
        if (!region_) throw InvalidArgument("SampledFunction: null region");
        if (values_.size() != region_->filled_count())
            throw InvalidArgument("SampledFunction: value count does not match the region's filled cells");
    }

    Complex operator()(Complex z) const {
        auto k = region_->filled_index_of(z);
        if (!k) throw NodeEvaluationError("SampledFunction: " + text::format_complex(z) + " is outside the region");
        return values_[static_cast<std::size_t>(*k)];
    }

    const RegionPtr& region() const noexcept { return region_; }
    const std::vector<Complex>& values() const noexcept { return values_; }

private:
    RegionPtr region_;
    std::vector<Complex> values_;
};

inline constexpr int kMaxDifferenceOrder = 30;

namespace detail {
inline const std::array<std::array<std::int64_t, kMaxDifferenceOrder + 1>, kMaxDifferenceOrder + 1>& pascal() {
    static const auto table = [] {
        std::array<std::array<std::int64_t, kMaxDifferenceOrder + 1>, kMaxDifferenceOrder + 1> p{};
        for (int t = 0; t <= kMaxDifferenceOrder; ++t) {
            p[t][0] = p[t][t] = 1;
            for (int s = 1; s < t; ++s) p[t][s] = p[t - 1][s - 1] + p[t - 1][s];
        }
        return p;
    }();
    return table;
}
}  // namespace detail

/// C(t, s) from the Pascal recurrence in 64-bit integers; 0 <= s <= t <= 30.
inline std::int64_t binomial(int t, int s) {
    if (t < 0 || t > kMaxDifferenceOrder) throw OutOfRangeError("binomial: t must lie in [0, 30]");
    if (s < 0 || s > t) return 0;
    return detail::pascal()[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
}

struct DiffQuotient {
    Complex x0;
    Complex h;
    int t = 1;
    Complex value;
};

namespace detail {
inline void check_step(Complex h, int t) {
    if (h == Complex(0.0)) throw InvalidArgument("difference quotient: h must be nonzero");
    if (t < 1) throw InvalidArgument("difference quotient: t must be positive");
    if (t > kMaxDifferenceOrder) throw OutOfRangeError("difference quotient: t must not exceed 30");
}

template <Evaluable F>
Complex eval_node(const F& f, Complex z) {
    Complex v;
    try {
        v = Complex(f(z));
    } catch (const NodeEvaluationError&) {
        throw;
    } catch (const Error& e) {
        throw NodeEvaluationError("f is not defined at node " + text::format_complex(z) + ": " + e.what());
    }
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NodeEvaluationError("f is not finite at node " + text::format_complex(z));
    return v;
}
}  // namespace detail

template <Evaluable F>
DiffQuotient diff_quotient(const F& f, Complex x0, Complex h, int t) {
    detail::check_step(h, t);
    CompensatedSum<Complex> acc;
    for (int s = 0; s <= t; ++s) {
        const double c = static_cast<double>(binomial(t, s)) * (((t - s) % 2 == 0) ? 1.0 : -1.0);
        acc += c * detail::eval_node(f, x0 + static_cast<double>(s) * h);
    }
    Complex hp = 1.0;
    for (int k = 0; k < t; ++k) hp *= h;
    return DiffQuotient{x0, h, t, acc.value() / hp};
}

/// |h|^{-t} sum_s C(t, s) |f(x0 + s h)|: the size of the terms that cancel in
/// Delta_h^t, the natural scale for its rounding error.
template <Evaluable F>
double difference_scale(const F& f, Complex x0, Complex h, int t) {
    detail::check_step(h, t);
    double s = 0.0;
    for (int k = 0; k <= t; ++k)
        s += static_cast<double>(binomial(t, k)) * std::abs(detail::eval_node(f, x0 + static_cast<double>(k) * h));
    return s / std::pow(std::abs(h), t);
}

/// |Delta_h^1(u -> Delta_h^{t-1} f(u))(x0) - Delta_h^t f(x0)|.
template <Evaluable F>
double compose_check(const F& f, Complex x0, Complex h, int t) {
    if (t < 2) throw InvalidArgument("compose_check: t must be at least 2");
    detail::check_step(h, t);
    const Complex inner1 = diff_quotient(f, x0 + h, h, t - 1).value;
    const Complex inner0 = diff_quotient(f, x0, h, t - 1).value;
    const Complex nested = (inner1 - inner0) / h;
    return std::abs(nested - diff_quotient(f, x0, h, t).value);
}

/// 1/(z - x) = sum_{m=1..t} (x - x0)^{m-1} / (z - x0)^m + (x - x0)^t / ((z - x)(z - x0)^t)
struct KernelFactorization {
    std::vector<Complex> terms;
    Complex remainder;

    Complex total() const {
        CompensatedSum<Complex> s;
        for (const auto& v : terms) s += v;
        s += remainder;
        return s.value();
    }
};

inline KernelFactorization kernel_factorization(Complex x, Complex x0, Complex z, int t) {
    if (t < 1) throw InvalidArgument("kernel_factorization: t must be positive");
    if (z == x) throw SingularPointError("kernel_factorization: z coincides with x");
    if (z == x0) throw SingularPointError("kernel_factorization: z coincides with x0");
    const Complex u = x - x0;
    const Complex w = 1.0 / (z - x0);
    KernelFactorization out;
    Complex up = 1.0;  // (x - x0)^{m-1}
    Complex wp = w;    // (z - x0)^{-m}
    for (int m = 1; m <= t; ++m) {
        out.terms.push_back(up * wp);
        up *= u;
        if (m < t) wp *= w;
    }
    out.remainder = up * wp / (z - x);
    return out;
}

struct ConvergenceRow {
    Complex h;
    Complex value;
    double abs_error = 0.0;
};

/// Delta_h^t f(x0) and its distance to `reference` for each h, in schedule order.
template <Evaluable F>
std::vector<ConvergenceRow> convergence_table(const F& f, Complex x0, int t, const std::vector<Complex>& h_schedule,
                                              Complex reference) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(h_schedule.size());
    for (const Complex h : h_schedule) {
        const Complex v = diff_quotient(f, x0, h, t).value;
        rows.push_back({h, v, std::abs(v - reference)});
    }
    return rows;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "h_re,h_im,value_re,value_im,abs_error\n";
    for (const auto& r : rows)
        os << text::format_double(r.h.real()) << ',' << text::format_double(r.h.imag()) << ','
           << text::format_double(r.value.real()) << ',' << text::format_double(r.value.imag()) << ','
           << text::format_double(r.abs_error) << '\n';
}

}  // namespace bpd
