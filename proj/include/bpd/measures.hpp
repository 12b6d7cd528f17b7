#pragma once

/**
 * @file measures.hpp
 * @brief Representing weights for point derivations: application, order
 *        reduction, transplanting to a nearby point, and battery checks.
 *
 * A PointFunctional (x0, t, k_t) stands for the map f -> int f k_t dA, which
 * for a representing weight reproduces f^{(t)}(x0) on rational f with poles
 * off the region.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/parallel.hpp>
#include <bpd/core/summation.hpp>
#include <bpd/core/text.hpp>
#include <bpd/quadrature.hpp>
#include <bpd/rational.hpp>
#include <bpd/region.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bpd {

class PointFunctional {
public:
    PointFunctional(Complex x0, int t, WeightFunction weight) : x0_(x0), t_(t), weight_(std::move(weight)) {
        if (t_ < 0) throw InvalidArgument("PointFunctional: order must be non-negative");
        q_norm_ = weight_.lq_norm();
    }

    Complex x0() const noexcept { return x0_; }
    int order() const noexcept { return t_; }
    const WeightFunction& weight() const noexcept { return weight_; }
    const RegionPtr& region() const noexcept { return weight_.region(); }
    double q() const noexcept { return weight_.q(); }
    /// Cached ||k_t||_q; the constant C in |D f| <= C ||f||_p.
    double q_norm() const noexcept { return q_norm_; }

    std::string to_fun1() const {
        std::ostringstream os;
        os << "FUN1\n";
        os << "region " << region()->checksum() << '\n';
        os << "x0 " << text::format_double(x0_.real()) << ' ' << text::format_double(x0_.imag()) << '\n';
        os << "t " << t_ << '\n';
        os << weight_.to_wgt1();
        return os.str();
    }

    static PointFunctional from_fun1(std::istream& in, RegionPtr region, QPolicy policy = QPolicy::strict) {
        std::string line;
        if (!text::next_line(in, line) || line != "FUN1") throw FormatError("missing FUN1 magic");
        auto sum = text::split_ws(detail::expect_key(in, "region"));
        if (sum.size() != 1 || sum[0] != region->checksum())
            throw FormatError("FUN1 region checksum does not match the supplied region");
        auto x = text::split_ws(detail::expect_key(in, "x0"));
        if (x.size() != 2) throw FormatError("x0 needs two numbers");
        auto t = text::split_ws(detail::expect_key(in, "t"));
        if (t.size() != 1) throw FormatError("malformed t line");
        const Complex x0(text::parse_double(x[0]), text::parse_double(x[1]));
        const long long order = text::parse_int(t[0]);
        if (order < 0 || order > 64) throw FormatError("t out of range");
        auto w = WeightFunction::from_wgt1(in, std::move(region), policy);
        return PointFunctional(x0, static_cast<int>(order), std::move(w));
    }
    static PointFunctional from_fun1(const std::string& s, RegionPtr region, QPolicy policy = QPolicy::strict) {
        std::istringstream in(s);
        return from_fun1(in, std::move(region), policy);
    }

private:
    Complex x0_;
    int t_;
    WeightFunction weight_;
    double q_norm_ = 0.0;
};

// ---------------------------------------------------------------------------
// Disk family  k_t = C_t conj(z - x0)^t

enum class DiskNormalization {
    /// C_t = t! / sum_cells |z - x0|^{2t} dA, so that z^t is reproduced exactly
    /// on the discrete disk.
    calibrated,
    /// C_t = t! (t + 1) / (pi r^{2t+2}), the continuum constant.
    analytic,
    /// conj(P(z - x0)) with P of degree kMomentDegree chosen so that
    /// sum_cells (z - x0)^m conj(P) dA = t! delta_{mt} for every m <= kMomentDegree:
    /// the lattice counterpart of C_t conj(z - x0)^t, which differs from it
    /// only through the anisotropy of the discrete disk.
    moment_matched,
};

inline constexpr int kMomentDegree = 24;

namespace detail {

/// Values conj(P(z - x0)) of the moment-matched weight on every filled cell.
inline std::vector<Complex> moment_matched_values(const Region& region, Complex x0, int t) {
    constexpr int N = kMomentDegree;
    if (t > N) throw InvalidArgument("disk_functional: order exceeds the moment degree");
    const auto& cells = region.cells();
    double s = 0.0;
    for (const auto& c : cells) s = std::max(s, std::abs(c.center - x0));
    if (!(s > 0.0)) throw UnsupportedRegionError("disk_functional: degenerate region");
    constexpr std::size_t width = static_cast<std::size_t>((N + 1) * (N + 2) / 2);
    const std::size_t chunks = parallel::chunk_count(cells.size());
    std::vector<Complex> partial(chunks * width);
    parallel::for_each_chunk(cells.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<Complex> acc(width, 0.0);
        std::array<Complex, N + 1> pw;
        for (std::size_t i = b; i < e; ++i) {
            const Complex u = (cells[i].center - x0) / s;
            pw[0] = 1.0;
            for (int k = 1; k <= N; ++k) pw[static_cast<std::size_t>(k)] = pw[static_cast<std::size_t>(k - 1)] * u;
            std::size_t slot = 0;
            for (int m = 0; m <= N; ++m)
                for (int j = m; j <= N; ++j)
                    acc[slot++] += pw[static_cast<std::size_t>(m)] * std::conj(pw[static_cast<std::size_t>(j)]);
        }
        std::copy(acc.begin(), acc.end(), partial.begin() + static_cast<std::ptrdiff_t>(c * width));
    });
    Eigen::MatrixXcd H(N + 1, N + 1);
    std::size_t slot = 0;
    for (int m = 0; m <= N; ++m)
        for (int j = m; j <= N; ++j) {
            CompensatedSum<Complex> total;
            for (std::size_t c = 0; c < chunks; ++c) total += partial[c * width + slot];
            const Complex v = total.value() * region.cell_area();
            H(m, j) = v;
            H(j, m) = std::conj(v);
            ++slot;
        }
    double factorial = 1.0;
    for (int k = 2; k <= t; ++k) factorial *= k;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N + 1);
    rhs(t) = factorial / std::pow(s, t);
    const Eigen::VectorXcd y = H.colPivHouseholderQr().solve(rhs);
    if (!((H * y - rhs).norm() <= 1e-8 * rhs.norm()))
        throw NumericalConsistencyError("disk_functional: moment system could not be solved");
    std::vector<Complex> v(cells.size());
    parallel::for_each_index(v.size(), [&](std::size_t i) {
        const Complex w = std::conj((cells[i].center - x0) / s);
        Complex acc = y(N);
        for (int k = N - 1; k >= 0; --k) acc = acc * w + y(k);
        v[i] = acc;
    });
    return v;
}

}  // namespace detail

inline PointFunctional disk_functional(RegionPtr region, Complex x0, int t, double q,
                                       DiskNormalization norm = DiskNormalization::calibrated, double radius = 1.0,
                                       QPolicy policy = QPolicy::strict) {
    if (t < 0) throw InvalidArgument("disk_functional: order must be non-negative");
    if (norm == DiskNormalization::moment_matched) {
        auto v = detail::moment_matched_values(*region, x0, t);
        return PointFunctional(x0, t, WeightFunction(std::move(region), std::move(v), q, policy));
    }
    double factorial = 1.0;
    for (int k = 2; k <= t; ++k) factorial *= k;
    double c = 0.0;
    if (norm == DiskNormalization::analytic) {
        if (!(radius > 0.0)) throw InvalidArgument("disk_functional: radius must be positive");
        c = factorial * (t + 1) / (std::numbers::pi * std::pow(radius, 2 * t + 2));
    } else {
        const auto& cells = region->cells();
        const double moment = parallel::sum<double>(cells.size(), [&](std::size_t i) {
            return std::pow(std::norm(cells[i].center - x0), t);
        }) * region->cell_area();
        if (!(moment > 0.0)) throw UnsupportedRegionError("disk_functional: degenerate moment");
        c = factorial / moment;
    }
    auto w = WeightFunction::conj_power(std::move(region), c, x0, t, q, policy);
    return PointFunctional(x0, t, std::move(w));
}

// ---------------------------------------------------------------------------
// Application and reduction

/// int f k_t dA over the region's cells.
inline Complex apply_functional(const PointFunctional& F, const RationalFunction& f,
                                double guard_cells = kDefaultPoleGuard) {
    check_poles_off(f, *F.region(), guard_cells);
    return integrate(F.weight(), [&](Complex z) { return f.eval(z); });
}

/// k_m = (m! / t!) (z - x0)^{t-m} k_t. m = t returns an exact copy.
inline PointFunctional wilken_reduce(const PointFunctional& F, int m) {
    const int t = F.order();
    if (m < 0 || m > t) throw InvalidArgument("wilken_reduce: need 0 <= m <= t");
    if (m == t) return F;
    double ratio = 1.0;  // m! / t!
    for (int k = m + 1; k <= t; ++k) ratio /= k;
    const auto& cells = F.region()->cells();
    const auto& src = F.weight().values();
    std::vector<Complex> v(src.size());
    const Complex x0 = F.x0();
    parallel::for_each_index(v.size(), [&](std::size_t i) {
        const Complex d = cells[i].center - x0;
        Complex p = ratio;
        for (int k = 0; k < t - m; ++k) p *= d;
        v[i] = p * src[i];
    });
    return PointFunctional(x0, m, WeightFunction(F.region(), std::move(v), F.q(), F.weight().policy()));
}

// ---------------------------------------------------------------------------
// Transplant

struct TransplantResult {
    Complex x;
    /// c = 1 + (x - x0) k^(x)
    Complex c;
    WeightFunction weight;
    /// The hypothesis quantity |x - x0| k~(x) that was checked against delta.
    double hypothesis = 0.0;

    PointFunctional functional() const { return PointFunctional(x, 0, weight); }
};

/// Moves an order-0 representing weight k at x0 to x:
///   k_x(z) = (z - x0) k(z) / (c (z - x)).
/// On the cell containing x the factor (z - x0)/(z - x) = 1 + (x - x0)/(z - x)
/// is replaced by its principal-value average 1, giving k / c.
inline TransplantResult bishop_transplant(const PointFunctional& F, Complex x, double delta) {
    if (F.order() != 0) throw InvalidArgument("bishop_transplant: needs an order-0 functional");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("bishop_transplant: delta must lie in (0, 1)");
    const Complex x0 = F.x0();
    if (x == x0) return TransplantResult{x, 1.0, F.weight(), 0.0};
    const WeightFunction& k = F.weight();
    const double hyp = std::abs(x - x0) * newtonian_potential(k, x);
    if (!(hyp < delta))
        throw TransplantHypothesisError("bishop_transplant: |x - x0| k~(x) = " + text::format_double(hyp) +
                                        " is not below delta = " + text::format_double(delta));
    const Complex c = 1.0 + (x - x0) * cauchy_transform(k, x);
    if (std::abs(c) < 1.0 - delta || std::abs(c) > 1.0 + delta)
        throw NumericalConsistencyError("bishop_transplant: |c| = " + text::format_double(std::abs(c)) +
                                        " outside [1 - delta, 1 + delta]");
    const Region& region = *F.region();
    const auto& cells = region.cells();
    const auto skip = region.filled_index_of(x);
    const std::size_t s = skip ? static_cast<std::size_t>(*skip) : static_cast<std::size_t>(-1);
    std::vector<Complex> v(cells.size());
    parallel::for_each_index(v.size(), [&](std::size_t i) {
        if (i == s)
            v[i] = k.values()[i] / c;
        else
            v[i] = (cells[i].center - x0) * k.values()[i] / ((cells[i].center - x) * c);
    });
    return TransplantResult{x, c, WeightFunction(F.region(), std::move(v), k.q(), k.policy()), hyp};
}

// ---------------------------------------------------------------------------
// Battery verification

struct NamedFunction {
    std::string label;
    RationalFunction f;
};

/// {1, z, z^2, z^3, 1/(z-a), 1/(z-a)^2, 1/(z-conj a)} with a placed outside
/// the bounding square: a = center + 0.75 side (1 + 0.5 i).
inline std::vector<NamedFunction> default_battery(const Region& region) {
    const Complex center = region.origin() + Complex(0.5 * region.side(), 0.5 * region.side());
    const Complex a = center + 0.75 * region.side() * Complex(1.0, 0.5);
    return {
        {"1", RationalFunction::monomial(0)},
        {"z", RationalFunction::monomial(1)},
        {"z^2", RationalFunction::monomial(2)},
        {"z^3", RationalFunction::monomial(3)},
        {"1/(z-a)", RationalFunction::pole(a, 1)},
        {"1/(z-a)^2", RationalFunction::pole(a, 2)},
        {"1/(z-conj(a))", RationalFunction::pole(std::conj(a), 1)},
    };
}

inline std::vector<NamedFunction> label_functions(const std::vector<RationalFunction>& fs) {
    std::vector<NamedFunction> out;
    for (std::size_t i = 0; i < fs.size(); ++i) out.push_back({"f" + std::to_string(i), fs[i]});
    return out;
}

struct VerificationEntry {
    std::string label;
    Complex expected;
    Complex computed;
    double abs_error = 0.0;
};

struct VerificationReport {
    std::vector<VerificationEntry> entries;
    double max_error = 0.0;

    bool passes(double tol) const { return max_error <= tol; }

    /// CSV columns: function_id, expected, computed (split re/im), abs_error.
    void write_csv(std::ostream& os) const {
        os << "function_id,expected_re,expected_im,computed_re,computed_im,abs_error\n";
        for (const auto& e : entries)
            os << e.label << ',' << text::format_double(e.expected.real()) << ','
               << text::format_double(e.expected.imag()) << ',' << text::format_double(e.computed.real()) << ','
               << text::format_double(e.computed.imag()) << ',' << text::format_double(e.abs_error) << '\n';
    }
};

/// |int f k_t dA - f^{(t)}(x0)| for every battery member.
inline VerificationReport verify_representing(const PointFunctional& F, const std::vector<NamedFunction>& battery,
                                              double guard_cells = kDefaultPoleGuard) {
    if (battery.empty()) throw InvalidArgument("verify_representing: empty battery");
    VerificationReport report;
    for (const auto& item : battery) {
        const Complex computed = apply_functional(F, item.f, guard_cells);
        const Complex expected = derivative(item.f, F.order()).eval(F.x0());
        const double err = std::abs(computed - expected);
        report.entries.push_back({item.label, expected, computed, err});
        report.max_error = std::max(report.max_error, err);
    }
    return report;
}

inline VerificationReport verify_representing(const PointFunctional& F, const std::vector<RationalFunction>& battery,
                                              double guard_cells = kDefaultPoleGuard) {
    return verify_representing(F, label_functions(battery), guard_cells);
}

}  // namespace bpd
