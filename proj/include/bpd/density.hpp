#pragma once

/**
 * @file density.hpp
 * @brief Sets of full area density at a point: the averaging kernel w_n,
 *        threshold sets E_delta and E, the step-space set E', and density
 *        scans over shrinking balls.
 *
 * Balls Delta_n(x0) have radius 1/n. Their area is measured on the lattice
 * (the number of lattice cells with center inside the ball, whether or not
 * the cell belongs to the region), so a set that covers every ball cell has
 * ratio exactly 0 and cells outside the region count as missing.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/parallel.hpp>
#include <bpd/core/special.hpp>
#include <bpd/core/text.hpp>
#include <bpd/quadrature.hpp>
#include <bpd/region.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bpd {

/// A named per-cell quantity tested against the threshold.
struct PropertyColumn {
    std::string name;
    std::vector<double> values;
};

class DensitySet {
public:
    /// member: one flag per filled cell of `region`.
    DensitySet(RegionPtr region, std::vector<std::uint8_t> member, Complex x0, double delta0,
               std::vector<PropertyColumn> properties = {})
        : region_(std::move(region)), member_(std::move(member)), x0_(x0), delta0_(delta0),
          properties_(std::move(properties)) {
        if (!region_) throw InvalidArgument("DensitySet: null region");
        if (member_.size() != region_->filled_count())
            throw InvalidArgument("DensitySet: membership size does not match the region's filled cells");
        if (!(delta0_ > 0.0)) throw InvalidArgument("DensitySet: threshold must be positive");
        for (const auto& col : properties_) {
            if (col.values.size() != member_.size())
                throw InvalidArgument("DensitySet: property column '" + col.name + "' has the wrong length");
            for (std::size_t i = 0; i < member_.size(); ++i)
                if (member_[i] && !(col.values[i] < delta0_))
                    throw InvalidArgument("DensitySet: member cell violates property '" + col.name + "'");
        }
        for (auto& m : member_) m = m ? 1 : 0;
    }

    const RegionPtr& region() const noexcept { return region_; }
    const std::vector<std::uint8_t>& member() const noexcept { return member_; }
    bool member(std::size_t filled_index) const noexcept { return member_[filled_index] != 0; }
    Complex x0() const noexcept { return x0_; }
    double delta0() const noexcept { return delta0_; }
    const std::vector<PropertyColumn>& properties() const noexcept { return properties_; }

    /// True if z lies in a member cell.
    bool contains(Complex z) const noexcept {
        auto k = region_->filled_index_of(z);
        return k && member_[static_cast<std::size_t>(*k)] != 0;
    }

    std::size_t member_count() const noexcept {
        return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), std::uint8_t{1}));
    }

    /// Largest r such that every filled cell with |center - x0| < r is a member.
    double member_radius() const {
        double r = std::numeric_limits<double>::infinity();
        const auto& cells = region_->cells();
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (!member_[i]) r = std::min(r, std::abs(cells[i].center - x0_));
        return r;
    }

    /// DEN1: region checksum, x0, threshold, then the membership bitmap over
    /// the full grid as RLE rows.
    std::string to_den1() const {
        std::ostringstream os;
        os << "DEN1\n";
        os << "region " << region_->checksum() << '\n';
        os << "x0 " << text::format_double(x0_.real()) << ' ' << text::format_double(x0_.imag()) << '\n';
        os << "delta0 " << text::format_double(delta0_) << '\n';
        const int n = region_->resolution();
        std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const int k = region_->filled_index(r, c);
                row[static_cast<std::size_t>(c)] = k >= 0 ? member_[static_cast<std::size_t>(k)] : 0;
            }
            detail::write_rle_row(os, row.data(), n);
        }
        return os.str();
    }

    static DensitySet from_den1(std::istream& in, RegionPtr region) {
        std::string line;
        if (!text::next_line(in, line) || line != "DEN1") throw FormatError("missing DEN1 magic");
        auto sum = text::split_ws(detail::expect_key(in, "region"));
        if (sum.size() != 1 || sum[0] != region->checksum())
            throw FormatError("DEN1 region checksum does not match the supplied region");
        auto x = text::split_ws(detail::expect_key(in, "x0"));
        auto d = text::split_ws(detail::expect_key(in, "delta0"));
        if (x.size() != 2 || d.size() != 1) throw FormatError("malformed DEN1 header");
        const int n = region->resolution();
        std::vector<std::uint8_t> member(region->filled_count(), 0);
        std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) {
            if (!text::next_line(in, line)) throw FormatError("truncated DEN1 bitmap");
            detail::read_rle_row(line, row.data(), n);
            for (int c = 0; c < n; ++c) {
                if (!row[static_cast<std::size_t>(c)]) continue;
                const int k = region->filled_index(r, c);
                if (k < 0) throw FormatError("DEN1 member outside the region");
                member[static_cast<std::size_t>(k)] = 1;
            }
        }
        return DensitySet(std::move(region), std::move(member),
                          Complex(text::parse_double(x[0]), text::parse_double(x[1])), text::parse_double(d[0]));
    }
    static DensitySet from_den1(const std::string& s, RegionPtr region) {
        std::istringstream in(s);
        return from_den1(in, std::move(region));
    }

private:
    RegionPtr region_;
    std::vector<std::uint8_t> member_;
    Complex x0_;
    double delta0_;
    std::vector<PropertyColumn> properties_;
};

// ---------------------------------------------------------------------------
// The averaging kernel w_n

/// Minimum lattice cells per ball radius used by w_n.
inline constexpr int kMinCellsPerRadius = 8;

/// w_n(z) = (1 / m(Delta_n)) int_{Delta_n(x0)} |x - x0|^q / |z - x|^q dA_x.
///
/// Integrated on the region's lattice, refined by an odd integer factor until
/// the radius 1/n spans at least kMinCellsPerRadius cells. Region membership
/// plays no part: Delta_n is the full ball. m(Delta_n) is the discrete ball
/// area. The cell containing z is replaced by its self term (lattice zeta
/// correction at a cell center, equal-area disk elsewhere) with the numerator
/// frozen at |z - x0|^q.
inline double w_n(const Region& region, Complex z, Complex x0, int n, double q) {
    if (n < 1) throw InvalidArgument("w_n: n must be positive");
    if (!(q > 0.0 && q < 2.0)) throw OutOfRangeError("w_n: q must lie in (0, 2)");
    if (z == x0) return 1.0;
    const double rho = 1.0 / n;
    int refine = static_cast<int>(std::ceil(kMinCellsPerRadius * region.cell_width() / rho));
    refine = std::max(1, refine);
    if (refine % 2 == 0) ++refine;
    const double h = region.cell_width() / refine;
    const double a = h * h;
    const Complex origin = region.origin();
    // lattice index ranges covering the ball
    const int c_lo = static_cast<int>(std::floor((x0.real() - rho - origin.real()) / h)) - 1;
    const int c_hi = static_cast<int>(std::floor((x0.real() + rho - origin.real()) / h)) + 1;
    const int r_lo = static_cast<int>(std::floor((x0.imag() - rho - origin.imag()) / h)) - 1;
    const int r_hi = static_cast<int>(std::floor((x0.imag() + rho - origin.imag()) / h)) + 1;
    const int zc = static_cast<int>(std::floor((z.real() - origin.real()) / h));
    const int zr = static_cast<int>(std::floor((z.imag() - origin.imag()) / h));
    const Complex zcenter = origin + Complex((zc + 0.5) * h, (zr + 0.5) * h);
    const bool z_centered = std::abs(z - zcenter) <= 1e-9 * h;
    const auto rows = static_cast<std::size_t>(r_hi - r_lo + 1);
    const auto cols = static_cast<std::size_t>(c_hi - c_lo + 1);

    std::vector<double> num_part(parallel::chunk_count(rows * cols)), cnt_part(num_part.size());
    parallel::for_each_chunk(rows * cols, [&](std::size_t chunk, std::size_t b, std::size_t e) {
        CompensatedSum<double> num;
        double cnt = 0.0;
        for (std::size_t k = b; k < e; ++k) {
            const int r = r_lo + static_cast<int>(k / cols);
            const int c = c_lo + static_cast<int>(k % cols);
            const Complex x = origin + Complex((c + 0.5) * h, (r + 0.5) * h);
            if (std::abs(x - x0) > rho) continue;
            cnt += 1.0;
            if (r == zr && c == zc) continue;
            num += std::pow(std::abs(x - x0) / std::abs(z - x), q);
        }
        num_part[chunk] = num.value();
        cnt_part[chunk] = cnt;
    });
    CompensatedSum<double> num;
    double count = 0.0;
    for (std::size_t c = 0; c < num_part.size(); ++c) {
        num += num_part[c];
        count += cnt_part[c];
    }
    double total = num.value() * a;
    if (std::abs(zcenter - x0) <= rho) {
        const double self = z_centered ? special::lattice_self_term(q, h)
                                       : singular_cell_integral(q, h / std::sqrt(std::numbers::pi));
        total += std::pow(std::abs(z - x0), q) * self;
    }
    return total / (count * a);
}

// ---------------------------------------------------------------------------
// Threshold sets

enum class TestKind {
    integral,   ///< |x - x0|^q int |w(z)|^q / |z - x|^q dA
    potential,  ///< |x - x0| int |w(z)| / |z - x| dA
};

struct DensityTest {
    WeightFunction weight;
    TestKind kind;
    std::string label;
};

/// Per-cell values of one test, evaluated at every filled cell center.
inline std::vector<double> density_test_values(const WeightFunction& w, TestKind kind, Complex x0, double q) {
    const auto& cells = w.region()->cells();
    std::vector<double> v = kind == TestKind::integral ? singular_weight_integral_all(w, q) : newtonian_potential_all(w);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = std::abs(cells[i].center - x0);
        v[i] *= kind == TestKind::integral ? std::pow(d, q) : d;
    }
    return v;
}

/// Cells where every test value is below delta.
inline DensitySet build_threshold_set(RegionPtr region, const std::vector<DensityTest>& tests, Complex x0, double q,
                                      double delta) {
    std::vector<PropertyColumn> cols;
    for (const auto& t : tests) {
        if (t.weight.region() != region && !(*t.weight.region() == *region))
            throw InvalidArgument("density test weight lives on a different region");
        cols.push_back({t.label, density_test_values(t.weight, t.kind, x0, q)});
    }
    std::vector<std::uint8_t> member(region->filled_count(), 1);
    for (const auto& col : cols)
        for (std::size_t i = 0; i < member.size(); ++i)
            if (!(col.values[i] < delta)) member[i] = 0;
    return DensitySet(std::move(region), std::move(member), x0, delta, std::move(cols));
}

/// E_delta = { x : |x - x0|^q int |k|^q / |z - x|^q dA < delta }.
inline DensitySet build_E_delta(const WeightFunction& k, Complex x0, double q, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("build_E_delta: delta must be positive");
    return build_threshold_set(k.region(), {DensityTest{k, TestKind::integral, "integral"}}, x0, q, delta);
}

/// E: every listed test below delta0 in (0, 1). An empty list gives every cell.
inline DensitySet build_E(RegionPtr region, const std::vector<DensityTest>& tests, Complex x0, double q,
                          double delta0) {
    if (!(delta0 > 0.0 && delta0 < 1.0)) throw InvalidArgument("build_E: delta0 must lie in (0, 1)");
    return build_threshold_set(std::move(region), tests, x0, q, delta0);
}

/// E' = { h : x0 + s h in E for s = 1..t } on an h-grid congruent to the
/// region grid with 0 at the center of cell (n/2, n/2). An h cell is part of
/// the grid's region when every x0 + s h lies in a filled cell; its property
/// values are the maxima over s of E's values.
inline DensitySet build_E_prime(const DensitySet& E, int t) {
    if (t < 1) throw InvalidArgument("build_E_prime: t must be positive");
    const Region& X = *E.region();
    const int n = X.resolution();
    const double h = X.cell_width();
    const int mid = n / 2;
    const Complex origin = -Complex((mid + 0.5) * h, (mid + 0.5) * h);
    const Complex x0 = E.x0();
    const auto total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<std::uint8_t> filled(total, 0), is_member(total, 0);
    std::vector<std::vector<int>> lookup(static_cast<std::size_t>(t), std::vector<int>(total, -1));
    parallel::for_each_index(total, [&](std::size_t k) {
        const int r = static_cast<int>(k / static_cast<std::size_t>(n));
        const int c = static_cast<int>(k % static_cast<std::size_t>(n));
        const Complex eta = origin + Complex((c + 0.5) * h, (r + 0.5) * h);
        bool inside = true, mem = true;
        for (int s = 1; s <= t && inside; ++s) {
            auto idx = X.filled_index_of(x0 + static_cast<double>(s) * eta);
            if (!idx) {
                inside = false;
                break;
            }
            lookup[static_cast<std::size_t>(s - 1)][k] = *idx;
            if (!E.member(static_cast<std::size_t>(*idx))) mem = false;
        }
        filled[k] = inside ? 1 : 0;
        is_member[k] = inside && mem ? 1 : 0;
    });
    auto H = std::make_shared<const Region>(origin, X.side(), n, filled);
    std::vector<std::uint8_t> member(H->filled_count());
    std::vector<PropertyColumn> cols;
    for (const auto& col : E.properties()) cols.push_back({col.name, std::vector<double>(member.size(), 0.0)});
    const auto& hcells = H->cells();
    for (std::size_t i = 0; i < hcells.size(); ++i) {
        const auto k = static_cast<std::size_t>(hcells[i].row) * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(hcells[i].col);
        member[i] = is_member[k];
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double m = 0.0;
            for (int s = 1; s <= t; ++s)
                m = std::max(m, E.properties()[j].values[static_cast<std::size_t>(lookup[static_cast<std::size_t>(s - 1)][k])]);
            cols[j].values[i] = m;
        }
    }
    return DensitySet(std::move(H), std::move(member), 0.0, E.delta0(), std::move(cols));
}

// ---------------------------------------------------------------------------
// Density scans

struct DensityRow {
    int n = 0;
    double radius = 0.0;
    /// m(Delta_n \ E) / m(Delta_n), full lattice ball
    double ratio_full_ball = 0.0;
    /// the same restricted to region cells
    double ratio_set_relative = 0.0;
    /// the ball spans at least four cells across
    bool reliable = false;
};

struct DensityReport {
    std::vector<DensityRow> rows;

    void write_csv(std::ostream& os) const {
        os << "n,radius,ratio_full_ball,ratio_set_relative,reliable_flag\n";
        for (const auto& r : rows)
            os << r.n << ',' << text::format_double(r.radius) << ',' << text::format_double(r.ratio_full_ball) << ','
               << text::format_double(r.ratio_set_relative) << ',' << (r.reliable ? 1 : 0) << '\n';
    }
};

inline DensityRow density_ratio(const DensitySet& E, int n) {
    if (n < 1) throw InvalidArgument("density_ratio: n must be positive");
    const Region& X = *E.region();
    const double rho = 1.0 / n;
    const Complex x0 = E.x0();
    const auto lo = X.lattice_index(x0 - Complex(rho, rho));
    const auto hi = X.lattice_index(x0 + Complex(rho, rho));
    long long ball = 0, in_x = 0, members = 0;
    for (int r = lo.row - 1; r <= hi.row + 1; ++r)
        for (int c = lo.col - 1; c <= hi.col + 1; ++c) {
            if (std::abs(X.center(r, c) - x0) > rho) continue;
            ++ball;
            const int k = X.filled_index(r, c);
            if (k < 0) continue;
            ++in_x;
            if (E.member(static_cast<std::size_t>(k))) ++members;
        }
    DensityRow row;
    row.n = n;
    row.radius = rho;
    row.reliable = 2.0 * rho >= 4.0 * X.cell_width();
    row.ratio_full_ball = ball > 0 ? static_cast<double>(ball - members) / static_cast<double>(ball) : 1.0;
    row.ratio_set_relative = in_x > 0 ? static_cast<double>(in_x - members) / static_cast<double>(in_x) : 1.0;
    return row;
}

inline DensityReport density_scan(const DensitySet& E, const std::vector<int>& n_schedule) {
    if (n_schedule.empty()) throw InvalidArgument("density_scan: empty schedule");
    for (std::size_t i = 1; i < n_schedule.size(); ++i)
        if (n_schedule[i] <= n_schedule[i - 1]) throw InvalidArgument("density_scan: schedule must increase");
    DensityReport report;
    for (int n : n_schedule) report.rows.push_back(density_ratio(E, n));
    return report;
}

/// (1 / m(Delta_n)) sum_{filled cells x in Delta_n} v(x) dA, with the discrete
/// full-ball area in the denominator.
inline double ball_average(const Region& region, const std::vector<double>& per_cell, Complex x0, int n) {
    if (per_cell.size() != region.filled_count()) throw InvalidArgument("ball_average: size mismatch");
    const double rho = 1.0 / n;
    const auto lo = region.lattice_index(x0 - Complex(rho, rho));
    const auto hi = region.lattice_index(x0 + Complex(rho, rho));
    long long ball = 0;
    CompensatedSum<double> s;
    for (int r = lo.row - 1; r <= hi.row + 1; ++r)
        for (int c = lo.col - 1; c <= hi.col + 1; ++c) {
            if (std::abs(region.center(r, c) - x0) > rho) continue;
            ++ball;
            const int k = region.filled_index(r, c);
            if (k >= 0) s += per_cell[static_cast<std::size_t>(k)];
        }
    return ball > 0 ? s.value() / static_cast<double>(ball) : 0.0;
}

}  // namespace bpd
