#pragma once

/**
 * @file region.hpp
 * @brief Compact planar sets discretized as cell bitmaps.
 *
 * A Region is an n x n grid of square cells over a bounding square; a cell
 * belongs to the set iff its center does (center-in rasterization). Areas are
 * exact cell counts times the cell area, so the boundary error is first order
 * in the cell width.
 *
 * Cell (row, col) has center origin + ((col + 0.5) + i (row + 0.5)) * h with
 * h = side / n; row 0 is the bottom row. Filled cells are enumerated in
 * row-major order and that order is shared by every per-cell array in the
 * library (weights, density sets, the WGT1 format).
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/rng.hpp>
#include <bpd/core/text.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bpd {

using Complex = std::complex<double>;

struct Cell {
    int row = 0;
    int col = 0;
    Complex center;
    double area = 0.0;
};

struct GridIndex {
    int row = 0;
    int col = 0;
    friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

class Region {
public:
    /// filled: n*n row-major flags.
    Region(Complex origin, double side, int resolution, std::vector<std::uint8_t> filled)
        : origin_(origin), side_(side), n_(resolution), filled_(std::move(filled)) {
        if (!(side_ > 0.0) || !std::isfinite(side_)) throw InvalidArgument("Region: side must be positive");
        if (n_ <= 0) throw InvalidArgument("Region: resolution must be positive");
        if (filled_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
            throw InvalidArgument("Region: bitmap size does not match resolution");
        h_ = side_ / n_;
        cell_area_ = h_ * h_;
        index_.assign(filled_.size(), -1);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) {
                auto k = flat(r, c);
                if (filled_[k]) {
                    filled_[k] = 1;
                    index_[k] = static_cast<std::int32_t>(cells_.size());
                    cells_.push_back(Cell{r, c, center(r, c), cell_area_});
                }
            }
        if (cells_.empty()) throw InvalidArgument("Region: at least one filled cell is required");
    }

    Complex origin() const noexcept { return origin_; }
    double side() const noexcept { return side_; }
    int resolution() const noexcept { return n_; }
    double cell_width() const noexcept { return h_; }
    double cell_area() const noexcept { return cell_area_; }
    double cell_diagonal() const noexcept { return h_ * std::numbers::sqrt2; }

    /// Center of lattice cell (row, col); indices outside [0, n) address the
    /// infinite lattice extending the grid.
    Complex center(int row, int col) const noexcept {
        return origin_ + Complex((col + 0.5) * h_, (row + 0.5) * h_);
    }

    bool in_grid(int row, int col) const noexcept { return row >= 0 && col >= 0 && row < n_ && col < n_; }

    bool filled(int row, int col) const noexcept { return in_grid(row, col) && filled_[flat(row, col)] != 0; }

    /// Lattice cell whose half-open square [col h, (col+1) h) x [row h, (row+1) h) contains z.
    GridIndex lattice_index(Complex z) const noexcept {
        const Complex u = (z - origin_) / h_;
        return {static_cast<int>(std::floor(u.imag())), static_cast<int>(std::floor(u.real()))};
    }

    /// Position in the filled-cell list, or -1.
    int filled_index(int row, int col) const noexcept {
        return in_grid(row, col) ? index_[flat(row, col)] : -1;
    }

    /// Filled cell containing z, if any.
    std::optional<int> filled_index_of(Complex z) const noexcept {
        auto g = lattice_index(z);
        const int k = filled_index(g.row, g.col);
        if (k < 0) return std::nullopt;
        return k;
    }

    /// True if z coincides with the center of its lattice cell (to 1e-9 cell widths).
    bool at_cell_center(Complex z) const noexcept {
        auto g = lattice_index(z);
        return std::abs(z - center(g.row, g.col)) <= 1e-9 * h_;
    }

    const std::vector<Cell>& cells() const noexcept { return cells_; }
    std::size_t filled_count() const noexcept { return cells_.size(); }
    const std::vector<std::uint8_t>& bitmap() const noexcept { return filled_; }

    double area() const noexcept { return cell_area_ * static_cast<double>(cells_.size()); }

    /// Stable identifier: FNV-1a of the canonical RGN1 text.
    std::string checksum() const { return text::fnv1a_hex(to_rgn1()); }

    std::string to_rgn1() const;
    static Region from_rgn1(std::istream& in);
    static Region from_rgn1(const std::string& s) {
        std::istringstream in(s);
        return from_rgn1(in);
    }

    friend bool operator==(const Region& a, const Region& b) {
        return a.origin_ == b.origin_ && a.side_ == b.side_ && a.n_ == b.n_ && a.filled_ == b.filled_;
    }

private:
    std::size_t flat(int r, int c) const noexcept {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
    }

    Complex origin_;
    double side_;
    int n_;
    double h_ = 0.0;
    double cell_area_ = 0.0;
    std::vector<std::uint8_t> filled_;
    std::vector<std::int32_t> index_;
    std::vector<Cell> cells_;
};

using RegionPtr = std::shared_ptr<const Region>;

namespace detail {

/// Writes one bitmap row as run-length tokens `<count>x<0|1>`.
inline void write_rle_row(std::ostream& os, const std::uint8_t* row, int n) {
    int c = 0;
    bool first = true;
    while (c < n) {
        const std::uint8_t v = row[c] ? 1 : 0;
        int run = 0;
        while (c < n && (row[c] ? 1 : 0) == v) {
            ++run;
            ++c;
        }
        if (!first) os << ' ';
        os << run << 'x' << static_cast<int>(v);
        first = false;
    }
    os << '\n';
}

inline void read_rle_row(const std::string& line, std::uint8_t* row, int n) {
    int c = 0;
    for (const auto& tok : text::split_ws(line)) {
        auto x = tok.find('x');
        if (x == std::string::npos || x + 2 != tok.size() || (tok[x + 1] != '0' && tok[x + 1] != '1'))
            throw FormatError("bad RLE token '" + tok + "'");
        const long long run = text::parse_int(std::string_view(tok).substr(0, x));
        if (run <= 0 || c + run > n) throw FormatError("RLE row overflows the resolution");
        const std::uint8_t v = tok[x + 1] == '1' ? 1 : 0;
        for (long long k = 0; k < run; ++k) row[c++] = v;
    }
    if (c != n) throw FormatError("RLE row does not cover the resolution");
}

inline std::string expect_key(std::istream& in, const std::string& key) {
    std::string line;
    if (!text::next_line(in, line)) throw FormatError("unexpected end of input, wanted '" + key + "'");
    auto tok = text::split_ws(line);
    if (tok.empty() || tok[0] != key) throw FormatError("expected '" + key + "', got '" + line + "'");
    return line.substr(key.size());
}

}  // namespace detail

inline std::string Region::to_rgn1() const {
    std::ostringstream os;
    os << "RGN1\n";
    os << "origin " << text::format_double(origin_.real()) << ' ' << text::format_double(origin_.imag()) << '\n';
    os << "side " << text::format_double(side_) << '\n';
    os << "resolution " << n_ << '\n';
    for (int r = 0; r < n_; ++r) detail::write_rle_row(os, filled_.data() + flat(r, 0), n_);
    return os.str();
}

inline Region Region::from_rgn1(std::istream& in) {
    std::string line;
    if (!text::next_line(in, line) || line != "RGN1") throw FormatError("missing RGN1 magic");
    auto o = text::split_ws(detail::expect_key(in, "origin"));
    if (o.size() != 2) throw FormatError("origin needs two numbers");
    auto s = text::split_ws(detail::expect_key(in, "side"));
    auto n = text::split_ws(detail::expect_key(in, "resolution"));
    if (s.size() != 1 || n.size() != 1) throw FormatError("malformed side/resolution");
    const Complex origin(text::parse_double(o[0]), text::parse_double(o[1]));
    const double side = text::parse_double(s[0]);
    const long long res = text::parse_int(n[0]);
    if (res <= 0 || res > (1 << 15)) throw FormatError("resolution out of range");
    const int nn = static_cast<int>(res);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(nn) * static_cast<std::size_t>(nn));
    for (int r = 0; r < nn; ++r) {
        if (!text::next_line(in, line)) throw FormatError("truncated RGN1 bitmap");
        detail::read_rle_row(line, bits.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(nn), nn);
    }
    return Region(origin, side, nn, std::move(bits));
}

/// Region area (cell_area x filled count).
inline double area(const Region& region) { return region.area(); }

/// Disk of the given radius. The grid is placed so that `center` is itself a
/// cell center: with m = (n - 1) / 2 the cell width is radius / m, and the
/// lattice points at distance exactly `radius` along the axes are included.
/// That keeps the discrete disk invariant under the eight lattice symmetries
/// about its center.
inline Region build_disk(Complex center, double radius, int resolution) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("build_disk: radius must be positive");
    if (resolution < 8) throw InvalidArgument("build_disk: resolution must be at least 8");
    const int m = (resolution - 1) / 2;
    const double h = radius / m;
    const Complex origin = center - Complex((m + 0.5) * h, (m + 0.5) * h);
    const auto n = static_cast<std::size_t>(resolution);
    std::vector<std::uint8_t> bits(n * n, 0);
    // Integer test (i^2 + j^2 <= m^2) keeps the membership rule exact.
    const long long m2 = static_cast<long long>(m) * m;
    for (int r = 0; r < resolution; ++r)
        for (int c = 0; c < resolution; ++c) {
            const long long i = c - m, j = r - m;
            if (i * i + j * j <= m2) bits[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] = 1;
        }
    return Region(origin, (resolution) * h, resolution, std::move(bits));
}

/// Hole layout used by build_swiss_cheese (exposed for tests and reports).
struct Hole {
    Complex center;
    double radius = 0.0;
};

/// Radius of hole k: outer_radius * (1 - s) * s^k.
/// Total removed area is at most pi R^2 (1-s)^2 (1 - s^{2K}) / (1 - s^2), a
/// closed form checked before rasterization.
inline double swiss_cheese_removed_area_bound(double outer_radius, int hole_count, double hole_scale) {
    const double s = hole_scale;
    const double s2 = s * s;
    const double geometric = (1.0 - std::pow(s2, hole_count)) / (1.0 - s2);
    return std::numbers::pi * outer_radius * outer_radius * (1.0 - s) * (1.0 - s) * geometric;
}

/// Hole k has radius r_k = R (1-s) s^k and a center drawn uniformly (by area)
/// from the disk of radius R - r_k about the origin, using Xorshift64Star(seed):
/// rho = (R - r_k) sqrt(u1), theta = 2 pi u2.
inline std::vector<Hole> swiss_cheese_holes(double outer_radius, int hole_count, double hole_scale,
                                            std::uint64_t seed) {
    std::vector<Hole> holes;
    Xorshift64Star rng(seed);
    double r = outer_radius * (1.0 - hole_scale);
    for (int k = 0; k < hole_count; ++k) {
        const double u1 = rng.uniform01();
        const double u2 = rng.uniform01();
        const double rho = (outer_radius - r) * std::sqrt(u1);
        const double theta = 2.0 * std::numbers::pi * u2;
        holes.push_back({std::polar(rho, theta), r});
        r *= hole_scale;
    }
    return holes;
}

/// Disk of radius outer_radius centered at 0 with `hole_count` open disks removed.
/// Holes narrower than a cell vanish under rasterization; the region only
/// approximates an empty-interior set down to a couple of cell widths.
inline Region build_swiss_cheese(double outer_radius, int hole_count, double hole_scale, std::uint64_t seed,
                                 int resolution) {
    if (!(outer_radius > 0.0)) throw InvalidArgument("build_swiss_cheese: outer radius must be positive");
    if (hole_count < 0) throw InvalidArgument("build_swiss_cheese: hole_count must be non-negative");
    if (resolution < 64) throw InvalidArgument("build_swiss_cheese: resolution must be at least 64");
    const Region disk = build_disk(0.0, outer_radius, resolution);
    if (hole_count == 0) return disk;
    if (!(hole_scale > 0.0 && hole_scale < 1.0))
        throw InvalidArgument("build_swiss_cheese: hole_scale must lie in (0, 1)");
    const double disk_area = std::numbers::pi * outer_radius * outer_radius;
    const double removed = swiss_cheese_removed_area_bound(outer_radius, hole_count, hole_scale);
    if (!(removed < 0.5 * disk_area))
        throw InvalidArgument("build_swiss_cheese: holes could remove half the disk or more (bound " +
                              text::format_double(removed / disk_area) + " of its area)");
    const auto holes = swiss_cheese_holes(outer_radius, hole_count, hole_scale, seed);
    std::vector<std::uint8_t> bits = disk.bitmap();
    const int n = resolution;
    for (const auto& hole : holes) {
        auto lo = disk.lattice_index(hole.center - Complex(hole.radius, hole.radius));
        auto hi = disk.lattice_index(hole.center + Complex(hole.radius, hole.radius));
        for (int r = std::max(0, lo.row - 1); r <= std::min(n - 1, hi.row + 1); ++r)
            for (int c = std::max(0, lo.col - 1); c <= std::min(n - 1, hi.col + 1); ++c)
                if (std::abs(disk.center(r, c) - hole.center) < hole.radius)
                    bits[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)] = 0;
    }
    return Region(disk.origin(), disk.side(), n, std::move(bits));
}

/// Full bounding square [origin, origin + side]^2 with every cell filled.
inline Region build_square(Complex origin, double side, int resolution) {
    const auto n = static_cast<std::size_t>(resolution);
    return Region(origin, side, resolution, std::vector<std::uint8_t>(n * n, 1));
}

/// Filled cells whose centers lie within distance r of x0 (row-major order).
inline std::vector<Cell> ball_cells(const Region& region, Complex x0, double r) {
    std::vector<Cell> out;
    if (!(r > 0.0)) return out;
    const auto lo = region.lattice_index(x0 - Complex(r, r));
    const auto hi = region.lattice_index(x0 + Complex(r, r));
    const int n = region.resolution();
    for (int row = std::max(0, lo.row); row <= std::min(n - 1, hi.row); ++row)
        for (int col = std::max(0, lo.col); col <= std::min(n - 1, hi.col); ++col) {
            const int k = region.filled_index(row, col);
            if (k >= 0 && std::abs(region.cells()[static_cast<std::size_t>(k)].center - x0) <= r)
                out.push_back(region.cells()[static_cast<std::size_t>(k)]);
        }
    return out;
}

}  // namespace bpd
