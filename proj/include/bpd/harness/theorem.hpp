#pragma once

/**
 * @file theorem.hpp
 * @brief End-to-end experiments: approximate first derivatives through a set
 *        E of full area density, t-th order difference quotients through the
 *        step set E', and the uniform bound on |g - g_j| behind both.
 *
 * Pipeline shared by all three:
 *   k_t from the disk closed form or a WGT1 file, k_m by reduction;
 *   D^m f = int f k_m dA and g = f - sum_m D^m f (z - x0)^m / m!;
 *   E = cells where |x-x0|^q int |k_t|^q/|z-x|^q, |x-x0|^q int |k|^q/|z-x|^q
 *       and |x-x0| k~(x) are all below delta0 (k = k_0).
 *
 * Probes closer to x0 than kReliableCells cell widths are tabulated but not
 * judged: there 1/(x - x0) varies across a single cell and the midpoint
 * lattice cannot resolve it.
 */

#include <bpd/approx.hpp>
#include <bpd/density.hpp>
#include <bpd/diffquot.hpp>
#include <bpd/harness/config.hpp>
#include <bpd/harness/report.hpp>
#include <bpd/measures.hpp>
#include <bpd/quadrature.hpp>
#include <bpd/rational.hpp>
#include <bpd/region.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace bpd::harness {

inline constexpr double kReliableCells = 2.0;
/// ||g - g_j||_p below this leaves the bound ratio undefined.
inline constexpr double kBoundNormFloor = 1e-12;

inline QPolicy policy_for(const ExperimentConfig& cfg) { return cfg.p > 2.0 ? QPolicy::strict : QPolicy::exploratory; }

struct FunctionalFamily {
    /// orders 0..t
    std::vector<PointFunctional> orders;
    std::string origin;
};

inline void require_x0_inside(const ExperimentConfig& cfg, const Region& region) {
    if (!region.filled_index_of(cfg.x0))
        throw ConfigError("x0 = " + text::format_complex(cfg.x0) + " is not inside a filled cell of the region");
}

/// k_t read from weights.file or, for a disk centered at x0, the closed form
/// C_t conj(z - x0)^t; lower orders by reduction.
inline FunctionalFamily load_functionals(const ExperimentConfig& cfg, const RegionPtr& region, int t) {
    FunctionalFamily fam;
    std::optional<PointFunctional> top;
    if (!cfg.weights_file.empty()) {
        std::ifstream in(cfg.weights_file);
        if (!in) throw ConfigError("cannot open weights file '" + cfg.weights_file + "'");
        top.emplace(cfg.x0, t, WeightFunction::from_wgt1(in, region, policy_for(cfg)));
        fam.origin = "weights file";
    } else if (cfg.region.shape == "disk" && cfg.x0 == cfg.region.center) {
        const auto norm = cfg.normalization == "analytic"         ? DiskNormalization::analytic
                          : cfg.normalization == "moment_matched" ? DiskNormalization::moment_matched
                                                                  : DiskNormalization::calibrated;
        top.emplace(disk_functional(region, cfg.x0, t, cfg.q(), norm, cfg.region.radius, policy_for(cfg)));
        fam.origin = "disk closed form (" + cfg.normalization + ")";
    } else {
        throw UnsupportedRegionError(
            "no built-in representing weight for this region at x0 (the closed form needs a disk centered at x0); "
            "supply an order-" +
            std::to_string(t) + " weight with weights.file");
    }
    for (int m = 0; m < t; ++m) fam.orders.push_back(wilken_reduce(*top, m));
    fam.orders.push_back(*top);
    return fam;
}

/// Battery check of every order; tables verification_order_<m>.csv.
inline void verify_family(Report& report, const FunctionalFamily& fam, const Region& region, double tol,
                          std::vector<std::pair<std::string, std::string>>& tables) {
    const auto battery = default_battery(region);
    bool all = true;
    for (const auto& F : fam.orders) {
        const auto v = verify_representing(F, battery);
        std::ostringstream os;
        v.write_csv(os);
        tables.emplace_back("verification_order_" + std::to_string(F.order()) + ".csv", os.str());
        report.add(check_le("battery max error, order " + std::to_string(F.order()), v.max_error, tol,
                            ThresholdSource::config_tolerance));
        all = all && v.passes(tol);
    }
    if (!all) report.note("no verified functional at x0: the weight does not reproduce the battery");
}

struct ProbeRow {
    Complex point;
    double distance = 0.0;
    /// g(x)/(x - x0) for first-order runs, Delta_h^t g(x0) otherwise
    Complex quotient;
    Complex functional;
    double residual = 0.0;
    /// (g(x) - g(x0))/(x - x0) and its distance to the functional (first-order runs)
    Complex difference_quotient;
    double difference_residual = 0.0;
    bool reliable = false;
};

struct ShellRow {
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::size_t count = 0;
    double max_residual = 0.0;
    double mean_residual = 0.0;
};

struct BoundRow {
    std::size_t stage = 0;
    std::size_t basis_size = 0;
    double diff_norm = 0.0;
    double max_ratio = 0.0;
    Complex argmax;
    bool skipped = false;
};

struct TheoremReport {
    Report report;
    int t = 1;
    /// probes are steps h (x = x0 + s h) rather than points x
    bool step_probes = false;
    RegionPtr region;
    std::optional<FunctionalFamily> family;
    double reliable_floor = 0.0;
    double cell_width = 0.0;
    std::vector<Complex> derivatives;
    RationalFunction g;
    std::vector<ProbeRow> probes;
    std::vector<ShellRow> shells;
    DensityReport density;
    DensityReport density_prime;
    std::optional<ApproximationSequence> sequence;
    std::vector<BoundRow> bounds;
    /// (file name, body) pairs for every table produced
    std::vector<std::pair<std::string, std::string>> tables;

    /// Largest residual among reliable probes within one cell width of the floor.
    std::optional<double> innermost_residual() const {
        std::optional<double> out;
        for (const auto& p : probes)
            if (p.reliable && p.distance < reliable_floor + cell_width)
                out = std::max(out.value_or(0.0), p.residual);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Tables

inline std::string probes_csv(const std::vector<ProbeRow>& rows, bool first_order) {
    std::ostringstream os;
    os << "probe_re,probe_im,distance,quotient_re,quotient_im,functional_re,functional_im,residual";
    if (first_order) os << ",difference_quotient_re,difference_quotient_im,difference_residual";
    os << ",reliable\n";
    for (const auto& r : rows) {
        os << text::format_double(r.point.real()) << ',' << text::format_double(r.point.imag()) << ','
           << text::format_double(r.distance) << ',' << text::format_double(r.quotient.real()) << ','
           << text::format_double(r.quotient.imag()) << ',' << text::format_double(r.functional.real()) << ','
           << text::format_double(r.functional.imag()) << ',' << text::format_double(r.residual);
        if (first_order)
            os << ',' << text::format_double(r.difference_quotient.real()) << ','
               << text::format_double(r.difference_quotient.imag()) << ','
               << text::format_double(r.difference_residual);
        os << ',' << (r.reliable ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string shells_csv(const std::vector<ShellRow>& rows) {
    std::ostringstream os;
    os << "r_lo,r_hi,count,max_residual,mean_residual\n";
    for (const auto& r : rows)
        os << text::format_double(r.r_lo) << ',' << text::format_double(r.r_hi) << ',' << r.count << ','
           << text::format_double(r.max_residual) << ',' << text::format_double(r.mean_residual) << '\n';
    return os.str();
}

inline std::string bounds_csv(const std::vector<BoundRow>& rows) {
    std::ostringstream os;
    os << "stage,basis_size,diff_norm,max_ratio,argmax_re,argmax_im,skipped\n";
    for (const auto& r : rows)
        os << r.stage << ',' << r.basis_size << ',' << text::format_double(r.diff_norm) << ','
           << text::format_double(r.max_ratio) << ',' << text::format_double(r.argmax.real()) << ','
           << text::format_double(r.argmax.imag()) << ',' << (r.skipped ? 1 : 0) << '\n';
    return os.str();
}

inline std::string density_csv(const DensityReport& d) {
    std::ostringstream os;
    d.write_csv(os);
    return os.str();
}

// ---------------------------------------------------------------------------
// Pieces

/// Reliable probes grouped in halving shells from the outermost probe down to the floor.
inline std::vector<ShellRow> residual_shells(const std::vector<ProbeRow>& probes, double floor) {
    double outer = 0.0;
    for (const auto& p : probes)
        if (p.reliable) outer = std::max(outer, p.distance);
    std::vector<ShellRow> rows;
    if (outer <= 0.0) return rows;
    double hi = outer;
    while (true) {
        const double lo = std::max(floor, 0.5 * hi);
        ShellRow row{lo, hi, 0, 0.0, 0.0};
        CompensatedSum<double> sum;
        for (const auto& p : probes) {
            const bool inside = p.reliable && p.distance >= lo && (p.distance < hi || (hi == outer && p.distance == hi));
            if (!inside) continue;
            ++row.count;
            row.max_residual = std::max(row.max_residual, p.residual);
            sum += p.residual;
        }
        if (row.count > 0) row.mean_residual = sum.value() / static_cast<double>(row.count);
        rows.push_back(row);
        if (lo <= floor) break;
        hi = lo;
    }
    return rows;
}

/// Density trend checks: nonincreasing full-ball ratio and a fourfold drop.
inline void density_trend_checks(Report& report, const DensityReport& d, const std::string& what) {
    if (d.rows.size() < 2) return;
    double worst_rise = 0.0;
    for (std::size_t i = 1; i < d.rows.size(); ++i)
        worst_rise = std::max(worst_rise, d.rows[i].ratio_full_ball - d.rows[i - 1].ratio_full_ball);
    report.add(check_le(what + ": largest increase of the full-ball missing ratio", worst_rise, 0.0,
                        ThresholdSource::proof_constant));
    const double first = d.rows.front().ratio_full_ball;
    report.add(check_le(what + ": final full-ball missing ratio", d.rows.back().ratio_full_ball, first / 4.0,
                        ThresholdSource::proof_constant, "a quarter of the first ratio"));
}

/// Three threshold tests defining E: orders t and 0 integrals, order-0 potential.
inline DensitySet build_experiment_E(const FunctionalFamily& fam, const ExperimentConfig& cfg) {
    const auto& kt = fam.orders.back();
    const auto& k = fam.orders.front();
    std::vector<DensityTest> tests{
        {kt.weight(), TestKind::integral, "order_t_integral"},
        {k.weight(), TestKind::integral, "order_0_integral"},
        {k.weight(), TestKind::potential, "order_0_potential"},
    };
    return build_E(kt.region(), tests, cfg.x0, cfg.q(), cfg.delta0);
}

inline bool degree_at_most(const RationalFunction& f, int t) { return f.is_polynomial() && f.poly_degree() <= t; }

/// D^m f for m = 0..t, and g. A polynomial of degree <= t is its own Taylor
/// polynomial, so g vanishes identically and the functionals are not needed.
inline void correct_target(TheoremReport& out, const ExperimentConfig& cfg, const RationalFunction& f,
                           const FunctionalFamily* fam, int t) {
    if (degree_at_most(f, t)) {
        for (int m = 0; m <= t; ++m) out.derivatives.push_back(derivative(f, m).eval(cfg.x0));
        out.g = RationalFunction();
        out.report.note("target is a polynomial of degree <= " + std::to_string(t) + ": g vanishes identically");
        return;
    }
    if (!fam) throw UnsupportedRegionError("no representing weight available for a non-polynomial target");
    out.derivatives = functional_values(fam->orders, f);
    out.g = taylor_correct(f, cfg.x0, out.derivatives);
}

inline void sort_probes(std::vector<ProbeRow>& probes, const std::vector<std::pair<int, int>>& keys) {
    std::vector<std::size_t> idx(probes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (probes[a].distance != probes[b].distance) return probes[a].distance > probes[b].distance;
        return keys[a] < keys[b];
    });
    std::vector<ProbeRow> sorted;
    sorted.reserve(probes.size());
    for (auto i : idx) sorted.push_back(probes[i]);
    probes = std::move(sorted);
}

inline void summarize_common(TheoremReport& out, const ExperimentConfig& cfg, const Region& region,
                             const std::string& origin) {
    auto& s = out.report.summary;
    s["target"] = cfg.target_label();
    s["p"] = cfg.p;
    s["q"] = cfg.q();
    s["t"] = out.t;
    s["x0"] = text::format_complex(cfg.x0);
    s["delta0"] = cfg.delta0;
    s["region"] = {{"shape", cfg.region.shape},
                   {"resolution", region.resolution()},
                   {"cell_width", region.cell_width()},
                   {"filled_cells", region.filled_count()},
                   {"area", region.area()},
                   {"checksum", region.checksum()}};
    s["functional_origin"] = origin;
    s["reliable_floor"] = out.reliable_floor;
    if (cfg.region.shape == "swiss_cheese")
        out.report.note("experimental: finite-resolution Swiss cheese only approximates a set with empty interior "
                        "down to about two cell widths");
    if (cfg.p <= 2.0) out.report.note("exploratory run with p <= 2");
}

inline void probe_checks(TheoremReport& out, double tol, const std::string& what) {
    out.report.note("probes closer than " + text::format_double(kReliableCells) +
                    " cell widths to the base point are tabulated but not judged (reliable floor " +
                    text::format_double(out.reliable_floor) + ")");
    std::size_t reliable = 0;
    for (const auto& p : out.probes) reliable += p.reliable ? 1 : 0;
    out.report.summary["probes"] = out.probes.size();
    out.report.summary["reliable_probes"] = reliable;
    out.report.add(check_ge("reliable probes in " + what, static_cast<double>(reliable), 1.0,
                            ThresholdSource::proof_constant));
    const auto inner = out.innermost_residual();
    out.report.add(check_le("innermost reliable residual", inner.value_or(INFINITY), tol,
                            ThresholdSource::config_tolerance));
    out.shells = residual_shells(out.probes, out.reliable_floor);
    if (out.shells.size() >= 2 && inner)
        out.report.add(check_le("innermost residual against the outermost shell", *inner,
                                out.shells.front().max_residual, ThresholdSource::proof_constant,
                                "residual trend toward the base point"));
}

inline void derivative_check(TheoremReport& out, const ExperimentConfig& cfg, const RationalFunction& f, int t) {
    const Complex analytic = derivative(f, t).eval(cfg.x0);
    const Complex computed = out.derivatives[static_cast<std::size_t>(t)];
    out.report.summary["derivative_computed"] = text::format_complex(computed);
    out.report.summary["derivative_analytic"] = text::format_complex(analytic);
    const double tol = t == 1 ? cfg.tol.derivative : cfg.tol.second_derivative;
    out.report.add(check_le("order-" + std::to_string(t) + " derivative against the analytic value",
                            std::abs(computed - analytic), tol, ThresholdSource::config_tolerance));
}

// ---------------------------------------------------------------------------
// Experiments

/// Region, functionals of orders 0..t (battery-checked) and E. A missing
/// weight is fatal unless the target makes g vanish identically, in which case
/// E is every cell.
inline DensitySet prepare(TheoremReport& out, const ExperimentConfig& cfg, int t) {
    out.region = make_region(cfg.region);
    require_x0_inside(cfg, *out.region);
    out.t = t;
    out.cell_width = out.region->cell_width();
    out.reliable_floor = kReliableCells * out.cell_width;
    // a supplied weight has order cfg.t; the closed form is built at order t
    const int load_order = cfg.weights_file.empty() ? t : cfg.t;
    if (load_order < t) throw ConfigError("weights.file must hold a weight of order at least " + std::to_string(t));
    try {
        auto fam = load_functionals(cfg, out.region, load_order);
        fam.orders.erase(fam.orders.begin() + t + 1, fam.orders.end());
        out.family = std::move(fam);
    } catch (const UnsupportedRegionError&) {
        if (!degree_at_most(cfg.target(), t)) throw;
    }
    summarize_common(out, cfg, *out.region, out.family ? out.family->origin : "none");
    std::optional<DensitySet> E;
    if (out.family) {
        verify_family(out.report, *out.family, *out.region, cfg.tol.functional, out.tables);
        E = build_experiment_E(*out.family, cfg);
    } else {
        E = DensitySet(out.region, std::vector<std::uint8_t>(out.region->filled_count(), 1), cfg.x0, cfg.delta0);
        out.report.note("E is every cell: no representing weight was available and none is needed");
    }
    out.report.summary["E_members"] = E->member_count();
    out.report.summary["E_member_radius"] = number_or_null(E->member_radius());
    out.density = density_scan(*E, cfg.density_n);
    out.tables.emplace_back("density_E.csv", density_csv(out.density));
    density_trend_checks(out.report, out.density, "E");
    return std::move(*E);
}

/// First-order run: L_x(g) = g(x)/(x - x0) - D^1 g over x in E, outer to inner.
inline TheoremReport run_theorem1(const ExperimentConfig& cfg) {
    validate(cfg);
    TheoremReport out;
    out.report.command = "experiment theorem1";
    const DensitySet E = prepare(out, cfg, 1);
    const RationalFunction f = cfg.target();
    correct_target(out, cfg, f, out.family ? &*out.family : nullptr, 1);
    derivative_check(out, cfg, f, 1);
    const Complex d1g = out.family && !degree_at_most(f, 1) ? apply_functional(out.family->orders[1], out.g) : 0.0;
    const Complex gx0 = out.g.eval(cfg.x0);
    out.report.summary["D1_g"] = text::format_complex(d1g);
    out.report.summary["g_at_x0"] = text::format_complex(gx0);

    const Region& X = *out.region;
    const auto skip = X.filled_index_of(cfg.x0);
    std::vector<std::pair<int, int>> keys;
    for (std::size_t i = 0; i < X.cells().size(); ++i) {
        if (!E.member(i) || (skip && i == static_cast<std::size_t>(*skip))) continue;
        const auto& cell = X.cells()[i];
        ProbeRow row;
        row.point = cell.center;
        row.distance = std::abs(cell.center - cfg.x0);
        const Complex gx = out.g.eval(cell.center);
        row.quotient = gx / (cell.center - cfg.x0);
        row.functional = d1g;
        row.residual = std::abs(row.quotient - d1g);
        row.difference_quotient = (gx - gx0) / (cell.center - cfg.x0);
        row.difference_residual = std::abs(row.difference_quotient - d1g);
        row.reliable = row.distance >= out.reliable_floor;
        out.probes.push_back(row);
        keys.emplace_back(cell.row, cell.col);
    }
    sort_probes(out.probes, keys);
    probe_checks(out, cfg.tol.theorem1, "E");
    out.tables.emplace_back("probes.csv", probes_csv(out.probes, true));
    out.tables.emplace_back("trend.csv", shells_csv(out.shells));
    return out;
}

/// Order-t run: Delta_h^t g(x0) - D^t g over h in E', outer to inner.
inline TheoremReport run_theorem2(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.t < 1) throw ConfigError("theorem2 needs t >= 1");
    TheoremReport out;
    out.report.command = "experiment theorem2";
    const int t = cfg.t;
    out.step_probes = true;
    const DensitySet E = prepare(out, cfg, t);
    const RationalFunction f = cfg.target();
    correct_target(out, cfg, f, out.family ? &*out.family : nullptr, t);
    derivative_check(out, cfg, f, t);
    const Complex dtg = out.family && !degree_at_most(f, t) ? apply_functional(out.family->orders.back(), out.g) : 0.0;
    out.report.summary["Dt_g"] = text::format_complex(dtg);

    const DensitySet Ep = build_E_prime(E, t);
    const Region& H = *Ep.region();
    out.report.summary["E_prime_members"] = Ep.member_count();
    out.density_prime = density_scan(Ep, cfg.density_n);
    out.tables.emplace_back("density_E_prime.csv", density_csv(out.density_prime));
    density_trend_checks(out.report, out.density_prime, "E'");

    const auto skip = H.filled_index_of(0.0);
    std::vector<std::pair<int, int>> keys;
    for (std::size_t i = 0; i < H.cells().size(); ++i) {
        if (!Ep.member(i) || (skip && i == static_cast<std::size_t>(*skip))) continue;
        const auto& cell = H.cells()[i];
        ProbeRow row;
        row.point = cell.center;
        row.distance = std::abs(cell.center);
        row.quotient = diff_quotient(out.g, cfg.x0, cell.center, t).value;
        row.functional = dtg;
        row.residual = std::abs(row.quotient - dtg);
        row.reliable = row.distance >= out.reliable_floor;
        out.probes.push_back(row);
        keys.emplace_back(cell.row, cell.col);
    }
    sort_probes(out.probes, keys);
    probe_checks(out, cfg.tol.theorem2, "E'");
    out.tables.emplace_back("probes.csv", probes_csv(out.probes, false));
    out.tables.emplace_back("trend.csv", shells_csv(out.shells));
    return out;
}

/// Points x at which |g - g_j| is compared, with the scale |x - x0|^t (first
/// order) or |s h|^t for x = x0 + s h, h in E', s = 1..t.
struct BoundProbe {
    Complex x;
    double scale = 0.0;
};

inline std::vector<BoundProbe> bound_probes(const TheoremReport& th, Complex x0) {
    std::vector<BoundProbe> out;
    for (const auto& p : th.probes) {
        if (!p.reliable) continue;
        if (!th.step_probes) {
            out.push_back({p.point, p.distance});
            continue;
        }
        for (int s = 1; s <= th.t; ++s) {
            const Complex x = x0 + static_cast<double>(s) * p.point;
            out.push_back({x, std::pow(static_cast<double>(s) * p.distance, th.t)});
        }
    }
    return out;
}

/// max over probes of |g(x) - g_j(x)| / (scale ||g - g_j||_p) for each stage.
inline std::vector<BoundRow> check_pointwise_bound(const ApproximationSequence& seq, const RationalFunction& g,
                                               const std::vector<BoundProbe>& probes, const Region& region,
                                               double p) {
    std::vector<BoundRow> rows;
    for (std::size_t j = 0; j < seq.stages.size(); ++j) {
        const auto& st = seq.stages[j];
        const RationalFunction diff = g - st.g;
        BoundRow row;
        row.stage = j;
        row.basis_size = st.basis_size;
        row.diff_norm = lp_norm(diff, region, p);
        if (!(row.diff_norm >= kBoundNormFloor)) {
            row.skipped = true;
            rows.push_back(row);
            continue;
        }
        for (const auto& pr : probes) {
            const double ratio = std::abs(diff.eval(pr.x)) / (pr.scale * row.diff_norm);
            if (ratio > row.max_ratio) {
                row.max_ratio = ratio;
                row.argmax = pr.x;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<Basis> polynomial_schedule(const std::vector<int>& degrees) {
    std::vector<Basis> bases;
    for (int d : degrees) bases.push_back(Basis::polynomial(d));
    return bases;
}

/// Uniform bound on |g - g_j| at the probes of E (t = 1) or x0 + s E' (t >= 2),
/// against delta0 / (1 - delta0) times the configured slack.
inline TheoremReport run_bounds(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.t < 1) throw ConfigError("bounds needs t >= 1");
    TheoremReport out = cfg.t == 1 ? run_theorem1(cfg) : run_theorem2(cfg);
    out.report.command = "experiment bounds";
    const RationalFunction f = cfg.target();
    if (degree_at_most(f, cfg.t) || !out.family) {
        out.report.note("g vanishes identically: no approximation stages to judge");
        return out;
    }
    const Region& region = *out.region;
    auto seq = build_sequence(f, cfg.x0, polynomial_schedule(cfg.basis_degrees), region, cfg.p, out.family->orders,
                              cfg.target_label(), cfg.irls_max_iters, cfg.irls_tol);
    if (seq.truncated) out.report.note("approximation sequence truncated: " + seq.truncation_reason);
    std::ostringstream os;
    seq.write_csv(os);
    out.tables.emplace_back("sequence.csv", os.str());

    out.bounds = check_pointwise_bound(seq, out.g, bound_probes(out, cfg.x0), region, cfg.p);
    out.sequence = std::move(seq);
    out.tables.emplace_back("bounds.csv", bounds_csv(out.bounds));

    const double threshold = cfg.delta0 / (1.0 - cfg.delta0) * cfg.tol.bound_slack;
    double worst = 0.0;
    std::size_t judged = 0;
    for (const auto& r : out.bounds) {
        if (r.skipped) continue;
        ++judged;
        worst = std::max(worst, r.max_ratio);
    }
    out.report.summary["bound_threshold"] = threshold;
    out.report.summary["bound_stages_judged"] = judged;
    out.report.add(check_ge("approximation stages with a defined ratio", static_cast<double>(judged), 1.0,
                            ThresholdSource::proof_constant));
    out.report.add(check_le("max |g - g_j| / (scale ||g - g_j||_p)", worst, threshold,
                            ThresholdSource::proof_constant,
                            "delta0 / (1 - delta0) times slack " + text::format_double(cfg.tol.bound_slack)));
    return out;
}

}  // namespace bpd::harness
