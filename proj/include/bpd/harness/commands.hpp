#pragma once

/**
 * @file commands.hpp
 * @brief The non-experiment subcommands: region generation, weight
 *        verification (representing, reduction, transplant), density scans
 *        and difference-quotient tables.
 */

#include <bpd/density.hpp>
#include <bpd/diffquot.hpp>
#include <bpd/harness/config.hpp>
#include <bpd/harness/report.hpp>
#include <bpd/harness/theorem.hpp>
#include <bpd/measures.hpp>
#include <bpd/region.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bpd::harness {

struct Outcome {
    Report report;
    std::vector<std::pair<std::string, std::string>> tables;
};

inline Outcome from_theorem(TheoremReport&& th) { return Outcome{std::move(th.report), std::move(th.tables)}; }

inline Outcome region_gen(const ExperimentConfig& cfg) {
    validate(cfg);
    Outcome out;
    out.report.command = "region gen";
    const RegionPtr region = make_region(cfg.region);
    auto& s = out.report.summary;
    s["shape"] = cfg.region.shape;
    s["resolution"] = region->resolution();
    s["cell_width"] = region->cell_width();
    s["filled_cells"] = region->filled_count();
    s["area"] = region->area();
    s["checksum"] = region->checksum();
    s["x0_inside"] = region->filled_index_of(cfg.x0).has_value();
    out.report.add(check_ge("filled cells", static_cast<double>(region->filled_count()), 1.0,
                            ThresholdSource::proof_constant));
    if (cfg.region.shape == "swiss_cheese" && cfg.region.holes > 0) {
        const double disk = std::numbers::pi * cfg.region.radius * cfg.region.radius;
        const double bound = swiss_cheese_removed_area_bound(cfg.region.radius, cfg.region.holes, cfg.region.hole_scale);
        const Region full = build_disk(0.0, cfg.region.radius, cfg.region.resolution);
        s["removed_area_bound"] = bound;
        s["removed_area"] = full.area() - region->area();
        out.report.add(check_le("removed fraction of the disk", (full.area() - region->area()) / disk, 0.5,
                                ThresholdSource::proof_constant));
        std::ostringstream os;
        os << "center_re,center_im,radius\n";
        for (const auto& h : swiss_cheese_holes(cfg.region.radius, cfg.region.holes, cfg.region.hole_scale,
                                                cfg.region.seed))
            os << text::format_double(h.center.real()) << ',' << text::format_double(h.center.imag()) << ','
               << text::format_double(h.radius) << '\n';
        out.tables.emplace_back("holes.csv", os.str());
        out.report.note("holes narrower than about two cell widths do not survive rasterization");
    }
    out.tables.emplace_back("region.rgn", region->to_rgn1());
    return out;
}

namespace detail {
inline void verification_table(Outcome& out, const VerificationReport& v, const std::string& name) {
    std::ostringstream os;
    v.write_csv(os);
    out.tables.emplace_back(name, os.str());
}
}  // namespace detail

inline Outcome verify_representing_cmd(const ExperimentConfig& cfg) {
    validate(cfg);
    Outcome out;
    out.report.command = "verify representing";
    const RegionPtr region = make_region(cfg.region);
    require_x0_inside(cfg, *region);
    const auto fam = load_functionals(cfg, region, cfg.t);
    const auto& F = fam.orders.back();
    const auto v = verify_representing(F, default_battery(*region));
    out.report.summary["order"] = cfg.t;
    out.report.summary["functional_origin"] = fam.origin;
    out.report.summary["q"] = cfg.q();
    out.report.summary["q_norm"] = number_or_null(F.q_norm());
    out.report.add(check_le("battery max error, order " + std::to_string(cfg.t), v.max_error, cfg.tol.functional,
                            ThresholdSource::config_tolerance));
    if (!v.passes(cfg.tol.functional))
        out.report.note("no verified functional at x0: the weight does not reproduce the battery");
    detail::verification_table(out, v, "verification.csv");
    out.tables.emplace_back("region.rgn", region->to_rgn1());
    out.tables.emplace_back("weights_order_" + std::to_string(cfg.t) + ".wgt1", F.weight().to_wgt1());
    return out;
}

inline Outcome verify_wilken_cmd(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.t < 1) throw ConfigError("verify wilken needs t >= 1");
    Outcome out;
    out.report.command = "verify wilken";
    const RegionPtr region = make_region(cfg.region);
    require_x0_inside(cfg, *region);
    const auto fam = load_functionals(cfg, region, cfg.t);
    const auto& top = fam.orders.back();
    const auto battery = default_battery(*region);
    out.report.summary["order"] = cfg.t;
    out.report.summary["functional_origin"] = fam.origin;
    for (int m = 0; m < cfg.t; ++m) {
        const auto v = verify_representing(fam.orders[static_cast<std::size_t>(m)], battery);
        out.report.add(check_le("reduced to order " + std::to_string(m) + ": battery max error", v.max_error,
                                cfg.tol.functional, ThresholdSource::config_tolerance));
        detail::verification_table(out, v, "verification_order_" + std::to_string(m) + ".csv");
    }
    const auto same = wilken_reduce(top, cfg.t);
    double differing = 0.0;
    const auto& a = same.weight().values();
    const auto& b = top.weight().values();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::memcmp(&a[i], &b[i], sizeof(Complex)) != 0) differing += 1.0;
    out.report.add(check_le("cells changed by reduction to the same order", differing, 0.0,
                            ThresholdSource::proof_constant));
    return out;
}

inline Outcome verify_bishop_cmd(const ExperimentConfig& cfg) {
    validate(cfg);
    Outcome out;
    out.report.command = "verify bishop";
    const RegionPtr region = make_region(cfg.region);
    require_x0_inside(cfg, *region);
    const auto fam = load_functionals(cfg, region, cfg.t);
    const auto& k = fam.orders.front();
    const Complex x = cfg.bishop_x;
    const double delta = cfg.bishop_delta;
    const double hyp = std::abs(x - cfg.x0) * newtonian_potential(k.weight(), x);
    auto& s = out.report.summary;
    s["x"] = text::format_complex(x);
    s["delta"] = delta;
    s["functional_origin"] = fam.origin;
    s["hypothesis"] = hyp;
    out.report.add(check_le("|x - x0| k~(x)", hyp, delta, ThresholdSource::config_tolerance,
                            "hypothesis of the transplant (strict inequality required)"));
    if (!(hyp < delta)) {
        out.report.note("transplant skipped: hypothesis fails at x");
        return out;
    }
    std::optional<TransplantResult> opt;
    try {
        opt = bishop_transplant(k, x, delta);
    } catch (const NumericalConsistencyError& e) {
        out.report.add(check_le("| |c| - 1 |", std::numeric_limits<double>::infinity(), delta,
                                ThresholdSource::proof_constant, e.what()));
        return out;
    }
    const TransplantResult& tr = *opt;
    s["c"] = text::format_complex(tr.c);
    s["abs_c"] = std::abs(tr.c);
    out.report.add(check_le("| |c| - 1 |", std::abs(std::abs(tr.c) - 1.0), delta, ThresholdSource::proof_constant,
                            "|c| within [1 - delta, 1 + delta]"));
    const auto v = verify_representing(tr.functional(), default_battery(*region));
    out.report.add(check_le("transplanted weight: battery max error", v.max_error, cfg.tol.functional,
                            ThresholdSource::config_tolerance));
    detail::verification_table(out, v, "verification.csv");
    return out;
}

inline Outcome density_scan_cmd(const ExperimentConfig& cfg) {
    validate(cfg);
    TheoremReport th;
    th.report.command = "density scan";
    const DensitySet E = prepare(th, cfg, cfg.t);
    th.tables.emplace_back("E.den1", E.to_den1());
    if (cfg.density_control) {
        const Complex c = *cfg.density_control;
        const RegionPtr& region = E.region();
        const DensitySet whole(region, std::vector<std::uint8_t>(region->filled_count(), 1), c, cfg.delta0);
        const auto d = density_scan(whole, cfg.density_n);
        th.tables.emplace_back("density_control.csv", density_csv(d));
        th.report.summary["control_point"] = text::format_complex(c);
        th.report.add(check_le("control point: |final full-ball missing ratio - 1/2|",
                               std::abs(d.rows.back().ratio_full_ball - 0.5), 0.05, ThresholdSource::proof_constant,
                               "a smooth boundary point misses half of every small ball"));
    }
    return from_theorem(std::move(th));
}

inline Outcome diffquot_table_cmd(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.t < 1) throw ConfigError("diffquot table needs t >= 1");
    if (cfg.diffquot_h.empty()) throw ConfigError("diffquot.h must list at least one step");
    Outcome out;
    out.report.command = "diffquot table";
    const RationalFunction f = cfg.target();
    const Complex reference = derivative(f, cfg.t).eval(cfg.x0);
    const auto rows = convergence_table(f, cfg.x0, cfg.t, cfg.diffquot_h, reference);
    std::ostringstream os;
    write_convergence_csv(os, rows);
    out.tables.emplace_back("diffquot.csv", os.str());
    auto& s = out.report.summary;
    s["target"] = cfg.target_label();
    s["t"] = cfg.t;
    s["x0"] = text::format_complex(cfg.x0);
    s["reference"] = text::format_complex(reference);
    if (rows.size() >= 2) {
        const auto& a = rows[rows.size() - 2];
        const auto& b = rows.back();
        if (a.abs_error > 0.0 && b.abs_error > 0.0 && std::abs(a.h) != std::abs(b.h))
            s["observed_order"] = std::log(a.abs_error / b.abs_error) / std::log(std::abs(a.h) / std::abs(b.h));
        out.report.add(check_le("error at the last step against the first", rows.back().abs_error,
                                rows.front().abs_error, ThresholdSource::proof_constant));
    }
    if (cfg.t >= 2) {
        std::ostringstream cs;
        cs << "h_re,h_im,nested_discrepancy,scaled_discrepancy\n";
        double worst = 0.0;
        for (const Complex h : cfg.diffquot_h) {
            const double d = compose_check(f, cfg.x0, h, cfg.t);
            const double scaled = d / difference_scale(f, cfg.x0, h, cfg.t);
            worst = std::max(worst, scaled);
            cs << text::format_double(h.real()) << ',' << text::format_double(h.imag()) << ','
               << text::format_double(d) << ',' << text::format_double(scaled) << '\n';
        }
        out.tables.emplace_back("compose.csv", cs.str());
        out.report.add(check_le("nested against direct quotient, scaled", worst, cfg.tol.compose,
                                ThresholdSource::config_tolerance));
    }
    return out;
}

}  // namespace bpd::harness
