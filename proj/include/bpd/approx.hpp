#pragma once

/**
 * @file approx.hpp
 * @brief Discrete L^p best approximation over region cells by linear
 *        combinations of rational basis functions.
 *
 * Inner products are midpoint sums over the filled cells, accumulated per
 * fixed chunk with compensated summation and combined in chunk order. Normal
 * equations are solved by column-pivoted Householder QR after a condition
 * check; L^p problems (p > 2) use damped iteratively reweighted least squares
 * seeded by the L^2 solution.
 */

#include <bpd/core/errors.hpp>
#include <bpd/core/parallel.hpp>
#include <bpd/core/summation.hpp>
#include <bpd/core/text.hpp>
#include <bpd/diffquot.hpp>
#include <bpd/measures.hpp>
#include <bpd/rational.hpp>
#include <bpd/region.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace bpd {

class Basis {
public:
    Basis(std::vector<RationalFunction> elements, std::vector<std::string> labels)
        : elements_(std::move(elements)), labels_(std::move(labels)) {
        if (elements_.empty()) throw InvalidArgument("Basis: at least one element is required");
        if (labels_.size() != elements_.size()) throw InvalidArgument("Basis: one label per element");
    }

    /// {1, z, ..., z^degree}
    static Basis polynomial(int degree) {
        if (degree < 0) throw InvalidArgument("Basis::polynomial: degree must be non-negative");
        std::vector<RationalFunction> e;
        std::vector<std::string> l;
        for (int k = 0; k <= degree; ++k) {
            e.push_back(RationalFunction::monomial(k));
            l.push_back("z^" + std::to_string(k));
        }
        return Basis(std::move(e), std::move(l));
    }

    Basis with(RationalFunction f, std::string label) const {
        Basis b = *this;
        b.elements_.push_back(std::move(f));
        b.labels_.push_back(std::move(label));
        return b;
    }

    std::size_t size() const noexcept { return elements_.size(); }
    const std::vector<RationalFunction>& elements() const noexcept { return elements_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// True if this basis starts with every element of `smaller`, in order.
    bool extends(const Basis& smaller) const {
        if (smaller.size() > size()) return false;
        for (std::size_t i = 0; i < smaller.size(); ++i)
            if (labels_[i] != smaller.labels_[i] || !(elements_[i] == smaller.elements_[i])) return false;
        return true;
    }

    RationalFunction combine(const std::vector<Complex>& coefficients) const {
        if (coefficients.size() != size()) throw InvalidArgument("Basis::combine: coefficient count mismatch");
        RationalFunction f;
        for (std::size_t i = 0; i < size(); ++i)
            if (coefficients[i] != Complex(0.0)) f = f + coefficients[i] * elements_[i];
        return f;
    }

private:
    std::vector<RationalFunction> elements_;
    std::vector<std::string> labels_;
};

inline constexpr double kConditionLimit = 1e12;
inline constexpr double kIrlsDamping = 0.5;
inline constexpr double kIrlsWeightFloor = 1e-12;

struct ProjectionResult {
    std::vector<Complex> coefficients;
    double residual_norm = 0.0;
    /// ||G c - b|| / ||b|| for the final normal equations
    double gram_residual = 0.0;
    double condition = 0.0;
    int iterations = 0;
    bool stalled = false;
};

namespace detail {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Weighted normal equations sum_cells w conj(b_a) b_b dA and sum w conj(b_a) f dA.
template <class Target, class Weight>
void normal_equations(const Target& target, const Basis& basis, const Region& region, Weight&& weight, CMatrix& G,
                      CVector& rhs) {
    const auto m = basis.size();
    const auto& cells = region.cells();
    const std::size_t chunks = parallel::chunk_count(cells.size());
    // per-chunk compensated partials, entries (a, b) for a <= b then rhs
    const std::size_t width = m * (m + 1) / 2 + m;
    std::vector<Complex> partial(chunks * width), comp(chunks * width);
    parallel::for_each_chunk(cells.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
        std::vector<CompensatedSum<Complex>> acc(width);
        std::vector<Complex> v(m);
        for (std::size_t i = b; i < e; ++i) {
            const Complex z = cells[i].center;
            const double w = weight(i);
            for (std::size_t k = 0; k < m; ++k) v[k] = basis.elements()[k].eval(z);
            const Complex f = Complex(target(z));
            std::size_t slot = 0;
            for (std::size_t a = 0; a < m; ++a) {
                const Complex ca = std::conj(v[a]) * w;
                for (std::size_t bb = a; bb < m; ++bb) acc[slot++] += ca * v[bb];
            }
            for (std::size_t a = 0; a < m; ++a) acc[slot++] += std::conj(v[a]) * w * f;
        }
        for (std::size_t s = 0; s < width; ++s) partial[c * width + s] = acc[s].value();
    });
    std::vector<CompensatedSum<Complex>> total(width);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t s = 0; s < width; ++s) total[s] += partial[c * width + s];
    const double area = region.cell_area();
    G.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    rhs.resize(static_cast<Eigen::Index>(m));
    std::size_t slot = 0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t bb = a; bb < m; ++bb) {
            const Complex g = total[slot++].value() * area;
            G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(bb)) = g;
            G(static_cast<Eigen::Index>(bb), static_cast<Eigen::Index>(a)) = std::conj(g);
        }
    for (std::size_t a = 0; a < m; ++a) rhs(static_cast<Eigen::Index>(a)) = total[slot++].value() * area;
}

inline double condition_estimate(const CMatrix& G) {
    Eigen::JacobiSVD<CMatrix> svd(G);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(s.size() - 1) > 0.0)) return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

inline std::vector<Complex> solve_normal(const CMatrix& G, const CVector& rhs, double& cond, double& gram_residual) {
    cond = condition_estimate(G);
    if (!(cond <= kConditionLimit))
        throw ConditioningError("Gram matrix condition estimate " + text::format_sci(cond) + " exceeds 1e12", cond);
    const CVector c = G.colPivHouseholderQr().solve(rhs);
    const double nb = rhs.norm();
    gram_residual = nb > 0.0 ? (G * c - rhs).norm() / nb : (G * c).norm();
    return std::vector<Complex>(c.data(), c.data() + c.size());
}

template <class Target>
std::vector<Complex> residuals(const Target& target, const Basis& basis, const Region& region,
                               const std::vector<Complex>& coef) {
    const auto& cells = region.cells();
    std::vector<Complex> r(cells.size());
    parallel::for_each_index(cells.size(), [&](std::size_t i) {
        const Complex z = cells[i].center;
        Complex s = Complex(target(z));
        for (std::size_t k = 0; k < coef.size(); ++k) s -= coef[k] * basis.elements()[k].eval(z);
        r[i] = s;
    });
    return r;
}

inline double lp_of(const std::vector<Complex>& r, const Region& region, double p) {
    const double s = parallel::sum<double>(r.size(), [&](std::size_t i) { return std::pow(std::abs(r[i]), p); });
    return std::pow(s * region.cell_area(), 1.0 / p);
}

inline void check_basis(const Basis& basis, const Region& region) {
    for (const auto& f : basis.elements()) check_poles_off(f, region);
}

}  // namespace detail

/// Discrete L^2 projection of target onto span(basis).
template <Evaluable Target>
ProjectionResult project_l2(const Target& target, const Basis& basis, const Region& region) {
    detail::check_basis(basis, region);
    detail::CMatrix G;
    detail::CVector rhs;
    detail::normal_equations(target, basis, region, [](std::size_t) { return 1.0; }, G, rhs);
    ProjectionResult out;
    out.coefficients = detail::solve_normal(G, rhs, out.condition, out.gram_residual);
    out.residual_norm = detail::lp_of(detail::residuals(target, basis, region, out.coefficients), region, 2.0);
    return out;
}

/// L^p approximation, p > 2, by damped IRLS with weights max(|r|^{p-2}, 1e-12).
/// Returns the best iterate seen; `stalled` is set when max_iters is reached
/// before the relative coefficient change drops below tol.
template <Evaluable Target>
ProjectionResult project_lp_irls(const Target& target, const Basis& basis, const Region& region, double p,
                                 int max_iters = 100, double tol = 1e-10) {
    if (!(p > 2.0) || !std::isfinite(p))
        throw OutOfRangeError("project_lp_irls: p must satisfy 2 < p < inf (use project_l2 for p = 2)");
    if (max_iters < 1) throw InvalidArgument("project_lp_irls: max_iters must be positive");
    ProjectionResult seed = project_l2(target, basis, region);
    std::vector<Complex> c = seed.coefficients;
    auto r = detail::residuals(target, basis, region, c);
    ProjectionResult best = seed;
    best.residual_norm = detail::lp_of(r, region, p);
    int it = 0;
    bool converged = false;
    while (it < max_iters) {
        ++it;
        std::vector<double> w(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(std::pow(std::abs(r[i]), p - 2.0), kIrlsWeightFloor);
        detail::CMatrix G;
        detail::CVector rhs;
        detail::normal_equations(target, basis, region, [&](std::size_t i) { return w[i]; }, G, rhs);
        double cond = 0.0, gres = 0.0;
        const auto full = detail::solve_normal(G, rhs, cond, gres);
        double change = 0.0, size = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const Complex next = c[k] + kIrlsDamping * (full[k] - c[k]);
            change += std::norm(next - c[k]);
            size += std::norm(c[k]);
            c[k] = next;
        }
        r = detail::residuals(target, basis, region, c);
        const double norm = detail::lp_of(r, region, p);
        if (norm < best.residual_norm) {
            best.coefficients = c;
            best.residual_norm = norm;
            best.condition = cond;
            best.gram_residual = gres;
        }
        if (std::sqrt(change) <= tol * std::max(std::sqrt(size), 1e-300) || change == 0.0) {
            converged = true;
            break;
        }
    }
    best.iterations = it;
    best.stalled = !converged;
    return best;
}

// ---------------------------------------------------------------------------
// Sequences f_j and corrected g_j

struct SequenceStage {
    std::size_t basis_size = 0;
    RationalFunction f;
    double residual_norm = 0.0;
    /// g_j = f_j - sum_m (D^m f_j / m!) (z - x0)^m
    RationalFunction g;
    /// |D^m g_j| for each functional order m
    std::vector<double> functional_residuals;
    int iterations = 0;
    bool stalled = false;
    bool non_improving = false;
};

struct ApproximationSequence {
    std::string target_label;
    double p = 0.0;
    std::vector<SequenceStage> stages;
    bool truncated = false;
    std::string truncation_reason;

    /// CSV columns: stage, basis_size, residual_norm, functional_residual_m...
    void write_csv(std::ostream& os) const {
        os << "stage,basis_size,residual_norm";
        const std::size_t cols = stages.empty() ? 0 : stages.front().functional_residuals.size();
        for (std::size_t m = 0; m < cols; ++m) os << ",functional_residual_" << m;
        os << '\n';
        for (std::size_t j = 0; j < stages.size(); ++j) {
            os << j << ',' << stages[j].basis_size << ',' << text::format_double(stages[j].residual_norm);
            for (double v : stages[j].functional_residuals) os << ',' << text::format_double(v);
            os << '\n';
        }
    }
};

/// Values D^m f = int f k_m dA for m = 0..t.
inline std::vector<Complex> functional_values(const std::vector<PointFunctional>& functionals,
                                              const RationalFunction& f) {
    std::vector<Complex> d;
    for (const auto& F : functionals) d.push_back(apply_functional(F, f));
    return d;
}

/// f_j = L^p projection of target onto nested_bases[j]; g_j its Taylor
/// correction by the functionals (orders 0..t, sharing x0). A stage whose
/// solve fails ends the sequence with `truncated` set.
inline ApproximationSequence build_sequence(const RationalFunction& target, Complex x0,
                                            const std::vector<Basis>& nested_bases, const Region& region, double p,
                                            const std::vector<PointFunctional>& functionals,
                                            std::string target_label = "target", int max_iters = 100,
                                            double tol = 1e-10) {
    if (nested_bases.empty()) throw InvalidArgument("build_sequence: no bases");
    for (std::size_t j = 1; j < nested_bases.size(); ++j)
        if (!nested_bases[j].extends(nested_bases[j - 1]))
            throw InvalidArgument("build_sequence: bases must be nested");
    for (std::size_t m = 0; m < functionals.size(); ++m) {
        if (functionals[m].order() != static_cast<int>(m))
            throw InvalidArgument("build_sequence: functionals must have orders 0, 1, ..., t");
        if (functionals[m].x0() != x0) throw InvalidArgument("build_sequence: functionals must share x0");
    }
    if (!(p >= 2.0)) throw OutOfRangeError("build_sequence: p must be at least 2");
    ApproximationSequence seq;
    seq.target_label = std::move(target_label);
    seq.p = p;
    for (const auto& basis : nested_bases) {
        try {
            const auto res = p == 2.0 ? project_l2(target, basis, region)
                                      : project_lp_irls(target, basis, region, p, max_iters, tol);
            SequenceStage st;
            st.basis_size = basis.size();
            st.f = basis.combine(res.coefficients);
            st.residual_norm = res.residual_norm;
            st.iterations = res.iterations;
            st.stalled = res.stalled;
            st.g = taylor_correct(st.f, x0, functional_values(functionals, st.f));
            for (const auto& v : functional_values(functionals, st.g)) st.functional_residuals.push_back(std::abs(v));
            if (!seq.stages.empty())
                st.non_improving = st.residual_norm > seq.stages.back().residual_norm * (1.0 + 1e-12);
            seq.stages.push_back(std::move(st));
        } catch (const Error& e) {
            seq.truncated = true;
            seq.truncation_reason = e.what();
            break;
        }
    }
    return seq;
}

}  // namespace bpd
