#include <bpd/measures.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

using bpd::Complex;
using bpd::PointFunctional;
using bpd::RationalFunction;
using bpd::WeightFunction;

namespace {
constexpr double kPi = std::numbers::pi;

const bpd::RegionPtr& disk1024() {
    static const bpd::RegionPtr d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 1024));
    return d;
}

PointFunctional analytic(int t, const bpd::RegionPtr& d = disk1024()) {
    return bpd::disk_functional(d, 0.0, t, 1.5, bpd::DiskNormalization::analytic);
}
}  // namespace

TEST(Measures, ApplyFunctionalAnalyticDiskWeights) {
    const auto k1 = analytic(1);
    EXPECT_NEAR(std::abs(bpd::apply_functional(k1, RationalFunction::monomial(1)) - 1.0), 0.0, 1e-3);
    EXPECT_NEAR(std::abs(bpd::apply_functional(k1, RationalFunction::constant(1.0))), 0.0, 1e-3);
    EXPECT_NEAR(std::abs(bpd::apply_functional(k1, RationalFunction::pole(2.0)) + 0.25), 0.0, 1e-3);
    EXPECT_THROW(bpd::apply_functional(k1, RationalFunction::pole(0.3)), bpd::PoleOnSetError);
}

TEST(Measures, WeightValuesMatchClosedForm) {
    const auto k2 = analytic(2);
    const auto& cells = k2.region()->cells();
    for (std::size_t i = 0; i < cells.size(); i += 9973) {
        const Complex zb = std::conj(cells[i].center);
        EXPECT_NEAR(std::abs(k2.weight().values()[i] - 6.0 / kPi * zb * zb), 0.0, 1e-14);
    }
}

TEST(Measures, CalibratedWeightReproducesMonomialExactly) {
    for (int t = 0; t <= 3; ++t) {
        const auto F = bpd::disk_functional(disk1024(), 0.0, t, 1.5);
        double fact = 1.0;
        for (int k = 2; k <= t; ++k) fact *= k;
        EXPECT_NEAR(std::abs(bpd::apply_functional(F, RationalFunction::monomial(t)) - fact), 0.0, 1e-11 * fact);
        // continuum constant t!(t+1)/pi
        const Complex c = F.weight().values()[0] / std::pow(std::conj(F.region()->cells()[0].center), t);
        EXPECT_NEAR(std::abs(c - fact * (t + 1) / kPi), 0.0, 2e-3 * fact * (t + 1) / kPi);
    }
}

TEST(Measures, QNormCachedAndConsistent) {
    const auto F = analytic(1);
    EXPECT_NEAR(F.q_norm(), F.weight().lq_norm(), 1e-10 * F.q_norm());
    // ||2 zbar / pi||_q on the unit disk: (2/pi) (2 pi / (q + 2))^{1/q}
    const double want = 2.0 / kPi * std::pow(2.0 * kPi / 3.5, 1.0 / 1.5);
    EXPECT_NEAR(F.q_norm(), want, 5e-3 * want);
}

TEST(Measures, WilkenReduction) {
    const auto k1 = analytic(1);
    const auto same = bpd::wilken_reduce(k1, 1);
    EXPECT_EQ(same.weight().values(), k1.weight().values());
    EXPECT_EQ(same.order(), 1);

    const auto k0 = bpd::wilken_reduce(k1, 0);
    EXPECT_EQ(k0.order(), 0);
    const auto& cells = k0.region()->cells();
    for (std::size_t i = 0; i < cells.size(); i += 7919)
        EXPECT_NEAR(std::abs(k0.weight().values()[i] - 2.0 * std::norm(cells[i].center) / kPi), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(bpd::apply_functional(k0, RationalFunction::constant(1.0)) - 1.0), 0.0, 1e-3);

    const auto k2 = analytic(2);
    const auto k20 = bpd::wilken_reduce(k2, 0);
    for (std::size_t i = 0; i < cells.size(); i += 7919)
        EXPECT_NEAR(std::abs(k20.weight().values()[i] - 3.0 * std::pow(std::norm(cells[i].center), 2) / kPi), 0.0,
                    1e-14);
    EXPECT_NEAR(std::abs(bpd::apply_functional(k20, RationalFunction::constant(1.0)) - 1.0), 0.0, 1e-3);

    EXPECT_THROW(bpd::wilken_reduce(k1, 2), bpd::InvalidArgument);
    EXPECT_THROW(bpd::wilken_reduce(k1, -1), bpd::InvalidArgument);
}

TEST(Measures, WilkenReductionComposes) {
    auto d = std::make_shared<const bpd::Region>(bpd::build_disk(Complex(0.1, -0.2), 1.0, 100));
    const auto k4 = bpd::disk_functional(d, Complex(0.1, -0.2), 4, 1.5);
    for (int m = 0; m <= 4; ++m)
        for (int mid = m; mid <= 4; ++mid) {
            const auto direct = bpd::wilken_reduce(k4, m);
            const auto twostep = bpd::wilken_reduce(bpd::wilken_reduce(k4, mid), m);
            const auto& a = direct.weight().values();
            const auto& b = twostep.weight().values();
            for (std::size_t i = 0; i < a.size(); ++i)
                ASSERT_LE(std::abs(a[i] - b[i]), 1e-12 * std::abs(a[i]) + 1e-300);
        }
}

TEST(Measures, VerifyRepresentingDiskBatteries) {
    const auto k0 = bpd::disk_functional(disk1024(), 0.0, 0, 1.5);
    std::vector<RationalFunction> battery{RationalFunction::constant(1.0), RationalFunction::monomial(1),
                                          RationalFunction::monomial(2), RationalFunction::pole(2.0),
                                          RationalFunction::pole(1.5, 2)};
    EXPECT_LE(bpd::verify_representing(k0, battery).max_error, 2e-3);
    const auto k1 = analytic(1);
    std::vector<RationalFunction> b1{RationalFunction::monomial(1), RationalFunction::monomial(2),
                                     RationalFunction::pole(2.0)};
    const auto rep = bpd::verify_representing(k1, b1);
    EXPECT_LE(rep.max_error, 2e-3);
    EXPECT_NEAR(std::abs(rep.entries[2].expected + 0.25), 0.0, 1e-15);

    const PointFunctional zero(0.0, 0, WeightFunction::constant(disk1024(), 0.0, 1.5));
    const auto z = bpd::verify_representing(zero, std::vector<RationalFunction>{RationalFunction::constant(1.0)});
    EXPECT_EQ(z.max_error, 1.0);
    EXPECT_THROW(bpd::verify_representing(zero, std::vector<RationalFunction>{}), bpd::InvalidArgument);
}

TEST(Measures, DefaultBatteryPolesOutsideBoundingSquare) {
    const auto& d = *disk1024();
    const auto battery = bpd::default_battery(d);
    ASSERT_EQ(battery.size(), 7u);
    for (const auto& item : battery)
        for (const auto& p : item.f.poles()) {
            EXPECT_FALSE(d.in_grid(d.lattice_index(p.location).row, d.lattice_index(p.location).col));
        }
    for (int t = 0; t <= 2; ++t)
        EXPECT_LE(bpd::verify_representing(bpd::disk_functional(disk1024(), 0.0, t, 1.5), battery).max_error, 2e-3);
}

TEST(Measures, HolderConsistency) {
    auto d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 200));
    bpd::Xorshift64Star g(17);
    for (int t = 0; t <= 2; ++t) {
        const auto F = bpd::disk_functional(d, 0.0, t, 1.5);
        for (int trial = 0; trial < 20; ++trial) {
            const Complex a(1.3 + g.uniform01(), 2 * g.uniform01() - 1);
            const auto f = RationalFunction::pole(a, 1 + trial % 3, Complex(g.uniform01(), g.uniform01())) +
                           RationalFunction::polynomial({g.uniform01(), g.uniform01(), g.uniform01()});
            EXPECT_LE(std::abs(bpd::apply_functional(F, f)), F.q_norm() * bpd::lp_norm(f, *d, 3.0) + 1e-9);
        }
    }
}

TEST(Measures, BishopTransplant) {
    const auto k = bpd::disk_functional(disk1024(), 0.0, 0, 1.5);
    const auto tr = bpd::bishop_transplant(k, 0.5, 0.95);
    EXPECT_NEAR(std::abs(tr.c - 0.75), 0.0, 1e-3);  // 1 - |x|^2
    EXPECT_LE(std::abs(tr.c), 1.95);
    EXPECT_GE(std::abs(tr.c), 0.05);
    const auto Fx = tr.functional();
    EXPECT_NEAR(std::abs(bpd::apply_functional(Fx, RationalFunction::pole(2.0)) + 2.0 / 3.0), 0.0, 2e-3);
    EXPECT_NEAR(std::abs(bpd::apply_functional(Fx, RationalFunction::constant(1.0)) - 1.0), 0.0, 2e-3);
    EXPECT_LE(bpd::verify_representing(Fx, bpd::default_battery(*disk1024())).max_error, 2e-3);
    for (const auto& v : tr.weight.values()) ASSERT_TRUE(std::isfinite(std::abs(v)));
}

TEST(Measures, BishopTransplantIdentityAndErrors) {
    auto d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 128));
    const auto k = bpd::disk_functional(d, 0.0, 0, 1.5);
    const auto same = bpd::bishop_transplant(k, 0.0, 0.1);
    EXPECT_EQ(same.c, Complex(1.0));
    EXPECT_EQ(same.weight.values(), k.weight().values());
    EXPECT_THROW(bpd::bishop_transplant(k, 0.5, 0.1), bpd::TransplantHypothesisError);
    EXPECT_THROW(bpd::bishop_transplant(k, 0.01, 1.0), bpd::InvalidArgument);
    EXPECT_THROW(bpd::bishop_transplant(bpd::disk_functional(d, 0.0, 1, 1.5), 0.01, 0.5), bpd::InvalidArgument);
    // small displacement: hypothesis holds at the default delta
    const auto near = bpd::bishop_transplant(k, Complex(0.03, 0.02), 0.1);
    EXPECT_LE(std::abs(std::abs(near.c) - 1.0), 0.1);
}

TEST(Measures, TaylorCorrectedFunctionIsAnnihilated) {
    auto d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 512));
    const int t = 2;
    const auto kt = bpd::disk_functional(d, 0.0, t, 1.5);
    const auto f = RationalFunction::pole(Complex(2.0, 0.5), 2) + RationalFunction::pole(-1.7);
    std::vector<Complex> dv;
    std::vector<PointFunctional> Fs;
    for (int m = 0; m <= t; ++m) {
        Fs.push_back(bpd::wilken_reduce(kt, m));
        dv.push_back(bpd::apply_functional(Fs.back(), f));
    }
    const auto g = bpd::taylor_correct(f, 0.0, dv);
    const double gp = bpd::lp_norm(g, *d, 3.0);
    for (const auto& F : Fs) EXPECT_LE(std::abs(bpd::apply_functional(F, g)), 2e-3 * gp);
}

TEST(Measures, Fun1RoundTripAndCsv) {
    auto d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 32));
    const auto F = bpd::disk_functional(d, 0.0, 2, 1.5);
    const auto back = PointFunctional::from_fun1(F.to_fun1(), d);
    EXPECT_EQ(back.order(), 2);
    EXPECT_EQ(back.x0(), F.x0());
    EXPECT_EQ(back.weight().values(), F.weight().values());
    EXPECT_EQ(back.to_fun1(), F.to_fun1());

    std::ostringstream os;
    bpd::verify_representing(F, bpd::default_battery(*d)).write_csv(os);
    const auto csv = os.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "function_id,expected_re,expected_im,computed_re,computed_im,abs_error");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}

TEST(Measures, MomentMatchedWeightReproducesMonomialsOnTheLattice) {
    const auto d = std::make_shared<const bpd::Region>(bpd::build_disk(0.0, 1.0, 256));
    const auto sq = std::make_shared<const bpd::Region>(bpd::build_square(Complex(-1.0, -1.0), 2.0, 255));
    for (const auto& region : {d, sq}) {
        for (int t : {0, 1, 2, 3}) {
            const auto F = bpd::disk_functional(region, 0.0, t, 1.5, bpd::DiskNormalization::moment_matched);
            const auto& cells = region->cells();
            const auto& k = F.weight().values();
            const double fact = std::tgamma(t + 1.0);
            for (int m = 0; m <= bpd::kMomentDegree; ++m) {
                std::complex<long double> acc = 0.0L;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    const std::complex<long double> z(cells[i].center.real(), cells[i].center.imag());
                    const std::complex<long double> w(k[i].real(), k[i].imag());
                    acc += w * std::pow(z, m);
                }
                const Complex got(static_cast<double>(acc.real() * region->cell_area()),
                                  static_cast<double>(acc.imag() * region->cell_area()));
                const Complex want = m == t ? Complex(fact) : Complex(0.0);
                EXPECT_LT(std::abs(got - want), 1e-9 * fact) << "t = " << t << ", m = " << m;
            }
        }
    }
}

TEST(Measures, MomentMatchedBeatsCalibratedOnTheBattery) {
    const auto& d = disk1024();
    for (int t : {1, 2}) {
        const auto mm = bpd::disk_functional(d, 0.0, t, 1.5, bpd::DiskNormalization::moment_matched);
        const auto cal = bpd::disk_functional(d, 0.0, t, 1.5, bpd::DiskNormalization::calibrated);
        const auto battery = bpd::default_battery(*d);
        const double e_mm = bpd::verify_representing(mm, battery).max_error;
        const double e_cal = bpd::verify_representing(cal, battery).max_error;
        EXPECT_LT(e_mm, 1e-8);
        EXPECT_LT(e_mm, e_cal);
    }
}
