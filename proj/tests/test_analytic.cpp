#include "uavfso/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "uavfso/specfun.hpp"

using namespace uavfso;
using std::numbers::pi;

namespace {

constexpr double mrad = 1e-3;

UavStability stability(double txo, double tyo, double rxo, double ryo, double ttx, double tty,
                       double trx, double try_)
{
    UavStability s;
    s.sigma_txo = txo * mrad;
    s.sigma_tyo = tyo * mrad;
    s.sigma_rxo = rxo * mrad;
    s.sigma_ryo = ryo * mrad;
    s.sigma_txp = 0.4;
    s.sigma_typ = 0.3;
    s.sigma_rxp = 0.4;
    s.sigma_ryp = 0.3;
    s.theta_tx = ttx * mrad;
    s.theta_ty = tty * mrad;
    s.theta_rx = trx * mrad;
    s.theta_ry = try_ * mrad;
    return s;
}

UavStability moderate() { return stability(3, 4, 3, 2, 2, 3, 2, 3); }
UavStability high_boresight() { return stability(3, 4, 3, 2, 9, 7, 5, 6); }
UavStability isotropic(double sigma, double theta)
{
    return stability(sigma, sigma, sigma, sigma, theta, theta, theta, theta);
}

LogNormal weak() { return lognormal_from_rytov(0.2).lognormal(); }
GammaGamma strong() { return gg_from_rytov(2.0).gamma_gamma(); }

double ln_pdf(double a, LogNormal const& m)
{
    double const d = std::log(a) - 2.0 * m.mu_l;
    return std::exp(-d * d / (8.0 * m.sigma_l2)) / (a * std::sqrt(8.0 * pi * m.sigma_l2));
}

double gg_pdf_ref(double a, GammaGamma const& m)
{
    double const ab = m.alpha * m.beta;
    if (2.0 * std::sqrt(ab * a) > 500.0)
        return 0.0;
    return 2.0 * std::pow(ab, 0.5 * (m.alpha + m.beta)) / (std::tgamma(m.alpha) * std::tgamma(m.beta))
           * std::pow(a, 0.5 * (m.alpha + m.beta) - 1.0)
           * std::cyl_bessel_k(m.alpha - m.beta, 2.0 * std::sqrt(ab * a));
}

double normal_pdf(double x, double mean, double sd)
{
    double const z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * pi));
}

// Channel density by brute-force integration over the Cartesian displacement,
// with h_pg = A0 exp(-2 r^2 / w_z^2) and a turbulence density f_a.
template<class Fa>
double cartesian_oracle(double h, LinkGeometry const& g, UavStability const& s, double scale,
                        Fa&& f_a)
{
    auto const c = derive_constants(g, s);
    double const sx = std::sqrt(c.sigma_dx2);
    double const sy = std::sqrt(c.sigma_dy2);
    double const w2 = c.w_z * c.w_z;
    return scale * oracle::composite_gl(
               [&](double dx) {
                   return normal_pdf(dx, c.mean_dx, sx)
                          * oracle::composite_gl(
                              [&](double dy) {
                                  double const top = c.a0 * g.h_l
                                                     * std::exp(-2.0 * (dx * dx + dy * dy) / w2);
                                  return normal_pdf(dy, c.mean_dy, sy) * f_a(h / top) / top;
                              },
                              c.mean_dy - 10.0 * sy, c.mean_dy + 10.0 * sy, 24);
               },
               c.mean_dx - 10.0 * sx, c.mean_dx + 10.0 * sx, 24);
}

// Same for an isotropic (Rician) displacement, integrated over r.
template<class Fa>
double rician_oracle(double h, LinkGeometry const& g, UavStability const& s, double scale,
                     Fa&& f_a, double a_max = INFINITY)
{
    auto const c = derive_constants(g, s);
    double const sd2 = c.sigma_d2;
    double const w2 = c.w_z * c.w_z;
    double const r_hi = c.r_o + 14.0 * std::sqrt(sd2);
    return scale * oracle::composite_gl(
               [&](double r) {
                   double const z = r * c.r_o / sd2;
                   double const rice = r / sd2 * std::exp(-(r - c.r_o) * (r - c.r_o) / (2.0 * sd2))
                                       * std::exp(-z) * std::cyl_bessel_i(0.0, z);
                   double const top = c.a0 * g.h_l * std::exp(-2.0 * r * r / w2);
                   double const a = h / top;
                   return a > a_max ? 0.0 : rice * f_a(a) / top;
               },
               0.0, r_hi, 60);
}

// Points of a log-spaced grid lying inside the central 90% of the
// continuous mass of p.
std::vector<double> central_points(ChannelPdf const& p, int n = 60)
{
    auto const& r = p.range();
    int const fine = 4000;
    std::vector<double> t(fine), cum(fine, 0.0);
    for (int i = 0; i < fine; ++i)
        t[i] = r.log_lo + (r.log_hi - r.log_lo) * i / (fine - 1.0);
    for (int i = 1; i < fine; ++i)
    {
        double const a = std::exp(t[i - 1]);
        double const b = std::exp(t[i]);
        cum[i] = cum[i - 1] + 0.5 * (p.density(a) * a + p.density(b) * b) * (t[i] - t[i - 1]);
    }
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < fine; ++i)
    {
        if (cum[i] < 0.05 * cum.back())
            lo = t[i];
        if (cum[i] <= 0.95 * cum.back())
            hi = t[i];
    }
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(std::exp(lo + (hi - lo) * (i + 0.5) / n));
    return out;
}

double max_rel_diff(ChannelPdf const& a, ChannelPdf const& b, std::vector<double> const& h)
{
    double worst = 0.0;
    for (double x : h)
        worst = std::max(worst, std::abs(a.density(x) - b.density(x)) / b.density(x));
    return worst;
}

}  // namespace

TEST(ProbR, Limits)
{
    auto const s = moderate();
    EXPECT_NEAR(prob_r(s, 1.0, 10), 1.0, 1e-6);
    EXPECT_EQ(prob_r(s, 0.0, 10), 0.0);
    EXPECT_THROW(prob_r(s, 0.01, 0), std::invalid_argument);
}

TEST(ProbR, MonotoneInFieldOfView)
{
    auto const s = high_boresight();
    double prev = 0.0;
    for (double fov = 0.5e-3; fov < 60e-3; fov += 0.5e-3)
    {
        double const r = prob_r(s, fov, 10);
        EXPECT_GE(r, prev - 1e-15);
        prev = r;
    }
}

TEST(ProbR, ConvergesOnDoublingLadder)
{
    auto const s = high_boresight();
    double const fov = 20e-3;
    double prev_gap = INFINITY;
    double prev = prob_r(s, fov, 5);
    for (int n = 10; n <= 2560; n *= 2)
    {
        double const cur = prob_r(s, fov, n);
        double const gap = std::abs(cur - prev);
        EXPECT_LE(gap, prev_gap);
        prev_gap = gap;
        prev = cur;
    }
    // The outer staircase has an O(1/N') bias.
    EXPECT_LT(prev_gap, 5e-4);
    EXPECT_LT(std::abs(prob_r(s, fov, 2560) - prob_r(s, fov, 5120)), 0.6 * prev_gap);
}

TEST(ProbR, MatchesMonteCarloFieldOfViewMass)
{
    auto const s = moderate();
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> n01;
    int const n = 1000000;
    double const fov = 8e-3;
    int inside = 0;
    for (int i = 0; i < n; ++i)
    {
        double const x = s.theta_tx + s.theta_rx + std::hypot(s.sigma_txo, s.sigma_rxo) * n01(rng);
        double const y = s.theta_ty + s.theta_ry + std::hypot(s.sigma_tyo, s.sigma_ryo) * n01(rng);
        inside += std::hypot(x, y) < fov;
    }
    double const p_hat = static_cast<double>(inside) / n;
    double const r = prob_r(s, fov, 4000);
    double const sigma = std::sqrt(p_hat * (1.0 - p_hat) / n);
    EXPECT_LT(std::abs(r - p_hat), 3.0 * sigma);
    // The staircase covers the disk from outside, so coarse N' overestimates.
    EXPECT_GT(prob_r(s, fov, 10), r);
}

TEST(MarcumMass, Boundaries)
{
    EXPECT_NEAR(marcum_mass(5e-3, 0.0, 3e-3, 3e-3), 1.0, 1e-12);
    double const s2 = 3e-3 * 3e-3 + 4e-3 * 4e-3;
    EXPECT_NEAR(marcum_mass(0.0, 10e-3, 3e-3, 4e-3), std::exp(-1e-4 / (2.0 * s2)), 1e-12);
}

TEST(MarcumMass, AgreesWithStaircaseInIsotropicCase)
{
    auto const s = isotropic(4.0, 5.0);
    auto const c = derive_constants(LinkGeometry{}, s);
    for (double fov : {10e-3, 30e-3, 40e-3})
    {
        double const m = marcum_mass(c.theta_d, fov, std::sqrt(c.sigma_to2), std::sqrt(c.sigma_ro2));
        EXPECT_LT(std::abs(m - (1.0 - prob_r(s, fov, 50))), 5e-3) << fov;
    }
    // Where the FOV edge cuts the bulk of the AoA law the N' = 50 staircase
    // bias alone is larger than 5e-3; a fine staircase closes the gap.
    for (double fov : {15e-3, 20e-3})
    {
        double const m = marcum_mass(c.theta_d, fov, std::sqrt(c.sigma_to2), std::sqrt(c.sigma_ro2));
        EXPECT_LT(std::abs(m - (1.0 - prob_r(s, fov, 20000))), 5e-5) << fov;
    }
}

TEST(DerivedConstants, RayleighScaleReducesToVariance)
{
    auto s = stability(4, 4, 3, 3, 0, 0, 0, 0);
    s.sigma_typ = s.sigma_txp;
    s.sigma_ryp = s.sigma_rxp;
    auto const c = derive_constants(LinkGeometry{}, s);
    EXPECT_NEAR(c.sigma_m2, c.sigma_dx2, 1e-12 * c.sigma_dx2);
    EXPECT_NEAR(c.a0, 2.0 * 0.05 * 0.05 / (c.w_z * c.w_z), 1e-15);
    EXPECT_NEAR(c.tau1, c.w_z * c.w_z / (4.0 * c.sigma_m2), 1e-12);
}

TEST(LogPowerExpIntegral, MatchesQuadrature)
{
    for (int k : {0, 1, 3, 7, 10})
        for (double lam : {-40.0, -5.0, -0.3, -1e-9, 0.0, 1e-9, 0.7, 3.0, 12.0})
            for (double u : {0.05, 1.0, 4.0})
            {
                double const ref = oracle::tanh_sinh(
                    [&](double x) { return std::pow(x, k) * std::exp(lam * x); }, 0.0, u, 1e-13);
                double const got = std::exp(detail::log_power_exp_integral(k, lam, u));
                EXPECT_NEAR(got, ref, 1e-11 * ref) << k << " " << lam << " " << u;
            }
}

TEST(CalibrateSeries, MonotoneInTolerance)
{
    auto const m = strong();
    auto const loose = calibrate_series(m, 5e-2);
    auto const mid = calibrate_series(m, 1e-3);
    auto const tight = calibrate_series(m, 1e-4);
    EXPECT_LE(loose.m_terms, mid.m_terms);
    EXPECT_LE(mid.m_terms, tight.m_terms);
    EXPECT_LE(loose.h_m, mid.h_m);
    EXPECT_LE(mid.h_m, tight.h_m);
    EXPECT_NEAR(gg_cdf(mid.h_m, m), 1.0 - 1e-3, 1e-8);
    EXPECT_THROW(calibrate_series(m, 0.2), std::invalid_argument);
    // The Bessel-K power series is a difference of two terms of size
    // exp(2 sqrt(ab h)); below about 1e-4 double precision cannot follow the
    // density out to the required h_m.
    EXPECT_THROW(calibrate_series(m, 1e-5), std::runtime_error);
}

TEST(CalibrateSeries, SeriesReproducesBesselDensity)
{
    auto const m = strong();
    double const eps = 1e-3;
    auto const cal = calibrate_series(m, eps);
    double peak = 0.0;
    std::vector<double> a;
    for (int i = 0; i < 300; ++i)
        a.push_back(cal.h_m * std::pow(1e-6, 1.0 - i / 299.0));
    for (double x : a)
        peak = std::max(peak, gg_pdf_ref(x, m));
    for (double x : a)
        EXPECT_LT(std::abs(detail::gg_series_pdf(x, m, cal.m_terms) - gg_pdf_ref(x, m)), eps * peak)
            << x;
}

TEST(Normalization, LogNormalModels)
{
    LinkGeometry g;
    auto const m = weak();
    for (auto const& s : {moderate(), high_boresight()})
    {
        EXPECT_NEAR(pdf_theorem2(g, s, m).continuous_mass() + pdf_theorem2(g, s, m).p_zero(), 1.0, 1e-3);
        auto const t3 = pdf_theorem3(g, s, m);
        EXPECT_NEAR(t3.continuous_mass() + t3.p_zero(), 1.0, 1e-3);
    }
    for (double sigma : {4.0, 6.0})
    {
        auto const t4 = pdf_theorem4(g, isotropic(sigma, 5.0), m);
        EXPECT_NEAR(t4.continuous_mass() + t4.p_zero(), 1.0, 1e-3) << sigma;
    }
    // Inside its validity region the truncated closed form keeps the mass.
    auto const p1 = pdf_prop1(g, isotropic(6.0, 1.0), m);
    EXPECT_NEAR(p1.continuous_mass() + p1.p_zero(), 1.0, 1e-3);
}

TEST(Normalization, GammaGammaModels)
{
    LinkGeometry g;
    auto const m = strong();
    auto const t5 = pdf_theorem5(g, moderate(), m);
    EXPECT_NEAR(t5.continuous_mass() + t5.p_zero(), 1.0, 1e-3);
    auto const t6 = pdf_theorem6(g, moderate(), m);
    EXPECT_NEAR(t6.continuous_mass() + t6.p_zero(), 1.0, 1e-2);
    auto const t7 = pdf_theorem7(g, isotropic(5.0, 2.0), m);
    EXPECT_NEAR(t7.continuous_mass() + t7.p_zero(), 1.0, 1e-2);
}

TEST(Theorem2, MatchesCartesianOracle)
{
    LinkGeometry g;
    auto const s = high_boresight();
    auto const m = weak();
    auto const pdf = pdf_theorem2(g, s, m);
    double const r = prob_r(s, g.theta_fov, 10);
    for (double h : central_points(pdf, 5))
    {
        double const ref = cartesian_oracle(h, g, s, r, [&](double a) { return ln_pdf(a, m); });
        EXPECT_NEAR(pdf.density(h), ref, 1e-6 * ref) << h;
    }
}

TEST(Theorem2, ReducesToTheorem3WithoutBoresight)
{
    LinkGeometry g;
    auto s = stability(4, 4, 3, 3, 0, 0, 0, 0);
    s.sigma_typ = s.sigma_txp;
    s.sigma_ryp = s.sigma_rxp;
    auto const m = weak();
    auto const t2 = pdf_theorem2(g, s, m);
    auto const t3 = pdf_theorem3(g, s, m);
    EXPECT_LT(max_rel_diff(t2, t3, central_points(t3)), 1e-2);
}

TEST(Theorem3, MatchesExponentialMixtureOracle)
{
    LinkGeometry g;
    auto const s = moderate();
    auto const m = weak();
    auto const pdf = pdf_theorem3(g, s, m);
    auto const c = derive_constants(g, s);
    double const r = prob_r(s, g.theta_fov, 10);
    for (double h : {1e-6, 1e-5, 3e-5, 7e-5, 1e-4, 2e-4})
    {
        double const y = h / (c.a0 * g.h_l);
        double const ref = r / (c.a0 * g.h_l) * oracle::tanh_sinh(
            [&](double u) {
                return c.tau1 * std::exp(-c.tau1 * u) * ln_pdf(y * std::exp(u), m) * std::exp(u);
            },
            0.0, 60.0);
        EXPECT_NEAR(pdf.density(h), ref, 1e-8 * ref) << h;
    }
}

TEST(Theorem3, BoresightFlag)
{
    LinkGeometry g;
    EXPECT_TRUE(pdf_theorem3(g, moderate(), weak()).validity_flags().empty());
    EXPECT_FALSE(pdf_theorem3(g, high_boresight(), weak()).validity_flags().empty());
}

TEST(Theorem4, MatchesRicianOracle)
{
    LinkGeometry g;
    auto const m = weak();
    auto const s = isotropic(4.0, 5.0);
    ModelOptions o;
    o.k_terms = 40;
    auto const pdf = pdf_theorem4(g, s, m, o);
    for (double h : central_points(pdf, 8))
    {
        double const ref = rician_oracle(h, g, s, 1.0 - pdf.p_zero(),
                                         [&](double a) { return ln_pdf(a, m); });
        EXPECT_NEAR(pdf.density(h), ref, 1e-6 * ref) << h;
    }
}

TEST(Theorem4, ContinuousAtSplicePoint)
{
    LinkGeometry g;
    auto const m = weak();
    auto const s = isotropic(4.0, 5.0);
    auto const c = derive_constants(g, s);
    auto const pdf = pdf_theorem4(g, s, m);
    double const q2 = std::log(c.a0 * g.h_l) + 2.0 * m.mu_l - 4.0 * m.sigma_l2 * c.tau;
    double const below = pdf.density(std::exp(q2 - 1e-12));
    double const above = pdf.density(std::exp(q2 + 1e-12));
    EXPECT_NEAR(below, above, 1e-9 * above);
}

TEST(Theorem4, ZeroBoresightKeepsOnlyFirstTerm)
{
    LinkGeometry g;
    auto const m = weak();
    auto const s = isotropic(4.0, 0.0);
    ModelOptions one;
    one.k_terms = 1;
    ModelOptions many;
    many.k_terms = 30;
    auto const a = pdf_theorem4(g, s, m, one);
    auto const b = pdf_theorem4(g, s, m, many);
    for (double h : central_points(a, 10))
        EXPECT_EQ(a.density(h), b.density(h));
}

TEST(Prop1, EqualsSecondOrderTheorem4)
{
    LinkGeometry g;
    auto const m = weak();
    ModelOptions o;
    o.k_terms = 2;
    for (auto const& s : {isotropic(4.0, 5.0), isotropic(6.0, 5.0), isotropic(5.0, 1.0)})
    {
        auto const p = pdf_prop1(g, s, m);
        auto const t = pdf_theorem4(g, s, m, o);
        EXPECT_LT(max_rel_diff(p, t, central_points(t, 30)), 1e-9);
    }
}

TEST(Prop1, ZeroBoresightDegeneratesToKernel)
{
    LinkGeometry g;
    auto const m = weak();
    auto const s = isotropic(4.0, 0.0);
    ModelOptions o;
    o.k_terms = 1;
    auto const p = pdf_prop1(g, s, m);
    auto const t = pdf_theorem4(g, s, m, o);
    EXPECT_LT(max_rel_diff(p, t, central_points(t, 30)), 1e-9);
    EXPECT_TRUE(p.validity_flags().empty());
}

TEST(Prop1, CloseToTheorem4DeepInsideValidityRegion)
{
    LinkGeometry g;
    auto const m = weak();
    auto const s = isotropic(6.0, 1.0);
    ModelOptions o;
    o.k_terms = 30;
    auto const t = pdf_theorem4(g, s, m, o);
    EXPECT_LT(max_rel_diff(pdf_prop1(g, s, m), t, central_points(t)), 5e-2);
}

TEST(Prop1, FlagsOutsideValidityRegion)
{
    LinkGeometry g;
    auto const flags = pdf_prop1(g, isotropic(4.0, 5.0), weak()).validity_flags();
    EXPECT_TRUE(std::any_of(flags.begin(), flags.end(),
                            [](auto const& f) { return f.find("prop1") != std::string::npos; }));
}

TEST(Theorem5, MatchesCartesianOracle)
{
    LinkGeometry g;
    auto const s = high_boresight();
    auto const m = strong();
    auto const pdf = pdf_theorem5(g, s, m);
    double const r = prob_r(s, g.theta_fov, 10);
    for (double h : central_points(pdf, 5))
    {
        double const ref = cartesian_oracle(h, g, s, r, [&](double a) { return gg_pdf_ref(a, m); });
        EXPECT_NEAR(pdf.density(h), ref, 1e-6 * ref) << h;
    }
}

TEST(Theorem6, MatchesLiteralSeries)
{
    LinkGeometry g;
    auto const s = moderate();
    auto const m = strong();
    ModelOptions o;
    o.m_terms = 25;
    o.h_m = 8.0;
    auto const pdf = pdf_theorem6(g, s, m, o);
    for (double h : central_points(pdf, 20))
    {
        double const lit = detail::theorem6_literal(h, g, s, m, 25, 8.0, 10);
        // Both forms inherit the cancellation of the Bessel-K power series.
        EXPECT_NEAR(pdf.density(h), lit, 1e-5 * std::abs(lit)) << h;
    }
}

TEST(Theorem6, MatchesTruncatedMixtureOracle)
{
    LinkGeometry g;
    auto const s = moderate();
    auto const m = strong();
    auto const pdf = pdf_theorem6(g, s, m);
    auto const cal = calibrate_series(m, 1e-3);
    auto const c = derive_constants(g, s);
    double const r = prob_r(s, g.theta_fov, 10);
    for (double h : central_points(pdf, 10))
    {
        double const y = h / (c.a0 * g.h_l);
        double const ref = r / (c.a0 * g.h_l) * oracle::tanh_sinh(
            [&](double u) {
                return c.tau1 * std::exp(-c.tau1 * u) * gg_pdf_ref(y * std::exp(u), m) * std::exp(u);
            },
            0.0, std::log(cal.h_m / y));
        EXPECT_NEAR(pdf.density(h), ref, 5e-3 * ref) << h;
    }
}

TEST(Theorem6, AgreesWithTheorem5WithoutBoresight)
{
    LinkGeometry g;
    auto s = stability(4, 4, 3, 3, 0, 0, 0, 0);
    s.sigma_typ = s.sigma_txp;
    s.sigma_ryp = s.sigma_rxp;
    auto const m = strong();
    auto const t5 = pdf_theorem5(g, s, m);
    auto const t6 = pdf_theorem6(g, s, m);
    EXPECT_LT(max_rel_diff(t6, t5, central_points(t5)), 2e-2);
}

TEST(Theorem6, LiteralRejectsVanishingDenominator)
{
    LinkGeometry g;
    auto const s = moderate();
    auto m = strong();
    auto const c = derive_constants(g, s);
    m.beta = c.tau1 - 1.0;  // m = 1 hits zero
    EXPECT_THROW(detail::theorem6_literal(1e-5, g, s, m, 5, 8.0, 10), std::domain_error);
    // The stable form takes the limit instead.
    ModelOptions o;
    o.m_terms = 20;
    o.h_m = 8.0;
    EXPECT_GT(pdf_theorem6(g, s, m, o).density(1e-5), 0.0);
}

TEST(Theorem7, MatchesLiteralSeries)
{
    LinkGeometry g;
    auto const s = isotropic(5.0, 2.0);
    auto const m = strong();
    ModelOptions o;
    o.m_terms = 25;
    o.h_m = 8.0;
    auto const pdf = pdf_theorem7(g, s, m, o);
    for (double h : central_points(pdf, 20))
    {
        double const lit = detail::theorem7_literal(h, g, s, m, 25, o.k_terms, 8.0);
        EXPECT_NEAR(pdf.density(h), lit, 1e-5 * std::abs(lit)) << h;
    }
}

TEST(Theorem7, MatchesRicianOracle)
{
    LinkGeometry g;
    auto const s = isotropic(5.0, 2.0);
    auto const m = strong();
    auto const cal = calibrate_series(m, 1e-4);
    ModelOptions o;
    o.series_eps = 1e-4;
    o.k_terms = 30;
    auto const pdf = pdf_theorem7(g, s, m, o);
    for (double h : central_points(pdf, 10))
    {
        double const ref = rician_oracle(h, g, s, 1.0 - pdf.p_zero(),
                                         [&](double a) { return gg_pdf_ref(a, m); }, cal.h_m);
        EXPECT_NEAR(pdf.density(h), ref, 1e-3 * ref) << h;
    }
}

TEST(Theorem7, ZeroBoresightCollapsesSeries)
{
    LinkGeometry g;
    auto const s = isotropic(5.0, 0.0);
    auto const m = strong();
    ModelOptions one;
    one.k_terms = 1;
    ModelOptions many;
    many.k_terms = 20;
    auto const a = pdf_theorem7(g, s, m, one);
    auto const b = pdf_theorem7(g, s, m, many);
    for (double h : central_points(a, 10))
        EXPECT_EQ(a.density(h), b.density(h));
}

TEST(Densities, NonNegativeOnGrid)
{
    LinkGeometry g;
    std::vector<ChannelPdf> pdfs{
        pdf_theorem2(g, high_boresight(), weak()), pdf_theorem3(g, high_boresight(), weak()),
        pdf_theorem4(g, isotropic(4.0, 5.0), weak()), pdf_prop1(g, isotropic(6.0, 5.0), weak()),
        pdf_theorem5(g, high_boresight(), strong()), pdf_theorem6(g, high_boresight(), strong()),
        pdf_theorem7(g, isotropic(5.0, 6.0), strong())};
    for (auto const& p : pdfs)
    {
        auto const& r = p.range();
        for (int i = 0; i < 1000; ++i)
        {
            double const h = std::exp(r.log_lo + (r.log_hi - r.log_lo) * i / 999.0);
            EXPECT_GE(p.density(h), 0.0);
        }
        EXPECT_EQ(p.negative_clamped(), 0u) << to_string(p.tag());
    }
}

TEST(Densities, SeriesSupportIsBounded)
{
    LinkGeometry g;
    auto const m = strong();
    auto const c = derive_constants(g, moderate());
    auto const cal = calibrate_series(m, 1e-3);
    auto const t6 = pdf_theorem6(g, moderate(), m);
    EXPECT_NEAR(t6.h_max(), c.a0 * g.h_l * cal.h_m, 1e-12);
    EXPECT_GT(t6.density(0.99 * t6.h_max()), 0.0);
    EXPECT_EQ(t6.density(1.01 * t6.h_max()), 0.0);
    auto const t7 = pdf_theorem7(g, isotropic(5.0, 2.0), m);
    EXPECT_EQ(t7.density(1.01 * t7.h_max()), 0.0);
    EXPECT_EQ(pdf_theorem3(g, moderate(), weak()).density(-1.0), 0.0);
}

TEST(BuildModel, RejectsMismatchedTurbulence)
{
    LinkGeometry g;
    EXPECT_THROW(build_model(ModelTag::theorem5, g, moderate(), lognormal_from_rytov(0.2)),
                 std::invalid_argument);
    EXPECT_THROW(build_model(ModelTag::theorem3, g, moderate(), gg_from_rytov(2.0)),
                 std::invalid_argument);
    EXPECT_EQ(build_model(ModelTag::theorem3, g, moderate(), lognormal_from_rytov(0.2)).tag(),
              ModelTag::theorem3);
}

TEST(BuildModel, RejectsDegenerateInputs)
{
    LinkGeometry g;
    UavStability zero;
    EXPECT_THROW(pdf_theorem2(g, zero, weak()), std::invalid_argument);
    EXPECT_THROW(pdf_theorem3(g, moderate(), LogNormal{0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(pdf_theorem4(g, isotropic(4.0, 5.0), weak(), ModelOptions{10, 0}),
                 std::invalid_argument);
}
