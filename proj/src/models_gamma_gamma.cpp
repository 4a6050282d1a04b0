// Channel models with Gamma-Gamma turbulence.
#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "model_common.hpp"
#include "uavfso/quadrature.hpp"
#include "uavfso/specfun.hpp"

namespace uavfso {
namespace {

using detail::kNegInf;
using detail::kPi;

// The Bessel-K series carry about 1e-7 relative cancellation noise.
constexpr double kSeriesQuadRel = 1e-6;

void require_non_integer_order(GammaGamma const& m, char const* who)
{
    if (std::abs(std::sin(kPi * (m.alpha - m.beta))) < 1e-12)
        throw std::invalid_argument(std::string(who)
                                    + ": alpha - beta must be non-integer for the series form");
}

// Coefficients of the Bessel-K power series of the Gamma-Gamma density,
//   f(a) = C sum_m [ (ab)^{m+beta} a^{m+beta-1} / (Gamma(m-nu+1) m!)
//                  - (ab)^{m+alpha} a^{m+alpha-1} / (Gamma(m+nu+1) m!) ],
// C = pi / (Gamma(alpha) Gamma(beta) sin(pi nu)), nu = alpha - beta.
struct GgSeries
{
    double alpha, beta, log_ab;
    double log_c, sign_c;
    std::vector<detail::RecipGamma> r_beta, r_alpha;
    std::vector<double> log_fact;

    GgSeries(GammaGamma const& m, int m_terms)
        : alpha(m.alpha), beta(m.beta), log_ab(std::log(m.alpha * m.beta))
    {
        double const nu = alpha - beta;
        double const sn = std::sin(kPi * nu);
        log_c = std::log(kPi) - std::lgamma(alpha) - std::lgamma(beta) - std::log(std::abs(sn));
        sign_c = sn < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i <= m_terms; ++i)
        {
            r_beta.push_back(detail::recip_gamma(i - nu + 1.0));
            r_alpha.push_back(detail::recip_gamma(i + nu + 1.0));
            log_fact.push_back(std::lgamma(i + 1.0));
        }
    }

    int m_terms() const { return static_cast<int>(log_fact.size()) - 1; }

    // log magnitude and sign of the (ab)^p / (Gamma(.) m!) coefficient; side 0
    // is the beta branch (positive), side 1 the alpha branch (negative).
    void coefficient(int i, int side, double& p, double& log_mag, double& sign) const
    {
        auto const& r = side == 0 ? r_beta[i] : r_alpha[i];
        p = i + (side == 0 ? beta : alpha);
        log_mag = p * log_ab + r.log_mag - log_fact[i];
        sign = (side == 0 ? 1.0 : -1.0) * r.sign;
    }
};

// Largest exponent among the terms with lambda = m + beta - gamma or
// m + alpha - gamma close to zero, reported as a flag.
std::vector<std::string> exponent_flags(GgSeries const& series, double gamma, char const* who)
{
    std::vector<std::string> out;
    std::ostringstream neg;
    int count = 0;
    for (int i = 0; i <= series.m_terms(); ++i)
        for (double base : {series.beta, series.alpha})
        {
            double const lam = i + base - gamma;
            if (lam <= 0.0)
            {
                if (count++ == 0)
                    neg << who << ": non-positive exponent m + " << (base == series.beta ? "beta" : "alpha")
                        << " - " << gamma << " = " << lam << " at m = " << i;
            }
        }
    if (count > 0)
    {
        neg << " (" << count << " term(s) evaluated with the signed exponential integral)";
        out.push_back(neg.str());
    }
    return out;
}

struct SeriesChoice
{
    int m_terms;
    double h_m;
};

SeriesChoice resolve_series(GammaGamma const& m, ModelOptions const& o)
{
    if (o.m_terms && o.h_m)
        return {*o.m_terms, *o.h_m};
    auto const cal = calibrate_series(m, o.series_eps);
    return {o.m_terms.value_or(cal.m_terms), o.h_m.value_or(cal.h_m)};
}

void check_series_choice(SeriesChoice const& c)
{
    if (c.m_terms < 0)
        throw std::invalid_argument("series order M must be non-negative");
    if (!(c.h_m > 0.0) || !std::isfinite(c.h_m))
        throw std::invalid_argument("series truncation h_m must be positive and finite");
}

std::vector<std::string> boresight_flags(UavStability const& s)
{
    std::vector<std::string> flags;
    if (boresight_condition_violated(s))
        flags.emplace_back(
            "boresight: (theta'_tx+theta'_rx)^2 + (theta'_ty+theta'_ry)^2 exceeds 9 max(sigma_xo^2, "
            "sigma_yo^2); the Rayleigh approximation is expected to deviate");
    return flags;
}

std::vector<double> rician_weights(DerivedConstants const& c, int k_terms)
{
    double const base = c.r_o * c.r_o * c.w_z * c.w_z / (8.0 * c.sigma_d2 * c.sigma_d2);
    if (base == 0.0)
        return {0.0};  // only k = 0 survives without boresight
    std::vector<double> log_a(static_cast<std::size_t>(k_terms) + 1, kNegInf);
    for (int k = 0; k <= k_terms; ++k)
    {
        if (k == 0)
            log_a[0] = 0.0;
        else if (base > 0.0)
            log_a[k] = k * std::log(base) - 2.0 * std::lgamma(k + 1.0);
    }
    return log_a;
}

}  // namespace

namespace detail {

// log sum_k exp(log_a[k]) int_0^U u^k e^{lambda u} du. All terms are
// positive; when lambda U >= K + 1 one recurrence serves every k.
double log_weighted_power_exp_integrals(std::vector<double> const& log_a, double lambda, double u)
{
    if (!(u > 0.0))
        return kNegInf;
    int const k_max = static_cast<int>(log_a.size()) - 1;
    double const x = lambda * u;
    if (x >= k_max + 1.0)
    {
        double const lu = std::log(u);
        double f = -std::expm1(-x) / x;
        double top = kNegInf;
        for (int k = 0; k <= k_max; ++k)
            top = std::max(top, log_a[k] + (k + 1) * lu);
        double sum = 0.0;
        for (int k = 0; k <= k_max; ++k)
        {
            if (k > 0)
                f = 1.0 / x - (k / x) * f;
            if (log_a[k] != kNegInf)
                sum += std::exp(log_a[k] + (k + 1) * lu - top) * f;
        }
        return x + top + std::log(sum);
    }
    SignedLogSum sum;
    for (int k = 0; k <= k_max; ++k)
        if (log_a[k] != kNegInf)
            sum.add(log_a[k] + log_power_exp_integral(k, lambda, u), 1.0);
    return std::log(sum.value());
}

double log_power_exp_integral(int k, double lambda, double u_upper)
{
    if (k < 0)
        throw std::invalid_argument("log_power_exp_integral: k must be non-negative");
    if (!(u_upper > 0.0))
        return kNegInf;
    // int_0^U u^k e^{lambda u} du = U^{k+1} J_k(lambda U),  J_k(x) = int_0^1 t^k e^{x t} dt
    double const x = lambda * u_upper;
    double const kp1 = k + 1.0;
    double log_j;
    if (x >= kp1)
    {
        double f = -std::expm1(-x) / x;
        for (int j = 1; j <= k; ++j)
            f = 1.0 / x - (j / x) * f;
        log_j = x + std::log(f);
    }
    else if (x >= -1.0)
    {
        double term = 1.0;  // x^n / n!
        double sum = 1.0 / kp1;
        for (int n = 1; n < 500; ++n)
        {
            term *= x / n;
            double const t = term / (n + kp1);
            sum += t;
            if (std::abs(t) <= 1e-17 * std::abs(sum))
                break;
        }
        log_j = std::log(sum);
    }
    else
    {
        log_j = std::log(specfun::gamma_lower(kp1, -x)) - kp1 * std::log(-x);
    }
    return kp1 * std::log(u_upper) + log_j;
}

double gg_series_pdf(double a, GammaGamma const& m, int m_terms)
{
    if (!(a > 0.0))
        return 0.0;
    require_non_integer_order(m, "gg_series_pdf");
    GgSeries const series(m, m_terms);
    SignedLogSum sum;
    double const la = std::log(a);
    for (int i = 0; i <= m_terms; ++i)
        for (int side = 0; side < 2; ++side)
        {
            double p, lm, sg;
            series.coefficient(i, side, p, lm, sg);
            sum.add(lm + (p - 1.0) * la, sg);
        }
    return series.sign_c * std::exp(series.log_c) * sum.value();
}

double theorem6_literal(double h, LinkGeometry const& g, UavStability const& s,
                        GammaGamma const& m, int m_terms, double h_m, int n_prime)
{
    auto const c = derive_constants(g, s);
    double const r = prob_r(s, g.theta_fov, n_prime);
    double const y = h / (c.a0 * g.h_l);
    if (!(y > 0.0) || y > h_m)
        return 0.0;
    double const nu = m.alpha - m.beta;
    double const ab = m.alpha * m.beta;
    double const t1 = c.tau1;
    double const pre = r * t1 / (c.a0 * g.h_l) * kPi
                       / (std::tgamma(m.alpha) * std::tgamma(m.beta) * std::sin(kPi * nu));
    double sum = 0.0;
    for (int i = 0; i <= m_terms; ++i)
    {
        double const fact = std::tgamma(i + 1.0);
        double const k1 = i + m.beta - t1;
        double const k2 = i + m.alpha - t1;
        if (std::abs(k1) < 1e-8)
            throw std::domain_error("theorem6: m + beta - tau1 vanishes at m = " + std::to_string(i));
        if (std::abs(k2) < 1e-8)
            throw std::domain_error("theorem6: m + alpha - tau1 vanishes at m = " + std::to_string(i));
        double const b1 = std::pow(ab, i + m.beta) / (std::tgamma(i - nu + 1.0) * fact);
        double const b2 = std::pow(ab, i + m.alpha) / (std::tgamma(i + nu + 1.0) * fact);
        sum += b1 * (std::pow(h_m, k1) * std::pow(y, t1 - 1.0) - std::pow(y, i + m.beta - 1.0)) / k1;
        sum -= b2 * (std::pow(h_m, k2) * std::pow(y, t1 - 1.0) - std::pow(y, i + m.alpha - 1.0)) / k2;
    }
    return pre * sum;
}

double theorem7_literal(double h, LinkGeometry const& g, UavStability const& s,
                        GammaGamma const& m, int m_terms, int k_terms, double h_m)
{
    auto const c = derive_constants(g, s);
    double const p0 = marcum_mass(c.theta_d, g.theta_fov, std::sqrt(c.sigma_to2),
                                  std::sqrt(c.sigma_ro2));
    double const y = h / (c.a0 * g.h_l);
    if (!(y > 0.0) || y > h_m)
        return 0.0;
    double const nu = m.alpha - m.beta;
    double const ab = m.alpha * m.beta;
    double const gamma = c.tau;
    double const u = std::log(h_m / y);
    double const pre = (1.0 - p0) * gamma * std::exp(-c.r_o * c.r_o / (2.0 * c.sigma_d2))
                       / (c.a0 * g.h_l) * kPi
                       / (std::tgamma(m.alpha) * std::tgamma(m.beta) * std::sin(kPi * nu));
    double const base = c.r_o * c.r_o * c.w_z * c.w_z / (8.0 * c.sigma_d2 * c.sigma_d2);
    double sum = 0.0;
    for (int k = 0; k <= k_terms; ++k)
    {
        double const kf = std::tgamma(k + 1.0);
        double const a_k = std::pow(base, k) / (kf * kf);
        if (a_k == 0.0)
            continue;
        for (int i = 0; i <= m_terms; ++i)
        {
            double const fact = std::tgamma(i + 1.0);
            for (int side = 0; side < 2; ++side)
            {
                double const p = i + (side == 0 ? m.beta : m.alpha);
                double const lam = p - gamma;
                if (std::abs(lam) < 1e-8)
                    throw std::domain_error("theorem7: m + " + std::string(side == 0 ? "beta" : "alpha")
                                            + " - tau vanishes at m = " + std::to_string(i));
                double const coef = std::pow(ab, p)
                                    / (std::tgamma(side == 0 ? i - nu + 1.0 : i + nu + 1.0) * fact);
                // int_0^U u^k e^{lam u} du expanded by repeated integration by parts
                double inner = 0.0;
                for (int j = 0; j <= k; ++j)
                    inner += ((j % 2 == 0) ? 1.0 : -1.0) * kf / std::tgamma(k - j + 1.0)
                             * std::pow(u, k - j) / std::pow(lam, j + 1);
                double const tail = ((k % 2 == 0) ? 1.0 : -1.0) * kf / std::pow(lam, k + 1);
                double const term = std::pow(h_m, lam) * std::pow(y, gamma - 1.0) * inner
                                    - std::pow(y, p - 1.0) * tail;
                sum += (side == 0 ? 1.0 : -1.0) * a_k * coef * term;
            }
        }
    }
    return pre * sum;
}

}  // namespace detail

SeriesCalibration calibrate_series(GammaGamma const& m, double eps)
{
    if (!(eps > 0.0) || !(eps < 0.1))
        throw std::invalid_argument("calibrate_series: eps must lie in (0, 0.1)");
    require_non_integer_order(m, "calibrate_series");

    // h_m: smallest value with CDF >= 1 - eps.
    double lo = 0.0;
    double hi = 1.0;
    while (gg_cdf(hi, m) < 1.0 - eps)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6)
            throw std::runtime_error("calibrate_series: could not bracket h_m");
    }
    while (hi - lo > 1e-10 * hi)
    {
        double const mid = 0.5 * (lo + hi);
        if (gg_cdf(mid, m) >= 1.0 - eps)
            hi = mid;
        else
            lo = mid;
    }
    double const h_m = hi;

    // M: smallest order whose partial sum tracks the density within eps * peak.
    constexpr int kMaxTerms = 200;
    constexpr int kGrid = 400;
    GgSeries const series(m, kMaxTerms);
    std::vector<double> a(kGrid), target(kGrid), partial(kGrid, 0.0);
    double peak = 0.0;
    for (int i = 0; i < kGrid; ++i)
    {
        a[i] = h_m * std::pow(1e-6, 1.0 - static_cast<double>(i) / (kGrid - 1));
        target[i] = gg_pdf(a[i], m);
        peak = std::max(peak, target[i]);
    }
    double const c = series.sign_c * std::exp(series.log_c);
    for (int order = 0; order <= kMaxTerms; ++order)
    {
        double worst = 0.0;
        for (int i = 0; i < kGrid; ++i)
        {
            double const la = std::log(a[i]);
            for (int side = 0; side < 2; ++side)
            {
                double p, lm, sg;
                series.coefficient(order, side, p, lm, sg);
                if (lm != kNegInf)
                    partial[i] += c * sg * std::exp(lm + (p - 1.0) * la);
            }
            worst = std::max(worst, std::abs(partial[i] - target[i]));
        }
        if (worst < eps * peak)
            return {order, h_m};
    }
    throw std::runtime_error("calibrate_series: series did not converge by M = 200");
}

ChannelPdf pdf_theorem5(LinkGeometry const& g, UavStability const& s, GammaGamma const& m,
                        ModelOptions const& o)
{
    g.validate();
    s.validate();
    auto const c = derive_constants(g, s);
    auto const kernel = std::make_shared<detail::BeckmannKernel const>(c);
    double const r = prob_r(s, g.theta_fov, o.n_prime);
    double const top = std::log(c.a0 * g.h_l);
    double const u_max = kernel->x_max() * kernel->x_max();
    double const ab = m.alpha * m.beta;
    double const la_lo = -40.0 / m.beta;
    double const la_hi = std::log(600.0 / ab);
    auto const log_gg = std::make_shared<detail::ChebyshevTable const>(
        [&](double v) { return gg_log_pdf(std::exp(v), m); }, la_lo, la_hi, 1e-11);

    auto density = [=](double h) {
        double const ly = std::log(h) - top;
        // h_a = y e^u must stay inside the range carrying the Gamma-Gamma mass.
        double const lo = std::max(0.0, la_lo - ly);
        double const hi = std::min(u_max, la_hi - ly);
        if (!(hi > lo))
            return 0.0;
        auto f = [&](double u) {
            return std::exp(kernel->log_c1_g_u(u) + (*log_gg)(ly + u) + u);
        };
        quad::Tolerance tol{0.0, 1e-9, 400};
        double const v = quad::integrate_or_throw(f, lo, hi, tol, "theorem5: quadrature failed");
        return r * v / (c.a0 * g.h_l);
    };
    return ChannelPdf(ModelTag::theorem5, 1.0 - r, INFINITY, density,
                      detail::gamma_gamma_range(c, g, m), {});
}

ChannelPdf pdf_theorem6(LinkGeometry const& g, UavStability const& s, GammaGamma const& m,
                        ModelOptions const& o)
{
    g.validate();
    s.validate();
    require_non_integer_order(m, "theorem6");
    auto const c = derive_constants(g, s);
    if (!(c.sigma_m2 > 0.0))
        throw std::invalid_argument("theorem6: displacement scale sigma_m must be positive");
    auto const choice = resolve_series(m, o);
    check_series_choice(choice);
    auto const series = std::make_shared<GgSeries const>(m, choice.m_terms);
    double const r = prob_r(s, g.theta_fov, o.n_prime);
    double const scale = c.a0 * g.h_l;
    double const t1 = c.tau1;
    double const log_pre = std::log(r) + std::log(t1) - std::log(scale) + series->log_c;
    double const h_m = choice.h_m;

    auto density = [=](double h) {
        double const y = h / scale;
        if (y > h_m)
            return 0.0;
        double const u = std::log(h_m / y);
        double const ly = std::log(y);
        detail::SignedLogSum sum;
        for (int i = 0; i <= series->m_terms(); ++i)
            for (int side = 0; side < 2; ++side)
            {
                double p, lm, sg;
                series->coefficient(i, side, p, lm, sg);
                sum.add(lm + (p - 1.0) * ly + detail::log_power_exp_integral(0, p - t1, u), sg);
            }
        return series->sign_c * std::exp(log_pre) * sum.value();
    };
    auto flags = boresight_flags(s);
    for (auto& f : exponent_flags(*series, t1, "theorem6"))
        flags.push_back(std::move(f));
    ChannelPdf pdf(ModelTag::theorem6, 1.0 - r, scale * h_m, density,
                   detail::gamma_gamma_range(c, g, m), std::move(flags));
    pdf.set_quadrature_rel_tol(kSeriesQuadRel);
    return pdf;
}

ChannelPdf pdf_theorem7(LinkGeometry const& g, UavStability const& s, GammaGamma const& m,
                        ModelOptions const& o)
{
    g.validate();
    s.validate();
    require_non_integer_order(m, "theorem7");
    if (o.k_terms < 1)
        throw std::invalid_argument("theorem7: K must be at least 1");
    auto const c = derive_constants(g, s);
    detail::require_displacement(c);
    auto const choice = resolve_series(m, o);
    check_series_choice(choice);
    auto const series = std::make_shared<GgSeries const>(m, choice.m_terms);
    double const p0 = marcum_mass(c.theta_d, g.theta_fov, std::sqrt(c.sigma_to2),
                                  std::sqrt(c.sigma_ro2));
    double const scale = c.a0 * g.h_l;
    double const gamma = c.tau;
    double const log_pre = std::log1p(-p0) + std::log(gamma) - c.r_o * c.r_o / (2.0 * c.sigma_d2)
                           - std::log(scale) + series->log_c;
    auto const log_a = rician_weights(c, o.k_terms);
    double const h_m = choice.h_m;

    auto density = [=](double h) {
        double const y = h / scale;
        if (y > h_m)
            return 0.0;
        double const u = std::log(h_m / y);
        double const ly = std::log(y);
        detail::SignedLogSum sum;
        for (int i = 0; i <= series->m_terms(); ++i)
            for (int side = 0; side < 2; ++side)
            {
                double p, lm, sg;
                series->coefficient(i, side, p, lm, sg);
                sum.add(lm + (p - 1.0) * ly
                            + detail::log_weighted_power_exp_integrals(log_a, p - gamma, u),
                        sg);
            }
        return series->sign_c * std::exp(log_pre) * sum.value();
    };
    auto flags = isotropy_warnings(s);
    for (auto& f : exponent_flags(*series, gamma, "theorem7"))
        flags.push_back(std::move(f));
    ChannelPdf pdf(ModelTag::theorem7, p0, scale * h_m, density,
                   detail::gamma_gamma_range(c, g, m), std::move(flags));
    pdf.set_quadrature_rel_tol(kSeriesQuadRel);
    return pdf;
}

ChannelPdf build_model(ModelTag tag, LinkGeometry const& g, UavStability const& s,
                       TurbulenceModel const& t, ModelOptions const& o)
{
    bool const wants_ln = tag == ModelTag::theorem2 || tag == ModelTag::theorem3
                          || tag == ModelTag::theorem4 || tag == ModelTag::prop1;
    if (wants_ln != t.is_lognormal())
        throw std::invalid_argument(to_string(tag) + " requires "
                                    + (wants_ln ? "log-normal" : "Gamma-Gamma") + " turbulence");
    switch (tag)
    {
        case ModelTag::theorem2: return pdf_theorem2(g, s, t.lognormal(), o);
        case ModelTag::theorem3: return pdf_theorem3(g, s, t.lognormal(), o);
        case ModelTag::theorem4: return pdf_theorem4(g, s, t.lognormal(), o);
        case ModelTag::prop1: return pdf_prop1(g, s, t.lognormal(), o);
        case ModelTag::theorem5: return pdf_theorem5(g, s, t.gamma_gamma(), o);
        case ModelTag::theorem6: return pdf_theorem6(g, s, t.gamma_gamma(), o);
        case ModelTag::theorem7: return pdf_theorem7(g, s, t.gamma_gamma(), o);
    }
    throw std::invalid_argument("unknown model tag");
}

}  // namespace uavfso
