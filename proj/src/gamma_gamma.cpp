#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavfso/quadrature.hpp"
#include "uavfso/specfun.hpp"
#include "uavfso/turbulence.hpp"

namespace uavfso {

std::pair<double, double> plane_wave_gg_mapping(double rytov)
{
    double const s125 = std::pow(rytov, 1.2);  // sigma_R^{12/5}
    double const alpha
        = 1.0 / (std::exp(0.49 * rytov / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0)) - 1.0);
    double const beta
        = 1.0 / (std::exp(0.51 * rytov / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0)) - 1.0);
    return {alpha, beta};
}

TurbulenceModel gamma_gamma_model(double alpha, double beta, double rytov)
{
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("turbulence: alpha and beta must be positive and finite");
    TurbulenceModel m{GammaGamma{alpha, beta}, rytov, {}};
    auto& gg = std::get<GammaGamma>(m.law);
    if (gg.alpha < gg.beta)
    {
        std::swap(gg.alpha, gg.beta);
        m.warnings.emplace_back("alpha < beta given; swapped (the law is symmetric)");
    }
    if (std::abs(std::sin(std::numbers::pi * (gg.alpha - gg.beta))) < 1e-3)
    {
        gg.beta += 1e-3;
        m.warnings.emplace_back("alpha - beta is near an integer; beta perturbed by 1e-3");
    }
    return m;
}

TurbulenceModel gg_from_rytov(double rytov, GgMapping const& mapping)
{
    if (!(rytov > 0.0) || !std::isfinite(rytov))
        throw std::invalid_argument("turbulence.rytov_variance must be positive for Gamma-Gamma");
    auto const [alpha, beta] = mapping(rytov);
    auto m = gamma_gamma_model(alpha, beta, rytov);
    if (rytov < 0.5)
        m.warnings.insert(m.warnings.begin(),
                          "Rytov variance " + std::to_string(rytov)
                              + " is below the moderate/strong regime (>= 0.5) for Gamma-Gamma");
    return m;
}

double gg_log_pdf(double h_a, GammaGamma const& m)
{
    if (!(h_a > 0.0))
        throw specfun::DomainError("gg_pdf: h_a must be positive");
    double const ab = m.alpha * m.beta;
    double const k = specfun::bessel_k(m.alpha - m.beta, 2.0 * std::sqrt(ab * h_a));
    return std::log(2.0) + 0.5 * (m.alpha + m.beta) * std::log(ab) - std::lgamma(m.alpha)
           - std::lgamma(m.beta) + (0.5 * (m.alpha + m.beta) - 1.0) * std::log(h_a)
           + std::log(k);
}

double gg_pdf(double h_a, GammaGamma const& m)
{
    return std::exp(gg_log_pdf(h_a, m));
}

double gg_cdf(double h_a, GammaGamma const& m)
{
    if (h_a <= 0.0)
        return 0.0;
    // P(X Y <= h) = E_Y[ P(alpha, alpha h / Y) ] with Y ~ Gamma(beta, 1/beta),
    // integrated over s = ln Y.
    double const b = m.beta;
    double const lnorm = b * std::log(b) - std::lgamma(b);
    auto f = [&](double s) {
        double const y = std::exp(s);
        double const w = std::exp(lnorm + b * s - b * y);
        if (w == 0.0)
            return 0.0;
        return w * specfun::gamma_p(m.alpha, m.alpha * h_a / y);
    };
    double const s_lo = -45.0 / b;
    double const s_hi = std::log(60.0 / b + 60.0);
    quad::Tolerance tol{1e-14, 1e-11, 2000};
    double const v = quad::integrate_or_throw(f, s_lo, s_hi, tol, "gg_cdf: quadrature failed");
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace uavfso
