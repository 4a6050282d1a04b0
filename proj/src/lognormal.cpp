#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavfso/specfun.hpp"
#include "uavfso/turbulence.hpp"

namespace uavfso {

TurbulenceModel lognormal_model(double sigma_l2)
{
    if (!(sigma_l2 >= 0.0) || !std::isfinite(sigma_l2))
        throw std::invalid_argument("turbulence.sigma_l2 must be non-negative");
    TurbulenceModel m{LogNormal{sigma_l2, -sigma_l2}, 0.0, {}};
    if (sigma_l2 == 0.0)
        m.warnings.emplace_back("sigma_l2 = 0: turbulence is degenerate (h_a = 1)");
    return m;
}

TurbulenceModel lognormal_from_rytov(double rytov)
{
    if (!(rytov >= 0.0) || !std::isfinite(rytov))
        throw std::invalid_argument("turbulence.rytov_variance must be non-negative");
    auto m = lognormal_model(rytov / 4.0);
    m.rytov = rytov;
    if (rytov > 0.5)
        m.warnings.emplace_back("Rytov variance " + std::to_string(rytov)
                                + " is outside the weak-turbulence regime (< 0.5) for the log-normal law");
    return m;
}

double lognormal_pdf(double h_a, LogNormal const& m)
{
    if (!(h_a > 0.0))
        throw specfun::DomainError("lognormal_pdf: h_a must be positive");
    if (!(m.sigma_l2 > 0.0))
        throw specfun::DomainError("lognormal_pdf: degenerate law has no density");
    double const s = std::sqrt(m.sigma_l2);
    double const z = std::log(h_a) - 2.0 * m.mu_l;
    return std::exp(-z * z / (8.0 * m.sigma_l2))
           / (2.0 * h_a * s * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(double h_a, LogNormal const& m)
{
    if (h_a <= 0.0)
        return 0.0;
    if (m.sigma_l2 == 0.0)
        return h_a >= 1.0 ? 1.0 : 0.0;
    double const s = std::sqrt(m.sigma_l2);
    return specfun::q_function(-(std::log(h_a) - 2.0 * m.mu_l) / (2.0 * s));
}

}  // namespace uavfso
