#include "uavfso/turbulence.hpp"

#include <cmath>

namespace uavfso {

double turbulence_pdf(double h_a, TurbulenceModel const& m)
{
    if (m.is_lognormal())
        return lognormal_pdf(h_a, m.lognormal());
    return gg_pdf(h_a, m.gamma_gamma());
}

double turbulence_cdf(double h_a, TurbulenceModel const& m)
{
    if (m.is_lognormal())
        return lognormal_cdf(h_a, m.lognormal());
    return gg_cdf(h_a, m.gamma_gamma());
}

double draw_turbulence(TurbulenceModel const& m, std::mt19937_64& rng)
{
    if (m.is_lognormal())
    {
        auto const& ln = m.lognormal();
        if (ln.sigma_l2 == 0.0)
            return 1.0;
        std::normal_distribution<double> n(2.0 * ln.mu_l, 2.0 * std::sqrt(ln.sigma_l2));
        return std::exp(n(rng));
    }
    auto const& gg = m.gamma_gamma();
    std::gamma_distribution<double> x(gg.alpha, 1.0 / gg.alpha);
    std::gamma_distribution<double> y(gg.beta, 1.0 / gg.beta);
    return x(rng) * y(rng);
}

std::vector<double> sample_turbulence(TurbulenceModel const& m, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out)
        v = draw_turbulence(m, rng);
    return out;
}

}  // namespace uavfso
