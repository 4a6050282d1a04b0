// Atmospheric turbulence fading laws (unit-mean conventions throughout).
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace uavfso {

// h_a = exp(2X), X ~ N(mu_l, sigma_l2), with mu_l = -sigma_l2 so E[h_a] = 1.
struct LogNormal
{
    double sigma_l2 = 0.05;
    double mu_l = -0.05;
};

// Product of unit-mean Gamma(alpha) and Gamma(beta) variates.
struct GammaGamma
{
    double alpha = 4.0;
    double beta = 1.7;
};

struct TurbulenceModel
{
    std::variant<LogNormal, GammaGamma> law;
    double rytov = 0.0;  // provenance; 0 when parameters were given directly
    std::vector<std::string> warnings;

    bool is_lognormal() const { return std::holds_alternative<LogNormal>(law); }
    LogNormal const& lognormal() const { return std::get<LogNormal>(law); }
    GammaGamma const& gamma_gamma() const { return std::get<GammaGamma>(law); }
};

// sigma_R^2 -> (alpha, beta)
using GgMapping = std::function<std::pair<double, double>(double)>;

// Plane-wave scintillation mapping (the default strategy).
std::pair<double, double> plane_wave_gg_mapping(double rytov);

TurbulenceModel lognormal_from_rytov(double rytov);
TurbulenceModel lognormal_model(double sigma_l2);
TurbulenceModel gg_from_rytov(double rytov, GgMapping const& mapping = plane_wave_gg_mapping);
// Orders the pair so that alpha >= beta and nudges beta when alpha - beta is
// within reach of an integer.
TurbulenceModel gamma_gamma_model(double alpha, double beta, double rytov = 0.0);

double lognormal_pdf(double h_a, LogNormal const& m);
double lognormal_cdf(double h_a, LogNormal const& m);
double gg_pdf(double h_a, GammaGamma const& m);
double gg_log_pdf(double h_a, GammaGamma const& m);
double gg_cdf(double h_a, GammaGamma const& m);

double turbulence_pdf(double h_a, TurbulenceModel const& m);
double turbulence_cdf(double h_a, TurbulenceModel const& m);

// One draw from the fading law. sigma_l2 == 0 returns exactly 1.
double draw_turbulence(TurbulenceModel const& m, std::mt19937_64& rng);

std::vector<double> sample_turbulence(TurbulenceModel const& m, std::size_t n, std::uint64_t seed);

}  // namespace uavfso
