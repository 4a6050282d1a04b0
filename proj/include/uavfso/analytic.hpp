// Analytical channel models for UAV-to-UAV optical links with nonzero
// boresight pointing errors.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavfso/channel_pdf.hpp"
#include "uavfso/geometry.hpp"
#include "uavfso/turbulence.hpp"

namespace uavfso {

// Fluctuation standard deviations and boresight (mean) angles of Tx and Rx.
struct UavStability
{
    // orientation std devs (rad)
    double sigma_txo = 0.0, sigma_tyo = 0.0, sigma_rxo = 0.0, sigma_ryo = 0.0;
    // position std devs (m)
    double sigma_txp = 0.0, sigma_typ = 0.0, sigma_rxp = 0.0, sigma_ryp = 0.0;
    // boresight angles (rad)
    double theta_tx = 0.0, theta_ty = 0.0, theta_rx = 0.0, theta_ry = 0.0;

    void validate() const;
};

struct DerivedConstants
{
    double w_z;
    double a0;           // 2 r_a^2 / w_z^2 (also called kappa)
    double sigma_dx2;    // Z^2 sigma_txo^2 + sigma_txp^2 + sigma_rxp^2
    double sigma_dy2;
    double mean_dx;      // Z theta'_tx
    double mean_dy;
    double sigma_m2;     // Beckmann -> Rayleigh scale
    double sigma_d2;     // isotropic displacement variance
    double sigma_to2;    // isotropic orientation variances
    double sigma_ro2;
    double r_o;          // boresight displacement
    double theta_d;      // boresight angle of arrival
    double tau;          // w_z^2 / (4 sigma_d^2)
    double tau1;         // w_z^2 / (4 sigma_m^2)
};

DerivedConstants derive_constants(LinkGeometry const& g, UavStability const& s);

// Probability that the AoA stays inside the field of view, from a staircase
// of n_prime strips covering the FOV disk.
double prob_r(UavStability const& s, double theta_fov, int n_prime);

// Probability that a Rician AoA leaves the field of view.
double marcum_mass(double theta_d, double theta_fov, double sigma_to, double sigma_ro);

// Truncation of the Bessel-K series inside the Gamma-Gamma density.
struct SeriesCalibration
{
    int m_terms;  // highest series index M
    double h_m;   // upper truncation of h_a
};

SeriesCalibration calibrate_series(GammaGamma const& m, double eps);

struct ModelOptions
{
    int n_prime = 10;
    int k_terms = 10;
    // Unset: calibrate_series(series_eps).
    std::optional<int> m_terms;
    std::optional<double> h_m;
    double series_eps = 1e-3;
};

// Validity conditions quoted with the closed forms.
bool boresight_condition_violated(UavStability const& s);
std::vector<std::string> isotropy_warnings(UavStability const& s);

ChannelPdf pdf_theorem2(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                        ModelOptions const& o = {});
ChannelPdf pdf_theorem3(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                        ModelOptions const& o = {});
ChannelPdf pdf_theorem4(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                        ModelOptions const& o = {});
ChannelPdf pdf_prop1(LinkGeometry const& g, UavStability const& s, LogNormal const& m,
                     ModelOptions const& o = {});
ChannelPdf pdf_theorem5(LinkGeometry const& g, UavStability const& s, GammaGamma const& m,
                        ModelOptions const& o = {});
ChannelPdf pdf_theorem6(LinkGeometry const& g, UavStability const& s, GammaGamma const& m,
                        ModelOptions const& o = {});
ChannelPdf pdf_theorem7(LinkGeometry const& g, UavStability const& s, GammaGamma const& m,
                        ModelOptions const& o = {});

// Dispatch on tag; throws std::invalid_argument when the turbulence law does
// not match the model.
ChannelPdf build_model(ModelTag tag, LinkGeometry const& g, UavStability const& s,
                       TurbulenceModel const& t, ModelOptions const& o = {});

namespace detail {

// Term-by-term transcriptions of the printed series, kept for cross-checks.
// They divide by (m + beta - tau), etc., and throw std::domain_error naming
// the offending index when such a denominator is within 1e-8 of zero.
double theorem6_literal(double h, LinkGeometry const& g, UavStability const& s,
                        GammaGamma const& m, int m_terms, double h_m, int n_prime);
double theorem7_literal(double h, LinkGeometry const& g, UavStability const& s,
                        GammaGamma const& m, int m_terms, int k_terms, double h_m);

// int_0^U u^k exp(lambda u) du without cancellation; returns its logarithm.
double log_power_exp_integral(int k, double lambda, double u_upper);
// log sum_k exp(log_a[k]) int_0^U u^k exp(lambda u) du
double log_weighted_power_exp_integrals(std::vector<double> const& log_a, double lambda,
                                        double u_upper);

// Gamma-Gamma density from its Bessel-K power series truncated at order M.
double gg_series_pdf(double a, GammaGamma const& m, int m_terms);

}  // namespace detail

}  // namespace uavfso
