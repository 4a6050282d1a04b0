#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uavfso/analytic.hpp"
#include "uavfso/specfun.hpp"

namespace uavfso {
namespace {

// P(lo < X < hi) for X ~ N(mean, sd^2); sd = 0 is a point mass.
double interval_prob(double lo, double hi, double mean, double sd)
{
    if (sd == 0.0)
        return (mean > lo && mean < hi) ? 1.0 : 0.0;
    return specfun::q_function((lo - mean) / sd) - specfun::q_function((hi - mean) / sd);
}

bool differs_by_more_than(double a, double b, double rel)
{
    double const top = std::max(std::abs(a), std::abs(b));
    return top > 0.0 && std::abs(a - b) > rel * top;
}

}  // namespace

void UavStability::validate() const
{
    auto check = [](double v, char const* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("stability.") + name
                                        + " must be non-negative and finite");
    };
    check(sigma_txo, "sigma_txo");
    check(sigma_tyo, "sigma_tyo");
    check(sigma_rxo, "sigma_rxo");
    check(sigma_ryo, "sigma_ryo");
    check(sigma_txp, "sigma_txp");
    check(sigma_typ, "sigma_typ");
    check(sigma_rxp, "sigma_rxp");
    check(sigma_ryp, "sigma_ryp");
    for (double t : {theta_tx, theta_ty, theta_rx, theta_ry})
        if (!std::isfinite(t))
            throw std::invalid_argument("stability: boresight angles must be finite");
}

DerivedConstants derive_constants(LinkGeometry const& g, UavStability const& s)
{
    DerivedConstants c{};
    c.w_z = beam_width_at_rx(g);
    c.a0 = a0(g, c.w_z);
    double const z2 = g.z * g.z;
    c.sigma_dx2 = z2 * s.sigma_txo * s.sigma_txo + s.sigma_txp * s.sigma_txp
                  + s.sigma_rxp * s.sigma_rxp;
    c.sigma_dy2 = z2 * s.sigma_tyo * s.sigma_tyo + s.sigma_typ * s.sigma_typ
                  + s.sigma_ryp * s.sigma_ryp;
    c.mean_dx = g.z * s.theta_tx;
    c.mean_dy = g.z * s.theta_ty;
    double const sx4 = c.sigma_dx2 * c.sigma_dx2;
    double const sy4 = c.sigma_dy2 * c.sigma_dy2;
    c.sigma_m2 = std::cbrt((3.0 * c.mean_dx * c.mean_dx * sx4 + 3.0 * c.mean_dy * c.mean_dy * sy4
                            + sx4 * c.sigma_dx2 + sy4 * c.sigma_dy2)
                           / 2.0);
    c.sigma_to2 = 0.5 * (s.sigma_txo * s.sigma_txo + s.sigma_tyo * s.sigma_tyo);
    c.sigma_ro2 = 0.5 * (s.sigma_rxo * s.sigma_rxo + s.sigma_ryo * s.sigma_ryo);
    c.sigma_d2 = 0.5 * (c.sigma_dx2 + c.sigma_dy2);
    c.r_o = std::hypot(c.mean_dx, c.mean_dy);
    c.theta_d = std::hypot(s.theta_tx + s.theta_rx, s.theta_ty + s.theta_ry);
    double const wz2 = c.w_z * c.w_z;
    c.tau = c.sigma_d2 > 0.0 ? wz2 / (4.0 * c.sigma_d2) : INFINITY;
    c.tau1 = c.sigma_m2 > 0.0 ? wz2 / (4.0 * c.sigma_m2) : INFINITY;
    return c;
}

double prob_r(UavStability const& s, double theta_fov, int n_prime)
{
    if (n_prime < 1)
        throw std::invalid_argument("prob_r: N' must be at least 1");
    if (!(theta_fov > 0.0))
        return 0.0;
    double const mx = s.theta_tx + s.theta_rx;
    double const my = s.theta_ty + s.theta_ry;
    double const sx = std::hypot(s.sigma_txo, s.sigma_rxo);
    double const sy = std::hypot(s.sigma_tyo, s.sigma_ryo);
    double const step = theta_fov / n_prime;
    double total = 0.0;
    for (int n = 1; n <= n_prime; ++n)
    {
        double const y_in = step * (n - 1);
        double const y_out = step * n;
        double const half = std::sqrt(std::max(0.0, theta_fov * theta_fov - y_in * y_in));
        double const px = interval_prob(-half, half, mx, sx);
        double const py = interval_prob(y_in, y_out, my, sy) + interval_prob(-y_out, -y_in, my, sy);
        total += px * py;
    }
    return std::clamp(total, 0.0, 1.0);
}

double marcum_mass(double theta_d, double theta_fov, double sigma_to, double sigma_ro)
{
    double const s = std::hypot(sigma_to, sigma_ro);
    if (s == 0.0)
        return theta_d >= theta_fov ? 1.0 : 0.0;
    return specfun::marcum_q1(theta_d / s, theta_fov / s);
}

bool boresight_condition_violated(UavStability const& s)
{
    double const bx = s.theta_tx + s.theta_rx;
    double const by = s.theta_ty + s.theta_ry;
    double const vx = s.sigma_txo * s.sigma_txo + s.sigma_rxo * s.sigma_rxo;
    double const vy = s.sigma_tyo * s.sigma_tyo + s.sigma_ryo * s.sigma_ryo;
    return bx * bx + by * by > 9.0 * std::max(vx, vy);
}

std::vector<std::string> isotropy_warnings(UavStability const& s)
{
    std::vector<std::string> out;
    if (differs_by_more_than(s.sigma_txo, s.sigma_tyo, 0.1))
        out.emplace_back("sigma_txo and sigma_tyo differ by more than 10%; isotropic model uses their RMS");
    if (differs_by_more_than(s.sigma_rxo, s.sigma_ryo, 0.1))
        out.emplace_back("sigma_rxo and sigma_ryo differ by more than 10%; isotropic model uses their RMS");
    return out;
}

}  // namespace uavfso
