#include "uavfso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "uavfso/quadrature.hpp"
#include "uavfso/specfun.hpp"

namespace uavfso {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, char const* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("geometry.") + name + " must be positive and finite");
}

// Angular measure of the circle of radius rho (about the Airy centre) that
// lies inside the detector disk of radius r whose centre is at distance d.
double arc_inside(double rho, double d, double r)
{
    if (rho + d <= r)
        return 2.0 * kPi;
    if (rho >= r + d || rho <= d - r)
        return 0.0;
    double const c = (rho * rho + d * d - r * r) / (2.0 * rho * d);
    return 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
}

// Above this argument J1(t)^2 is replaced by its ring average; the neglected
// oscillating part contributes O(1/t^2).
constexpr double kRingAverageFrom = 2000.0;

}  // namespace

void LinkGeometry::validate() const
{
    require_positive(z, "z");
    require_positive(r_a, "r_a");
    require_positive(r_ap, "r_ap");
    require_positive(w_0, "w_0");
    require_positive(lambda, "lambda");
    require_positive(d_f, "d_f");
    require_positive(n_f, "n_f");
    require_positive(theta_fov, "theta_fov");
    if (!(cn2 >= 0.0) || !std::isfinite(cn2))
        throw std::invalid_argument("geometry.cn2 must be non-negative and finite");
    if (!(h_l > 0.0 && h_l <= 1.0))
        throw std::invalid_argument("geometry.h_l must lie in (0, 1]");
}

double beam_width_at_rx(LinkGeometry const& g)
{
    double const k = 2.0 * kPi / g.lambda;
    double const diffraction = g.lambda * g.z / (kPi * g.w_0 * g.w_0);
    double turb = 0.0;
    if (g.cn2 > 0.0 && g.z > 0.0)
    {
        double const rho0_sq = std::pow(0.55 * g.cn2 * k * k * g.z, -6.0 / 5.0);
        turb = 2.0 * g.w_0 * g.w_0 / rho0_sq;
    }
    return g.w_0 * std::sqrt(1.0 + (1.0 + turb) * diffraction * diffraction);
}

double a0(LinkGeometry const& g, double w_z)
{
    return 2.0 * g.r_a * g.r_a / (w_z * w_z);
}

double radial_displacement(PointingState const& p, double z)
{
    double const dx = z * p.theta_tx + p.x_tx + p.x_rx;
    double const dy = z * p.theta_ty + p.y_ty + p.y_ry;
    return std::hypot(dx, dy);
}

double radial_displacement_exact(PointingState const& p, double z)
{
    double const dx = z * std::tan(p.theta_tx) + p.x_tx + p.x_rx;
    double const dy = z * std::tan(p.theta_ty) + p.y_ty + p.y_ry;
    return std::hypot(dx, dy);
}

double aoa(PointingState const& p)
{
    return std::hypot(p.theta_tx + p.theta_rx, p.theta_ty + p.theta_ry);
}

double aoa_exact(PointingState const& p)
{
    return std::atan(std::hypot(std::tan(p.theta_tx + p.theta_rx),
                                std::tan(p.theta_ty + p.theta_ry)));
}

double hpg_exact(double dx, double dy, double r_a, double w_z)
{
    if (!(w_z > 0.0) || !(r_a > 0.0))
        throw std::invalid_argument("hpg_exact: r_a and w_z must be positive");
    double const inv_w2 = 1.0 / (w_z * w_z);
    double const norm = 2.0 / (kPi * w_z * w_z);
    quad::Tolerance inner_tol{0.0, 1e-11, 400};
    quad::Tolerance outer_tol{0.0, 1e-10, 400};
    // Substituting y = r_a sin(t) removes the square-root endpoint behaviour
    // of the chord length.
    auto outer = [&](double t) {
        double const y = r_a * std::sin(t);
        double const half = r_a * std::cos(t);
        if (half <= 0.0)
            return 0.0;
        double const ey = std::exp(-2.0 * (y + dy) * (y + dy) * inv_w2);
        if (ey == 0.0)
            return 0.0;
        auto inner = [&](double x) { return std::exp(-2.0 * (x + dx) * (x + dx) * inv_w2); };
        double const ix = quad::integrate_or_throw(inner, -half, half, inner_tol,
                                                   "hpg_exact: inner quadrature failed");
        return ix * ey * half;
    };
    return norm * quad::integrate_or_throw(outer, -0.5 * kPi, 0.5 * kPi, outer_tol,
                                           "hpg_exact: outer quadrature failed");
}

double hpg_exact(PointingState const& p, LinkGeometry const& g, double w_z)
{
    double const dx = g.z * p.theta_tx + p.x_tx + p.x_rx;
    double const dy = g.z * p.theta_ty + p.y_ty + p.y_ry;
    return hpg_exact(dx, dy, g.r_a, w_z);
}

double hpg_approx(double r_d, double w_z, double r_a)
{
    return 2.0 * r_a * r_a / (w_z * w_z) * std::exp(-2.0 * r_d * r_d / (w_z * w_z));
}

double hpa_exact_offset(double offset, LinkGeometry const& g)
{
    double const a = kPi / (g.lambda * g.n_f);
    double const r = g.r_ap;
    double const d = std::abs(offset);
    // Power inside the circle of radius rho about the Airy centre is
    // 1 - J0(a rho)^2 - J1(a rho)^2.
    double full = 0.0;
    double rho_lo = d - r;
    if (d < r)
    {
        double const t = a * (r - d);
        double const j0 = specfun::bessel_j0(t);
        double const j1 = specfun::bessel_j1(t);
        full = 1.0 - j0 * j0 - j1 * j1;
        rho_lo = r - d;
    }
    double const rho_hi = r + d;
    double const t_lo = a * rho_lo;
    double const t_hi = a * rho_hi;
    if (t_hi <= t_lo)
        return std::clamp(full, 0.0, 1.0);

    auto arc = [&](double t) { return arc_inside(t / a, d, r); };
    quad::Tolerance tol{1e-15, 1e-11, 200};

    double partial = 0.0;
    double const t_mid = std::clamp(kRingAverageFrom, t_lo, t_hi);
    if (t_mid > t_lo)
    {
        auto f = [&](double t) {
            double const j1 = specfun::bessel_j1(t);
            return j1 * j1 / t * arc(t);
        };
        // Panels of width pi keep each piece to about one oscillation.
        double left = t_lo;
        while (left < t_mid)
        {
            double const right = std::min(t_mid, left + kPi);
            partial += quad::integrate_or_throw(f, left, right, tol,
                                                "hpa_exact: quadrature failed");
            left = right;
        }
    }
    if (t_hi > t_mid)
    {
        auto f = [&](double t) {
            return (1.0 + 0.375 / (t * t)) / (kPi * t * t) * arc(t);
        };
        partial += quad::integrate_or_throw(f, t_mid, t_hi, tol, "hpa_exact: quadrature failed");
    }
    return std::clamp(full + partial / kPi, 0.0, 1.0);
}

double hpa_exact(double theta_sum_x, double theta_sum_y, LinkGeometry const& g)
{
    double const offset = g.d_f * std::hypot(std::tan(theta_sum_x), std::tan(theta_sum_y));
    return hpa_exact_offset(offset, g);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0)
{
    std::size_t const n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("MonotoneCubic: need at least two matching knots");
    std::vector<double> slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        double const h = x_[i + 1] - x_[i];
        if (!(h > 0.0))
            throw std::invalid_argument("MonotoneCubic: knots must be strictly increasing");
        slope[i] = (y_[i + 1] - y_[i]) / h;
    }
    d_[0] = slope[0];
    d_[n - 1] = slope[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        if (slope[i - 1] * slope[i] <= 0.0)
        {
            d_[i] = 0.0;
            continue;
        }
        double const h0 = x_[i] - x_[i - 1];
        double const h1 = x_[i + 1] - x_[i];
        double const w1 = 2.0 * h1 + h0;
        double const w2 = h1 + 2.0 * h0;
        d_[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
    }
}

double MonotoneCubic::operator()(double x) const
{
    if (x <= x_.front())
        return y_.front();
    if (x >= x_.back())
        return y_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t const i = static_cast<std::size_t>(it - x_.begin()) - 1;
    double const h = x_[i + 1] - x_[i];
    double const t = (x - x_[i]) / h;
    double const t2 = t * t;
    double const t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i]
           + (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

HpgTable::HpgTable(double r_a, double w_z, double r_max, std::size_t n_knots) : r_max_(r_max)
{
    if (n_knots < 2)
        throw std::invalid_argument("HpgTable: need at least two knots");
    std::vector<double> s(n_knots), v(n_knots);
    double const s_max = r_max * r_max;
    for (std::size_t i = 0; i < n_knots; ++i)
    {
        s[i] = s_max * static_cast<double>(i) / static_cast<double>(n_knots - 1);
        v[i] = std::log(hpg_exact(std::sqrt(s[i]), 0.0, r_a, w_z));
    }
    tail_slope_ = (v[n_knots - 1] - v[n_knots - 2]) / (s[n_knots - 1] - s[n_knots - 2]);
    ln_h_ = MonotoneCubic(std::move(s), std::move(v));
}

double HpgTable::operator()(double r_d) const
{
    double const s = r_d * r_d;
    if (s > ln_h_.back_x())
        return std::exp(ln_h_.back_y() + tail_slope_ * (s - ln_h_.back_x()));
    return std::exp(ln_h_(s));
}

HpaTable::HpaTable(LinkGeometry const& g, std::size_t n_knots)
    : d_f_(g.d_f), r_ap_(g.r_ap), scale_(g.lambda * g.n_f)
{
    if (n_knots < 2)
        throw std::invalid_argument("HpaTable: need at least two knots");
    double const off_max = 10.0 * g.r_ap;
    u_lo_ = std::asinh(-g.r_ap / scale_);
    u_hi_ = std::asinh((off_max - g.r_ap) / scale_);
    std::vector<double> u(n_knots), v(n_knots);
    for (std::size_t i = 0; i < n_knots; ++i)
    {
        u[i] = u_lo_ + (u_hi_ - u_lo_) * static_cast<double>(i) / static_cast<double>(n_knots - 1);
        double const off = std::max(0.0, r_ap_ + scale_ * std::sinh(u[i]));
        v[i] = hpa_exact_offset(off, g);
    }
    tail_coeff_ = v.back() * off_max * off_max * off_max;
    h_ = MonotoneCubic(std::move(u), std::move(v));
}

double HpaTable::operator()(double theta_a) const
{
    double const off = d_f_ * std::tan(std::abs(theta_a));
    double const u = std::asinh((off - r_ap_) / scale_);
    if (u >= u_hi_)
        return tail_coeff_ / (off * off * off);
    return h_(u);
}

RadialTables build_radial_tables(LinkGeometry const& g, double w_z, std::size_t n_knots,
                                 double r_max)
{
    if (n_knots < 64)
        throw std::invalid_argument("build_radial_tables: n_knots must be at least 64");
    if (!(r_max > 0.0))
        r_max = 8.0 * w_z;
    return {HpgTable(g.r_a, w_z, r_max, n_knots), HpaTable(g, n_knots)};
}

}  // namespace uavfso
