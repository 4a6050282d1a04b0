// Internal helpers shared by the analytic model builders.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "uavfso/analytic.hpp"

namespace uavfso::detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Piecewise Chebyshev interpolant of a smooth function on [a, b]. Panels are
// bisected until the fit matches f to `tol` between the nodes.
class ChebyshevTable
{
  public:
    ChebyshevTable() = default;
    ChebyshevTable(std::function<double(double)> const& f, double a, double b, double tol);

    double operator()(double x) const;
    std::size_t panels() const { return start_.size(); }

  private:
    static constexpr int kOrder = 16;
    std::vector<double> start_, width_, coef_;

    static double clenshaw(double const* c, double t);
};

// Angular part of the Beckmann-distributed displacement, in the variable
// x = sqrt(2) r_d / w_z = sqrt(ln(A0 / h_pg)):
//   f_x(x) = 2 c1 x g(x),  g(x) = int_0^{2 pi} exp(c3(phi) x^2 + c2(phi) x) dphi.
class BeckmannKernel
{
  public:
    explicit BeckmannKernel(DerivedConstants const& c);

    // ln(c1) + ln g(x)
    double log_c1_g(double x) const;
    // ln(c1) + ln g(sqrt(u)) for u in [0, x_max^2]. g is even in x, so this is
    // smooth in u and read from a piecewise Chebyshev table.
    double log_c1_g_u(double u) const { return table_(u); }
    // Largest x with non-negligible displacement probability.
    double x_max() const { return x_max_; }
    double x_bulk() const { return x_bulk_; }

  private:
    static constexpr int kNodes = 1024;
    double log_c1_;
    double x_max_, x_bulk_;
    std::vector<double> c2_, c3_;
    ChebyshevTable table_;
};

// Log-space summation of signed terms, rescaled on the fly to the largest
// magnitude seen so far.
class SignedLogSum
{
  public:
    void add(double log_mag, double sign)
    {
        if (log_mag == kNegInf || sign == 0.0)
            return;
        if (log_mag > max_)
        {
            double const r = std::exp(max_ - log_mag);
            sum_ *= r;
            mag_ *= r;
            max_ = log_mag;
        }
        double const t = std::exp(log_mag - max_);
        sum_ += sign * t;
        mag_ += t;
    }
    double value() const { return max_ == kNegInf ? 0.0 : sum_ * std::exp(max_); }
    // Sum of magnitudes, for cancellation diagnostics.
    double magnitude() const { return max_ == kNegInf ? 0.0 : mag_ * std::exp(max_); }

  private:
    double max_ = kNegInf;
    double sum_ = 0.0;
    double mag_ = 0.0;
};

// log|1/Gamma(x)| and its sign; 1/Gamma vanishes at non-positive integers.
struct RecipGamma
{
    double log_mag;
    double sign;
};
RecipGamma recip_gamma(double x);

// Bulk and quadrature ranges in ln(h).
struct LogRanges
{
    double u_max, u_bulk;  // ln(A0 / h_pg) extents
};
LogRanges displacement_ranges(DerivedConstants const& c);

ChannelPdf::Range lognormal_range(DerivedConstants const& c, LinkGeometry const& g,
                                  LogNormal const& m);
ChannelPdf::Range gamma_gamma_range(DerivedConstants const& c, LinkGeometry const& g,
                                    GammaGamma const& m);

void require_lognormal(LogNormal const& m);
void require_displacement(DerivedConstants const& c);

}  // namespace uavfso::detail
