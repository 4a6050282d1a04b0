// Numerical integration helpers shared by the geometry and analytic modules.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavfso::quad {

struct Result
{
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct Tolerance
{
    double abs = 1e-12;
    double rel = 1e-10;
    std::size_t max_intervals = 2000;
};

class QuadratureError : public std::runtime_error
{
  public:
    QuadratureError(std::string const& what, Result achieved)
        : std::runtime_error(what + " (achieved abs error "
                             + std::to_string(achieved.abs_error) + ")")
        , result_(achieved)
    {
    }
    Result const& result() const noexcept { return result_; }

  private:
    Result result_;
};

namespace detail {
// Gauss-Kronrod 7/15 nodes on [-1, 1]; odd-indexed Kronrod nodes are the
// Gauss nodes.
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double a, b, value, error;
    bool operator<(Segment const& o) const { return error < o.error; }
};

template<class F>
Segment gk15(F&& f, double a, double b)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);
    double const fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j)
    {
        double const dx = half * kXgk[j];
        double const f1 = f(center - dx);
        double const f2 = f(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1)
            gauss += kWg[j / 2] * (f1 + f2);
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}
}  // namespace detail

// Globally adaptive Gauss-Kronrod integration on a finite interval.
template<class F>
Result integrate(F&& f, double a, double b, Tolerance tol = {})
{
    Result out;
    if (a == b)
    {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    heap.push(first);
    double total = first.value;
    double error = first.error;
    out.evaluations = 15;
    while (error > std::max(tol.abs, tol.rel * std::abs(total)))
    {
        if (heap.size() >= tol.max_intervals)
        {
            out.value = total;
            out.abs_error = error;
            return out;
        }
        auto worst = heap.top();
        heap.pop();
        double const mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
        {
            // Interval exhausted at machine precision.
            out.value = total;
            out.abs_error = error;
            return out;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated rounding from the running updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty())
    {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = error;
    out.converged = true;
    return out;
}

// Same as integrate() but throws QuadratureError on non-convergence.
template<class F>
double integrate_or_throw(F&& f, double a, double b, Tolerance tol = {},
                          char const* what = "quadrature did not converge")
{
    auto r = integrate(f, a, b, tol);
    if (!r.converged)
        throw QuadratureError(what, r);
    return r.value;
}

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre
{
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n);

    template<class F>
    double operator()(F&& f, double a, double b) const
    {
        double const c = 0.5 * (a + b);
        double const h = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            s += weights[i] * f(c + h * nodes[i]);
        return s * h;
    }
};

inline GaussLegendre::GaussLegendre(std::size_t n) : nodes(n), weights(n)
{
    if (n == 0)
        throw std::invalid_argument("GaussLegendre: n must be positive");
    constexpr double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i)
    {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75)
                            / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k)
            {
                double const p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double const dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

// Trapezoid rule over a full period; spectrally accurate for smooth periodic
// integrands.
template<class F>
double periodic_trapezoid(F&& f, double period, std::size_t n)
{
    double s = 0.0;
    double const h = period / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        s += f(h * static_cast<double>(i));
    return s * h;
}

}  // namespace uavfso::quad
