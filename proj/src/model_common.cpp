#include "model_common.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavfso::detail {

BeckmannKernel::BeckmannKernel(DerivedConstants const& c) : c2_(kNodes), c3_(kNodes)
{
    require_displacement(c);
    double const sx2 = c.sigma_dx2;
    double const sy2 = c.sigma_dy2;
    double const w = c.w_z;
    log_c1_ = std::log(w * w / (8.0 * kPi * std::sqrt(sx2 * sy2)))
              - c.mean_dx * c.mean_dx / (2.0 * sx2) - c.mean_dy * c.mean_dy / (2.0 * sy2);
    for (int i = 0; i < kNodes; ++i)
    {
        double const phi = 2.0 * kPi * i / kNodes;
        c2_[i] = w / std::numbers::sqrt2
                 * (c.mean_dx * std::cos(phi) / sx2 + c.mean_dy * std::sin(phi) / sy2);
        c3_[i] = w * w * ((sx2 - sy2) * std::cos(2.0 * phi) - (sx2 + sy2)) / (8.0 * sx2 * sy2);
    }
    auto const r = displacement_ranges(c);
    x_max_ = std::sqrt(r.u_max);
    x_bulk_ = std::sqrt(r.u_bulk);
    table_ = ChebyshevTable([this](double u) { return log_c1_g(std::sqrt(u)); }, 0.0, r.u_max, 1e-11);
}

ChebyshevTable::ChebyshevTable(std::function<double(double)> const& f, double a, double b,
                               double tol)
{
    auto const fit = [&](double lo, double hi, double* c) {
        std::array<double, kOrder> v{};
        for (int j = 0; j < kOrder; ++j)
            v[j] = f(lo + 0.5 * (hi - lo) * (std::cos(kPi * (j + 0.5) / kOrder) + 1.0));
        for (int k = 0; k < kOrder; ++k)
        {
            double sum = 0.0;
            for (int j = 0; j < kOrder; ++j)
                sum += v[j] * std::cos(kPi * k * (j + 0.5) / kOrder);
            c[k] = (k == 0 ? 1.0 : 2.0) * sum / kOrder;
        }
    };
    double const min_width = (b - a) / 65536.0;
    std::vector<std::pair<double, double>> todo{{0.5 * (a + b), b}, {a, 0.5 * (a + b)}};
    std::array<double, kOrder> c{};
    while (!todo.empty())
    {
        auto const [lo, hi] = todo.back();
        todo.pop_back();
        fit(lo, hi, c.data());
        double worst = 0.0;
        for (double t : {0.13, 0.52, 0.91})
            worst = std::max(worst, std::abs(clenshaw(c.data(), 2.0 * t - 1.0) - f(lo + t * (hi - lo))));
        if (!(worst <= tol) && hi - lo > min_width)
        {
            todo.emplace_back(0.5 * (lo + hi), hi);
            todo.emplace_back(lo, 0.5 * (lo + hi));
            continue;
        }
        start_.push_back(lo);
        width_.push_back(hi - lo);
        coef_.insert(coef_.end(), c.begin(), c.end());
    }
}

double ChebyshevTable::clenshaw(double const* c, double t)
{
    double b1 = 0.0, b2 = 0.0;
    for (int k = kOrder - 1; k >= 1; --k)
    {
        double const b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

double ChebyshevTable::operator()(double x) const
{
    auto const it = std::upper_bound(start_.begin(), start_.end(), x);
    std::size_t const p = it == start_.begin() ? 0 : static_cast<std::size_t>(it - start_.begin()) - 1;
    double const t = std::clamp(2.0 * (x - start_[p]) / width_[p] - 1.0, -1.0, 1.0);
    return clenshaw(&coef_[p * kOrder], t);
}

double BeckmannKernel::log_c1_g(double x) const
{
    // Periodic trapezoid rule, doubling the node count until two successive
    // levels agree.
    int stride = kNodes / 64;
    double shift = kNegInf;
    for (int i = 0; i < kNodes; i += stride)
        shift = std::max(shift, c3_[i] * x * x + c2_[i] * x);
    double sum = 0.0;
    for (int i = 0; i < kNodes; i += stride)
        sum += std::exp(c3_[i] * x * x + c2_[i] * x - shift);
    double prev = sum * stride;
    while (stride > 1)
    {
        int const half = stride / 2;
        for (int i = half; i < kNodes; i += stride)
            sum += std::exp(c3_[i] * x * x + c2_[i] * x - shift);
        stride = half;
        double const cur = sum * stride;
        if (std::abs(cur - prev) <= 1e-13 * cur)
        {
            prev = cur;
            break;
        }
        prev = cur;
    }
    return log_c1_ + shift + std::log(prev * 2.0 * kPi / kNodes);
}

RecipGamma recip_gamma(double x)
{
    if (x <= 0.0 && x == std::floor(x))
        return {kNegInf, 0.0};
    if (x > 0.0)
        return {-std::lgamma(x), 1.0};
    double const g = std::tgamma(x);
    return {-std::log(std::abs(g)), g < 0.0 ? -1.0 : 1.0};
}

LogRanges displacement_ranges(DerivedConstants const& c)
{
    double const s = std::sqrt(std::max(c.sigma_dx2, c.sigma_dy2));
    double const w2 = c.w_z * c.w_z;
    LogRanges r{};
    r.u_max = std::max(2.0 * std::pow(c.r_o + 12.0 * s, 2) / w2, 60.0 / c.tau1);
    r.u_bulk = std::max(2.0 * std::pow(c.r_o + 5.0 * s, 2) / w2, 20.0 / c.tau1);
    return r;
}

ChannelPdf::Range lognormal_range(DerivedConstants const& c, LinkGeometry const& g,
                                  LogNormal const& m)
{
    auto const r = displacement_ranges(c);
    double const top = std::log(c.a0 * g.h_l);
    double const sd = std::sqrt(m.sigma_l2);
    double const mid = 2.0 * m.mu_l;
    return {top - r.u_max + mid - 24.0 * sd, top + mid + 24.0 * sd,
            top - r.u_bulk + mid - 10.0 * sd, top + mid + 10.0 * sd};
}

ChannelPdf::Range gamma_gamma_range(DerivedConstants const& c, LinkGeometry const& g,
                                    GammaGamma const& m)
{
    auto const r = displacement_ranges(c);
    double const top = std::log(c.a0 * g.h_l);
    double const ab = m.alpha * m.beta;
    return {top - r.u_max - 40.0 / m.beta, top + std::log(600.0 / ab),
            top - r.u_bulk - 12.0 / m.beta, top + std::log(60.0 / ab)};
}

void require_lognormal(LogNormal const& m)
{
    if (!(m.sigma_l2 > 0.0))
        throw std::invalid_argument("log-normal channel models need sigma_l2 > 0");
}

void require_displacement(DerivedConstants const& c)
{
    if (!(c.sigma_dx2 > 0.0) || !(c.sigma_dy2 > 0.0))
        throw std::invalid_argument(
            "channel models need nonzero displacement variance along both axes");
}

}  // namespace uavfso::detail
