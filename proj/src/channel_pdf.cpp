#include "uavfso/channel_pdf.hpp"

#include <algorithm>
#include <stdexcept>

#include "uavfso/quadrature.hpp"

namespace uavfso {

std::string to_string(ModelTag tag)
{
    switch (tag)
    {
        case ModelTag::theorem2: return "theorem2";
        case ModelTag::theorem3: return "theorem3";
        case ModelTag::theorem4: return "theorem4";
        case ModelTag::prop1: return "prop1";
        case ModelTag::theorem5: return "theorem5";
        case ModelTag::theorem6: return "theorem6";
        case ModelTag::theorem7: return "theorem7";
    }
    return "unknown";
}

std::vector<ModelTag> all_model_tags()
{
    return {ModelTag::theorem2, ModelTag::theorem3, ModelTag::theorem4, ModelTag::prop1,
            ModelTag::theorem5, ModelTag::theorem6, ModelTag::theorem7};
}

ModelTag model_tag_from_string(std::string const& name)
{
    for (auto tag : all_model_tags())
        if (to_string(tag) == name)
            return tag;
    throw std::invalid_argument("unknown model tag '" + name + "'");
}

ChannelPdf::ChannelPdf(ModelTag tag, double p_zero, double h_max, Density density, Range range,
                       std::vector<std::string> validity_flags)
    : tag_(tag)
    , p_zero_(std::clamp(p_zero, 0.0, 1.0))
    , h_max_(h_max)
    , density_(std::move(density))
    , range_(range)
    , flags_(std::move(validity_flags))
    , negatives_(std::make_shared<std::atomic<std::size_t>>(0))
{
    if (std::isfinite(h_max_))
    {
        double const top = std::log(h_max_);
        range_.log_hi = std::min(range_.log_hi, top);
        range_.bulk_hi = std::min(range_.bulk_hi, top);
    }
    range_.bulk_lo = std::max(range_.bulk_lo, range_.log_lo);
    if (!(range_.log_lo < range_.log_hi) || !(range_.bulk_lo < range_.bulk_hi))
        throw std::invalid_argument("ChannelPdf: empty support range");
}

double ChannelPdf::density(double h) const
{
    if (!(h > 0.0) || h > h_max_)
        return 0.0;
    double const v = density_(h);
    if (v < 0.0 || std::isnan(v))
    {
        negatives_->fetch_add(1);
        return 0.0;
    }
    return v;
}

double ChannelPdf::mass_between(double a, double b) const
{
    double lo = a > 0.0 ? std::max(std::log(a), range_.log_lo) : range_.log_lo;
    double hi = std::isfinite(b) ? std::min(std::log(b), range_.log_hi) : range_.log_hi;
    if (!(hi > lo))
        return 0.0;
    auto f = [this](double t) {
        double const h = std::exp(t);
        return density(h) * h;
    };
    quad::Tolerance tol{1e-14, quad_rel_, 400};
    double total = 0.0;
    int const pieces = std::max(1, static_cast<int>(std::ceil(hi - lo)));
    double const step = (hi - lo) / pieces;
    for (int i = 0; i < pieces; ++i)
        total += quad::integrate(f, lo + i * step, lo + (i + 1) * step, tol).value;
    return total;
}

double ChannelPdf::continuous_mass() const
{
    return mass_between(0.0, std::numeric_limits<double>::infinity());
}

double ChannelPdf::cdf(double h) const
{
    if (h < 0.0)
        return 0.0;
    return std::min(1.0, p_zero_ + mass_between(0.0, h));
}

DensityGrid ChannelPdf::tabulate(std::size_t n) const
{
    if (n < 2)
        throw std::invalid_argument("ChannelPdf::tabulate: need at least two points");
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        h[i] = std::exp(range_.bulk_lo
                        + (range_.bulk_hi - range_.bulk_lo) * static_cast<double>(i)
                              / static_cast<double>(n - 1));
    return tabulate(h);
}

DensityGrid ChannelPdf::tabulate(std::vector<double> const& h) const
{
    DensityGrid out{h, std::vector<double>(h.size())};
    for (std::size_t i = 0; i < h.size(); ++i)
        out.density[i] = density(h[i]);
    return out;
}

}  // namespace uavfso
