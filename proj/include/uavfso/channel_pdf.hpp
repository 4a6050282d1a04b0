// Mixture distribution: a point mass at h = 0 plus a density on (0, h_max].
#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace uavfso {

enum class ModelTag
{
    theorem2,
    theorem3,
    theorem4,
    prop1,
    theorem5,
    theorem6,
    theorem7,
};

std::string to_string(ModelTag tag);
// Throws std::invalid_argument for unknown names.
ModelTag model_tag_from_string(std::string const& name);
std::vector<ModelTag> all_model_tags();

struct DensityGrid
{
    std::vector<double> h;
    std::vector<double> density;
};

class ChannelPdf
{
  public:
    using Density = std::function<double(double)>;

    // log_lo/log_hi bound ln(h) for quadrature (everything outside carries
    // negligible mass); bulk_lo/bulk_hi bound the default tabulation range.
    struct Range
    {
        double log_lo, log_hi, bulk_lo, bulk_hi;
    };

    ChannelPdf(ModelTag tag, double p_zero, double h_max, Density density, Range range,
               std::vector<std::string> validity_flags);

    ModelTag tag() const { return tag_; }
    double p_zero() const { return p_zero_; }
    // +inf for laws with unbounded support.
    double h_max() const { return h_max_; }
    Range const& range() const { return range_; }
    std::vector<std::string> const& validity_flags() const { return flags_; }

    // Density of the continuous part; 0 outside (0, h_max]. Negative values
    // from truncated series are clamped to 0 and counted.
    double density(double h) const;
    std::size_t negative_clamped() const { return negatives_->load(); }

    // Quadrature of the density over [a, b] in ln(h).
    double mass_between(double a, double b) const;
    double continuous_mass() const;
    double cdf(double h) const;

    // Log-spaced tabulation over the bulk range.
    DensityGrid tabulate(std::size_t n = 512) const;
    DensityGrid tabulate(std::vector<double> const& h) const;

    // Attach a note after construction (used by model builders).
    void add_flag(std::string flag) { flags_.push_back(std::move(flag)); }

    // Relative tolerance of mass_between; truncated series with cancellation
    // noise use a looser value than the integral forms.
    void set_quadrature_rel_tol(double rel) { quad_rel_ = rel; }

  private:
    ModelTag tag_;
    double p_zero_;
    double h_max_;
    Density density_;
    Range range_;
    std::vector<std::string> flags_;
    std::shared_ptr<std::atomic<std::size_t>> negatives_;
    double quad_rel_ = 1e-9;
};

}  // namespace uavfso
