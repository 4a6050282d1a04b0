// Monte-Carlo channel realizations, empirical densities and goodness of fit.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uavfso/analytic.hpp"
#include "uavfso/geometry.hpp"
#include "uavfso/turbulence.hpp"

namespace uavfso {

enum class Regime
{
    weak,    // log-normal
    strong,  // Gamma-Gamma
};

// sigma_R^2 < 0.5 is weak.
Regime regime_for_rytov(double rytov);

enum class BinScale
{
    linear,
    log,
};

// How h_pa is generated for each draw.
enum class HpaMode
{
    step,  // 1 inside the field of view, 0 outside
    airy,  // captured fraction of the Airy pattern
};

std::string to_string(Regime r);
std::string to_string(BinScale b);
std::string to_string(HpaMode m);

struct SimulationPlan
{
    std::size_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    Regime regime = Regime::weak;
    bool use_tables = true;  // radial lookup tables instead of per-draw quadrature
    HpaMode hpa = HpaMode::step;
    std::size_t bins = 100;
    BinScale bin_scale = BinScale::log;
    unsigned workers = 0;  // 0: hardware concurrency

    void validate() const;
};

// Draws are generated in fixed-size chunks, each with its own generator
// seeded from (seed, chunk index), so the result does not depend on the
// number of workers.
std::vector<double> sample_channel(SimulationPlan const& plan, LinkGeometry const& g,
                                   UavStability const& s, TurbulenceModel const& m);

// One channel draw with every loss evaluated by direct quadrature. Used to
// spot-check the table path.
struct ChannelDraw
{
    PointingState pointing;
    double h_a;
};
double channel_gain(ChannelDraw const& d, LinkGeometry const& g, HpaMode hpa);

struct EmpiricalPdf
{
    std::vector<double> bin_edges;       // bins + 1 edges
    std::vector<double> densities;       // count / (n * width)
    std::vector<std::size_t> counts;
    double p_zero_hat = 0.0;             // fraction of exactly-zero samples
    std::size_t n = 0;
    std::size_t outside = 0;             // nonzero samples outside the edges

    std::size_t bins() const { return counts.size(); }
    double bin_mass(std::size_t i) const { return static_cast<double>(counts[i]) / static_cast<double>(n); }
    double bin_center(std::size_t i, BinScale scale) const;
};

// Bins span [smallest nonzero sample, largest sample].
EmpiricalPdf empirical_pdf(std::vector<double> const& samples, std::size_t bins, BinScale scale);
// Histogram on given edges; nonzero samples outside are counted in `outside`.
EmpiricalPdf empirical_pdf(std::vector<double> const& samples, std::vector<double> const& edges);

std::vector<double> make_edges(double lo, double hi, std::size_t bins, BinScale scale);

struct Comparison
{
    double tv = 0.0;
    double p_zero_err = 0.0;
    double max_bin_rel_err = 0.0;  // over bins with at least 100 samples
};

// Total variation between the mixture law and the histogram, counting the
// zero mass and the mass outside the bins as two extra cells.
Comparison compare(ChannelPdf const& a, EmpiricalPdf const& e);

// Same between two histograms on identical edges.
double total_variation(EmpiricalPdf const& a, EmpiricalPdf const& b);

}  // namespace uavfso
