#include "uavfso/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

namespace uavfso {
namespace {

constexpr std::size_t kChunk = 1 << 16;
constexpr std::size_t kTableKnots = 1024;

std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

double normal(std::mt19937_64& rng, double mean, double sd)
{
    if (sd == 0.0)
        return mean;
    return std::normal_distribution<double>(mean, sd)(rng);
}

PointingState draw_pointing(UavStability const& s, std::mt19937_64& rng)
{
    PointingState p;
    p.theta_tx = normal(rng, s.theta_tx, s.sigma_txo);
    p.theta_ty = normal(rng, s.theta_ty, s.sigma_tyo);
    p.theta_rx = normal(rng, s.theta_rx, s.sigma_rxo);
    p.theta_ry = normal(rng, s.theta_ry, s.sigma_ryo);
    p.x_tx = normal(rng, 0.0, s.sigma_txp);
    p.y_ty = normal(rng, 0.0, s.sigma_typ);
    p.x_rx = normal(rng, 0.0, s.sigma_rxp);
    p.y_ry = normal(rng, 0.0, s.sigma_ryp);
    return p;
}

}  // namespace

Regime regime_for_rytov(double rytov)
{
    return rytov < 0.5 ? Regime::weak : Regime::strong;
}

std::string to_string(Regime r)
{
    return r == Regime::weak ? "weak" : "strong";
}

std::string to_string(BinScale b)
{
    return b == BinScale::log ? "log" : "linear";
}

std::string to_string(HpaMode m)
{
    return m == HpaMode::step ? "step" : "airy";
}

void SimulationPlan::validate() const
{
    if (n_samples < 1000)
        throw std::invalid_argument("simulation.n_samples must be at least 1000");
    if (bins < 10)
        throw std::invalid_argument("simulation.bins must be at least 10");
}

double channel_gain(ChannelDraw const& d, LinkGeometry const& g, HpaMode hpa)
{
    double const w_z = beam_width_at_rx(g);
    double const theta_a = aoa(d.pointing);
    double pa;
    if (hpa == HpaMode::step)
        pa = hpa_step(theta_a, g.theta_fov);
    else
        pa = hpa_exact(d.pointing.theta_tx + d.pointing.theta_rx,
                       d.pointing.theta_ty + d.pointing.theta_ry, g);
    if (pa == 0.0)
        return 0.0;
    return g.h_l * d.h_a * hpg_exact(d.pointing, g, w_z) * pa;
}

std::vector<double> sample_channel(SimulationPlan const& plan, LinkGeometry const& g,
                                   UavStability const& s, TurbulenceModel const& m)
{
    plan.validate();
    g.validate();
    s.validate();
    double const w_z = beam_width_at_rx(g);
    std::optional<RadialTables> tables;
    if (plan.use_tables)
        tables.emplace(build_radial_tables(g, w_z, kTableKnots));

    std::vector<double> out(plan.n_samples);
    std::size_t const chunks = (plan.n_samples + kChunk - 1) / kChunk;
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t c = next++; c < chunks; c = next++)
        {
            auto rng = chunk_rng(plan.seed, c);
            std::size_t const end = std::min(plan.n_samples, (c + 1) * kChunk);
            for (std::size_t i = c * kChunk; i < end; ++i)
            {
                ChannelDraw d{draw_pointing(s, rng), 0.0};
                d.h_a = draw_turbulence(m, rng);
                if (!tables)
                {
                    out[i] = channel_gain(d, g, plan.hpa);
                    continue;
                }
                double const theta_a = aoa(d.pointing);
                double const pa = plan.hpa == HpaMode::step ? hpa_step(theta_a, g.theta_fov)
                                                            : tables->hpa(theta_a);
                out[i] = pa == 0.0 ? 0.0
                                   : g.h_l * d.h_a
                                         * tables->hpg(radial_displacement(d.pointing, g.z)) * pa;
            }
        }
    };

    unsigned workers = plan.workers ? plan.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    if (workers <= 1)
    {
        work();
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(work);
    pool.clear();
    return out;
}

double EmpiricalPdf::bin_center(std::size_t i, BinScale scale) const
{
    double const a = bin_edges[i];
    double const b = bin_edges[i + 1];
    return scale == BinScale::log ? std::sqrt(a * b) : 0.5 * (a + b);
}

std::vector<double> make_edges(double lo, double hi, std::size_t bins, BinScale scale)
{
    if (bins < 1)
        throw std::invalid_argument("make_edges: need at least one bin");
    if (!(hi > lo) || (scale == BinScale::log && !(lo > 0.0)))
        throw std::invalid_argument("make_edges: invalid range");
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
    {
        double const t = static_cast<double>(i) / static_cast<double>(bins);
        e[i] = scale == BinScale::log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                      : lo + t * (hi - lo);
    }
    e.front() = lo;
    e.back() = hi;
    return e;
}

EmpiricalPdf empirical_pdf(std::vector<double> const& samples, std::size_t bins, BinScale scale)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_pdf: no samples");
    double lo = INFINITY;
    double hi = 0.0;
    for (double x : samples)
        if (x > 0.0)
        {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    if (hi == 0.0)
    {
        EmpiricalPdf e;
        e.p_zero_hat = 1.0;
        e.n = samples.size();
        return e;
    }
    if (lo == hi)
    {
        lo *= 1.0 - 1e-9;
        hi *= 1.0 + 1e-9;
    }
    return empirical_pdf(samples, make_edges(lo, hi, bins, scale));
}

EmpiricalPdf empirical_pdf(std::vector<double> const& samples, std::vector<double> const& edges)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_pdf: no samples");
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
        throw std::invalid_argument("empirical_pdf: edges must be sorted, at least two");
    EmpiricalPdf e;
    e.bin_edges = edges;
    e.n = samples.size();
    std::size_t const bins = edges.size() - 1;
    e.counts.assign(bins, 0);
    std::size_t zeros = 0;
    for (double x : samples)
    {
        if (x == 0.0)
        {
            ++zeros;
            continue;
        }
        if (x < edges.front() || x > edges.back())
        {
            ++e.outside;
            continue;
        }
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        std::size_t i = static_cast<std::size_t>(it - edges.begin());
        i = std::clamp<std::size_t>(i, 1, bins) - 1;
        ++e.counts[i];
    }
    e.p_zero_hat = static_cast<double>(zeros) / static_cast<double>(e.n);
    e.densities.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        e.densities[i] = e.bin_mass(i) / (edges[i + 1] - edges[i]);
    return e;
}

Comparison compare(ChannelPdf const& a, EmpiricalPdf const& e)
{
    Comparison c;
    c.p_zero_err = std::abs(a.p_zero() - e.p_zero_hat);
    double sum = c.p_zero_err;
    double covered = 0.0;
    for (std::size_t i = 0; i < e.bins(); ++i)
    {
        double const p = a.mass_between(e.bin_edges[i], e.bin_edges[i + 1]);
        covered += p;
        double const q = e.bin_mass(i);
        sum += std::abs(p - q);
        if (e.counts[i] >= 100 && p > 0.0)
            c.max_bin_rel_err = std::max(c.max_bin_rel_err, std::abs(q - p) / p);
    }
    double const rest_a = std::max(0.0, 1.0 - a.p_zero() - covered);
    double const rest_e = static_cast<double>(e.outside) / static_cast<double>(e.n);
    sum += std::abs(rest_a - rest_e);
    c.tv = 0.5 * sum;
    return c;
}

double total_variation(EmpiricalPdf const& a, EmpiricalPdf const& b)
{
    if (a.bin_edges != b.bin_edges)
        throw std::invalid_argument("total_variation: histograms use different edges");
    double sum = std::abs(a.p_zero_hat - b.p_zero_hat);
    for (std::size_t i = 0; i < a.bins(); ++i)
        sum += std::abs(a.bin_mass(i) - b.bin_mass(i));
    sum += std::abs(static_cast<double>(a.outside) / a.n - static_cast<double>(b.outside) / b.n);
    return 0.5 * sum;
}

}  // namespace uavfso
