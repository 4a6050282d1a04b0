// Command-line front end: run, validate and list channel scenarios.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "uavfso/scenario.hpp"

using namespace uavfso;

namespace {

constexpr int kSchemaError = 2;

std::filesystem::path output_dir(std::string const& flag, Scenario const& s)
{
    if (!flag.empty())
        return flag;
    if (char const* env = std::getenv("UAVFSO_OUT_DIR"); env && *env)
        return env;
    return s.output_dir;
}

void report(ScenarioResult const& r, std::filesystem::path const& csv, std::filesystem::path const& json)
{
    if (r.mc)
        std::printf("scenario %s: %zu samples, p_zero_hat %.6g, simulation %.1f ms\n",
                    r.scenario.name.c_str(), r.mc->n, r.mc->p_zero_hat, r.mc_runtime_ms);
    else
        std::printf("scenario %s: analytic only\n", r.scenario.name.c_str());
    std::printf("%-10s %12s %12s %12s %12s\n", "model", "tv", "p_zero", "p_zero_err", "runtime_ms");
    for (auto const& m : r.models)
    {
        if (m.comparison)
            std::printf("%-10s %12.6f %12.6g %12.3g %12.2f\n", to_string(m.tag).c_str(),
                        m.comparison->tv, m.pdf.p_zero(), m.comparison->p_zero_err, m.runtime_ms);
        else
            std::printf("%-10s %12s %12.6g %12s %12.2f\n", to_string(m.tag).c_str(), "-",
                        m.pdf.p_zero(), "-", m.runtime_ms);
    }
    for (auto const& m : r.models)
    {
        std::string const tag = to_string(m.tag);
        for (auto const& f : m.pdf.validity_flags())
        {
            if (f.rfind(tag + ": ", 0) == 0)
                std::fprintf(stderr, "warning: %s\n", f.c_str());
            else
                std::fprintf(stderr, "warning: %s: %s\n", tag.c_str(), f.c_str());
        }
        if (m.pdf.negative_clamped() > 0)
            std::fprintf(stderr, "warning: %s: %zu negative density values clamped to 0\n",
                         tag.c_str(), m.pdf.negative_clamped());
    }
    std::printf("wrote %s\nwrote %s\n", csv.string().c_str(), json.string().c_str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"UAV free-space optical channel models and Monte-Carlo validation"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool analytic_only = false;

    auto* run = app.add_subcommand("run", "Evaluate the analytic models and the simulation");
    run->add_option("--config", config, "Scenario file or bundled scenario name")->required();
    auto* samples_opt = run->add_option("--samples", samples, "Monte-Carlo sample count");
    auto* seed_opt = run->add_option("--seed", seed, "Monte-Carlo seed");
    run->add_option("--out", out, "Output directory (overrides UAVFSO_OUT_DIR and the config)");
    run->add_flag("--no-mc", analytic_only, "Skip the simulation");

    auto* validate = app.add_subcommand("validate", "Parse a scenario without running it");
    validate->add_option("--config", config, "Scenario file or bundled scenario name")->required();

    auto* list = app.add_subcommand("list", "List the bundled scenarios");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed())
    {
        for (auto const& name : list_scenarios())
            std::printf("%s\n", name.c_str());
        return 0;
    }

    Scenario s;
    try
    {
        s = load_scenario(resolve_scenario(config));
    }
    catch (std::exception const& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSchemaError;
    }

    if (validate->parsed())
    {
        std::printf("%s: OK (%zu models)\n", s.name.c_str(), s.models.size());
        return 0;
    }

    if (samples_opt->count())
        s.simulation.n_samples = samples;
    if (seed_opt->count())
        s.simulation.seed = seed;
    if (analytic_only)
        s.simulate = false;

    try
    {
        if (s.simulate)
            s.simulation.validate();
    }
    catch (std::invalid_argument const& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSchemaError;
    }

    try
    {
        auto const r = run_scenario(s);
        auto const dir = output_dir(out, s);
        std::filesystem::create_directories(dir);
        auto const csv = dir / (s.name + ".csv");
        auto const json = dir / (s.name + "_metrics.json");
        {
            std::ofstream f(csv);
            write_csv(r, f);
            if (!f)
                throw std::runtime_error("cannot write " + csv.string());
        }
        {
            std::ofstream f(json);
            f << metrics_json(r) << '\n';
            if (!f)
                throw std::runtime_error("cannot write " + json.string());
        }
        report(r, csv, json);
    }
    catch (std::exception const& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
