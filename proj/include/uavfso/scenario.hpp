// Scenario documents, the analytic/Monte-Carlo pipeline and its exports.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavfso/analytic.hpp"
#include "uavfso/montecarlo.hpp"

namespace uavfso {

// Exactly one of: rytov_variance (regime by the sigma_R^2 < 0.5 rule),
// alpha + beta, or sigma_l2.
struct TurbulenceSpec
{
    std::optional<double> rytov;
    std::optional<double> alpha, beta;
    std::optional<double> sigma_l2;

    TurbulenceModel build() const;
};

struct Scenario
{
    std::string name;
    std::string description;
    LinkGeometry geometry;
    UavStability stability;
    TurbulenceSpec turbulence;
    std::vector<ModelTag> models;
    ModelOptions options;
    bool simulate = true;
    SimulationPlan simulation;
    std::size_t grid_points = 512;  // analytic grid when no simulation runs
    std::string output_dir = "out";
    std::string output_format = "csv";
};

// Schema or parse problem, located in the source document.
class ScenarioError : public std::runtime_error
{
  public:
    ScenarioError(std::string const& source, std::string const& field, int line, int column,
                  std::string const& message);
    std::string const& field() const { return field_; }
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    std::string field_;
    int line_, column_;
};

Scenario parse_scenario(std::string const& text, std::string const& source = "<string>");
Scenario load_scenario(std::filesystem::path const& path);

// Directory holding the bundled scenarios (UAVFSO_SCENARIO_DIR overrides).
std::filesystem::path scenario_dir();
std::vector<std::string> list_scenarios();
// A path to an existing file, or the name of a bundled scenario.
std::filesystem::path resolve_scenario(std::string const& name_or_path);

struct ModelResult
{
    ModelTag tag;
    ChannelPdf pdf;
    std::vector<double> density;  // on ScenarioResult::h
    double runtime_ms = 0.0;      // construction plus grid evaluation
    std::optional<Comparison> comparison;
};

struct ScenarioResult
{
    Scenario scenario;
    std::vector<double> h;
    std::vector<ModelResult> models;
    std::optional<EmpiricalPdf> mc;
    double mc_runtime_ms = 0.0;
};

ScenarioResult run_scenario(Scenario const& s);

// Header `h,<tag>_pdf...,mc_pdf,mc_count`, preceded by `# p_zero: <tag> <value>`
// lines; numbers carry 17 significant digits.
void write_csv(ScenarioResult const& r, std::ostream& out);

struct CsvTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::map<std::string, double> p_zero;
};
CsvTable read_csv(std::istream& in);

// {tag: {tv, p_zero, p_zero_err, max_bin_rel_err, runtime_ms, validity_flags}, mc: {...}}
std::string metrics_json(ScenarioResult const& r);

}  // namespace uavfso
