#include "uavfso/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#ifndef UAVFSO_SCENARIO_DIR
#define UAVFSO_SCENARIO_DIR "scenarios"
#endif

namespace uavfso {
namespace {

std::string locate(std::string const& source, std::string const& field, int line, int column,
                   std::string const& message)
{
    std::ostringstream os;
    os << source;
    if (line > 0)
        os << ':' << line << ':' << column;
    os << ": ";
    if (!field.empty())
        os << field << ": ";
    os << message;
    return os.str();
}

// A YAML map with the keys it is allowed to carry.
class Section
{
  public:
    Section(YAML::Node node, std::string path, std::string const& source)
        : node_(std::move(node)), path_(std::move(path)), source_(source)
    {
        if (!node_.IsMap())
            fail(path_, node_, "expected a mapping");
    }

    [[noreturn]] void fail(std::string const& field, YAML::Node const& at, std::string const& msg) const
    {
        auto const m = at.Mark();
        bool const known = !m.is_null();
        throw ScenarioError(source_, field, known ? m.line + 1 : 0, known ? m.column + 1 : 0, msg);
    }

    std::string field(std::string const& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(std::string const& key)
    {
        allowed_.insert(key);
        return static_cast<bool>(node_[key]);
    }

    YAML::Node get(std::string const& key)
    {
        if (!has(key))
            fail(field(key), node_, "missing required field");
        return node_[key];
    }

    double number(std::string const& key)
    {
        auto const n = get(key);
        double v;
        try
        {
            v = n.as<double>();
        }
        catch (YAML::Exception const&)
        {
            fail(field(key), n, "expected a number");
        }
        if (!std::isfinite(v))
            fail(field(key), n, "must be finite");
        return v;
    }

    void number(std::string const& key, double& out)
    {
        if (has(key))
            out = number(key);
    }

    long long integer(std::string const& key, long long lo, long long hi)
    {
        auto const n = get(key);
        long long v;
        try
        {
            v = n.as<long long>();
        }
        catch (YAML::Exception const&)
        {
            fail(field(key), n, "expected an integer");
        }
        if (v < lo || v > hi)
            fail(field(key), n, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }

    bool boolean(std::string const& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        auto const n = node_[key];
        try
        {
            return n.as<bool>();
        }
        catch (YAML::Exception const&)
        {
            fail(field(key), n, "expected true or false");
        }
    }

    std::string text(std::string const& key)
    {
        auto const n = get(key);
        if (!n.IsScalar())
            fail(field(key), n, "expected a string");
        return n.as<std::string>();
    }

    std::string choice(std::string const& key, std::string const& fallback,
                       std::initializer_list<char const*> options)
    {
        if (!has(key))
            return fallback;
        auto const v = text(key);
        for (auto const* o : options)
            if (v == o)
                return v;
        std::string list;
        for (auto const* o : options)
            list += (list.empty() ? "" : ", ") + std::string(o);
        fail(field(key), node_[key], "expected one of " + list);
    }

    Section section(std::string const& key) { return Section(get(key), field(key), source_); }

    void reject_unknown() const
    {
        for (auto const& kv : node_)
        {
            auto const key = kv.first.as<std::string>();
            if (!allowed_.count(key))
                fail(field(key), kv.first, "unknown key");
        }
    }

    YAML::Node const& node() const { return node_; }

  private:
    YAML::Node node_;
    std::string path_;
    std::string const& source_;
    std::set<std::string> allowed_;
};

LinkGeometry read_geometry(Section sec)
{
    LinkGeometry g;
    g.z = sec.number("z");
    g.r_a = sec.number("r_a");
    g.r_ap = sec.number("r_ap");
    g.w_0 = sec.number("w_0");
    g.lambda = sec.number("lambda");
    g.d_f = sec.number("d_f");
    g.theta_fov = sec.number("theta_fov");
    sec.number("n_f", g.n_f);
    sec.number("cn2", g.cn2);
    sec.number("h_l", g.h_l);
    sec.reject_unknown();
    try
    {
        g.validate();
    }
    catch (std::invalid_argument const& e)
    {
        sec.fail("geometry", sec.node(), e.what());
    }
    return g;
}

UavStability read_stability(Section sec)
{
    UavStability s;
    s.sigma_txo = sec.number("sigma_txo");
    s.sigma_tyo = sec.number("sigma_tyo");
    s.sigma_rxo = sec.number("sigma_rxo");
    s.sigma_ryo = sec.number("sigma_ryo");
    s.sigma_txp = sec.number("sigma_txp");
    s.sigma_typ = sec.number("sigma_typ");
    s.sigma_rxp = sec.number("sigma_rxp");
    s.sigma_ryp = sec.number("sigma_ryp");
    s.theta_tx = sec.number("theta_tx");
    s.theta_ty = sec.number("theta_ty");
    s.theta_rx = sec.number("theta_rx");
    s.theta_ry = sec.number("theta_ry");
    sec.reject_unknown();
    try
    {
        s.validate();
    }
    catch (std::invalid_argument const& e)
    {
        sec.fail("stability", sec.node(), e.what());
    }
    return s;
}

TurbulenceSpec read_turbulence(Section sec)
{
    TurbulenceSpec t;
    int given = 0;
    if (sec.has("rytov_variance"))
    {
        t.rytov = sec.number("rytov_variance");
        ++given;
    }
    if (sec.has("alpha") || sec.has("beta"))
    {
        t.alpha = sec.number("alpha");
        t.beta = sec.number("beta");
        ++given;
    }
    if (sec.has("sigma_l2"))
    {
        t.sigma_l2 = sec.number("sigma_l2");
        ++given;
    }
    sec.reject_unknown();
    if (given != 1)
        sec.fail("turbulence", sec.node(),
                 "give exactly one of rytov_variance, alpha + beta, or sigma_l2");
    try
    {
        t.build();
    }
    catch (std::invalid_argument const& e)
    {
        sec.fail("turbulence", sec.node(), e.what());
    }
    return t;
}

bool lognormal_tag(ModelTag t)
{
    return t == ModelTag::theorem2 || t == ModelTag::theorem3 || t == ModelTag::theorem4
           || t == ModelTag::prop1;
}

double elapsed_ms(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string format17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(std::string const& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

double parse_double(std::string const& s)
{
    char* end = nullptr;
    double const v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
        throw std::runtime_error("read_csv: not a number: '" + s + "'");
    return v;
}

}  // namespace

ScenarioError::ScenarioError(std::string const& source, std::string const& field, int line,
                             int column, std::string const& message)
    : std::runtime_error(locate(source, field, line, column, message)),
      field_(field),
      line_(line),
      column_(column)
{
}

TurbulenceModel TurbulenceSpec::build() const
{
    if (rytov)
        return regime_for_rytov(*rytov) == Regime::weak ? lognormal_from_rytov(*rytov)
                                                        : gg_from_rytov(*rytov);
    if (alpha && beta)
        return gamma_gamma_model(*alpha, *beta);
    if (sigma_l2)
        return lognormal_model(*sigma_l2);
    throw std::invalid_argument("turbulence: no parameters given");
}

Scenario parse_scenario(std::string const& text, std::string const& source)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (YAML::ParserException const& e)
    {
        throw ScenarioError(source, "", e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    if (!root || root.IsNull())
        throw ScenarioError(source, "", 0, 0, "empty document");

    Section top(root, "", source);
    Scenario s;
    s.name = top.text("name");
    if (s.name.empty())
        top.fail("name", root["name"], "must not be empty");
    if (top.has("description"))
        s.description = top.text("description");
    s.geometry = read_geometry(top.section("geometry"));
    s.stability = read_stability(top.section("stability"));
    s.turbulence = read_turbulence(top.section("turbulence"));
    bool const weak = s.turbulence.build().is_lognormal();

    auto const models = top.get("models");
    if (!models.IsSequence() || models.size() == 0)
        top.fail("models", models, "expected a non-empty list of model tags");
    for (std::size_t i = 0; i < models.size(); ++i)
    {
        std::string const field = "models[" + std::to_string(i) + "]";
        ModelTag tag;
        try
        {
            tag = model_tag_from_string(models[i].as<std::string>());
        }
        catch (std::exception const& e)
        {
            top.fail(field, models[i], e.what());
        }
        if (lognormal_tag(tag) != weak)
            top.fail(field, models[i],
                     to_string(tag) + " needs " + (weak ? "Gamma-Gamma" : "log-normal")
                         + " turbulence, the scenario gives " + (weak ? "log-normal" : "Gamma-Gamma"));
        if (std::find(s.models.begin(), s.models.end(), tag) != s.models.end())
            top.fail(field, models[i], "duplicate model tag");
        s.models.push_back(tag);
    }

    if (top.has("options"))
    {
        auto sec = top.section("options");
        if (sec.has("n_prime"))
            s.options.n_prime = static_cast<int>(sec.integer("n_prime", 1, 100000));
        if (sec.has("k_terms"))
            s.options.k_terms = static_cast<int>(sec.integer("k_terms", 1, 1000));
        if (sec.has("m_terms"))
            s.options.m_terms = static_cast<int>(sec.integer("m_terms", 1, 200));
        if (sec.has("h_m"))
        {
            s.options.h_m = sec.number("h_m");
            if (!(*s.options.h_m > 0.0))
                sec.fail(sec.field("h_m"), sec.node()["h_m"], "must be positive");
        }
        if (sec.has("series_eps"))
        {
            s.options.series_eps = sec.number("series_eps");
            if (!(s.options.series_eps > 0.0 && s.options.series_eps < 1.0))
                sec.fail(sec.field("series_eps"), sec.node()["series_eps"], "must lie in (0, 1)");
        }
        sec.reject_unknown();
    }

    if (top.has("simulation"))
    {
        auto sec = top.section("simulation");
        auto& p = s.simulation;
        s.simulate = sec.boolean("enabled", true);
        if (sec.has("n_samples"))
            p.n_samples = static_cast<std::size_t>(sec.integer("n_samples", 1000, 1'000'000'000));
        if (sec.has("seed"))
            p.seed = static_cast<std::uint64_t>(
                sec.integer("seed", 0, std::numeric_limits<long long>::max()));
        p.use_tables = sec.boolean("use_tables", true);
        p.hpa = sec.choice("hpa", "step", {"step", "airy"}) == "step" ? HpaMode::step : HpaMode::airy;
        if (sec.has("bins"))
            p.bins = static_cast<std::size_t>(sec.integer("bins", 10, 100000));
        p.bin_scale = sec.choice("bin_scale", "log", {"log", "linear"}) == "log" ? BinScale::log
                                                                                 : BinScale::linear;
        if (sec.has("workers"))
            p.workers = static_cast<unsigned>(sec.integer("workers", 0, 1024));
        sec.reject_unknown();
    }
    s.simulation.regime = weak ? Regime::weak : Regime::strong;

    if (top.has("output"))
    {
        auto sec = top.section("output");
        if (sec.has("dir"))
            s.output_dir = sec.text("dir");
        s.output_format = sec.choice("format", "csv", {"csv"});
        if (sec.has("grid_points"))
            s.grid_points = static_cast<std::size_t>(sec.integer("grid_points", 2, 1'000'000));
        sec.reject_unknown();
    }
    top.reject_unknown();
    return s;
}

Scenario load_scenario(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(path.string(), "", 0, 0, "cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

std::filesystem::path scenario_dir()
{
    if (char const* env = std::getenv("UAVFSO_SCENARIO_DIR"); env && *env)
        return env;
    return UAVFSO_SCENARIO_DIR;
}

std::vector<std::string> list_scenarios()
{
    std::vector<std::string> names;
    std::error_code ec;
    for (auto const& entry : std::filesystem::directory_iterator(scenario_dir(), ec))
        if (entry.is_regular_file() && entry.path().extension() == ".yaml")
            names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

std::filesystem::path resolve_scenario(std::string const& name_or_path)
{
    std::filesystem::path const p(name_or_path);
    if (std::filesystem::is_regular_file(p))
        return p;
    auto const bundled = scenario_dir() / (name_or_path + ".yaml");
    if (std::filesystem::is_regular_file(bundled))
        return bundled;
    throw std::runtime_error("no such scenario file or bundled scenario: " + name_or_path);
}

ScenarioResult run_scenario(Scenario const& s)
{
    using clock = std::chrono::steady_clock;
    ScenarioResult r;
    r.scenario = s;
    auto const turbulence = s.turbulence.build();

    if (s.simulate)
    {
        auto const t0 = clock::now();
        auto const samples = sample_channel(s.simulation, s.geometry, s.stability, turbulence);
        r.mc = empirical_pdf(samples, s.simulation.bins, s.simulation.bin_scale);
        r.mc_runtime_ms = elapsed_ms(t0);
    }

    std::vector<double> build_ms;
    for (auto tag : s.models)
    {
        auto const t0 = clock::now();
        auto pdf = build_model(tag, s.geometry, s.stability, turbulence, s.options);
        build_ms.push_back(elapsed_ms(t0));
        for (auto const& w : turbulence.warnings)
            pdf.add_flag(w);
        r.models.push_back(ModelResult{tag, std::move(pdf), {}, 0.0, std::nullopt});
    }

    if (r.mc && r.mc->bins() > 0)
    {
        for (std::size_t i = 0; i < r.mc->bins(); ++i)
            r.h.push_back(r.mc->bin_center(i, s.simulation.bin_scale));
    }
    else
    {
        double lo = INFINITY;
        double hi = -INFINITY;
        for (auto const& m : r.models)
        {
            lo = std::min(lo, m.pdf.range().bulk_lo);
            hi = std::max(hi, std::min(m.pdf.range().bulk_hi, std::log(m.pdf.h_max())));
        }
        std::size_t const n = s.grid_points;
        for (std::size_t i = 0; i < n; ++i)
            r.h.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1)));
    }

    for (std::size_t k = 0; k < r.models.size(); ++k)
    {
        auto& m = r.models[k];
        auto const t0 = clock::now();
        m.density = m.pdf.tabulate(r.h).density;
        m.runtime_ms = build_ms[k] + elapsed_ms(t0);
        if (r.mc)
            m.comparison = compare(m.pdf, *r.mc);
    }
    return r;
}

void write_csv(ScenarioResult const& r, std::ostream& out)
{
    out << "# scenario: " << r.scenario.name << '\n';
    for (auto const& m : r.models)
        out << "# p_zero: " << to_string(m.tag) << ' ' << format17(m.pdf.p_zero()) << '\n';
    if (r.mc)
        out << "# p_zero: mc " << format17(r.mc->p_zero_hat) << '\n';

    out << 'h';
    for (auto const& m : r.models)
        out << ',' << to_string(m.tag) << "_pdf";
    bool const mc_cols = r.mc && r.mc->bins() == r.h.size();
    if (mc_cols)
        out << ",mc_pdf,mc_count";
    out << '\n';

    for (std::size_t i = 0; i < r.h.size(); ++i)
    {
        out << format17(r.h[i]);
        for (auto const& m : r.models)
            out << ',' << format17(m.density[i]);
        if (mc_cols)
            out << ',' << format17(r.mc->densities[i]) << ',' << r.mc->counts[i];
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (line.front() == '#')
        {
            std::string const key = "# p_zero: ";
            if (line.rfind(key, 0) == 0)
            {
                auto const rest = line.substr(key.size());
                auto const space = rest.find(' ');
                if (space == std::string::npos)
                    throw std::runtime_error("read_csv: malformed p_zero line: " + line);
                t.p_zero[rest.substr(0, space)] = parse_double(rest.substr(space + 1));
            }
            continue;
        }
        if (t.columns.empty())
        {
            t.columns = split(line, ',');
            continue;
        }
        auto const cells = split(line, ',');
        if (cells.size() != t.columns.size())
            throw std::runtime_error("read_csv: row width differs from header");
        std::vector<double> row;
        for (auto const& c : cells)
            row.push_back(parse_double(c));
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty())
        throw std::runtime_error("read_csv: no header row");
    return t;
}

std::string metrics_json(ScenarioResult const& r)
{
    nlohmann::ordered_json j;
    for (auto const& m : r.models)
    {
        nlohmann::ordered_json e;
        e["tv"] = m.comparison ? nlohmann::ordered_json(m.comparison->tv) : nullptr;
        e["p_zero"] = m.pdf.p_zero();
        e["p_zero_err"] = m.comparison ? nlohmann::ordered_json(m.comparison->p_zero_err) : nullptr;
        e["max_bin_rel_err"] =
            m.comparison ? nlohmann::ordered_json(m.comparison->max_bin_rel_err) : nullptr;
        e["runtime_ms"] = m.runtime_ms;
        e["validity_flags"] = m.pdf.validity_flags();
        j[to_string(m.tag)] = e;
    }
    if (r.mc)
    {
        auto const& p = r.scenario.simulation;
        j["mc"] = {{"n_samples", r.mc->n},
                   {"seed", p.seed},
                   {"p_zero_hat", r.mc->p_zero_hat},
                   {"bins", r.mc->bins()},
                   {"bin_scale", to_string(p.bin_scale)},
                   {"hpa", to_string(p.hpa)},
                   {"regime", to_string(p.regime)},
                   {"runtime_ms", r.mc_runtime_ms}};
    }
    return j.dump(2);
}

}  // namespace uavfso
