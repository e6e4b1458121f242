// vacmass: vacuum force/mass-fluctuation spectra and scatterer trajectories.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or validation
// error, 3 numerical failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "output.hpp"
#include "vacmass/vacmass.hpp"

namespace {

using namespace vacmass;
using vacmass::cli::OutputRecord;

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

struct ModelOptions {
    double omega_c = 1.0;
    double hbar = 1.0;
};

struct OutputOptions {
    std::string format = "csv";
    std::string out;
};

void add_model_options(CLI::App* cmd, ModelOptions& m)
{
    cmd->add_option("--omega-c", m.omega_c, "Reflection cutoff Omega")->capture_default_str();
    cmd->add_option("--hbar", m.hbar, "Action scale")->capture_default_str();
}

void add_output_options(CLI::App* cmd, OutputOptions& o)
{
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
}

void echo_model(OutputRecord& rec, const ModelOptions& m)
{
    rec.param("omega-c", m.omega_c);
    rec.param("hbar", m.hbar);
}

std::string grid_to_string(const GridSpec& g)
{
    return cli::format_number(g.min) + ":" + cli::format_number(g.max) + ":" + std::to_string(g.points) + ":" +
           (g.spacing == GridSpacing::Log ? "log" : "lin");
}

SpectrumComponent parse_component(const std::string& s)
{
    if (s == "f0f0") return SpectrumComponent::F0F0;
    if (s == "f1f1") return SpectrumComponent::F1F1;
    if (s == "f0f1") return SpectrumComponent::F0F1;
    if (s == "mass") return SpectrumComponent::Mass;
    if (s == "field") return SpectrumComponent::Field;
    throw ValidationError("unknown component " + s);
}

SpectrumMethod parse_method(const std::string& s)
{
    if (s == "quad") return SpectrumMethod::Quadrature;
    if (s == "closed") return SpectrumMethod::ClosedForm;
    if (s == "conv") return SpectrumMethod::Convolution;
    if (s == "asym") return SpectrumMethod::Asymptote;
    throw ValidationError("unknown method " + s);
}

FrequencyBand parse_band(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos)
        throw ValidationError("band must look like lo:hi, got '" + text + "'");
    FrequencyBand band{detail::parse_double(std::string_view(text).substr(0, colon), "band minimum"),
                       detail::parse_double(std::string_view(text).substr(colon + 1), "band maximum")};
    band.validate();
    return band;
}

// ---------------------------------------------------------------------------

struct DelayCommand {
    ModelOptions model;
    OutputOptions output;
    std::string grid = "1e-3:1e3:400:log";

    int run() const
    {
        const MirrorModel m(model.omega_c, model.hbar);
        const auto spec = parse_grid(grid);
        const auto omega = make_grid(spec);
        OutputRecord rec{"delay", {}, {}};
        echo_model(rec, model);
        rec.param("grid", grid_to_string(spec));
        rec.param("format", output.format);
        cli::Column w{"omega", omega}, tau{"tau", {}}, delta{"delta", {}};
        for (double x : omega) {
            tau.values.push_back(reflection_delay(m, x));
            delta.values.push_back(phase_shift(m, x));
        }
        rec.columns = {w, tau, delta};
        cli::emit(rec.render(output.format), output.out);
        return exit_ok;
    }
};

struct SpectrumCommand {
    ModelOptions model;
    OutputOptions output;
    std::string component = "mass";
    std::string method = "quad";
    std::string grid = "1e-3:1e3:400:log";
    double tol = spectrum_quadrature_config().rel_tol;
    unsigned threads = 0;

    int run() const
    {
        const MirrorModel m(model.omega_c, model.hbar);
        const auto c = parse_component(component);
        const auto meth = parse_method(method);
        if (!method_supported(c, meth))
            throw ValidationError("method " + method + " is not available for component " + component);
        const auto spec = parse_grid(grid);
        auto cfg = spectrum_quadrature_config();
        cfg.rel_tol = tol;
        cfg.validate();

        const auto omega = make_grid(spec);
        const auto samples = evaluate_on_grid(m, c, meth, omega, cfg, threads);

        OutputRecord rec{"spectrum", {}, {}};
        rec.param("component", component);
        rec.param("method", method);
        echo_model(rec, model);
        rec.param("grid", grid_to_string(spec));
        rec.param("tol", tol);
        rec.param("format", output.format);
        rec.columns = {{"omega", samples.frequencies}, {"value", samples.values}, {"error_estimate", samples.error_estimates}};
        cli::emit(rec.render(output.format), output.out);
        return exit_ok;
    }
};

struct MeanMassCommand {
    ModelOptions model;
    OutputOptions output;
    double cutoff = 0.0;
    double tol = spectrum_quadrature_config().rel_tol;

    int run() const
    {
        const MirrorModel m(model.omega_c, model.hbar);
        if (!(cutoff > 0.0)) throw ValidationError("--cutoff must be > 0");
        auto cfg = spectrum_quadrature_config();
        cfg.rel_tol = tol;
        cfg.validate();
        const double analytic = mean_induced_mass_analytic(m, cutoff);
        const auto quad = mean_induced_mass_quadrature(m, cutoff, cfg);

        OutputRecord rec{"mean-mass", {}, {}};
        echo_model(rec, model);
        rec.param("cutoff", cutoff);
        rec.param("tol", tol);
        rec.param("format", output.format);
        rec.columns = {{"cutoff", {cutoff}},
                       {"analytic", {analytic}},
                       {"quadrature", {quad.value}},
                       {"abs_difference", {std::abs(analytic - quad.value)}},
                       {"error_estimate", {quad.error_estimate}}};
        cli::emit(rec.render(output.format), output.out);
        return exit_ok;
    }
};

struct SimulateCommand {
    ModelOptions model;
    OutputOptions output;
    double mass_bare = 1.0;
    double dt = 0.02;
    std::size_t steps = 10000;
    std::uint64_t seed = 0;
    bool mass_channel = false;
    std::string band = "0:5";
    std::string component = "f1f1";
    double noise_scale = 1.0;
    std::optional<double> constant_force;
    double q0 = 0.0;
    double p0 = 0.0;
    std::size_t stride = 1;
    std::string summary;

    int run() const
    {
        SimulationConfig cfg;
        cfg.model = MirrorModel(model.omega_c, model.hbar);
        cfg.m_bare = mass_bare;
        cfg.dt = dt;
        cfg.steps = steps;
        cfg.seed = seed;
        cfg.mass_channel = mass_channel;
        cfg.noise_band = parse_band(band);
        cfg.force_component = parse_component(component);
        cfg.noise_scale = noise_scale;
        cfg.constant_force = constant_force;
        cfg.q0 = q0;
        cfg.p0 = p0;
        cfg.record_stride = stride;
        cfg.validate();

        const auto result = run_trajectory(cfg);

        OutputRecord rec{"simulate", {}, {}};
        echo_model(rec, model);
        rec.param("mass-bare", mass_bare);
        rec.param("dt", dt);
        rec.param("steps", std::to_string(steps));
        rec.param("seed", std::to_string(seed));
        rec.param("mass-channel", mass_channel ? "true" : "false");
        rec.param("band", cli::format_number(cfg.noise_band.lo) + ":" + cli::format_number(cfg.noise_band.hi));
        rec.param("component", component);
        rec.param("noise-scale", noise_scale);
        if (constant_force) rec.param("constant-force", *constant_force);
        rec.param("q0", q0);
        rec.param("p0", p0);
        rec.param("stride", std::to_string(stride));
        rec.param("format", output.format);

        if (!output.out.empty()) {
            cli::Column t{"t", {}}, q{"q", {}}, p{"p", {}}, mass{"m", {}}, v{"v", {}}, e{"e", {}};
            for (const auto& s : result.states) {
                t.values.push_back(s.t);
                q.values.push_back(s.q);
                p.values.push_back(s.p);
                mass.values.push_back(s.m);
                v.values.push_back(s.velocity());
                e.values.push_back(s.energy());
            }
            rec.columns = {t, q, p, mass, v, e};
            cli::emit(rec.render(output.format), output.out);
        }

        rec.columns.clear();
        auto j = rec.to_json();
        j.erase("columns");
        const auto& d = result.diagnostics;
        j["diagnostics"] = {{"steps", d.steps},
                            {"max_speed", d.max_speed},
                            {"max_dispersion_residual", d.max_dispersion_residual},
                            {"max_step_ratio", d.max_step_ratio},
                            {"momentum_variance", d.momentum_variance},
                            {"mass_mean", d.mass_mean},
                            {"mass_mean_prediction", d.mass_mean_prediction},
                            {"periodogram_fit", d.periodogram_fit ? nlohmann::ordered_json(*d.periodogram_fit)
                                                                  : nlohmann::ordered_json(nullptr)}};
        cli::emit(j.dump(2) + "\n", summary);
        return exit_ok;
    }
};

struct VerifyCommand {
    ModelOptions model;
    std::string suite = "all";
    std::vector<std::string> tol;
    std::string format = "text";
    std::string out;

    int run() const
    {
        const MirrorModel m(model.omega_c, model.hbar);
        ThresholdOverrides overrides;
        for (const auto& entry : tol) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ValidationError("--tol expects check=value, got '" + entry + "'");
            overrides[entry.substr(0, eq)] = detail::parse_double(std::string_view(entry).substr(eq + 1), "threshold");
        }
        const auto results = run_verify_suite(suite, m, overrides);
        const bool all_pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });

        std::string text;
        if (format == "text") {
            for (const auto& r : results)
                text += std::string(r.pass ? "PASS " : "FAIL ") + r.name + " measured=" + cli::format_number(r.measured) +
                        " threshold=" + cli::format_number(r.threshold) + "\n";
            text += all_pass ? "all checks passed\n" : "verification FAILED\n";
        } else {
            nlohmann::ordered_json j;
            j["schema_version"] = cli::schema_version;
            j["command"] = "verify";
            j["parameters"] = {{"suite", suite},
                               {"omega-c", cli::format_number(model.omega_c)},
                               {"hbar", cli::format_number(model.hbar)}};
            for (const auto& [k, v] : overrides) j["parameters"]["tol." + k] = cli::format_number(v);
            j["checks"] = nlohmann::ordered_json::array();
            for (const auto& r : results)
                j["checks"].push_back({{"name", r.name}, {"measured", r.measured}, {"threshold", r.threshold},
                                       {"pass", r.pass}});
            j["pass"] = all_pass;
            if (format == "json") {
                text = j.dump(2) + "\n";
            } else {
                text = "name,measured,threshold,verdict\n";
                for (const auto& r : results)
                    text += cli::csv_field(r.name) + "," + cli::format_number(r.measured) + "," +
                            cli::format_number(r.threshold) + "," + (r.pass ? "pass" : "fail") + "\n";
            }
        }
        cli::emit(text, out);
        return all_pass ? exit_ok : exit_verify_failed;
    }
};

// ---------------------------------------------------------------------------
// --config support: a flat key=value file whose keys are flag names.

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

/// Removes --config from args and splices the file's entries in after the
/// subcommand, skipping keys that were also given on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args)
{
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (!path) return args;

    const auto given = [&](const std::string& key) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
    };
    std::vector<std::string> injected;
    for (const auto& [key, value] : read_config(*path))
        if (!given(key)) injected.push_back("--" + key + "=" + value);

    const auto sub = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    const auto pos = sub == args.end() ? args.end() : sub + 1;
    args.insert(pos, injected.begin(), injected.end());
    return args;
}

int run(std::vector<std::string> args)
{
    CLI::App app{"Vacuum fluctuation spectra and relativistic trajectories of a partially transmitting mirror"};
    app.require_subcommand(1);
    std::string config_help;
    app.add_option("--config", config_help, "Flat key=value file; keys are flag names, command-line flags win");

    DelayCommand delay;
    auto* delay_cmd = app.add_subcommand("delay", "Reflection delay and total phase shift on a grid");
    add_model_options(delay_cmd, delay.model);
    add_output_options(delay_cmd, delay.output);
    delay_cmd->add_option("--grid", delay.grid, "min:max:points[:log|lin]")->capture_default_str();

    SpectrumCommand spectrum;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Force, mass or field correlation spectrum on a grid");
    add_model_options(spectrum_cmd, spectrum.model);
    add_output_options(spectrum_cmd, spectrum.output);
    spectrum_cmd->add_option("--component", spectrum.component)
        ->check(CLI::IsMember({"f0f0", "f1f1", "f0f1", "mass", "field"}))
        ->capture_default_str();
    spectrum_cmd->add_option("--method", spectrum.method)
        ->check(CLI::IsMember({"quad", "closed", "conv", "asym"}))
        ->capture_default_str();
    spectrum_cmd->add_option("--grid", spectrum.grid, "min:max:points[:log|lin]")->capture_default_str();
    spectrum_cmd->add_option("--tol", spectrum.tol, "Relative quadrature tolerance")->capture_default_str();
    spectrum_cmd->add_option("--threads", spectrum.threads, "Worker threads (0 = all cores)");

    MeanMassCommand mean_mass;
    auto* mean_cmd = app.add_subcommand("mean-mass", "Cutoff-regularized mean induced mass");
    add_model_options(mean_cmd, mean_mass.model);
    add_output_options(mean_cmd, mean_mass.output);
    mean_cmd->add_option("--cutoff", mean_mass.cutoff, "UV cutoff Lambda (required)")->required();
    mean_cmd->add_option("--tol", mean_mass.tol, "Relative quadrature tolerance")->capture_default_str();

    SimulateCommand simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "Relativistic trajectory under synthesized vacuum noise");
    add_model_options(sim_cmd, simulate.model);
    add_output_options(sim_cmd, simulate.output);
    sim_cmd->add_option("--mass-bare", simulate.mass_bare, "Bare mass")->capture_default_str();
    sim_cmd->add_option("--dt", simulate.dt, "Time step")->capture_default_str();
    sim_cmd->add_option("--steps", simulate.steps, "Number of steps")->capture_default_str();
    sim_cmd->add_option("--seed", simulate.seed, "Random seed")->capture_default_str();
    sim_cmd->add_flag("--mass-channel", simulate.mass_channel, "Drive the mass with Omega phi^2");
    sim_cmd->add_option("--band", simulate.band, "Noise band lo:hi")->capture_default_str();
    sim_cmd->add_option("--component", simulate.component, "Force noise spectrum")
        ->check(CLI::IsMember({"f0f0", "f1f1", "f0f1", "mass", "field"}))
        ->capture_default_str();
    sim_cmd->add_option("--noise-scale", simulate.noise_scale, "Multiplier on the force noise")->capture_default_str();
    sim_cmd->add_option("--constant-force", simulate.constant_force, "Replace the noise by a constant force");
    sim_cmd->add_option("--q0", simulate.q0, "Initial position")->capture_default_str();
    sim_cmd->add_option("--p0", simulate.p0, "Initial momentum")->capture_default_str();
    sim_cmd->add_option("--stride", simulate.stride, "Record every n-th state")->capture_default_str();
    sim_cmd->add_option("--summary", simulate.summary, "Diagnostics file (stdout when omitted)");

    VerifyCommand verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run invariant batteries; nonzero exit on failure");
    add_model_options(verify_cmd, verify.model);
    verify_cmd->add_option("--suite", verify.suite)
        ->check(CLI::IsMember({"unitarity", "closedform", "asymptotes", "limits", "dispersion", "all"}))
        ->capture_default_str();
    verify_cmd->add_option("--tol", verify.tol, "Threshold override check=value (repeatable)");
    verify_cmd->add_option("--format", verify.format)->check(CLI::IsMember({"text", "csv", "json"}))->capture_default_str();
    verify_cmd->add_option("--out", verify.out, "Report file (stdout when omitted)");

    try {
        args = apply_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (*delay_cmd) return delay.run();
        if (*spectrum_cmd) return spectrum.run();
        if (*mean_cmd) return mean_mass.run();
        if (*sim_cmd) return simulate.run();
        if (*verify_cmd) return verify.run();
    } catch (const ValidationError& e) {
        const auto active = app.get_subcommands();
        std::cerr << "error: " << e.what() << "\n\n" << (active.empty() ? app.help() : active.front()->help());
        return exit_usage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_usage;
}

}  // namespace

int main(int argc, char** argv)
{
    return run(std::vector<std::string>(argv, argv + argc));
}
