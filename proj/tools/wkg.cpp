// Command-line front end: algebraic analysis of coupled wave--Klein-Gordon
// systems (null condition, divergence structure, component partition) and
// numerical integration of semilinear instances.

#include "wkg/diagnostics.hpp"
#include "wkg/fixtures.hpp"
#include "wkg/null_analyzer.hpp"
#include "wkg/solver.hpp"
#include "wkg/system_model.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotApplicable = 2;
constexpr int kExitBlowup = 3;

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Resolves a system argument: an existing file path is loaded as JSON,
/// anything else is looked up in the built-in catalog.
wkg::SystemSpec resolve_system(const std::string& arg) {
    if (std::filesystem::exists(arg)) return wkg::load_spec(arg);
    return wkg::get_fixture(arg).spec;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw wkg::SpecError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const wkg::SystemSpec& spec, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json m;
    m["command"] = command;
    m["system"] = spec.name;
    const std::string dump = wkg::spec_to_json(spec).dump();
    m["system_hash_fnv1a"] = fnv1a(dump);
    m["seed"] = seed;
    m["outputs"] = outputs;
    write_json(dir / "manifest.json", m);
}

void write_series_csv(const std::filesystem::path& path, const wkg::SimulationResult& res,
                      int ncomp) {
    std::ofstream out(path);
    out << "t,component,sup_norm,wnorm_kg,wnorm_dw,energy\n";
    out.precision(12);
    for (const auto& o : res.observations)
        for (int i = 0; i < ncomp; ++i)
            out << o.t << "," << (i + 1) << "," << o.max_abs[i] << "," << o.wnorm_kg[i] << ","
                << o.wnorm_dw[i] << "," << o.energy << "\n";
}

wkg::InitialData cli_data(const std::string& profile, const std::vector<double>& amps,
                          double width, int N, bool kick = false) {
    std::vector<double> a = amps;
    if (a.empty()) a.assign(N, 1.0);
    if (static_cast<int>(a.size()) == 1) a.assign(N, a[0]);
    if (static_cast<int>(a.size()) != N)
        throw wkg::SpecError("--amp needs 1 or N values");
    wkg::InitialData d;
    std::function<double(int, double)> prof;
    if (profile == "gaussian")
        prof = [a, width](int comp, double r) {
            return a.at(comp - 1) * std::exp(-r * r / (width * width));
        };
    else if (profile == "bump")
        prof = [a, width](int comp, double r) {
            const double z = r / width;
            return z < 1.0 ? a.at(comp - 1) * std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0;
        };
    else
        throw wkg::SpecError("unknown profile: " + profile);
    if (kick)
        d.v0 = prof;
    else
        d.u0 = prof;
    return d;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analyzer and integrator for coupled wave--Klein-Gordon systems"};
    app.require_subcommand(1);

    // ---- analyze ----
    std::string an_system, an_out = "out";
    std::uint64_t an_seed = 20240901;
    auto* analyze = app.add_subcommand("analyze", "Decide the global-existence criteria");
    analyze->add_option("system", an_system, "spec file or catalog name")->required();
    analyze->add_option("--out", an_out, "output directory");
    analyze->add_option("--seed", an_seed, "seed for witness search");

    // ---- simulate ----
    std::string si_system, si_out = "out", si_mode = "radial", si_profile = "gaussian";
    double si_dr = 0.05, si_tend = 10.0, si_width = 2.0, si_threshold = 1e3, si_domain = -1;
    int si_grid_n = 48;
    double si_grid_L = 6.0;
    std::vector<double> si_amp;
    int si_outputs = 50;
    bool si_profiles = false;
    auto* simulate = app.add_subcommand("simulate", "Integrate a semilinear system");
    simulate->add_option("system", si_system)->required();
    simulate->add_option("--out", si_out);
    simulate->add_option("--mode", si_mode, "radial or grid3");
    simulate->add_option("--dr", si_dr, "radial cell size");
    simulate->add_option("--t-end", si_tend);
    simulate->add_option("--domain", si_domain, "radial domain radius (<0: auto)");
    simulate->add_option("--grid-n", si_grid_n, "3d cells per axis");
    simulate->add_option("--grid-L", si_grid_L, "3d half-width");
    simulate->add_option("--amp", si_amp, "initial amplitude(s)");
    simulate->add_option("--width", si_width, "initial data width");
    simulate->add_option("--profile", si_profile, "gaussian or bump");
    simulate->add_option("--threshold", si_threshold, "blowup threshold");
    simulate->add_option("--outputs", si_outputs, "number of observation times");
    simulate->add_flag("--keep-profiles", si_profiles);
    bool si_kick = false;
    simulate->add_flag("--kick", si_kick, "put the profile in the time derivative");

    // ---- decay-fit ----
    std::string df_system, df_out = "out";
    double df_t0 = 20.0, df_t1 = 200.0, df_dr = 0.05, df_width = 2.0;
    std::vector<double> df_amp;
    int df_comp = 1, df_outputs = 40;
    auto* decayfit = app.add_subcommand("decay-fit", "Fit sup-norm decay exponent");
    decayfit->add_option("system", df_system)->required();
    decayfit->add_option("--out", df_out);
    decayfit->add_option("--component", df_comp);
    decayfit->add_option("--t0", df_t0);
    decayfit->add_option("--t1", df_t1);
    decayfit->add_option("--dr", df_dr);
    decayfit->add_option("--amp", df_amp);
    decayfit->add_option("--width", df_width);
    decayfit->add_option("--outputs", df_outputs);

    // ---- identities ----
    std::string id_out = "out";
    int id_samples = 200;
    std::uint64_t id_seed = 4242;
    double id_tol = 1e-10;
    auto* identities = app.add_subcommand("identities", "Check frame and null-form identities");
    identities->add_option("--out", id_out);
    identities->add_option("--samples", id_samples);
    identities->add_option("--seed", id_seed);
    identities->add_option("--tol", id_tol);

    // ---- contrast ----
    std::string ct_system = "wave_dtsq_blowup", ct_out = "out";
    std::vector<double> ct_eps = {0.3, 0.2, 0.1};
    double ct_tend = 400.0, ct_dr = 0.1, ct_width = 1.0, ct_threshold = 50.0;
    auto* contrast = app.add_subcommand("contrast", "Blowup time versus data size");
    contrast->add_option("system", ct_system);
    contrast->add_option("--out", ct_out);
    contrast->add_option("--eps", ct_eps, "amplitudes");
    contrast->add_option("--t-end", ct_tend);
    contrast->add_option("--dr", ct_dr);
    contrast->add_option("--width", ct_width);
    contrast->add_option("--threshold", ct_threshold);
    bool ct_kick = false;
    contrast->add_flag("--kick", ct_kick);

    // ---- fixtures ----
    std::string fx_out = "fixtures";
    auto* fixtures = app.add_subcommand("fixtures", "Export the built-in catalog as JSON");
    fixtures->add_option("--out", fx_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            const auto spec = resolve_system(an_system);
            wkg::validate_spec(spec);
            const auto rep = wkg::analyze_system(spec, an_seed);
            std::filesystem::create_directories(an_out);
            write_json(std::filesystem::path(an_out) / "report.json", wkg::report_to_json(rep));
            write_manifest(an_out, "analyze", spec, an_seed, {"report.json"});
            std::cout << (rep.theorem_applies ? "applies" : "not-applicable") << "\n";
            return rep.theorem_applies ? kExitOk : kExitNotApplicable;
        }
        if (*simulate) {
            const auto spec = resolve_system(si_system);
            wkg::SolverConfig cfg;
            cfg.mode = si_mode == "grid3" ? wkg::SolverConfig::Mode::Grid3D
                                          : wkg::SolverConfig::Mode::Radial;
            cfg.dr = si_dr;
            cfg.t_end = si_tend;
            cfg.domain = si_domain;
            cfg.grid_n = si_grid_n;
            cfg.grid_L = si_grid_L;
            cfg.blowup_threshold = si_threshold;
            cfg.keep_profiles = si_profiles;
            cfg.output_times = linspace(0.0, si_tend, std::max(2, si_outputs));
            const auto data = cli_data(si_profile, si_amp, si_width, spec.N, si_kick);
            const auto res = wkg::run_simulation(spec, cfg, data);
            std::filesystem::create_directories(si_out);
            write_series_csv(std::filesystem::path(si_out) / "series.csv", res, spec.N);
            nlohmann::ordered_json j;
            j["blowup"] = res.blowup;
            if (res.blowup) j["blowup_time"] = res.blowup_time;
            j["steps"] = res.steps;
            j["dt"] = res.dt;
            write_json(std::filesystem::path(si_out) / "report.json", j);
            write_manifest(si_out, "simulate", spec, 0, {"report.json", "series.csv"});
            std::cout << (res.blowup ? "blowup at t=" + std::to_string(res.blowup_time)
                                     : "completed")
                      << " (steps=" << std::to_string(res.steps) << ")\n";
            return res.blowup ? kExitBlowup : kExitOk;
        }
        if (*decayfit) {
            const auto spec = resolve_system(df_system);
            wkg::SolverConfig cfg;
            cfg.dr = df_dr;
            cfg.t_end = df_t1;
            cfg.output_times = linspace(df_t0, df_t1, std::max(2, df_outputs));
            const auto data = cli_data("gaussian", df_amp, df_width, spec.N);
            const auto res = wkg::run_radial(spec, cfg, data);
            if (res.blowup) {
                std::cerr << "solution left the small-data regime\n";
                return kExitBlowup;
            }
            std::vector<double> ts, vs;
            for (const auto& o : res.observations)
                if (o.t >= df_t0 && o.max_abs.at(df_comp - 1) > 0) {
                    ts.push_back(o.t);
                    vs.push_back(o.max_abs.at(df_comp - 1));
                }
            const double slope = wkg::fit_decay_exponent(ts, vs);
            std::filesystem::create_directories(df_out);
            nlohmann::ordered_json j;
            j["component"] = df_comp;
            j["window"] = {df_t0, df_t1};
            j["exponent"] = slope;
            write_json(std::filesystem::path(df_out) / "report.json", j);
            write_manifest(df_out, "decay-fit", spec, 0, {"report.json"});
            std::cout << "decay exponent: " << slope << "\n";
            return kExitOk;
        }
        if (*identities) {
            const auto reps = wkg::frame_identity_suite(id_samples, id_seed);
            const double nf = wkg::null_form_bound_ratio(5 * id_samples, id_seed + 7);
            const double wc = wkg::weight_comparison_ratio(10 * id_samples, id_seed + 8);
            const double sb = wkg::sobolev_bound_ratio();
            bool ok = true;
            nlohmann::ordered_json j, ids = nlohmann::ordered_json::array();
            for (const auto& r : reps) {
                nlohmann::ordered_json e;
                e["name"] = r.name;
                e["max_abs_residual"] = r.max_abs_residual;
                ids.push_back(std::move(e));
                ok = ok && r.max_abs_residual <= id_tol;
                std::cout << r.name << ": " << r.max_abs_residual << "\n";
            }
            j["identities"] = std::move(ids);
            j["null_form_bound_ratio"] = nf;
            j["weight_comparison_ratio"] = wc;
            j["sobolev_bound_ratio"] = sb;
            ok = ok && wc <= 1.0;
            std::filesystem::create_directories(id_out);
            write_json(std::filesystem::path(id_out) / "report.json", j);
            std::cout << "null_form_bound_ratio: " << nf << "\n"
                      << "weight_comparison_ratio: " << wc << "\n"
                      << "sobolev_bound_ratio: " << sb << "\n";
            return ok ? kExitOk : kExitError;
        }
        if (*contrast) {
            const auto spec = resolve_system(ct_system);
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            std::cout << "eps,blowup,blowup_time\n";
            for (double e : ct_eps) {
                wkg::SolverConfig cfg;
                cfg.dr = ct_dr;
                cfg.t_end = ct_tend;
                cfg.blowup_threshold = ct_threshold;
                const auto res = wkg::run_radial(
                    spec, cfg, cli_data("gaussian", {e}, ct_width, spec.N, ct_kick));
                nlohmann::ordered_json r;
                r["eps"] = e;
                r["blowup"] = res.blowup;
                if (res.blowup) r["blowup_time"] = res.blowup_time;
                rows.push_back(std::move(r));
                std::cout << e << "," << res.blowup << ","
                          << (res.blowup ? std::to_string(res.blowup_time) : "-") << "\n";
            }
            std::filesystem::create_directories(ct_out);
            nlohmann::ordered_json j;
            j["system"] = spec.name;
            j["runs"] = std::move(rows);
            write_json(std::filesystem::path(ct_out) / "report.json", j);
            return kExitOk;
        }
        if (*fixtures) {
            std::filesystem::create_directories(fx_out);
            for (const auto& name : wkg::fixture_names())
                wkg::save_spec(wkg::get_fixture(name).spec,
                               (std::filesystem::path(fx_out) / (name + ".json")).string());
            std::cout << "wrote " << wkg::fixture_names().size() << " systems to " << fx_out
                      << "\n";
            return kExitOk;
        }
    } catch (const wkg::UnsupportedSystem& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
