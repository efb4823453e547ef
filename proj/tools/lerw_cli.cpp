// Command-line front end: sampling, driving extraction, continuous runs, field
// solves and the verification checks. Exit codes: 0 ok, 1 invalid input,
// 2 numeric failure, 3 failed check.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lerw/io.hpp"
#include "lerw/parallel.hpp"
#include "lerw/verify.hpp"

namespace fs = std::filesystem;
using namespace lerw;
using nlohmann::json;

namespace {

struct CheckFailed {
    std::string what;
};

double parse_mesh(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return std::stod(s);
        return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
        throw ValidationError("bad mesh '" + s + "'");
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_mesh(item));
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

// "x,y;x,y"
std::vector<Complex> parse_points(const std::string& s) {
    std::vector<Complex> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto v = parse_list(item);
        if (v.size() != 2) throw ValidationError("point needs two coordinates: '" + item + "'");
        out.emplace_back(v[0], v[1]);
    }
    return out;
}

Config load_config(const std::string& path, double mesh_override) {
    Config cfg = parse_domain(read_file(path));
    if (mesh_override > 0.0) cfg.mesh = mesh_override;
    validate(cfg);
    return cfg;
}

double mesh_of(const Config& cfg) {
    if (!cfg.mesh) throw ValidationError("mesh: required (give --mesh or a mesh field)");
    return *cfg.mesh;
}

json point_json(Complex z) { return json::array({z.real(), z.imag()}); }

json report_json(const MartingaleReport& r) {
    json j;
    j["samples"] = r.samples;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["note"] = r.note;
    for (const auto& p : r.probes)
        j["probes"].push_back({{"z", point_json(p.z)},
                               {"initial", p.initial},
                               {"mean", p.estimate.mean},
                               {"se", p.estimate.se},
                               {"z_score", p.z_score},
                               {"bound", p.bound},
                               {"stopped", p.stopped},
                               {"pass", p.pass}});
    return j;
}

class Runner {
public:
    explicit Runner(std::string command) : start_(std::chrono::steady_clock::now()) { manifest_.command = std::move(command); }
    RunManifest& manifest() { return manifest_; }
    void output(const fs::path& dir, const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        manifest_.outputs.push_back(name);
    }
    void finish(const fs::path& dir) {
        manifest_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file(dir / "manifest.json", manifest_.to_json().dump(2) + "\n");
    }

private:
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

std::string indexed(const std::string& stem, std::uint64_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05llu.csv", stem.c_str(), static_cast<unsigned long long>(i));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loop-erased random walk and continuous LERW toolkit"};
    app.require_subcommand(1);

    std::string domain_file, out_dir = "out", path_file, probes_s, meshes_s = "1/20,1/40,1/80", kind = "green",
                mode = "discrete", z_s, eps_s = "0.02,0.01,0.005", mesh_s;
    std::uint64_t seed = 1, n = 1, first = 0;
    double dt = 1e-3, tmax = 0.5, block_d = 0.2, rho0 = 0.5, t_probe = 0.05, r = 0.1, solve_mesh = 1.0 / 32.0,
           stop_margin = -1.0, conv_dt = 1e-4;
    bool zero_drift = false;

    auto mesh_opt = [&](CLI::App* c) { c->add_option("--mesh", mesh_s, "Lattice spacing, e.g. 0.05 or 1/64"); };

    auto* s_sample = app.add_subcommand("sample-lerw", "Sample loop-erased walks");
    s_sample->add_option("--domain", domain_file, "Domain JSON")->required();
    mesh_opt(s_sample);
    s_sample->add_option("--n", n, "Number of samples");
    s_sample->add_option("--seed", seed, "Seed");
    s_sample->add_option("--first", first, "First replica index");
    s_sample->add_option("--out", out_dir, "Output directory");

    auto* s_extract = app.add_subcommand("extract-driving", "Driving function of a path CSV");
    s_extract->add_option("--path", path_file, "Path CSV (x,y) starting on the axis")->required();
    s_extract->add_option("--domain", domain_file, "Domain JSON; selects the uniformizer");
    s_extract->add_option("--out", out_dir, "Output directory");

    auto* s_cont = app.add_subcommand("run-continuous", "Integrate the continuous LERW driving SDE");
    s_cont->add_option("--domain", domain_file, "Domain JSON")->required();
    s_cont->add_option("--dt", dt, "Time step");
    s_cont->add_option("--tmax", tmax, "Final capacity time");
    s_cont->add_option("--stop-margin", stop_margin, "Distance to the target that ends a run");
    s_cont->add_option("--solve-mesh", solve_mesh, "Solver mesh for numeric drifts");
    s_cont->add_flag("--zero-drift", zero_drift, "Drop the drift (pure sqrt(2) Brownian driving)");
    s_cont->add_option("--n", n, "Number of runs");
    s_cont->add_option("--seed", seed, "Seed");
    s_cont->add_option("--out", out_dir, "Output directory");

    auto* s_field = app.add_subcommand("solve-field", "Solve a harmonic field on the lattice domain");
    s_field->add_option("--domain", domain_file, "Domain JSON")->required();
    mesh_opt(s_field);
    s_field->add_option("--kind", kind, "green | harmonic | poisson | hit")
        ->check(CLI::IsMember({"green", "harmonic", "poisson", "hit"}));
    s_field->add_option("--out", out_dir, "Output directory");

    auto* s_mart = app.add_subcommand("check-martingale", "Martingale check (discrete or continuous)");
    s_mart->add_option("--domain", domain_file, "Domain JSON")->required();
    mesh_opt(s_mart);
    s_mart->add_option("--mode", mode, "discrete | continuous")->check(CLI::IsMember({"discrete", "continuous"}));
    s_mart->add_option("--probes", probes_s, "Probe points 'x,y;x,y' (file frame)")->required();
    s_mart->add_option("--d", block_d, "Block scale (discrete)");
    s_mart->add_option("--t", t_probe, "End time (continuous)");
    s_mart->add_option("--dt", dt, "Time step (continuous)");
    s_mart->add_flag("--zero-drift", zero_drift, "Negative control (continuous)");
    s_mart->add_option("--n", n, "Number of samples");
    s_mart->add_option("--seed", seed, "Seed");
    s_mart->add_option("--out", out_dir, "Output directory");

    auto* s_mom = app.add_subcommand("check-moments", "Driving increment moments over stopping blocks");
    s_mom->add_option("--domain", domain_file, "Domain JSON")->required();
    mesh_opt(s_mom);
    s_mom->add_option("--d", block_d, "Block scale");
    s_mom->add_option("--rho0", rho0, "Blocks are taken inside |z| < rho0");
    s_mom->add_option("--n", n, "Number of samples");
    s_mom->add_option("--seed", seed, "Seed");
    s_mom->add_option("--out", out_dir, "Output directory");

    auto* s_conv = app.add_subcommand("check-convergence", "KS and Frechet trend across meshes");
    s_conv->add_option("--domain", domain_file, "Domain JSON")->required();
    s_conv->add_option("--meshes", meshes_s, "Comma-separated meshes, e.g. 1/20,1/40,1/80");
    s_conv->add_option("--t", t_probe, "Probe time");
    s_conv->add_option("--dt", conv_dt, "Continuous time step");
    s_conv->add_option("--n", n, "Samples per level");
    s_conv->add_option("--seed", seed, "Seed");
    s_conv->add_option("--out", out_dir, "Output directory");

    auto* s_quasi = app.add_subcommand("quasi-loops", "Quasi-loops of a path, or their frequency over samples");
    s_quasi->add_option("--path", path_file, "Path CSV (x,y)");
    s_quasi->add_option("--domain", domain_file, "Domain JSON (sampling mode)");
    mesh_opt(s_quasi);
    s_quasi->add_option("--z", z_s, "Center 'x,y'")->required();
    s_quasi->add_option("--r", r, "Radius");
    s_quasi->add_option("--eps", eps_s, "Comma-separated closeness values");
    s_quasi->add_option("--n", n, "Number of samples (sampling mode)");
    s_quasi->add_option("--seed", seed, "Seed");
    s_quasi->add_option("--out", out_dir, "Output directory");

    auto* s_report = app.add_subcommand("report", "Summarize the manifests below a directory");
    s_report->add_option("--dir", out_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const double mesh_override = mesh_s.empty() ? 0.0 : parse_mesh(mesh_s);
        const fs::path out(out_dir);

        if (*s_sample) {
            const Config cfg = load_config(domain_file, mesh_override);
            Runner run("sample-lerw");
            LerwSampler sampler(build_grid(cfg.domain, cfg.target, mesh_of(cfg)));
            const auto samples = sampler.sample_batch(seed, first, n);
            double steps = 0.0, length = 0.0;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                std::vector<Complex> pts;
                for (Complex z : samples[i].points) pts.push_back(cfg.domain.to_file(z));
                run.output(out, indexed("path", first + i), path_csv(pts));
                steps += static_cast<double>(samples[i].walk_steps);
                length += static_cast<double>(samples[i].path.size());
            }
            auto& m = run.manifest();
            m.config = json::parse(serialize(cfg));
            m.seed = seed;
            m.replicas = n;
            m.summary = {{"first_replica", first},
                         {"mean_walk_steps", n ? steps / n : 0.0},
                         {"mean_path_vertices", n ? length / n : 0.0},
                         {"grid", {{"interior", sampler.grid().stats().interior}, {"boundary", sampler.grid().stats().boundary}}}};
            run.finish(out);
            return 0;
        }

        if (*s_extract) {
            Runner run("extract-driving");
            std::vector<Complex> pts = parse_path_csv(read_file(path_file));
            Uniformizer f = Uniformizer::identity();
            double shift = pts.front().real();
            if (!domain_file.empty()) {
                const Config cfg = parse_domain(read_file(domain_file));
                validate(cfg);
                f = Uniformizer::for_domain(cfg.domain);
                shift = cfg.domain.start_x;
                run.manifest().config = json::parse(serialize(cfg));
            }
            for (Complex& z : pts) z -= shift;
            const DiscreteDriving dd = discrete_driving(pts, f);
            run.output(out, "driving.csv", driving_csv(dd.ex.driving));
            run.output(out, "vertex_times.csv", [&] {
                std::string s = "n,v,xi\n";
                for (std::size_t k = 0; k < dd.v.size(); ++k) {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, dd.v[k], dd.xi[k]);
                    s += buf;
                }
                return s;
            }());
            run.manifest().summary = {{"total_time", dd.ex.state.time()},
                                      {"records", dd.ex.state.size()},
                                      {"terminal_on_axis", dd.ex.terminal_on_axis}};
            run.finish(out);
            return 0;
        }

        if (*s_cont) {
            const Config cfg = load_config(domain_file, 0.0);
            Runner run("run-continuous");
            ContinuousOptions co;
            co.dt = dt;
            co.t_max = tmax;
            co.stop_margin = stop_margin;
            co.zero_drift = zero_drift;
            co.solve_mesh = solve_mesh;
            std::vector<ContinuousRun> runs(n);
            parallel_for(n, [&](std::size_t i) {
                Rng rng = rng_stream(seed, i);
                ContinuousLerw c(cfg.domain, cfg.target, co);
                runs[i] = c.run(rng);
            });
            json stops = json::array();
            for (std::size_t i = 0; i < n; ++i) {
                run.output(out, indexed("driving", i), driving_csv(runs[i].driving));
                run.output(out, indexed("trace", i), trace_csv(runs[i].driving.t, runs[i].trace));
                run.output(out, indexed("continuous", i), continuous_csv(runs[i]));
                stops.push_back(to_string(runs[i].stop));
            }
            auto& m = run.manifest();
            m.config = json::parse(serialize(cfg));
            m.config["dt"] = dt;
            m.config["tmax"] = tmax;
            m.config["stop_margin"] = stop_margin;
            m.config["zero_drift"] = zero_drift;
            m.config["solve_mesh"] = solve_mesh;
            m.seed = seed;
            m.replicas = n;
            m.summary = {{"stop_reasons", stops}};
            run.finish(out);
            return 0;
        }

        if (*s_field) {
            const Config cfg = load_config(domain_file, mesh_override);
            Runner run("solve-field");
            const double h = mesh_of(cfg);
            const Target ti = to_internal(cfg.domain, cfg.target);
            HarmonicField field;
            if (kind == "hit") {
                field = hit_field(build_grid(cfg.domain, cfg.target, h));
            } else {
                GridPtr g = build_solve_grid(std::make_shared<DomainRegion>(cfg.domain), h);
                if (kind == "green") {
                    if (ti.kind != TargetKind::InteriorPoint) throw ValidationError("green needs an interior target");
                    field = green_function(g, nullptr, ti.p);
                } else if (kind == "harmonic") {
                    field = harmonic_measure(g, nullptr, ti);
                } else {
                    if (ti.kind != TargetKind::PrimeEnd) throw ValidationError("poisson needs a prime_end target");
                    field = boundary_poisson_field(g, nullptr, ti.x_e);
                }
            }
            run.output(out, "field.csv", field_csv(field, cfg.domain.start_x));
            auto& m = run.manifest();
            m.config = json::parse(serialize(cfg));
            m.config["kind"] = kind;
            m.summary = {{"iterations", field.info.iterations}, {"residual", field.info.residual}};
            run.finish(out);
            return 0;
        }

        if (*s_mart) {
            const Config cfg = load_config(domain_file, mesh_override);
            Runner run("check-martingale");
            const auto probes = parse_points(probes_s);
            MartingaleReport rep;
            if (mode == "discrete") {
                DiscreteMartingaleOptions o;
                o.d = block_d;
                rep = martingale_check_discrete(cfg.domain, cfg.target, mesh_of(cfg), probes, n, seed, o);
            } else {
                ContinuousMartingaleOptions o;
                o.t_end = t_probe;
                o.dt = dt;
                o.zero_drift = zero_drift;
                rep = martingale_check_continuous(cfg.domain, cfg.target, probes, n, seed, o);
            }
            const json j = report_json(rep);
            run.output(out, "report.json", j.dump(2) + "\n");
            auto& m = run.manifest();
            m.config = json::parse(serialize(cfg));
            m.config["mode"] = mode;
            m.seed = seed;
            m.replicas = n;
            m.summary = {{"pass", rep.pass}};
            run.finish(out);
            std::cout << j.dump(2) << "\n";
            if (!rep.pass) throw CheckFailed{"martingale check"};
            return 0;
        }

        if (*s_mom) {
            const Config cfg = load_config(domain_file, mesh_override);
            Runner run("check-moments");
            MomentOptions o;
            o.rho0 = rho0;
            const MomentReport rep = moment_check(cfg.domain, cfg.target, mesh_of(cfg), block_d, n, seed, o);
            const json j = {{"d", rep.d},           {"samples", rep.samples},   {"blocks", rep.blocks},
                            {"mean_deta", rep.mean_deta}, {"se_deta", rep.se_deta}, {"mean_q", rep.mean_q},
                            {"mean_2dv", rep.mean_2dv}, {"rel_q", rep.rel_q},     {"rel_se", rep.rel_se},
                            {"degenerate", rep.degenerate}, {"pass_eta", rep.pass_eta}, {"pass_q", rep.pass_q},
                            {"thresholds", {{"k_se", o.k_se}, {"rel_bias", o.rel_bias}}}};
            run.output(out, "report.json", j.dump(2) + "\n");
            auto& m = run.manifest();
            m.config = json::parse(serialize(cfg));
            m.config["d"] = block_d;
            m.config["rho0"] = rho0;
            m.seed = seed;
            m.replicas = n;
            m.summary = {{"pass", rep.pass_eta && rep.pass_q}};
            run.finish(out);
            std::cout << j.dump(2) << "\n";
            if (!rep.degenerate && !(rep.pass_eta && rep.pass_q)) throw CheckFailed{"moment check"};
            return 0;
        }

        if (*s_conv) {
            const Config cfg = load_config(domain_file, 0.0);
            Runner run("check-convergence");
            ConvergenceOptions o;
            o.dt = conv_dt;
            const auto meshes = parse_list(meshes_s);
            const ConvergenceReport rep = convergence_report(cfg.domain, cfg.target, meshes, t_probe, n, seed, o);
            json j = {{"t_probe", rep.t_probe},
                      {"ks_inversions", rep.ks_inversions},
                      {"frechet_inversions", rep.frechet_inversions},
                      {"ks_pass", rep.ks_pass},
                      {"frechet_pass", rep.frechet_pass},
                      {"pass", rep.pass}};
            for (const auto& lv : rep.levels)
                j["levels"].push_back({{"mesh", lv.delta},
                                       {"ks", lv.ks},
                                       {"ks_band", lv.ks_band},
                                       {"ks_p", lv.ks_p},
                                       {"frechet_median", lv.frechet_median},
                                       {"frechet_se", lv.frechet_se},
                                       {"short_paths", lv.short_paths}});
            run.output(out, "report.json", j.dump(2) + "\n");
            auto& m = run.manifest();
            m.config = json::parse(serialize(cfg));
            m.config["meshes"] = meshes;
            m.config["t_probe"] = t_probe;
            m.seed = seed;
            m.replicas = n;
            m.summary = {{"pass", rep.pass}};
            run.finish(out);
            std::cout << j.dump(2) << "\n";
            if (!rep.pass) throw CheckFailed{"convergence check"};
            return 0;
        }

        if (*s_quasi) {
            Runner run("quasi-loops");
            const auto zs = parse_list(z_s);
            if (zs.size() != 2) throw ValidationError("--z needs 'x,y'");
            const Complex z(zs[0], zs[1]);
            const auto eps = parse_list(eps_s);
            json j;
            if (!path_file.empty()) {
                const auto pts = parse_path_csv(read_file(path_file));
                for (double e : eps) {
                    json pairs = json::array();
                    for (auto [a, b] : quasi_loops(pts, z, r, e)) pairs.push_back({a, b});
                    j["eps"].push_back({{"eps", e}, {"pairs", pairs}});
                }
            } else {
                if (domain_file.empty()) throw ValidationError("give --path or --domain");
                const Config cfg = load_config(domain_file, mesh_override);
                const QuasiLoopTrend tr = quasi_loop_trend(cfg.domain, cfg.target, mesh_of(cfg), z, r, eps, n, seed);
                j = {{"eps", tr.eps}, {"prob", tr.prob}, {"se", tr.se}, {"samples", tr.samples}, {"pass", tr.pass}};
                run.manifest().config = json::parse(serialize(cfg));
                run.manifest().seed = seed;
                run.manifest().replicas = n;
            }
            run.output(out, "report.json", j.dump(2) + "\n");
            run.finish(out);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*s_report) {
            std::cout << run_report(out_dir).dump(2) << "\n";
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
