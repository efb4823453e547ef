// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here. Usage: acceptance [C1 C5 ...] runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../unit/oracle.hpp"
#include "lerw/continuous.hpp"
#include "lerw/harmonic.hpp"
#include "lerw/io.hpp"
#include "lerw/loewner.hpp"
#include "lerw/uniformizer.hpp"
#include "lerw/verify.hpp"

using namespace lerw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Domain half_disk(double R, double start_x = 0.0) {
    Domain d;
    d.far_radius = R;
    d.start_x = start_x;
    return d;
}

// ---- C1 ---------------------------------------------------------------------

// Chronological erasure: when a vertex repeats, drop the loop back to its
// first occurrence.
std::vector<int> erase_chronological(const std::vector<int>& path) {
    std::vector<int> out;
    for (int v : path) {
        auto it = std::find(out.begin(), out.end(), v);
        if (it != out.end()) out.erase(it + 1, out.end());
        else out.push_back(v);
    }
    return out;
}

Outcome c1_loop_erasure() {
    std::size_t paths = 0, mismatch = 0, not_idempotent = 0, bad_ends = 0;
    std::vector<int> path;
    std::function<void()> rec = [&]() {
        ++paths;
        const auto le = loop_erase(path);
        if (le != erase_chronological(path)) ++mismatch;
        if (loop_erase(le) != le) ++not_idempotent;
        if (le.front() != path.front() || le.back() != path.back()) ++bad_ends;
        if (path.size() > 8) return;
        const int x = path.back() % 3, y = path.back() / 3;
        const int dx[4] = {1, 0, -1, 0}, dy[4] = {0, 1, 0, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx > 2 || ny > 2) continue;
            path.push_back(nx + 3 * ny);
            rec();
            path.pop_back();
        }
    };
    for (int s = 0; s < 9; ++s) {
        path = {s};
        rec();
    }
    // sum over k <= 8 of 1^T A^k 1 for the 3 x 3 grid adjacency
    const bool complete = paths == 53829;
    return {complete && mismatch == 0 && not_idempotent == 0 && bad_ends == 0,
            fmt("%zu paths, %zu oracle mismatches, %zu non-idempotent, %zu endpoint errors", paths, mismatch,
                not_idempotent, bad_ends)};
}

// ---- C2 - C4 ----------------------------------------------------------------

Outcome c2_semicircle() {
    bool ok = true;
    std::string d;
    for (double r : {0.5, 1.0}) {
        const int n = 2000;
        std::vector<Complex> c;
        for (int k = 0; k < n; ++k) c.push_back(std::polar(r, kPi * k / (n - 1)));
        c.back() = Complex(-r, 0.0);
        const double hcap = 2.0 * extract_driving(c).state.time();
        const double rel = std::abs(hcap - r * r) / (r * r);
        ok = ok && rel <= 0.01;
        d += fmt("r=%.1f hcap=%.5f (rel err %.2e) ", r, hcap, rel);
    }
    return {ok, d + "tol 1%"};
}

double sine_driving(double t) { return 0.8 * std::sin(3.0 * t); }

Outcome c3_round_trip() {
    const auto xi = DrivingFunction::uniform(0.5, 1e-4, sine_driving);
    const auto ex = extract_driving(trace_from_driving(xi).z);
    double err = 0.0;
    for (std::size_t k = 0; k < ex.driving.size(); ++k)
        err = std::max(err, std::abs(ex.driving.xi[k] - xi.at(ex.driving.t[k])));
    const double rel = err / xi.range();
    return {rel <= 0.02, fmt("sup error %.3e = %.2f%% of range (tol 2%%)", err, 100 * rel)};
}

Outcome c4_far_field() {
    double worst = 0.0;
    const Complex z(0.0, 100.0);
    auto check = [&](const LoewnerState& s) {
        worst = std::max(worst, std::abs(s.map_point(z) - z - 2.0 * s.time() / z));
    };
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng = rng_stream(seed, 0);
        LoewnerState s;
        double x = 0.0;
        while (s.time() < 0.5 - 1e-12) {
            s.append(x, 1e-3);
            x += std::sqrt(2e-3) * standard_normal(rng);
            check(s);
        }
    }
    LoewnerState s;
    const auto xi = DrivingFunction::uniform(0.5, 1e-3, sine_driving);
    for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
        s.append(xi.xi[k], xi.t[k + 1] - xi.t[k]);
        check(s);
    }
    return {worst <= 1e-3, fmt("max |phi_t(100i) - 100i - 2t/(100i)| = %.2e over 3000 states (tol 1e-3)", worst)};
}

// ---- C5 - C7 ----------------------------------------------------------------

Outcome c5_drift_oracle() {
    auto g = build_solve_grid(std::make_shared<DomainRegion>(half_disk(50.0)), 1.0 / 64);
    const Complex p{0.0, 1.0};
    const auto field = solve_target_field(g, nullptr, Target::interior(p));
    double worst = 0.0;
    for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const auto fit = drift_numeric(field, LoewnerState{}, Uniformizer::identity(), x, std::abs(p - x));
        const double exact = -2.0 * (x - p.real()) / (std::norm(x - p.real()) + p.imag() * p.imag());
        worst = std::max(worst, std::abs(fit.X - exact));
    }
    return {worst <= 1e-2, fmt("max |X_num - X_exact| = %.2e at mesh 1/64, R = 50 (tol 1e-2)", worst)};
}

double wiggle(double t) { return 0.3 * std::sin(40.0 * t); }

Outcome c6_scaling() {
    // Omega at mesh h against 2 Omega at mesh 2h, with and without a hull.
    const double lam = 2.0, h = 1.0 / 32;
    const Complex p{0.3, 1.0};
    const auto tr = trace_from_driving(DrivingFunction::uniform(0.02, 1e-4, wiggle));
    LoewnerState s1 = tr.state, s2;
    for (const auto& r : s1.records()) s2.append(lam * r.xi, lam * lam * r.dt);
    std::vector<Complex> line2;
    for (Complex z : tr.z) line2.push_back(lam * z);

    auto g1 = build_solve_grid(std::make_shared<DomainRegion>(half_disk(10.0)), h);
    auto g2 = build_solve_grid(std::make_shared<DomainRegion>(half_disk(lam * 10.0)), lam * h);
    const auto f1 = solve_target_field(g1, nullptr, Target::interior(p));
    const auto f2 = solve_target_field(g2, nullptr, Target::interior(lam * p));
    const auto m1 = make_slit_mask(*g1, tr.z), m2 = make_slit_mask(*g2, line2);
    const auto F1 = solve_target_field(g1, &m1, Target::interior(p));
    const auto F2 = solve_target_field(g2, &m2, Target::interior(lam * p));
    const auto id = Uniformizer::identity();
    double worst = 0.0;
    int n = 0;
    for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const auto a = drift_numeric(f1, LoewnerState{}, id, x, std::abs(p - x));
        const auto b = drift_numeric(f2, LoewnerState{}, id, lam * x, lam * std::abs(p - x));
        worst = std::max(worst, std::abs(lam * b.X - a.X) / std::abs(a.X));
        ++n;
    }
    const double x = s1.records().back().xi;
    const auto a = drift_numeric(F1, s1, id, x, 1.0);
    const auto b = drift_numeric(F2, s2, id, lam * x, lam);
    worst = std::max(worst, std::abs(lam * b.X - a.X) / std::abs(a.X));
    ++n;
    return {worst <= 1e-3, fmt("max |lambda X_lambda - X| / |X| = %.2e over %d points, lambda = 2 (tol 1e-3)", worst, n)};
}

Outcome c7_green_and_measure() {
    auto g = build_grid(half_disk(20.0), Target::interior({0.0, 1.0}), 1.0 / 64);
    const auto G = green_function(g, nullptr, {0.0, 1.0});
    const double gv = G.interpolate({0.0, 2.0}), gx = std::log(3.0) / (2 * kPi);
    const auto H = harmonic_measure(g, nullptr, Target::axis_arc(-1.0, 1.0));
    const double hv = H.interpolate({0.0, 1.0});
    const double rel = std::abs(gv - gx) / gx;
    return {rel <= 0.02 && std::abs(hv - 0.5) <= 0.01,
            fmt("G(i;2i) = %.5f vs ln3/2pi = %.5f (rel %.2f%%, tol 2%%); omega([-1,1]; i) = %.5f (tol 0.5 +- 0.01)", gv,
                gx, 100 * rel, hv)};
}

// ---- C8 - C9 ----------------------------------------------------------------

Outcome c8_flux() {
    std::mt19937_64 rng(88);
    double worst = 0.0;
    int configs = 0;
    while (configs < 20) {
        // Random induced subgraph of a w x h block, w h <= 400.
        const int w = 5 + static_cast<int>(rng() % 16), hgt = 5 + static_cast<int>(rng() % 16);
        std::vector<int> id(static_cast<std::size_t>(w * hgt), -1);
        std::size_t n = 0;
        for (auto& v : id)
            if (rng() % 10 != 0) v = static_cast<int>(n++);
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (int y = 0; y < hgt; ++y)
            for (int x = 0; x < w; ++x) {
                const int a = id[static_cast<std::size_t>(y * w + x)];
                if (a < 0) continue;
                if (x + 1 < w && id[static_cast<std::size_t>(y * w + x + 1)] >= 0)
                    e.emplace_back(a, id[static_cast<std::size_t>(y * w + x + 1)]);
                if (y + 1 < hgt && id[static_cast<std::size_t>((y + 1) * w + x)] >= 0)
                    e.emplace_back(a, id[static_cast<std::size_t>((y + 1) * w + x)]);
            }
        const auto G = Graph::from_edges(n, e);
        std::vector<std::optional<double>> data(n);
        std::vector<std::size_t> A, B;
        for (std::size_t v = 0; v < n; ++v) {
            const auto r = rng() % 12;
            if (r == 0) {
                data[v] = 0.0;
                A.push_back(v);
            } else if (r == 1) {
                data[v] = 1.0;
                B.push_back(v);
            }
        }
        if (A.empty() || B.empty()) continue;
        // Components without data are singular for the dense solve; pin them.
        std::vector<int> comp(n, -1);
        for (std::size_t s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            std::vector<std::size_t> st{s}, members;
            comp[s] = static_cast<int>(s);
            bool has = false;
            while (!st.empty()) {
                const auto v = st.back();
                st.pop_back();
                members.push_back(v);
                has = has || data[v].has_value();
                for (std::size_t k = 0; k < G.degree(v); ++k)
                    if (comp[G.neighbor(v, k)] < 0) {
                        comp[G.neighbor(v, k)] = static_cast<int>(s);
                        st.push_back(G.neighbor(v, k));
                    }
            }
            if (!has) {
                data[members.front()] = 0.0;
                A.push_back(members.front());
            }
        }
        const auto h = oracle::dirichlet(G, data);
        worst = std::max(worst, std::abs(flux_sum_graph(G, h, A) + flux_sum_graph(G, h, B)));
        ++configs;
    }
    return {worst <= 1e-9, fmt("max |sum_A Lap h + sum_B Lap h| = %.2e over %d dense solves (tol 1e-9)", worst, configs)};
}

Outcome c9_observable() {
    const double delta = 1.0 / 64;
    const Domain d = half_disk(3.0);
    const Target t = Target::interior({0.25, 0.5});
    auto g = build_grid(d, t, delta);
    // Fixed 6-step self-avoiding prefix, lattice units.
    const int steps[7][2] = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {1, 4}, {0, 4}, {0, 5}};
    std::vector<VertexId> prefix;
    std::vector<Complex> pts{Complex(0.0, 0.0)};
    for (const auto& s : steps) {
        const Complex z = delta * Complex(s[0], s[1]);
        prefix.push_back(g->nearest_site(z));
        pts.push_back(z);
    }
    const auto gx = observable(g, prefix, ObservableKind::G);
    const Uniformizer f = Uniformizer::for_domain(d);
    const DiscreteDriving dd = discrete_driving(pts, f);
    TargetImage img = initial_target_image(to_internal(d, t), f);
    for (const auto& r : dd.ex.state.records()) img.advance(r.xi, r.dt);
    const double xi = dd.ex.driving.xi.back();

    double worst = 0.0, nearest = 1e9;
    int probes = 0;
    for (double rad : {0.25, 0.5})
        for (int k = 1; k <= 5; ++k) {
            const Complex w = delta * Complex(std::round(rad * std::cos(kPi * k / 6) / delta),
                                              std::round(rad * std::sin(kPi * k / 6) / delta));
            double dist = 1e9;
            for (std::size_t j = 1; j < pts.size(); ++j) dist = std::min(dist, std::abs(w - pts[j]));
            if (dist < 10 * delta) continue;
            nearest = std::min(nearest, dist);
            const double gv = gx.at(g->nearest_site(w));
            const double pv = poisson_observable(dd.ex.state, xi, img, f.map(w));
            worst = std::max(worst, std::abs(gv - pv));
            ++probes;
        }
    return {worst <= 0.05 && probes >= 8,
            fmt("max |g_X - P_X| = %.4f over %d probes, nearest %.1f cells from the prefix (tol 0.05)", worst, probes,
                nearest / delta)};
}

// ---- C10 - C13 --------------------------------------------------------------

Outcome c10_discrete_martingale() {
    const auto rep = martingale_check_discrete(half_disk(3.0), Target::interior({0.0, 0.5}), 1.0 / 16,
                                               {{0.25, 0.25}, {-0.5, 0.5}, {0.5, 1.0}}, 10000, 1010);
    std::string d = "z-scores";
    for (const auto& p : rep.probes) d += fmt(" %+.2f", p.z_score);
    return {rep.pass, d + fmt(" at N = %zu (limit |z| <= 4)", rep.samples)};
}

Outcome c11_continuous_martingale() {
    TargetImage arc;
    arc.kind = TargetKind::SideArc;
    arc.a = 0.5;
    arc.b = 1.0;
    TargetImage in;
    in.kind = TargetKind::InteriorPoint;
    in.p = {0.0, 1.0};
    const std::vector<Complex> probes{{0.5, 0.5}, {-0.5, 0.5}, {1.0, 0.5}, {0.0, 1.0}};
    ContinuousMartingaleOptions opt;  // t = 0.05, dt = 1e-3, 3 SE + 5%
    const auto a = martingale_check_continuous(arc, probes, 2000, 1111, opt);
    const auto b = martingale_check_continuous(in, probes, 2000, 1112, opt);
    opt.zero_drift = true;
    const auto neg = martingale_check_continuous(arc, probes, 2000, 1111, opt);
    auto worst = [](const MartingaleReport& r) {
        double w = 0.0;
        for (const auto& p : r.probes) w = std::max(w, std::abs(p.estimate.mean - p.initial) / p.bound);
        return w;
    };
    return {a.pass && b.pass && !neg.pass,
            fmt("max |dev|/bound: arc target %.2f, interior target %.2f, zero-drift control on the arc %.2f "
                "(must be <= 1, <= 1, > 1)",
                worst(a), worst(b), worst(neg))};
}

Outcome c12_moments() {
    const auto r = moment_check(half_disk(6.0), Target::interior({0.0, 1.0}), 1.0 / 80, 0.2, 2000, 1212);
    return {r.pass_eta && r.pass_q && !r.degenerate,
            fmt("mean d_eta = %+.4f (SE %.4f, 3 SE bound); sum q / sum 2dv = %+.4f (bound 0.1 + 3 x %.4f); %zu blocks",
                r.mean_deta, r.se_deta, r.rel_q, r.rel_se, r.blocks)};
}

Outcome c13_quasi_loops() {
    const auto tr = quasi_loop_trend(half_disk(3.0), Target::interior({0.0, 0.5}), 1.0 / 400, {0.0, 0.3}, 0.25,
                                     {0.02, 0.01, 0.005}, 500, 1313);
    std::string d = "P(quasi-loop)";
    for (std::size_t k = 0; k < tr.eps.size(); ++k) d += fmt(" eps=%.3f: %.3f+-%.3f", tr.eps[k], tr.prob[k], tr.se[k]);
    return {tr.pass, d + " (nonincreasing within 2 SE)"};
}

// ---- C14 - C17 --------------------------------------------------------------

Outcome c14_convergence() {
    const auto r = convergence_report(half_disk(6.0), Target::interior({0.0, 1.0}), {1.0 / 20, 1.0 / 40, 1.0 / 80},
                                      0.05, 2000, 1414);
    std::string d = "KS";
    for (const auto& l : r.levels) d += fmt(" %.4f", l.ks);
    d += fmt(" (band %.4f, %d inversions); median Frechet", r.levels.front().ks_band, r.ks_inversions);
    for (const auto& l : r.levels) d += fmt(" %.4f", l.frechet_median);
    return {r.pass, d};
}

Outcome c15_reversibility() {
    const auto r = reversibility_check(half_disk(3.0, -0.5), 0.5, 1.0 / 16, 2000, 1515);
    return {r.pass, fmt("KS = %.4f, p = %.3f (need p >= 0.01)", r.ks, r.p_value)};
}

Outcome c16_endpoint_law() {
    const auto r = endpoint_law(half_disk(4.0), Target::axis_arc(0.25, 0.75), 1.0 / 64, 10000, 1616);
    return {r.pass, fmt("TV = %.4f over %zu bins (tol 0.05)", r.tv, r.empirical.size())};
}

Outcome c17_multiply_connected() {
    Domain d;
    d.far_radius = 16.0;
    d.holes.push_back({{-0.5, 1.5}, {0.5, 1.5}, {0.5, 2.0}, {-0.5, 2.0}});
    ContinuousOptions opt;
    opt.dt = 5e-4;
    opt.t_max = 0.02;
    opt.solve_mesh = 1.0 / 64;
    const fs::path dir = fs::temp_directory_path() / "lerw_acceptance_c17";
    fs::remove_all(dir);
    bool ok = true;
    std::string d_out;
    const char* names[3] = {"interior", "prime_end", "hole_arc"};
    int k = 0;
    for (const Target& t : {Target::interior({2.5, 1.5}), Target::prime_end(3.0), Target::hole_arc(0)}) {
        const auto t0 = std::chrono::steady_clock::now();
        ContinuousLerw c(d, t, opt);
        Rng rng = rng_stream(1717, static_cast<std::uint64_t>(k));
        const ContinuousRun run = c.run(rng);
        bool mono = true, pos = true;
        for (std::size_t i = 1; i < run.u.size(); ++i) mono = mono && run.u[i] > run.u[i - 1];
        for (double v : run.dyJ) pos = pos && v > 0.0;
        const fs::path sub = dir / names[k];
        write_file(sub / "continuous.csv", continuous_csv(run));
        RunManifest m;
        m.command = "run-continuous";
        m.config = nlohmann::json::parse(serialize(Config{d, t, std::nullopt}));
        m.seed = 1717;
        m.replicas = 1;
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m.outputs = {"continuous.csv"};
        m.summary = {{"stop", to_string(run.stop)}, {"steps", run.dyJ.size()}};
        write_file(sub / "manifest.json", m.to_json().dump(2) + "\n");
        const bool done = run.stop != StopReason::Running && !run.dyJ.empty();
        ok = ok && done && mono && pos;
        d_out += fmt("%s: %s, %zu steps%s%s; ", names[k], to_string(run.stop).c_str(), run.dyJ.size(),
                     mono ? "" : ", u not monotone", pos ? "" : ", dyJ <= 0");
        ++k;
    }
    const auto rep = run_report(dir);
    const bool reported = rep["runs"].size() == 3 && fs::exists(dir / "report.json");
    return {ok && reported, d_out + (reported ? "report written" : "report missing")};
}

struct Criterion {
    const char* id;
    const char* name;
    Outcome (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"C1", "loop-erasure oracle", c1_loop_erasure},
        {"C2", "semicircle capacity", c2_semicircle},
        {"C3", "driving round trip", c3_round_trip},
        {"C4", "far-field law", c4_far_field},
        {"C5", "drift oracle", c5_drift_oracle},
        {"C6", "drift scaling covariance", c6_scaling},
        {"C7", "Green / harmonic-measure oracles", c7_green_and_measure},
        {"C8", "flux identity", c8_flux},
        {"C9", "observable convergence", c9_observable},
        {"C10", "discrete martingale", c10_discrete_martingale},
        {"C11", "continuous local martingale", c11_continuous_martingale},
        {"C12", "increment moments", c12_moments},
        {"C13", "quasi-loop trend", c13_quasi_loops},
        {"C14", "convergence trend", c14_convergence},
        {"C15", "reversibility", c15_reversibility},
        {"C16", "endpoint law", c16_endpoint_law},
        {"C17", "multiply connected smoke test", c17_multiply_connected},
    };
    std::set<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-4s %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
