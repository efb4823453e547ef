#include "lerw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "lerw/parallel.hpp"

namespace lerw {

namespace {

double sqr(double x) { return x * x; }

// Ratio estimator sum(a) / sum(b) over independent clusters, with its SE.
std::pair<double, double> ratio_se(const std::vector<double>& a, const std::vector<double>& b) {
    const double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
    if (!(sb > 0.0)) return {0.0, 0.0};
    const double r = sa / sb;
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) q += sqr(a[i] - r * b[i]);
    const double n = static_cast<double>(a.size());
    const double corr = n > 1 ? n / (n - 1) : 1.0;
    return {r, std::sqrt(q * corr) / sb};
}

std::vector<VertexId> prefix_of(const std::vector<VertexId>& path, std::size_t n) {
    return std::vector<VertexId>(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(n + 1));
}

void require_hole_free(const Domain& d, const char* what) {
    if (!d.hole_free()) throw ValidationError(std::string(what) + " needs a hole-free domain");
}

}  // namespace

DiscreteDriving discrete_driving(const std::vector<Complex>& points, const Uniformizer& f, double max_time,
                                 int per_edge) {
    if (points.size() < 2) throw ValidationError("path needs an anchor and at least one vertex");
    if (per_edge < 1) throw ValidationError("per_edge must be positive");
    std::vector<Complex> curve;
    curve.reserve((points.size() - 1) * static_cast<std::size_t>(per_edge) + 1);
    curve.push_back(f.map(points[0]));
    for (std::size_t k = 1; k < points.size(); ++k)
        for (int s = 1; s <= per_edge; ++s) {
            const Complex z = s == per_edge ? points[k] : points[k - 1] + (points[k] - points[k - 1]) * (double(s) / per_edge);
            Complex w = f.map(z);
            if (z.imag() == 0.0) w = Complex(w.real(), 0.0);
            curve.push_back(w);
        }
    ExtractOptions eo;
    eo.max_time = max_time;
    DiscreteDriving dd;
    dd.ex = extract_driving(curve, eo);
    for (std::size_t n = 0; n + 1 < points.size(); ++n) {
        const std::size_t idx = (n + 1) * static_cast<std::size_t>(per_edge);
        if (idx >= dd.ex.records_after.size()) break;
        const std::size_t r = dd.ex.records_after[idx];
        dd.records.push_back(r);
        dd.v.push_back(dd.ex.driving.t[r]);
        dd.xi.push_back(dd.ex.driving.xi[r]);
    }
    return dd;
}

std::vector<std::size_t> block_indices(const std::vector<double>& v, const std::vector<double>& xi, double d,
                                       std::size_t n_end) {
    std::vector<std::size_t> out{0};
    if (v.empty()) return out;
    n_end = std::min(n_end, v.size() - 1);
    std::size_t nj = 0;
    for (std::size_t n = 1; n <= n_end; ++n) {
        if (v[n] - v[nj] >= d * d || std::abs(xi[n] - xi[nj]) >= d) {
            out.push_back(n);
            nj = n;
        }
    }
    return out;
}

std::vector<double> drift_integral(const DiscreteDriving& dd, TargetImage img, double lambda) {
    const auto& rec = dd.ex.state.records();
    std::vector<double> cum(rec.size() + 1, 0.0);
    for (std::size_t k = 0; k < rec.size(); ++k) {
        cum[k + 1] = cum[k] + lambda * drift_closed_form(img, rec[k].xi).X * rec[k].dt;
        img.advance(rec[k].xi, rec[k].dt);
    }
    std::vector<double> out(dd.records.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = cum[dd.records[n]];
    return out;
}

DriftSubtracted subtract_drift(const DiscreteDriving& dd, const TargetImage& img, double d, std::size_t n_end,
                               double lambda) {
    DriftSubtracted s;
    s.drift = drift_integral(dd, img, lambda);
    s.eta.resize(s.drift.size());
    for (std::size_t n = 0; n < s.eta.size(); ++n) s.eta[n] = dd.xi[n] - s.drift[n];
    s.blocks = block_indices(dd.v, dd.xi, d, n_end);
    s.last_block_complete = s.blocks.size() > 1;
    return s;
}

MartingaleReport martingale_check_discrete(const Domain& d, const Target& t, double delta,
                                           const std::vector<Complex>& probes, std::size_t N, std::uint64_t seed,
                                           const DiscreteMartingaleOptions& opt) {
    if (N == 0) throw ValidationError("no samples");
    if (probes.empty()) throw ValidationError("no probes");
    GridPtr g = build_grid(d, t, delta);
    LerwSampler sampler(g);
    const Uniformizer f = Uniformizer::for_domain(d);

    std::vector<VertexId> pv;
    std::vector<Complex> pz;
    for (Complex z : probes) {
        const std::int64_t s = g->nearest_site(d.to_internal(z));
        if (s < 0 || !g->is_vertex(s) || std::abs(g->site_position(s) - d.to_internal(z)) > 1e-9)
            throw ValidationError("probe must be a lattice vertex of the domain");
        if (g->in_target(s) || s == g->start()) throw ValidationError("probe coincides with the start or the target");
        pv.push_back(s);
        pz.push_back(g->site_position(s));
    }
    const HarmonicField g0 = observable(g, {g->start()}, ObservableKind::G);
    const double guard = opt.guard_cells * delta;
    const double horizon = 1.5 * static_cast<double>(opt.max_blocks) * opt.d * opt.d + opt.d;

    std::vector<std::vector<double>> inc(pv.size(), std::vector<double>(N));
    std::vector<std::uint8_t> stopped(N, 0);
    parallel_for(N, [&](std::size_t i) {
        Rng rng = rng_stream(seed, i);
        const LerwSample smp = sampler.sample(rng);
        // The step before arrival is not a stopping time; an interior target can
        // itself be the tip, so the cap is the arrival index there.
        const std::size_t n_last = g->target_is_interior() ? smp.path.size() - 1
                                   : smp.path.size() >= 2  ? smp.path.size() - 2
                                                           : 0;
        std::vector<Complex> pts(smp.points.begin(), smp.points.begin() + static_cast<std::ptrdiff_t>(n_last + 2));
        const DiscreteDriving dd = discrete_driving(pts, f, horizon);
        const auto blocks = block_indices(dd.v, dd.xi, opt.d, n_last);
        const std::size_t J = std::min(opt.max_blocks, blocks.size() - 1);
        std::size_t tau = blocks[J];
        for (std::size_t n = 0; n <= tau; ++n) {
            const Complex q = smp.points[n + 1];
            bool near = false;
            for (Complex z : pz) near = near || std::abs(q - z) <= guard * (1.0 + 1e-12);
            if (near) {
                tau = n;
                stopped[i] = 1;
                break;
            }
        }
        const HarmonicField gt = observable(g, prefix_of(smp.path, tau), ObservableKind::G);
        for (std::size_t k = 0; k < pv.size(); ++k) inc[k][i] = gt.at(pv[k]) - g0.at(pv[k]);
    });

    MartingaleReport rep;
    rep.samples = N;
    rep.threshold = opt.z_limit;
    rep.pass = true;
    const std::size_t n_stopped = static_cast<std::size_t>(std::count(stopped.begin(), stopped.end(), 1));
    for (std::size_t k = 0; k < pv.size(); ++k) {
        ProbeStat ps;
        ps.z = probes[k];
        ps.initial = g0.at(pv[k]);
        ps.estimate = mean_se(inc[k]);
        ps.z_score = ps.estimate.se > 0.0 ? ps.estimate.mean / ps.estimate.se : 0.0;
        ps.bound = opt.z_limit * ps.estimate.se;
        ps.stopped = n_stopped;
        ps.pass = std::isfinite(ps.z_score) && std::abs(ps.z_score) <= opt.z_limit;
        rep.pass = rep.pass && ps.pass;
        rep.probes.push_back(ps);
    }
    rep.note = "telescoped increments g(n_J) - g(n_0); samples stopped by the probe guard are kept at the stop index";
    return rep;
}

double poisson_observable(const LoewnerState& state, double xi, const TargetImage& img, Complex z) {
    auto P = [&](Complex w) {
        const Complex q = w - xi;
        return q.imag() / std::norm(q);
    };
    const auto w = state.try_map(z);
    if (!w) return 0.0;
    const double pz = P(*w);
    switch (img.kind) {
        case TargetKind::InteriorPoint: return pz / P(img.p);
        case TargetKind::PrimeEnd: return pz * sqr(img.e - xi) / img.scale;
        case TargetKind::SideArc: return pz / (1.0 / (img.a - xi) - 1.0 / (img.b - xi));
    }
    return pz;
}

MartingaleReport martingale_check_continuous(const TargetImage& img, const std::vector<Complex>& probes_model,
                                             std::size_t N, std::uint64_t seed,
                                             const ContinuousMartingaleOptions& opt) {
    if (N == 0) throw ValidationError("no samples");
    ContinuousOptions co;
    co.dt = opt.dt;
    co.t_max = opt.t_end;
    co.zero_drift = opt.zero_drift;
    std::vector<std::vector<double>> vals(probes_model.size(), std::vector<double>(N));
    const LoewnerState empty;
    std::vector<double> p0;
    for (Complex z : probes_model) p0.push_back(poisson_observable(empty, 0.0, img, z));
    if (opt.t_end <= 0.0) {
        for (std::size_t k = 0; k < probes_model.size(); ++k) std::fill(vals[k].begin(), vals[k].end(), p0[k]);
    } else {
        parallel_for(N, [&](std::size_t i) {
            Rng rng = rng_stream(seed, i);
            ContinuousLerw c = ContinuousLerw::halfplane(img, co);
            c.run(rng);
            for (std::size_t k = 0; k < probes_model.size(); ++k)
                vals[k][i] = poisson_observable(c.state(), c.xi(), c.target_image(), probes_model[k]);
        });
    }
    MartingaleReport rep;
    rep.samples = N;
    rep.threshold = opt.k_se;
    rep.pass = true;
    for (std::size_t k = 0; k < probes_model.size(); ++k) {
        ProbeStat ps;
        ps.z = probes_model[k];
        ps.initial = p0[k];
        ps.estimate = mean_se(vals[k]);
        const double dev = ps.estimate.mean - p0[k];
        ps.z_score = ps.estimate.se > 0.0 ? dev / ps.estimate.se : 0.0;
        ps.bound = opt.k_se * ps.estimate.se + opt.bias * std::abs(p0[k]);
        ps.pass = std::abs(dev) <= ps.bound;
        rep.pass = rep.pass && ps.pass;
        rep.probes.push_back(ps);
    }
    rep.note = opt.zero_drift ? "negative control: drift removed" : "continuous LERW drift";
    return rep;
}

MartingaleReport martingale_check_continuous(const Domain& d, const Target& t, const std::vector<Complex>& probes,
                                             std::size_t N, std::uint64_t seed,
                                             const ContinuousMartingaleOptions& opt) {
    require_hole_free(d, "the continuous martingale check");
    validate(Config{d, t, std::nullopt});
    const Uniformizer f = Uniformizer::for_domain(d);
    const TargetImage img = initial_target_image(to_internal(d, t), f);
    std::vector<Complex> pm;
    for (Complex z : probes) pm.push_back(f.map(d.to_internal(z)));
    MartingaleReport rep = martingale_check_continuous(img, pm, N, seed, opt);
    for (std::size_t k = 0; k < probes.size(); ++k) rep.probes[k].z = probes[k];
    return rep;
}

MomentReport moment_check(const Domain& d, const Target& t, double delta, double block_d, std::size_t N,
                          std::uint64_t seed, const MomentOptions& opt) {
    if (N == 0) throw ValidationError("no samples");
    require_hole_free(d, "the moment check");
    GridPtr g = build_grid(d, t, delta);
    LerwSampler sampler(g);
    const Uniformizer f = Uniformizer::for_domain(d);
    const TargetImage img = initial_target_image(to_internal(d, t), f);

    std::vector<double> S(N), B(N), Q(N), V(N);
    std::vector<std::size_t> nb(N);
    parallel_for(N, [&](std::size_t i) {
        Rng rng = rng_stream(seed, i);
        const LerwSample smp = sampler.sample(rng);
        std::size_t n_end = smp.path.size() >= 2 ? smp.path.size() - 2 : 0;
        for (std::size_t n = 0; n <= n_end; ++n)
            if (std::abs(smp.points[n + 1]) >= opt.rho0) {
                n_end = n;
                break;
            }
        std::vector<Complex> pts(smp.points.begin(), smp.points.begin() + static_cast<std::ptrdiff_t>(n_end + 2));
        const DiscreteDriving dd = discrete_driving(pts, f);
        const DriftSubtracted sd = subtract_drift(dd, img, block_d, n_end);
        // The blocks partition [0, exit]: the last one is cut by the exit time.
        std::vector<std::size_t> cuts = sd.blocks;
        const std::size_t n_exit = std::min(n_end, dd.v.size() - 1);
        if (cuts.back() < n_exit) cuts.push_back(n_exit);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const std::size_t a = cuts[j], b = cuts[j + 1];
            const double dxi = dd.xi[b] - dd.xi[a], dv = dd.v[b] - dd.v[a];
            S[i] += sd.eta[b] - sd.eta[a];
            Q[i] += dxi * dxi - 2.0 * dv;
            V[i] += 2.0 * dv;
            B[i] += 1.0;
        }
        nb[i] = cuts.size() - 1;
    });

    MomentReport rep;
    rep.d = block_d;
    rep.samples = N;
    rep.blocks = std::accumulate(nb.begin(), nb.end(), std::size_t{0});
    rep.degenerate = *std::max_element(nb.begin(), nb.end()) <= 1;
    std::tie(rep.mean_deta, rep.se_deta) = ratio_se(S, B);
    std::tie(rep.mean_q, std::ignore) = ratio_se(Q, B);
    std::tie(rep.mean_2dv, std::ignore) = ratio_se(V, B);
    std::tie(rep.rel_q, rep.rel_se) = ratio_se(Q, V);
    if (rep.blocks > 0 && !rep.degenerate) {
        rep.pass_eta = std::abs(rep.mean_deta) <= opt.k_se * rep.se_deta;
        rep.pass_q = std::abs(rep.rel_q) <= opt.rel_bias + opt.k_se * rep.rel_se;
    }
    return rep;
}

std::vector<std::pair<std::size_t, std::size_t>> quasi_loops(const std::vector<Complex>& path, Complex z, double r,
                                                             double eps) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = path.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(path[i] - z) < r)) continue;
        bool left = false;
        for (std::size_t j = i + 1; j < n; ++j) {
            left = left || std::abs(path[j] - z) >= 2.0 * r;
            if (left && std::abs(path[j] - z) < r && std::abs(path[i] - path[j]) <= eps) out.emplace_back(i, j);
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> quasi_loops_fast(const std::vector<Complex>& path, Complex z,
                                                                  double r, double eps) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = path.size();
    if (n == 0 || !(eps >= 0.0)) return out;
    // outside[k]: number of points among path[0..k) at distance >= 2r.
    std::vector<std::size_t> outside(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) outside[k + 1] = outside[k] + (std::abs(path[k] - z) >= 2.0 * r ? 1 : 0);
    if (outside[n] == 0) return out;
    const double cell = eps > 0.0 ? eps : 1.0;
    auto key = [&](long cx, long cy) { return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) | static_cast<std::uint32_t>(cy); };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    std::vector<std::size_t> inner;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(std::abs(path[k] - z) < r)) continue;
        inner.push_back(k);
        const long cx = static_cast<long>(std::floor((path[k].real() - z.real()) / cell));
        const long cy = static_cast<long>(std::floor((path[k].imag() - z.imag()) / cell));
        buckets[key(cx, cy)].push_back(k);
    }
    for (std::size_t i : inner) {
        const long cx = static_cast<long>(std::floor((path[i].real() - z.real()) / cell));
        const long cy = static_cast<long>(std::floor((path[i].imag() - z.imag()) / cell));
        std::vector<std::size_t> found;
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find(key(cx + dx, cy + dy));
                if (it == buckets.end()) continue;
                for (std::size_t j : it->second)
                    if (j > i && outside[j + 1] - outside[i] > 0 && std::abs(path[i] - path[j]) <= eps) found.push_back(j);
            }
        std::sort(found.begin(), found.end());
        for (std::size_t j : found) out.emplace_back(i, j);
    }
    return out;
}

QuasiLoopTrend quasi_loop_trend(const Domain& d, const Target& t, double delta, Complex z0, double r,
                                const std::vector<double>& eps, std::size_t N, std::uint64_t seed) {
    if (N == 0) throw ValidationError("no samples");
    GridPtr g = build_grid(d, t, delta);
    LerwSampler sampler(g);
    const Complex zi = d.to_internal(z0);
    std::vector<std::vector<std::uint8_t>> hit(eps.size(), std::vector<std::uint8_t>(N, 0));
    parallel_for(N, [&](std::size_t i) {
        Rng rng = rng_stream(seed, i);
        const LerwSample smp = sampler.sample(rng);
        for (std::size_t k = 0; k < eps.size(); ++k) hit[k][i] = !quasi_loops_fast(smp.points, zi, r, eps[k]).empty();
    });
    QuasiLoopTrend tr;
    tr.eps = eps;
    tr.samples = N;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const double p = static_cast<double>(std::count(hit[k].begin(), hit[k].end(), 1)) / static_cast<double>(N);
        tr.prob.push_back(p);
        tr.se.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(N)));
    }
    tr.pass = true;
    for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
        const bool smaller = eps[k + 1] < eps[k];
        const double up = smaller ? tr.prob[k + 1] - tr.prob[k] : tr.prob[k] - tr.prob[k + 1];
        if (up > 2.0 * std::hypot(tr.se[k], tr.se[k + 1])) tr.pass = false;
    }
    return tr;
}

double frechet_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.empty() || b.empty()) throw ValidationError("empty curve");
    const std::size_t m = b.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double dij = std::abs(a[i] - b[j]);
            double best;
            if (i == 0 && j == 0) best = dij;
            else if (i == 0) best = std::max(cur[j - 1], dij);
            else if (j == 0) best = std::max(prev[0], dij);
            else best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), dij);
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

bool trend_decreasing(const std::vector<double>& s, const std::vector<double>& band, int* inversions) {
    int inv = 0;
    bool within = true;
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
        if (s[k + 1] > s[k]) {
            ++inv;
            if (s[k + 1] - s[k] > band[k + 1]) within = false;
        }
    if (inversions) *inversions = inv;
    return inv == 0 || (inv == 1 && within);
}

ConvergenceReport convergence_report(const Domain& d, const Target& t, const std::vector<double>& meshes,
                                     double t_probe, std::size_t N, std::uint64_t seed,
                                     const ConvergenceOptions& opt) {
    if (N == 0) throw ValidationError("no samples");
    if (meshes.empty()) throw ValidationError("no meshes");
    for (double m : meshes)
        if (!is_admissible(t, m, d.start_x)) throw ValidationError("unsupported target/mesh combination");
    const Uniformizer f = Uniformizer::for_domain(d);

    ConvergenceReport rep;
    rep.t_probe = t_probe;
    std::vector<std::vector<Complex>> ctrace(N);
    rep.xi_continuous.resize(N);
    ContinuousOptions co;
    co.dt = opt.dt;
    co.t_max = t_probe;
    parallel_for(N, [&](std::size_t i) {
        Rng rng = rng_stream(seed, i);
        ContinuousLerw c(d, t, co);
        const ContinuousRun run = c.run(rng);
        rep.xi_continuous[i] = run.driving.xi.back();
        ctrace[i] = run.trace;
    });
    std::vector<std::size_t> corder(N);
    std::iota(corder.begin(), corder.end(), 0);
    std::sort(corder.begin(), corder.end(), [&](auto x, auto y) { return rep.xi_continuous[x] < rep.xi_continuous[y]; });

    for (std::size_t li = 0; li < meshes.size(); ++li) {
        ConvergenceLevel lv;
        lv.delta = meshes[li];
        GridPtr g = build_grid(d, t, lv.delta);
        LerwSampler sampler(g);
        lv.xi.resize(N);
        std::vector<std::vector<Complex>> dtrace(N);
        std::vector<std::uint8_t> is_short(N, 0);
        const std::uint64_t level_seed = seed + 0x9e3779b97f4a7c15ULL * (li + 1);
        parallel_for(N, [&](std::size_t i) {
            Rng rng = rng_stream(level_seed, i);
            const LerwSample smp = sampler.sample(rng);
            const DiscreteDriving dd = discrete_driving(smp.points, f, t_probe);
            if (dd.ex.driving.end_time() < t_probe) is_short[i] = 1;
            lv.xi[i] = dd.ex.driving.at(t_probe);
            std::vector<Complex> tr{d.to_file(smp.points[0])};
            for (std::size_t n = 0; n < dd.v.size(); ++n) {
                tr.push_back(d.to_file(smp.points[n + 1]));
                if (dd.v[n] >= t_probe) break;
            }
            dtrace[i] = std::move(tr);
        });
        lv.short_paths = static_cast<std::size_t>(std::count(is_short.begin(), is_short.end(), 1));
        lv.ks = ks_statistic(lv.xi, rep.xi_continuous);
        lv.ks_band = ks_band95(N, N);
        lv.ks_p = ks_pvalue(lv.ks, N, N);
        // Rank coupling on xi(t_probe) for the trace comparison.
        std::vector<std::size_t> dorder(N);
        std::iota(dorder.begin(), dorder.end(), 0);
        std::sort(dorder.begin(), dorder.end(), [&](auto x, auto y) { return lv.xi[x] < lv.xi[y]; });
        std::vector<double> fd(N);
        parallel_for(N, [&](std::size_t k) { fd[k] = frechet_distance(dtrace[dorder[k]], ctrace[corder[k]]); });
        lv.frechet_median = median(fd);
        lv.frechet_se = 1.2533 * mean_se(fd).sd / std::sqrt(static_cast<double>(N));
        rep.levels.push_back(std::move(lv));
    }
    std::vector<double> ks, kb, fm, fb;
    for (const auto& lv : rep.levels) {
        ks.push_back(lv.ks);
        kb.push_back(lv.ks_band);
        fm.push_back(lv.frechet_median);
        fb.push_back(2.0 * lv.frechet_se);
    }
    rep.ks_pass = trend_decreasing(ks, kb, &rep.ks_inversions);
    rep.frechet_pass = trend_decreasing(fm, fb, &rep.frechet_inversions) && rep.frechet_inversions == 0;
    rep.pass = rep.ks_pass && rep.frechet_pass;
    return rep;
}

double first_crossing_height(const std::vector<Complex>& pts, double x_mid) {
    if (pts.empty()) throw ValidationError("empty path");
    const double s0 = pts[0].real() - x_mid;
    if (s0 == 0.0) return pts[0].imag();
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double s = pts[k].real() - x_mid;
        if (s == 0.0) return pts[k].imag();
        if ((s > 0.0) != (s0 > 0.0)) {
            const double prev = pts[k - 1].real() - x_mid;
            const double a = prev / (prev - s);
            return pts[k - 1].imag() + a * (pts[k].imag() - pts[k - 1].imag());
        }
    }
    throw NumericError("path never crosses the mid line");
}

ReversibilityReport reversibility_check(const Domain& d, double x_e, double delta, std::size_t N, std::uint64_t seed,
                                        double p_min) {
    if (N == 0) throw ValidationError("no samples");
    Domain back = d;
    back.start_x = x_e;
    const Target tf = Target::prime_end(x_e), tb = Target::prime_end(d.start_x);
    validate(Config{d, tf, delta});
    validate(Config{back, tb, delta});
    const double x_mid = 0.5 * (d.start_x + x_e);
    LerwSampler fwd(build_grid(d, tf, delta)), bwd(build_grid(back, tb, delta));
    ReversibilityReport rep;
    rep.forward.resize(N);
    rep.backward.resize(N);
    parallel_for(2 * N, [&](std::size_t k) {
        const bool forward = k < N;
        const std::size_t i = forward ? k : k - N;
        Rng rng = rng_stream(seed, k);
        const LerwSample smp = (forward ? fwd : bwd).sample(rng);
        std::vector<Complex> pts;
        pts.reserve(smp.points.size());
        for (Complex z : smp.points) pts.push_back((forward ? d : back).to_file(z));
        if (!forward) std::reverse(pts.begin(), pts.end());
        (forward ? rep.forward : rep.backward)[i] = first_crossing_height(pts, x_mid);
    });
    rep.ks = ks_statistic(rep.forward, rep.backward);
    rep.p_value = ks_pvalue(rep.ks, N, N);
    rep.pass = rep.p_value >= p_min;
    return rep;
}

EndpointReport endpoint_law(const Domain& d, const Target& arc, double delta, std::size_t N, std::uint64_t seed,
                            int bins, double tv_max) {
    if (N == 0) throw ValidationError("no samples");
    if (arc.kind != TargetKind::SideArc || arc.arc != ArcKind::AxisInterval)
        throw ValidationError("endpoint law needs an axis interval target");
    GridPtr g = build_grid(d, arc, delta);
    LerwSampler sampler(g);
    EndpointReport rep;
    rep.samples = N;
    for (int k = 0; k <= bins; ++k) rep.edges.push_back(arc.a + (arc.b - arc.a) * k / bins);
    auto bin_of = [&](double x_file) {
        const long k = static_cast<long>(std::floor((x_file - arc.a) / (arc.b - arc.a) * bins));
        return static_cast<std::size_t>(std::clamp<long>(k, 0, bins - 1));
    };
    rep.reference.assign(static_cast<std::size_t>(bins), 0.0);
    const HarmonicField V = expected_visits(g, g->start());
    double total = 0.0;
    for (VertexId v : g->target()) {
        const Stub& st = g->stub(v);
        const double w = V.values[static_cast<std::size_t>(st.site)] / 4.0;
        rep.reference[bin_of(d.to_file(st.z2).real())] += w;
        total += w;
    }
    for (double& r : rep.reference) r /= total;

    std::vector<std::size_t> which(N);
    parallel_for(N, [&](std::size_t i) {
        Rng rng = rng_stream(seed, i);
        const LerwSample smp = sampler.sample(rng);
        const VertexId last = smp.path.back();
        if (!g->is_boundary(last)) throw NumericError("LERW to an arc ended off the boundary");
        which[i] = bin_of(d.to_file(g->stub(last).z2).real());
    });
    rep.empirical.assign(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t b : which) rep.empirical[b] += 1.0 / static_cast<double>(N);
    rep.tv = total_variation(rep.empirical, rep.reference);
    rep.pass = rep.tv <= tv_max;
    return rep;
}

}  // namespace lerw
