#include "lerw/walk.hpp"

#include <algorithm>
#include <cmath>

#include "lerw/parallel.hpp"

namespace lerw {

LatticePath sample_conditioned_walk(const GridGraph& g, VertexId start, const HarmonicField& Q, Rng& rng,
                                    std::uint64_t max_steps) {
    if (g.is_boundary(start) || !g.is_vertex(start)) throw ValidationError("walk must start at an interior vertex");
    if (!(Q.at(start) > 0.0)) throw ValidationError("start disconnected from target");
    const bool interior_target = g.target_is_interior();
    const VertexId w_e = interior_target ? g.target().front() : -1;
    const double* q = Q.values.data();

    LatticePath path;
    path.anchor = Complex(0.0, 0.0);
    path.v.push_back(start);
    std::int64_t s = start;
    if (s == w_e) return path;
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        double wts[4];
        VertexId nb[4];
        double sum = 0.0;
        for (int d = 0; d < 4; ++d) {
            if (g.linked(s, d)) {
                nb[d] = s + g.offset(d);
                wts[d] = std::max(q[nb[d]], 0.0);
            } else {
                nb[d] = g.neighbor(s, d);
                wts[d] = std::max(Q.stub_values[static_cast<std::size_t>(nb[d] - g.num_sites())], 0.0);
            }
            sum += wts[d];
        }
        if (!(sum > 0.0)) throw NumericError("conditioned walk reached a vertex with zero hit probability");
        double u = uniform01(rng) * sum;
        int d = 0;
        while (d < 3 && (u >= wts[d] || wts[d] == 0.0)) {
            u -= wts[d];
            ++d;
        }
        while (wts[d] == 0.0) --d;  // guard against rounding past the last positive weight
        const VertexId next = nb[d];
        path.v.push_back(next);
        if (g.is_boundary(next)) return path;  // only target stubs carry positive weight
        s = next;
        if (s == w_e) return path;
    }
    throw NumericError("walk exceeded the step limit of " + std::to_string(max_steps));
}

std::vector<std::size_t> sample_conditioned_walk_graph(const Graph& g, std::size_t start, const std::vector<double>& Q,
                                                       const std::vector<std::uint8_t>& absorbing, Rng& rng,
                                                       std::uint64_t max_steps) {
    if (!(Q[start] > 0.0)) throw ValidationError("start disconnected from target");
    std::vector<std::size_t> path{start};
    std::size_t v = start;
    for (std::uint64_t step = 0; step < max_steps && !absorbing[v]; ++step) {
        double sum = 0.0;
        for (std::size_t k = 0; k < g.degree(v); ++k) sum += std::max(Q[g.neighbor(v, k)], 0.0);
        double u = uniform01(rng) * sum;
        std::size_t pick = g.degree(v) - 1;
        for (std::size_t k = 0; k < g.degree(v); ++k) {
            const double w = std::max(Q[g.neighbor(v, k)], 0.0);
            if (w > 0.0 && u < w) {
                pick = k;
                break;
            }
            u -= w;
        }
        while (!(Q[g.neighbor(v, pick)] > 0.0)) --pick;
        v = g.neighbor(v, pick);
        path.push_back(v);
    }
    if (!absorbing[v]) throw NumericError("walk exceeded the step limit");
    return path;
}

LerwSampler::LerwSampler(GridPtr g, const SolveOptions& opt) : g_(std::move(g)), Q_(hit_field(g_, opt)) {}

LerwSampler::LerwSampler(GridPtr g, HarmonicField Q) : g_(std::move(g)), Q_(std::move(Q)) {}

LerwSample LerwSampler::sample(Rng& rng) const {
    LatticePath walk = sample_conditioned_walk(*g_, g_->start(), Q_, rng);
    LerwSample out;
    out.walk_steps = walk.v.size() - 1;
    out.path = loop_erase(walk.v);
    out.points.reserve(out.path.size() + 1);
    out.points.push_back(*walk.anchor);
    for (VertexId v : out.path) out.points.push_back(g_->position(v));
    return out;
}

std::vector<LerwSample> LerwSampler::sample_batch(std::uint64_t seed, std::uint64_t first, std::size_t count) const {
    std::vector<LerwSample> out(count);
    parallel_for(count, [&](std::size_t i) {
        Rng rng = rng_stream(seed, first + i);
        out[i] = sample(rng);
    });
    return out;
}

LerwSample sample_lerw(const Domain& d, const Target& t, double delta, Rng& rng) {
    LerwSampler sampler(build_grid(d, t, delta));
    return sampler.sample(rng);
}

}  // namespace lerw
