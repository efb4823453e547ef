#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lerw/harmonic.hpp"
#include "lerw/rng.hpp"

namespace lerw {

// Loop erasure by the max-index recursion
//     n_0 = max{m : v(m) = v(0)},  n_{j+1} = max{m : v(m) = v(n_j + 1)}.
template <class T, class Hash = std::hash<T>>
std::vector<T> loop_erase(const std::vector<T>& v) {
    std::vector<T> out;
    if (v.empty()) return out;
    std::unordered_map<T, std::size_t, Hash> last;
    last.reserve(v.size());
    for (std::size_t m = 0; m < v.size(); ++m) last[v[m]] = m;
    std::size_t n = last.at(v[0]);
    out.push_back(v[n]);
    while (n + 1 < v.size()) {
        n = last.at(v[n + 1]);
        out.push_back(v[n]);
    }
    return out;
}

struct LatticePath {
    std::vector<VertexId> v;
    std::optional<Complex> anchor;  // q(-1), the start prime end
};

struct LerwSample {
    std::vector<VertexId> path;    // q(0..chi); the last entry lies in the target set
    std::vector<Complex> points;   // anchor followed by vertex positions (internal frame)
    std::size_t walk_steps = 0;
};

inline constexpr std::uint64_t kMaxWalkSteps = 1000000000ULL;

// h-transform walk: from w step to w' with probability Q(w') / sum_{w''~w} Q(w'').
LatticePath sample_conditioned_walk(const GridGraph& g, VertexId start, const HarmonicField& Q, Rng& rng,
                                    std::uint64_t max_steps = kMaxWalkSteps);

// Same chain on a generic graph; absorbing vertices end the walk.
std::vector<std::size_t> sample_conditioned_walk_graph(const Graph& g, std::size_t start, const std::vector<double>& Q,
                                                       const std::vector<std::uint8_t>& absorbing, Rng& rng,
                                                       std::uint64_t max_steps = kMaxWalkSteps);

// Samples q_delta on a fixed grid; the hit field is solved once and shared.
class LerwSampler {
public:
    explicit LerwSampler(GridPtr g, const SolveOptions& opt = {});
    LerwSampler(GridPtr g, HarmonicField Q);

    const GridGraph& grid() const { return *g_; }
    GridPtr grid_ptr() const { return g_; }
    const HarmonicField& hit() const { return Q_; }
    LerwSample sample(Rng& rng) const;
    // Replicas first .. first + count - 1, each on rng_stream(seed, index).
    std::vector<LerwSample> sample_batch(std::uint64_t seed, std::uint64_t first, std::size_t count) const;

private:
    GridPtr g_;
    HarmonicField Q_;
};

LerwSample sample_lerw(const Domain& d, const Target& t, double delta, Rng& rng);

}  // namespace lerw
