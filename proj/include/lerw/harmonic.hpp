#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lerw/grid.hpp"
#include "lerw/kernels.hpp"

namespace lerw {

// Vertices within a fixed distance of a polyline, frozen to Dirichlet data.
struct SlitMask {
    std::vector<Complex> polyline;             // internal coordinates
    std::vector<std::int64_t> frozen;          // sorted site indices
    std::vector<std::pair<std::int64_t, int>> cut_edges;  // (site, dir) with dir in {E, N}

    bool contains(std::int64_t site) const;
};

// Freezes vertices within radius of the polyline (default delta / 2).
SlitMask make_slit_mask(const GridGraph& g, std::vector<Complex> polyline, double radius = -1.0);

struct BoundaryData {
    std::vector<double> stub_values;                       // one per stub; empty means all zero
    std::vector<std::pair<std::int64_t, double>> fixed;    // interior vertices held at values
    std::function<double(Complex)> slit_value;             // data on mask vertices; default 0
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 2000;
    bool reference = false;                      // serial SOR instead of MG-PCG
    const std::vector<double>* warm_start = nullptr;
};

class HarmonicField {
public:
    GridPtr grid;
    std::vector<double> values;        // correction per site (extended outside D for interpolation)
    std::vector<double> stub_values;   // correction per stub
    std::vector<std::uint8_t> absorbing;  // per site: 1 where Dirichlet data was imposed
    std::function<double(Complex)> explicit_part;  // singular part added on evaluation
    SolveInfo info;
    double tol = 0.0;

    double explicit_at(Complex z) const { return explicit_part ? explicit_part(z) : 0.0; }
    double at(VertexId v) const;
    double interpolate(Complex z) const;
    double laplacian(VertexId v) const;
    // Max over non-absorbing vertices of |sum of neighbour differences|.
    double max_residual() const;
    void scale(double c);
};

HarmonicField solve_dirichlet(GridPtr g, const SlitMask* mask, const BoundaryData& data, const SolveOptions& opt = {});

HarmonicField green_function(GridPtr g, const SlitMask* mask, Complex pole, const SolveOptions& opt = {});
// Harmonic measure of a target arc (SideArc in internal coordinates).
HarmonicField harmonic_measure(GridPtr g, const SlitMask* mask, const Target& arc, const SolveOptions& opt = {});
HarmonicField boundary_poisson_field(GridPtr g, const SlitMask* mask, double x_e, const SolveOptions& opt = {});

bool stub_on_arc(const GridGraph& g, const Stub& st, const Target& arc);

// Probability that the stopped walk hits the target set before the rest of
// the boundary.
HarmonicField hit_field(GridPtr g, const SolveOptions& opt = {});

enum class ObservableKind { G, H };

// Observables of a LERW prefix q(0..k): vanish on the forbidden boundary and
// on q(0..k-1), harmonic off the prefix and boundary, pole at the tip q(k).
// Kind G is normalized by value 1 at the target (interior targets) or by
// value 1 on the target arc with zero net flux there; kind H by unit flux
// through the target set.
HarmonicField observable(GridPtr g, const std::vector<VertexId>& prefix, ObservableKind kind,
                         const SolveOptions& opt = {});

// True when the vertices of the prefix separate `from` from the target set.
bool prefix_disconnects(const GridGraph& g, const std::vector<VertexId>& prefix, VertexId from);

double flux_sum(const HarmonicField& f, const std::vector<VertexId>& set);

// Expected visits V of the simple walk from `source` before leaving the grid:
// 4 V - sum of neighbours = 4 at the source, zero boundary data. The walk
// exits through stub k with probability V(stub site) / 4.
HarmonicField expected_visits(GridPtr g, VertexId source, const SolveOptions& opt = {});

// Generic-graph helpers (small graphs; serial reference).
std::vector<double> solve_dirichlet_graph(const Graph& g, const std::vector<std::optional<double>>& data,
                                          double tol = 1e-13, int max_iter = 1000000);
double graph_laplacian(const Graph& g, const std::vector<double>& values, std::size_t v);
double flux_sum_graph(const Graph& g, const std::vector<double>& values, const std::vector<std::size_t>& set);

}  // namespace lerw
