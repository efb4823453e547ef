#pragma once

// Dense linear-algebra oracles for small graphs.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lerw/grid.hpp"

namespace oracle {

// Harmonic extension of Dirichlet data on a generic graph by dense LU.
inline std::vector<double> dirichlet(const lerw::Graph& g, const std::vector<std::optional<double>>& data) {
    const std::size_t n = g.size();
    std::vector<int> idx(n, -1);
    int m = 0;
    for (std::size_t v = 0; v < n; ++v)
        if (!data[v]) idx[v] = m++;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (std::size_t v = 0; v < n; ++v) {
        if (data[v]) continue;
        A(idx[v], idx[v]) = static_cast<double>(g.degree(v));
        for (std::size_t k = 0; k < g.degree(v); ++k) {
            std::size_t w = g.neighbor(v, k);
            if (data[w]) b(idx[v]) += *data[w];
            else A(idx[v], idx[w]) -= 1.0;
        }
    }
    Eigen::VectorXd x = A.fullPivLu().solve(b);
    std::vector<double> out(n);
    for (std::size_t v = 0; v < n; ++v) out[v] = data[v] ? *data[v] : x(idx[v]);
    return out;
}

// Same problem on a lattice grid: stubs carry stub_values, interior vertices
// listed in fixed are held.
inline std::vector<double> grid_dirichlet(const lerw::GridGraph& g, const std::vector<double>& stub_values,
                                          const std::vector<std::pair<lerw::VertexId, double>>& fixed = {},
                                          lerw::GridGraph::Compact* out_compact = nullptr) {
    auto c = g.compact();
    std::vector<std::optional<double>> data(c.ids.size());
    const std::size_t ni = c.ids.size() - g.stubs().size();
    for (std::size_t k = 0; k < g.stubs().size(); ++k) data[ni + k] = stub_values.empty() ? 0.0 : stub_values[k];
    for (auto [v, val] : fixed) data[c.index_of(g, v)] = val;
    auto x = dirichlet(c.graph, data);
    if (out_compact) *out_compact = std::move(c);
    return x;
}

}  // namespace oracle
