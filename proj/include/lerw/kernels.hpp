#pragma once

#include <cstdint>
#include <vector>

namespace lerw {

// Five-point Dirichlet problem on a padded nx x ny box of sites:
//     4 u_s - sum_{d linked} u_{s + off(d)} = rhs_s   for every unknown s.
// Site bits: 0..3 mark links to unknown neighbours, bit 4 marks an unknown.
// Known neighbour values (stub data, frozen sites) are folded into rhs.
struct StencilProblem {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> bits;
    std::vector<double> rhs;

    static constexpr std::uint8_t kUnknown = 16;
    std::int64_t size() const { return static_cast<std::int64_t>(nx) * ny; }
    std::int64_t unknown_count() const;
};

struct SolveInfo {
    int iterations = 0;
    double residual = 0.0;  // max-norm of rhs - A u over unknowns
    bool converged = false;
};

// Max-norm residual of the current iterate.
double residual_norm(const StencilProblem& p, const std::vector<double>& u);

// Multigrid-preconditioned conjugate gradients (OpenMP-parallel kernels,
// deterministic for any thread count). u holds the initial guess on entry.
SolveInfo solve_mgpcg(const StencilProblem& p, std::vector<double>& u, double tol, int max_iter = 500);

// Serial successive over-relaxation in lexicographic order; the reference
// implementation the parallel solver is tested against. omega <= 0 selects
// the model-problem optimum for the box size.
SolveInfo solve_sor_reference(const StencilProblem& p, std::vector<double>& u, double tol, int max_iter,
                              double omega = 0.0);

}  // namespace lerw
