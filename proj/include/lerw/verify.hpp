#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lerw/continuous.hpp"
#include "lerw/stats.hpp"
#include "lerw/walk.hpp"

namespace lerw {

// ---- discrete driving -------------------------------------------------------

struct DiscreteDriving {
    Extraction ex;
    std::vector<double> v;   // v_delta(n): hull time once vertex n is attached
    std::vector<double> xi;  // xi_delta(v_delta(n))
    std::vector<std::size_t> records;  // records appended once vertex n is attached
};

// points: anchor followed by the lattice vertices (internal frame). Each edge
// is split into per_edge pieces and mapped by f before extraction. Vertices
// past max_time are dropped.
DiscreteDriving discrete_driving(const std::vector<Complex>& points, const Uniformizer& f,
                                 double max_time = std::numeric_limits<double>::infinity(), int per_edge = 4);

// Stopping indices n_0 = 0 < n_1 < ...: n_{j+1} is the first n with
// v(n) - v(n_j) >= d^2 or |xi(n) - xi(n_j)| >= d. Indices never exceed n_end.
std::vector<std::size_t> block_indices(const std::vector<double>& v, const std::vector<double>& xi, double d,
                                       std::size_t n_end);

// lambda * int_0^{v(n)} X ds along the discrete hull, per vertex n, with the
// drift of the closed-form target image evaluated record by record.
std::vector<double> drift_integral(const DiscreteDriving& dd, TargetImage img, double lambda = 2.0);

struct DriftSubtracted {
    std::vector<double> eta;            // per vertex
    std::vector<double> drift;          // lambda * int X, per vertex
    std::vector<std::size_t> blocks;    // stopping indices
    bool last_block_complete = false;   // the final index was set by the rule, not by n_end
};

DriftSubtracted subtract_drift(const DiscreteDriving& dd, const TargetImage& img, double d,
                               std::size_t n_end = std::numeric_limits<std::size_t>::max(), double lambda = 2.0);

// ---- martingale checks -----------------------------------------------------

struct ProbeStat {
    Complex z;               // file frame (model frame for half-plane runs)
    double initial = 0.0;    // g_0 or P_0
    MeanSe estimate;         // of the increment (discrete) or of P_t (continuous)
    double z_score = 0.0;
    double bound = 0.0;      // allowed |deviation|
    std::size_t stopped = 0; // samples stopped by the probe guard
    bool pass = false;
};

struct MartingaleReport {
    std::vector<ProbeStat> probes;
    std::size_t samples = 0;
    double threshold = 0.0;  // |z| limit or SE multiple
    bool pass = false;
    std::string note;
};

struct DiscreteMartingaleOptions {
    double d = 0.1;          // block scale
    std::size_t max_blocks = 4;
    double guard_cells = 3.0;
    double z_limit = 4.0;
};

// Telescoped block increments g_{n_J}(w) - g_{n_0}(w) of the kind-G
// observable, with n_J the J-th block index stopped early when the path comes
// within guard_cells of a probe.
MartingaleReport martingale_check_discrete(const Domain& d, const Target& t, double delta,
                                           const std::vector<Complex>& probes, std::size_t N, std::uint64_t seed,
                                           const DiscreteMartingaleOptions& opt = {});

struct ContinuousMartingaleOptions {
    double t_end = 0.05;
    double dt = 1e-3;
    bool zero_drift = false;
    double bias = 0.05;
    double k_se = 3.0;
};

// Normalized tip Poisson kernel P_t(z) in model coordinates.
double poisson_observable(const LoewnerState& state, double xi, const TargetImage& img, Complex z_model);

MartingaleReport martingale_check_continuous(const TargetImage& img, const std::vector<Complex>& probes_model,
                                             std::size_t N, std::uint64_t seed,
                                             const ContinuousMartingaleOptions& opt = {});
MartingaleReport martingale_check_continuous(const Domain& d, const Target& t, const std::vector<Complex>& probes,
                                             std::size_t N, std::uint64_t seed,
                                             const ContinuousMartingaleOptions& opt = {});

// ---- increment moments -----------------------------------------------------

struct MomentReport {
    double d = 0.0;
    std::size_t samples = 0;
    std::size_t blocks = 0;
    double mean_deta = 0.0, se_deta = 0.0;
    double mean_q = 0.0;          // (dxi)^2 - 2 dv per block
    double mean_2dv = 0.0;
    double rel_q = 0.0, rel_se = 0.0;  // sum q / sum 2dv and its SE
    bool degenerate = false;      // at most one block per sample: no claim
    bool pass_eta = false, pass_q = false;
};

struct MomentOptions {
    double rho0 = 0.5;   // blocks are taken while the path stays within |z| < rho0 (internal frame)
    double k_se = 3.0;
    double rel_bias = 0.1;
};

MomentReport moment_check(const Domain& d, const Target& t, double delta, double block_d, std::size_t N,
                          std::uint64_t seed, const MomentOptions& opt = {});

// ---- quasi-loops -----------------------------------------------------------

// Index pairs i < j with both points in B(z, r), |p_i - p_j| <= eps and the
// subpath p_i..p_j leaving B(z, 2r). Brute-force reference.
std::vector<std::pair<std::size_t, std::size_t>> quasi_loops(const std::vector<Complex>& path, Complex z, double r,
                                                             double eps);
// Bucketed variant; same output.
std::vector<std::pair<std::size_t, std::size_t>> quasi_loops_fast(const std::vector<Complex>& path, Complex z,
                                                                  double r, double eps);

struct QuasiLoopTrend {
    std::vector<double> eps;
    std::vector<double> prob;
    std::vector<double> se;
    std::size_t samples = 0;
    bool pass = false;  // nonincreasing within 2 SE
};

QuasiLoopTrend quasi_loop_trend(const Domain& d, const Target& t, double delta, Complex z0, double r,
                                const std::vector<double>& eps, std::size_t N, std::uint64_t seed);

// ---- curves ----------------------------------------------------------------

double frechet_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

// ---- convergence -----------------------------------------------------------

struct ConvergenceLevel {
    double delta = 0.0;
    double ks = 0.0;
    double ks_band = 0.0;
    double ks_p = 0.0;
    double frechet_median = 0.0;
    double frechet_se = 0.0;
    std::size_t short_paths = 0;  // paths whose hull never reached t_probe
    std::vector<double> xi;
};

struct ConvergenceReport {
    double t_probe = 0.0;
    std::vector<ConvergenceLevel> levels;
    std::vector<double> xi_continuous;
    int ks_inversions = 0;
    int frechet_inversions = 0;
    bool ks_pass = false;
    bool frechet_pass = false;
    bool pass = false;
};

struct ConvergenceOptions {
    double dt = 1e-4;
};

// Counts i with s[i+1] > s[i]; passes with no inversion or a single one
// smaller than band[i+1].
bool trend_decreasing(const std::vector<double>& s, const std::vector<double>& band, int* inversions);

ConvergenceReport convergence_report(const Domain& d, const Target& t, const std::vector<double>& meshes,
                                     double t_probe, std::size_t N, std::uint64_t seed,
                                     const ConvergenceOptions& opt = {});

// ---- laws ------------------------------------------------------------------

struct ReversibilityReport {
    std::vector<double> forward, backward;
    double ks = 0.0;
    double p_value = 0.0;
    bool pass = false;
};

// Height of the first crossing of the vertical line x = x_mid (file frame).
double first_crossing_height(const std::vector<Complex>& points, double x_mid);

// Forward LERW start -> x_e against the reversal of the LERW x_e -> start.
ReversibilityReport reversibility_check(const Domain& d, double x_e, double delta, std::size_t N, std::uint64_t seed,
                                        double p_min = 0.01);

struct EndpointReport {
    std::vector<double> edges;
    std::vector<double> empirical;
    std::vector<double> reference;
    double tv = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

// Endpoint histogram of LERW to an axis arc against the walk's exit law on the
// arc (expected visits at the stub sites, normalized).
EndpointReport endpoint_law(const Domain& d, const Target& arc, double delta, std::size_t N, std::uint64_t seed,
                            int bins = 16, double tv_max = 0.05);

}  // namespace lerw
