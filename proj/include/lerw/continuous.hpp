#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lerw/harmonic.hpp"
#include "lerw/loewner.hpp"
#include "lerw/rng.hpp"
#include "lerw/uniformizer.hpp"

namespace lerw {

// Drift and d_y J at the driving point x for the half-plane Green function
// with pole a + ib.
double drift_closed_form_halfplane(Complex p_image, double x);
double dyj_closed_form_halfplane(Complex p_image, double x);

struct DriftFit {
    double X = 0.0;
    double dyJ = 0.0;
    double r_fit = 0.0;
    double residual = 0.0;
    int refits = 0;
};

// Target in half-plane model coordinates, moved along by the Loewner flow.
struct TargetImage {
    TargetKind kind = TargetKind::InteriorPoint;
    Complex p{0.0, 1.0};    // interior pole
    double e = 0.0;         // prime end
    double a = 0.0, b = 0.0;  // axis arc
    double scale = 1.0;     // Poisson normalization: derivative of the map at the prime end

    void advance(double xi, double dt);
};

DriftFit drift_closed_form(const TargetImage& img, double x);

// Image of an internal-frame target under f at t = 0 (axis arcs only for SideArc).
TargetImage initial_target_image(const Target& internal, const Uniformizer& f);

struct TipFitOptions {
    int samples = 64;
    double min_cells = 8.0;          // fit radius floor, in solver cells from the tip
    double obstacle_fraction = 0.05;
    double residual_cap = 0.1;       // RMS misfit relative to a1 * r_fit
    int max_refits = 4;
};

// Two-term sine projection J(x + r e^{i theta}) ~ a1 r sin(theta) + a2 r^2 sin(2 theta).
// X = 2 a2 / a1, dyJ = a1. Throws NumericError when a1 <= 0 or J is undefined.
DriftFit fit_sine_modes(const std::function<double(Complex)>& J, double x, double r, int samples);

// Solved physical field for the target kind (internal frame).
HarmonicField solve_target_field(GridPtr g, const SlitMask* mask, const Target& internal_target,
                                 const SolveOptions& opt = {});

// Numeric drift: J(w) = field(f^{-1}(phi_t^{-1}(w))) fitted on a semicircle
// around x. The radius is max(floor, obstacle_fraction * obstacle_distance);
// refits shrink it by 0.6 but never below the min_cells floor.
DriftFit drift_numeric(const HarmonicField& field, const LoewnerState& state, const Uniformizer& f, double x,
                       double obstacle_distance, const TipFitOptions& opt = {});

enum class StopReason { Running, MaxTime, NearTarget, TargetSwallowed };
std::string to_string(StopReason r);

struct ContinuousOptions {
    double dt = 1e-3;
    double t_max = 0.5;
    double stop_margin = -1.0;  // <= 0: 0.05 x target scale
    double lambda = 2.0;
    bool zero_drift = false;    // negative control: pure sqrt(2) Brownian driving
    bool numeric = false;       // numeric drift even when a closed form exists
    double solve_mesh = 1.0 / 32.0;
    int solve_reuse = 5;
    TipFitOptions fit;
    SolveOptions solve;
};

struct ContinuousRun {
    DrivingFunction driving;     // xi_0 on the uniform grid
    std::vector<double> u;       // time change, same grid
    std::vector<double> X;       // per step: drift used from t_k to t_{k+1}
    std::vector<double> dyJ;     // per step
    std::vector<Complex> trace;  // beta_0 in the file frame
    std::vector<Complex> trace_model;
    LoewnerState state;
    StopReason stop = StopReason::Running;

    // gamma_0 points at the requested u values (monotone interpolation).
    std::vector<Complex> trace_by_u(const std::vector<double>& s) const;
};

// Continuous LERW driving SDE
//     d xi = sqrt(2) dB + lambda X dt,   du = (d_y J)^2 dt,
// integrated by explicit Euler-Maruyama with hull records (xi_old, dt).
class ContinuousLerw {
public:
    // File-frame domain and target.
    ContinuousLerw(const Domain& d, const Target& t, ContinuousOptions opt = {});
    // Loewner evolution in the whole half-plane with the target given in
    // model coordinates; closed-form drift only.
    static ContinuousLerw halfplane(const TargetImage& img, ContinuousOptions opt = {});

    double time() const { return state_.time(); }
    double xi() const { return xi_; }
    double u() const { return u_; }
    const LoewnerState& state() const { return state_; }
    const TargetImage& target_image() const { return img_; }
    StopReason stop() const { return stop_; }
    bool stopped() const { return stop_ != StopReason::Running; }
    Complex tip_model() const;
    Complex tip_physical() const;  // internal frame

    DriftFit drift();
    // One Euler-Maruyama step with Brownian increment dW ~ N(0, dt).
    DriftFit step(double dW);

    ContinuousRun run(Rng& rng);
    ContinuousRun run_with_noise(const std::vector<double>& dW);

private:
    ContinuousLerw() = default;
    void check_stop();
    double obstacle_distance() const;
    double target_distance(Complex tip_internal) const;
    void record(ContinuousRun& out) const;

    ContinuousOptions opt_;
    bool has_domain_ = false;
    Domain domain_;          // internal frame (start_x = 0)
    double start_x_ = 0.0;
    Target target_;          // internal frame
    Uniformizer f_ = Uniformizer::identity();
    bool closed_form_ = true;
    TargetImage img_;
    std::vector<Complex> hole_points_;  // model images of hole vertices
    LoewnerState state_;
    double xi_ = 0.0;
    double u_ = 0.0;
    double margin_ = 0.0;
    StopReason stop_ = StopReason::Running;

    GridPtr solve_grid_;
    std::shared_ptr<HarmonicField> field_;
    int field_age_ = 0;
};

}  // namespace lerw
