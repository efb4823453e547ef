#include "lerw/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lerw {

double drift_closed_form_halfplane(Complex p_image, double x) {
    const double a = p_image.real(), b = p_image.imag();
    if (!(b > 0.0)) throw ValidationError("pole image must lie in the upper half-plane");
    const double dx = x - a;
    return -2.0 * dx / (dx * dx + b * b);
}

double dyj_closed_form_halfplane(Complex p_image, double x) {
    const double a = p_image.real(), b = p_image.imag();
    if (!(b > 0.0)) throw ValidationError("pole image must lie in the upper half-plane");
    const double dx = x - a;
    return b / (kPi * (dx * dx + b * b));
}

void TargetImage::advance(double xi, double dt) {
    switch (kind) {
        case TargetKind::InteriorPoint: p = elementary_map(xi, dt, p); break;
        case TargetKind::PrimeEnd:
            scale *= elementary_derivative(xi, dt, Complex(e, 0.0)).real();
            e = elementary_map(xi, dt, Complex(e, 0.0)).real();
            break;
        case TargetKind::SideArc:
            a = elementary_map(xi, dt, Complex(a, 0.0)).real();
            b = elementary_map(xi, dt, Complex(b, 0.0)).real();
            break;
    }
}

DriftFit drift_closed_form(const TargetImage& img, double x) {
    DriftFit f;
    switch (img.kind) {
        case TargetKind::InteriorPoint:
            f.X = drift_closed_form_halfplane(img.p, x);
            f.dyJ = dyj_closed_form_halfplane(img.p, x);
            break;
        case TargetKind::PrimeEnd: {
            const double dx = x - img.e;
            if (dx == 0.0) throw NumericError("driving point reached the prime end");
            f.X = -2.0 / dx;
            f.dyJ = img.scale / (dx * dx);
            break;
        }
        case TargetKind::SideArc: {
            const double da = x - img.a, db = x - img.b;
            if (!(da * db > 0.0)) throw NumericError("driving point reached the target arc");
            f.X = -(1.0 / da + 1.0 / db);
            f.dyJ = (img.b - img.a) / (kPi * da * db);
            break;
        }
    }
    return f;
}

TargetImage initial_target_image(const Target& t, const Uniformizer& f) {
    TargetImage img;
    img.kind = t.kind;
    switch (t.kind) {
        case TargetKind::InteriorPoint: img.p = f.map(t.p); break;
        case TargetKind::PrimeEnd:
            img.e = f.map(Complex(t.x_e, 0.0)).real();
            img.scale = f.derivative(Complex(t.x_e, 0.0)).real();
            break;
        case TargetKind::SideArc:
            if (t.arc == ArcKind::AxisInterval) {
                img.a = f.map(Complex(t.a, 0.0)).real();
                img.b = f.map(Complex(t.b, 0.0)).real();
            }
            break;
    }
    return img;
}

DriftFit fit_sine_modes(const std::function<double(Complex)>& J, double x, double r, int samples) {
    double c1 = 0.0, c2 = 0.0;
    std::vector<double> vals(static_cast<std::size_t>(samples)), th(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double t = (k + 0.5) * kPi / samples;
        const double v = J(Complex(x + r * std::cos(t), r * std::sin(t)));
        if (!std::isfinite(v)) throw NumericError("tip fit sample outside the solved field");
        th[k] = t;
        vals[k] = v;
        c1 += v * std::sin(t);
        c2 += v * std::sin(2.0 * t);
    }
    c1 *= 2.0 / samples;
    c2 *= 2.0 / samples;
    DriftFit f;
    f.r_fit = r;
    f.dyJ = c1 / r;
    if (!(f.dyJ > 0.0)) throw NumericError("tip fit failed: non-positive d_y J");
    const double a2 = c2 / (r * r);
    f.X = 2.0 * a2 / f.dyJ;
    for (int k = 0; k < samples; ++k) {
        const double e = vals[k] - c1 * std::sin(th[k]) - c2 * std::sin(2.0 * th[k]);
        f.residual += e * e / samples;
    }
    // RMS misfit; the r^3 and higher modes are orthogonal to the fitted pair.
    f.residual = std::sqrt(f.residual);
    return f;
}

HarmonicField solve_target_field(GridPtr g, const SlitMask* mask, const Target& t, const SolveOptions& opt) {
    switch (t.kind) {
        case TargetKind::InteriorPoint: return green_function(std::move(g), mask, t.p, opt);
        case TargetKind::PrimeEnd: return boundary_poisson_field(std::move(g), mask, t.x_e, opt);
        case TargetKind::SideArc: return harmonic_measure(std::move(g), mask, t, opt);
    }
    throw ValidationError("unknown target kind");
}

DriftFit drift_numeric(const HarmonicField& field, const LoewnerState& state, const Uniformizer& f, double x,
                       double obstacle_distance, const TipFitOptions& opt) {
    const double h = field.grid->delta();
    const Complex tip = f.unmap(state.size() ? state.tip() : Complex(x, 0.0));
    auto pull = [&](Complex w) { return f.unmap(state.unmap_point(w)); };

    // Smallest mapped radius whose whole semicircle stays min_cells solver
    // cells from the tip. x need not be the tip's image, so the apex alone is
    // not enough.
    auto tip_gap = [&](double r) {
        double gap = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 16; ++k) {
            const Complex z = pull(x + std::polar(r, kPi * k / 16));
            if (z.imag() > 0.0) gap = std::min(gap, std::abs(z - tip));
        }
        return gap;
    };
    double r8 = opt.min_cells * h;
    if (state.size())
        for (int k = 0; k < 60 && tip_gap(r8) < opt.min_cells * h; ++k) r8 *= 1.25;
    double r = std::max(r8, opt.obstacle_fraction * obstacle_distance);

    auto J = [&](Complex w) {
        const Complex z = pull(w);
        if (!(z.imag() > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return field.interpolate(z);
    };
    for (int refit = 0;; ++refit) {
        DriftFit fit = fit_sine_modes(J, x, r, opt.samples);
        fit.refits = refit;
        if (fit.residual <= opt.residual_cap * fit.dyJ * r) return fit;
        // Smaller radii than r8 are dominated by mesh error near the slit.
        if (refit >= opt.max_refits || r <= r8)
            throw NumericError("tip fit residual " + std::to_string(fit.residual) + " exceeds the cap at radius " +
                               std::to_string(r));
        r = std::max(0.6 * r, r8);
    }
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Running: return "running";
        case StopReason::MaxTime: return "max_time";
        case StopReason::NearTarget: return "near_target";
        case StopReason::TargetSwallowed: return "target_swallowed";
    }
    return "unknown";
}

std::vector<Complex> ContinuousRun::trace_by_u(const std::vector<double>& s) const {
    std::vector<Complex> out;
    out.reserve(s.size());
    for (double v : s) {
        if (u.empty()) break;
        if (v <= u.front()) {
            out.push_back(trace.front());
            continue;
        }
        if (v >= u.back()) {
            out.push_back(trace.back());
            continue;
        }
        const auto k = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), v) - u.begin());
        const double a = (v - u[k - 1]) / (u[k] - u[k - 1]);
        out.push_back((1.0 - a) * trace[k - 1] + a * trace[k]);
    }
    return out;
}

ContinuousLerw::ContinuousLerw(const Domain& d, const Target& t, ContinuousOptions opt) : opt_(opt) {
    validate(Config{d, t, std::nullopt});
    has_domain_ = true;
    start_x_ = d.start_x;
    domain_ = d;
    for (auto& h : domain_.holes)
        for (auto& v : h) v = d.to_internal(v);
    domain_.start_x = 0.0;
    target_ = to_internal(d, t);
    f_ = Uniformizer::for_domain(d);
    closed_form_ = d.hole_free() && !opt_.numeric;
    if (opt_.numeric && d.hole_free()) f_ = Uniformizer::identity();
    if (closed_form_ && target_.kind == TargetKind::SideArc && target_.arc != ArcKind::AxisInterval)
        throw ValidationError("hole targets need a domain with holes");

    img_ = initial_target_image(target_, f_);
    for (const auto& h : domain_.holes)
        for (auto v : h) hole_points_.push_back(f_.map(v));

    double tscale = 1.0;
    if (target_.kind == TargetKind::InteriorPoint) tscale = std::abs(target_.p);
    if (target_.kind == TargetKind::PrimeEnd) tscale = std::abs(target_.x_e);
    if (target_.kind == TargetKind::SideArc && target_.arc == ArcKind::AxisInterval)
        tscale = std::min(std::abs(target_.a), std::abs(target_.b));
    if (target_.kind == TargetKind::SideArc && target_.arc != ArcKind::AxisInterval)
        tscale = distance_to_polygon(domain_.holes.at(static_cast<std::size_t>(target_.hole_index)), Complex(0.0, 0.0));
    margin_ = opt_.stop_margin > 0.0 ? opt_.stop_margin : 0.05 * tscale;

    if (!closed_form_) solve_grid_ = build_solve_grid(std::make_shared<DomainRegion>(d), opt_.solve_mesh);
}

ContinuousLerw ContinuousLerw::halfplane(const TargetImage& img, ContinuousOptions opt) {
    ContinuousLerw c;
    c.opt_ = opt;
    c.img_ = img;
    c.closed_form_ = true;
    double tscale = 1.0;
    if (img.kind == TargetKind::InteriorPoint) tscale = std::abs(img.p);
    if (img.kind == TargetKind::PrimeEnd) tscale = std::abs(img.e);
    if (img.kind == TargetKind::SideArc) tscale = std::min(std::abs(img.a), std::abs(img.b));
    c.margin_ = opt.stop_margin > 0.0 ? opt.stop_margin : 0.05 * tscale;
    return c;
}

Complex ContinuousLerw::tip_model() const { return state_.size() ? state_.tip() : Complex(xi_, 0.0); }

Complex ContinuousLerw::tip_physical() const { return f_.unmap(tip_model()); }

double ContinuousLerw::obstacle_distance() const {
    double d = std::numeric_limits<double>::infinity();
    switch (img_.kind) {
        case TargetKind::InteriorPoint: d = std::abs(img_.p - xi_); break;
        case TargetKind::PrimeEnd: d = std::abs(img_.e - xi_); break;
        case TargetKind::SideArc:
            if (has_domain_ && target_.arc != ArcKind::AxisInterval) break;
            d = std::min(std::abs(img_.a - xi_), std::abs(img_.b - xi_));
            break;
    }
    for (Complex v : hole_points_) d = std::min(d, std::abs(v - xi_));
    return d;
}

double ContinuousLerw::target_distance(Complex z) const {
    if (!has_domain_) {
        // Half-plane model: distances measured in model coordinates.
        switch (img_.kind) {
            case TargetKind::InteriorPoint: return std::abs(z - state_.unmap_point(img_.p));
            case TargetKind::PrimeEnd: return std::abs(z - state_.unmap_point(Complex(img_.e, 0.0)));
            case TargetKind::SideArc:
                return std::min(std::abs(z - state_.unmap_point(Complex(img_.a, 0.0))),
                                std::abs(z - state_.unmap_point(Complex(img_.b, 0.0))));
        }
    }
    switch (target_.kind) {
        case TargetKind::InteriorPoint: return std::abs(z - target_.p);
        case TargetKind::PrimeEnd: return std::abs(z - target_.x_e);
        case TargetKind::SideArc:
            if (target_.arc == ArcKind::AxisInterval)
                return distance_to_segment(z, Complex(target_.a, 0.0), Complex(target_.b, 0.0));
            return distance_to_polygon(domain_.holes.at(static_cast<std::size_t>(target_.hole_index)), z);
    }
    return std::numeric_limits<double>::infinity();
}

DriftFit ContinuousLerw::drift() {
    if (closed_form_) return drift_closed_form(img_, xi_);
    if (!field_ || field_age_ >= opt_.solve_reuse) {
        std::vector<Complex> line;
        line.reserve(state_.size() + 1);
        line.emplace_back(0.0, 0.0);
        for (std::size_t k = 1; k <= state_.size(); ++k)
            line.push_back(f_.unmap(state_.unmap_range(Complex(state_.records()[k - 1].xi, 0.0), 0, k)));
        SolveOptions so = opt_.solve;
        if (field_) so.warm_start = &field_->values;
        if (state_.size()) {
            SlitMask mask = make_slit_mask(*solve_grid_, line);
            field_ = std::make_shared<HarmonicField>(solve_target_field(solve_grid_, &mask, target_, so));
        } else {
            field_ = std::make_shared<HarmonicField>(solve_target_field(solve_grid_, nullptr, target_, so));
        }
        field_age_ = 0;
    }
    ++field_age_;
    return drift_numeric(*field_, state_, f_, xi_, obstacle_distance(), opt_.fit);
}

DriftFit ContinuousLerw::step(double dW) {
    if (stopped()) throw ValidationError("continuous LERW already stopped");
    const DriftFit fit = drift();
    const double xi_old = xi_;
    const double drift_term = opt_.zero_drift ? 0.0 : opt_.lambda * fit.X * opt_.dt;
    xi_ = xi_old + std::sqrt(2.0) * dW + drift_term;
    state_.append(xi_old, opt_.dt);
    u_ += fit.dyJ * fit.dyJ * opt_.dt;
    img_.advance(xi_old, opt_.dt);
    for (Complex& v : hole_points_) v = elementary_map(xi_old, opt_.dt, v);
    check_stop();
    return fit;
}

void ContinuousLerw::check_stop() {
    if (img_.kind == TargetKind::InteriorPoint && !(img_.p.imag() > 0.0)) {
        stop_ = StopReason::TargetSwallowed;
        return;
    }
    if (img_.kind == TargetKind::SideArc && !(img_.b > img_.a) && (!has_domain_ || target_.arc == ArcKind::AxisInterval)) {
        stop_ = StopReason::TargetSwallowed;
        return;
    }
    // A driving step landing on (or jumping across) the target's image on the
    // axis reaches the target.
    auto side = [&](double x) {
        if (img_.kind == TargetKind::PrimeEnd) return x < img_.e ? -1 : 1;
        return x < img_.a ? -1 : (x > img_.b ? 1 : 0);
    };
    const bool axis_target = img_.kind == TargetKind::PrimeEnd ||
                             (img_.kind == TargetKind::SideArc && (!has_domain_ || target_.arc == ArcKind::AxisInterval));
    if (axis_target && state_.size() && (side(xi_) == 0 || side(xi_) != side(state_.records().back().xi))) {
        stop_ = StopReason::NearTarget;
        return;
    }
    const Complex tip = has_domain_ ? tip_physical() : tip_model();
    if (target_distance(tip) < margin_) {
        stop_ = StopReason::NearTarget;
        return;
    }
    if (time() >= opt_.t_max - 1e-12 * opt_.dt) stop_ = StopReason::MaxTime;
}

void ContinuousLerw::record(ContinuousRun& out) const {
    out.driving.t.push_back(time());
    out.driving.xi.push_back(xi_);
    out.u.push_back(u_);
    const Complex m = tip_model();
    out.trace_model.push_back(m);
    out.trace.push_back(has_domain_ ? f_.unmap(m) + start_x_ : m);
}

ContinuousRun ContinuousLerw::run(Rng& rng) {
    const double sd = std::sqrt(opt_.dt);
    ContinuousRun out;
    record(out);
    while (!stopped()) {
        const DriftFit fit = step(sd * standard_normal(rng));
        out.X.push_back(fit.X);
        out.dyJ.push_back(fit.dyJ);
        record(out);
    }
    out.stop = stop_;
    out.state = state_;
    return out;
}

ContinuousRun ContinuousLerw::run_with_noise(const std::vector<double>& dW) {
    ContinuousRun out;
    record(out);
    for (double w : dW) {
        if (stopped()) break;
        const DriftFit fit = step(w);
        out.X.push_back(fit.X);
        out.dyJ.push_back(fit.dyJ);
        record(out);
    }
    out.stop = stop_;
    out.state = state_;
    return out;
}

}  // namespace lerw
