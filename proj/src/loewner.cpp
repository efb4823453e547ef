#include "lerw/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lerw {

namespace {

// sqrt(q) on the upper branch; when the root is real, its sign follows `side`
// (right side of the slit for side == 0).
Complex upper_sqrt(Complex q, double side) {
    Complex s = std::sqrt(q);
    if (s.imag() < 0.0) s = -s;
    if (s.imag() == 0.0) {
        const double r = std::abs(s.real());
        s = Complex(side < 0.0 ? -r : r, 0.0);
    }
    return s;
}

}  // namespace

Complex elementary_map(double xi, double dt, Complex z) {
    const Complex a = z - xi;
    return xi + upper_sqrt(a * a + 4.0 * dt, a.real());
}

Complex elementary_inverse(double xi, double dt, Complex w) {
    const Complex a = w - xi;
    return xi + upper_sqrt(a * a - 4.0 * dt, a.real());
}

Complex elementary_derivative(double xi, double dt, Complex z) {
    const Complex a = z - xi;
    return a / upper_sqrt(a * a + 4.0 * dt, a.real());
}

void LoewnerState::append(double xi, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(xi)) throw NumericError("invalid Loewner record");
    records_.push_back({xi, dt});
    time_ += dt;
}

void LoewnerState::append(const LoewnerState& later) {
    for (const auto& r : later.records_) append(r.xi, r.dt);
}

std::optional<Complex> LoewnerState::try_map(Complex z) const {
    const bool above = z.imag() > 0.0;
    for (const auto& r : records_) {
        z = elementary_map(r.xi, r.dt, z);
        if (above && !(z.imag() > 0.0)) return std::nullopt;
    }
    return z;
}

Complex LoewnerState::map_point(Complex z) const {
    auto w = try_map(z);
    if (!w) throw NumericError("point swallowed by the hull");
    return *w;
}

Complex LoewnerState::unmap_point(Complex w) const { return unmap_range(w, 0, records_.size()); }

Complex LoewnerState::map_derivative(Complex z) const {
    Complex d(1.0, 0.0);
    for (const auto& r : records_) {
        d *= elementary_derivative(r.xi, r.dt, z);
        z = elementary_map(r.xi, r.dt, z);
    }
    return d;
}

Complex LoewnerState::map_range(Complex z, std::size_t begin, std::size_t end) const {
    end = std::min(end, records_.size());
    for (std::size_t k = begin; k < end; ++k) z = elementary_map(records_[k].xi, records_[k].dt, z);
    return z;
}

Complex LoewnerState::unmap_range(Complex w, std::size_t begin, std::size_t end) const {
    end = std::min(end, records_.size());
    for (std::size_t k = end; k > begin; --k) w = elementary_inverse(records_[k - 1].xi, records_[k - 1].dt, w);
    return w;
}

Complex LoewnerState::tip() const {
    if (records_.empty()) return Complex(0.0, 0.0);
    return unmap_point(Complex(records_.back().xi, 0.0));
}

double DrivingFunction::at(double s) const {
    if (t.empty()) throw ValidationError("empty driving function");
    if (s <= t.front()) return xi.front();
    if (s >= t.back()) return xi.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double a = (s - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - a) * xi[k - 1] + a * xi[k];
}

double DrivingFunction::range() const {
    if (xi.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(xi.begin(), xi.end());
    return *hi - *lo;
}

void DrivingFunction::validate() const {
    if (t.empty() || t.size() != xi.size()) throw ValidationError("driving function needs matching t and xi samples");
    if (t.front() != 0.0) throw ValidationError("driving function must start at t = 0");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!std::isfinite(t[k]) || !std::isfinite(xi[k])) throw ValidationError("driving function has non-finite samples");
        if (k > 0 && !(t[k] > t[k - 1])) throw ValidationError("driving function times must increase strictly");
    }
}

DrivingFunction DrivingFunction::uniform(double t_end, double step, double (*fn)(double)) {
    DrivingFunction d;
    const auto n = static_cast<std::size_t>(std::llround(t_end / step));
    d.t.reserve(n + 1);
    d.xi.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = t_end * static_cast<double>(k) / static_cast<double>(n);
        d.t.push_back(s);
        d.xi.push_back(fn(s));
    }
    return d;
}

Trace trace_from_driving(const DrivingFunction& xi) {
    xi.validate();
    Trace tr;
    tr.t = xi.t;
    tr.z.reserve(xi.size());
    tr.z.emplace_back(xi.xi[0], 0.0);
    for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
        tr.state.append(xi.xi[k], xi.t[k + 1] - xi.t[k]);
        tr.z.push_back(tr.state.tip());
    }
    return tr;
}

Extraction extract_driving(const std::vector<Complex>& curve, const ExtractOptions& opt) {
    if (curve.empty()) throw ValidationError("empty curve");
    const Complex c0 = curve.front();
    if (std::abs(c0.imag()) > 1e-12 * (1.0 + std::abs(c0))) throw ValidationError("curve must start on the real axis");

    Extraction ex;
    ex.driving.t.push_back(0.0);
    ex.driving.xi.push_back(c0.real());
    ex.records_after.push_back(0);
    ex.points_used = 1;

    std::function<void(Complex, Complex, int)> add = [&](Complex z, Complex prev, int depth) {
        if (auto w = ex.state.try_map(z); w && w->imag() > 0.0) {
            ex.state.append(w->real(), 0.25 * w->imag() * w->imag());
            ex.driving.t.push_back(ex.state.time());
            ex.driving.xi.push_back(w->real());
            return;
        }
        if (depth >= opt.max_refinements) throw NumericError("driving extraction failed: curve point swallowed by the hull");
        const Complex mid = 0.5 * (prev + z);
        add(mid, prev, depth + 1);
        add(z, mid, depth + 1);
    };

    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (ex.state.time() >= opt.max_time) break;
        const Complex z = curve[k];
        const bool on_axis = z.imag() <= 1e-12 * (1.0 + std::abs(z));
        if (on_axis) {
            if (k + 1 == curve.size()) {
                ex.terminal_on_axis = true;
                ex.records_after.push_back(ex.state.size());
                ex.points_used = k + 1;
                break;
            }
            throw ValidationError("curve touches the real axis before its end");
        }
        add(z, curve[k - 1], 0);
        ex.records_after.push_back(ex.state.size());
        ex.points_used = k + 1;
    }
    return ex;
}

double far_field_time(const LoewnerState& s, double y) {
    const Complex z(0.0, y);
    return -0.5 * y * (s.map_point(z) - z).imag();
}

}  // namespace lerw
