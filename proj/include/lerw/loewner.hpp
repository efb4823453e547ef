#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "lerw/types.hpp"

namespace lerw {

// Vertical-slit map for constant driving xi over a time step dt:
//     g(z) = xi + sqrt((z - xi)^2 + 4 dt),
// branch chosen with Im g >= 0; on the slit itself the right-side prime end
// is taken.
Complex elementary_map(double xi, double dt, Complex z);
Complex elementary_inverse(double xi, double dt, Complex w);
Complex elementary_derivative(double xi, double dt, Complex z);

struct LoewnerRecord {
    double xi = 0.0;
    double dt = 0.0;
};

// phi_t as the composition of elementary maps, earliest record applied first.
class LoewnerState {
public:
    void append(double xi, double dt);
    void append(const LoewnerState& later);
    double time() const { return time_; }
    std::size_t size() const { return records_.size(); }
    const std::vector<LoewnerRecord>& records() const { return records_; }

    // nullopt when z is swallowed (its image reaches the axis).
    std::optional<Complex> try_map(Complex z) const;
    Complex map_point(Complex z) const;  // throws NumericError when swallowed
    Complex unmap_point(Complex w) const;
    Complex map_derivative(Complex z) const;
    // Records [begin, end) only: the quotient map phi_{end} o phi_{begin}^{-1}.
    Complex map_range(Complex z, std::size_t begin, std::size_t end) const;
    Complex unmap_range(Complex w, std::size_t begin, std::size_t end) const;
    // Tip of the hull: preimage of the last base point.
    Complex tip() const;

private:
    std::vector<LoewnerRecord> records_;
    double time_ = 0.0;
};

struct DrivingFunction {
    std::vector<double> t;
    std::vector<double> xi;

    std::size_t size() const { return t.size(); }
    double end_time() const { return t.empty() ? 0.0 : t.back(); }
    double at(double s) const;  // linear interpolation, clamped at the ends
    double range() const;
    void validate() const;      // strictly increasing grid, finite values
    static DrivingFunction uniform(double t_end, double step, double (*fn)(double));
};

struct Trace {
    std::vector<double> t;
    std::vector<Complex> z;
    LoewnerState state;
};

// Record k is (xi(t_k), t_{k+1} - t_k); the trace point at t_{k+1} is the
// exact tip of the composed slit maps.
Trace trace_from_driving(const DrivingFunction& xi);

struct ExtractOptions {
    double max_time = std::numeric_limits<double>::infinity();
    int max_refinements = 12;
};

struct Extraction {
    DrivingFunction driving;           // xi(t_k) = base of record k (image of the tip)
    LoewnerState state;
    std::vector<std::size_t> records_after;  // per curve point: records appended once it is processed
    bool terminal_on_axis = false;     // last point returned to the axis and was skipped
    std::size_t points_used = 0;
};

// Zipper-style extraction with vertical slits: each next curve point w is
// mapped through the current state to u + iv and contributes (u, v^2 / 4).
Extraction extract_driving(const std::vector<Complex>& curve, const ExtractOptions& opt = {});

// Hull capacity estimated from the far field: Im(phi(iy) - iy) * y / 2 -> t.
double far_field_time(const LoewnerState& s, double y = 1e3);

}  // namespace lerw
