#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lerw/geometry.hpp"
#include "lerw/types.hpp"

namespace lerw {

// All coordinates here are in the file frame. The lattice and every solver
// work in the internal frame, which is the file frame shifted by -start_x so
// the start prime end sits at 0.
struct Domain {
    std::vector<Polygon> holes;
    double start_x = 0.0;
    double far_radius = 0.0;

    Complex to_internal(Complex z) const { return z - start_x; }
    Complex to_file(Complex z) const { return z + start_x; }
    bool hole_free() const { return holes.empty(); }

    // Closed-region tests in internal coordinates.
    bool in_hole(Complex z_internal) const;
    bool inside(Complex z_internal) const;  // open domain, truncation included
    double min_feature_size() const;

    bool operator==(const Domain&) const = default;
};

enum class TargetKind { InteriorPoint, PrimeEnd, SideArc };
enum class ArcKind { AxisInterval, Hole, HoleSubArc };

struct Target {
    TargetKind kind = TargetKind::InteriorPoint;
    Complex p{0.0, 1.0};
    double x_e = 0.0;
    ArcKind arc = ArcKind::AxisInterval;
    double a = 0.0, b = 0.0;
    int hole_index = -1;
    Complex arc_from{}, arc_to{};

    static Target interior(Complex p);
    static Target prime_end(double x_e);
    static Target axis_arc(double a, double b);
    static Target hole_arc(int hole);
    static Target hole_sub_arc(int hole, Complex from, Complex to);

    bool operator==(const Target&) const = default;
};

std::string to_string(TargetKind k);

struct Config {
    Domain domain;
    Target target;
    std::optional<double> mesh;

    bool operator==(const Config&) const = default;
};

struct MeshSet {
    bool unconstrained = false;   // interior or whole-hole targets: any mesh works
    std::vector<double> meshes;   // descending, when constrained
};

Config parse_domain(const std::string& text);
std::string serialize(const Config& cfg);
void validate(const Config& cfg);

// Lattice-constrained coordinates of the target in the internal frame.
std::vector<double> constrained_coordinates(const Target& t, double start_x);
MeshSet admissible_meshes(const Target& t, double delta_min, double delta_max, double start_x = 0.0);
bool is_admissible(const Target& t, double delta, double start_x = 0.0);

// Target extent used by the truncation invariant (file frame).
double target_extent(const Domain& d, const Target& t);

// Reduced fraction num/den approximating x; den bounded by max_den.
struct Rational {
    long long num = 0, den = 1;
};
std::optional<Rational> to_rational(double x, long long max_den = 1000000);

}  // namespace lerw
