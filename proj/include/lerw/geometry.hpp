#pragma once

#include <optional>
#include <vector>

#include "lerw/types.hpp"

namespace lerw {

using Polygon = std::vector<Complex>;

double signed_area(const Polygon& poly);
double perimeter(const Polygon& poly);
bool is_axis_parallel(const Polygon& poly);
bool is_simple(const Polygon& poly);

// Closed containment (boundary counts as inside).
bool contains_closed(const Polygon& poly, Complex z, double tol = 1e-12);
bool on_boundary(const Polygon& poly, Complex z, double tol = 1e-12);

// Smallest t in (0, 1] with a + t (b - a) on the segment [c, d].
std::optional<double> segment_hit(Complex a, Complex b, Complex c, Complex d);

// Smallest t in (0, 1] where a + t (b - a) meets the polygon boundary.
std::optional<double> first_boundary_hit(const Polygon& poly, Complex a, Complex b);

// Arc-length coordinate of a boundary point, measured from vertex 0 along
// the vertex order.
double boundary_coordinate(const Polygon& poly, Complex z);

double distance_to_segment(Complex z, Complex a, Complex b);
double distance_to_polyline(Complex z, const std::vector<Complex>& line);
double distance_to_polygon(const Polygon& poly, Complex z);
double polygon_distance(const Polygon& p, const Polygon& q);

}  // namespace lerw
