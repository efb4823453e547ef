#include "lerw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lerw {

namespace {

double cross(Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); }
double dot(Complex u, Complex v) { return u.real() * v.real() + u.imag() * v.imag(); }

}  // namespace

double signed_area(const Polygon& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * s;
}

double perimeter(const Polygon& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += std::abs(poly[(i + 1) % poly.size()] - poly[i]);
    return s;
}

bool is_axis_parallel(const Polygon& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Complex e = poly[(i + 1) % poly.size()] - poly[i];
        if (std::abs(e) == 0.0) return false;
        if (e.real() != 0.0 && e.imag() != 0.0) return false;
    }
    return true;
}

bool is_simple(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            Complex a = poly[i], b = poly[(i + 1) % n], c = poly[j], d = poly[(j + 1) % n];
            if (adjacent) {
                // Adjacent edges may only share their common vertex.
                Complex shared = (j == i + 1) ? b : a;
                Complex p = (j == i + 1) ? a : b;
                Complex q = (j == i + 1) ? d : c;
                if (std::abs(cross(p - shared, q - shared)) < 1e-15 && dot(p - shared, q - shared) > 0)
                    return false;
                continue;
            }
            if (segment_hit(a, b, c, d) || std::abs(distance_to_segment(a, c, d)) < 1e-15) return false;
        }
    }
    return true;
}

bool on_boundary(const Polygon& poly, Complex z, double tol) {
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (distance_to_segment(z, poly[i], poly[(i + 1) % poly.size()]) <= tol) return true;
    return false;
}

bool contains_closed(const Polygon& poly, Complex z, double tol) {
    if (on_boundary(poly, z, tol)) return true;
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        Complex a = poly[i], b = poly[j];
        if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
            double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (z.real() < x) inside = !inside;
        }
    }
    return inside;
}

std::optional<double> segment_hit(Complex a, Complex b, Complex c, Complex d) {
    Complex r = b - a, s = d - c;
    double denom = cross(r, s);
    Complex ca = c - a;
    if (denom == 0.0) {
        if (cross(ca, r) != 0.0) return std::nullopt;
        // Collinear: project the other segment onto a + t r.
        double rr = dot(r, r);
        double t0 = dot(c - a, r) / rr, t1 = dot(d - a, r) / rr;
        double lo = std::min(t0, t1), hi = std::max(t0, t1);
        if (hi <= 0.0 || lo > 1.0) return std::nullopt;
        double t = std::max(lo, 0.0);
        if (t <= 0.0) {
            // The overlap starts at a itself; report the first point beyond a.
            t = std::numeric_limits<double>::min();
        }
        return t;
    }
    double t = cross(ca, s) / denom;
    double u = cross(ca, r) / denom;
    constexpr double eps = 1e-13;
    if (t <= eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) return std::nullopt;
    return std::min(t, 1.0);
}

std::optional<double> first_boundary_hit(const Polygon& poly, Complex a, Complex b) {
    std::optional<double> best;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        auto t = segment_hit(a, b, poly[i], poly[(i + 1) % poly.size()]);
        if (t && (!best || *t < *best)) best = t;
    }
    return best;
}

double boundary_coordinate(const Polygon& poly, Complex z) {
    double best_d = std::numeric_limits<double>::infinity(), best_s = 0.0, run = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Complex a = poly[i], b = poly[(i + 1) % poly.size()];
        double len = std::abs(b - a);
        double t = std::clamp(dot(z - a, b - a) / (len * len), 0.0, 1.0);
        double d = std::abs(a + t * (b - a) - z);
        if (d < best_d) {
            best_d = d;
            best_s = run + t * len;
        }
        run += len;
    }
    return best_s;
}

double distance_to_segment(Complex z, Complex a, Complex b) {
    Complex r = b - a;
    double rr = dot(r, r);
    if (rr == 0.0) return std::abs(z - a);
    double t = std::clamp(dot(z - a, r) / rr, 0.0, 1.0);
    return std::abs(a + t * r - z);
}

double distance_to_polyline(Complex z, const std::vector<Complex>& line) {
    if (line.empty()) return std::numeric_limits<double>::infinity();
    if (line.size() == 1) return std::abs(z - line[0]);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i) d = std::min(d, distance_to_segment(z, line[i], line[i + 1]));
    return d;
}

double distance_to_polygon(const Polygon& poly, Complex z) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i)
        d = std::min(d, distance_to_segment(z, poly[i], poly[(i + 1) % poly.size()]));
    return d;
}

double polygon_distance(const Polygon& p, const Polygon& q) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        Complex a = p[i], b = p[(i + 1) % p.size()];
        for (std::size_t j = 0; j < q.size(); ++j) {
            Complex c = q[j], e = q[(j + 1) % q.size()];
            if (segment_hit(a, b, c, e)) return 0.0;
            d = std::min({d, distance_to_segment(a, c, e), distance_to_segment(b, c, e),
                          distance_to_segment(c, a, b), distance_to_segment(e, a, b)});
        }
    }
    return d;
}

}  // namespace lerw
