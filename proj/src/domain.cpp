#include "lerw/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace lerw {

using nlohmann::json;

Target Target::interior(Complex p) {
    Target t;
    t.kind = TargetKind::InteriorPoint;
    t.p = p;
    return t;
}

Target Target::prime_end(double x_e) {
    Target t;
    t.kind = TargetKind::PrimeEnd;
    t.x_e = x_e;
    return t;
}

Target Target::axis_arc(double a, double b) {
    Target t;
    t.kind = TargetKind::SideArc;
    t.arc = ArcKind::AxisInterval;
    t.a = a;
    t.b = b;
    return t;
}

Target Target::hole_arc(int hole) {
    Target t;
    t.kind = TargetKind::SideArc;
    t.arc = ArcKind::Hole;
    t.hole_index = hole;
    return t;
}

Target Target::hole_sub_arc(int hole, Complex from, Complex to) {
    Target t = hole_arc(hole);
    t.arc = ArcKind::HoleSubArc;
    t.arc_from = from;
    t.arc_to = to;
    return t;
}

std::string to_string(TargetKind k) {
    switch (k) {
        case TargetKind::InteriorPoint: return "InteriorPoint";
        case TargetKind::PrimeEnd: return "PrimeEnd";
        case TargetKind::SideArc: return "SideArc";
    }
    return "?";
}

bool Domain::in_hole(Complex z) const {
    Complex w = to_file(z);
    for (const auto& h : holes)
        if (contains_closed(h, w)) return true;
    return false;
}

bool Domain::inside(Complex z) const {
    Complex w = to_file(z);
    return z.imag() > 0.0 && std::abs(w) < far_radius && !in_hole(z);
}

double Domain::min_feature_size() const {
    double f = far_radius;
    for (std::size_t i = 0; i < holes.size(); ++i) {
        const auto& h = holes[i];
        double ymin = std::numeric_limits<double>::infinity(), rmax = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            f = std::min(f, std::abs(h[(k + 1) % h.size()] - h[k]));
            ymin = std::min(ymin, h[k].imag());
            rmax = std::max(rmax, std::abs(h[k]));
        }
        f = std::min({f, ymin, far_radius - rmax});
        for (std::size_t j = i + 1; j < holes.size(); ++j) f = std::min(f, polygon_distance(h, holes[j]));
    }
    return f;
}

double target_extent(const Domain& d, const Target& t) {
    switch (t.kind) {
        case TargetKind::InteriorPoint: return std::abs(t.p);
        case TargetKind::PrimeEnd: return std::abs(t.x_e);
        case TargetKind::SideArc:
            if (t.arc == ArcKind::AxisInterval) return std::max(std::abs(t.a), std::abs(t.b));
            if (t.hole_index >= 0 && t.hole_index < static_cast<int>(d.holes.size())) {
                double e = 0.0;
                for (auto v : d.holes[t.hole_index]) e = std::max(e, std::abs(v));
                return e;
            }
            return 0.0;
    }
    return 0.0;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& rule) {
    throw ValidationError(path.empty() ? rule : path + ": " + rule);
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Complex point_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected a point [x, y]");
    return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

json point_json(Complex z) { return json::array({z.real(), z.imag()}); }

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

}  // namespace

std::optional<Rational> to_rational(double x, long long max_den) {
    if (!std::isfinite(x)) return std::nullopt;
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    // Continued-fraction convergents.
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        if (std::abs(a) > 1e15) break;
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol) {
            long long g = gcd_ll(std::llabs(h1), k1);
            return Rational{h1 / g, k1 / g};
        }
        double frac = r - a;
        if (frac == 0.0) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

std::vector<double> constrained_coordinates(const Target& t, double start_x) {
    std::vector<double> c;
    switch (t.kind) {
        case TargetKind::InteriorPoint: break;
        case TargetKind::PrimeEnd: c.push_back(t.x_e - start_x); break;
        case TargetKind::SideArc:
            if (t.arc == ArcKind::AxisInterval) {
                c.push_back(t.a - start_x);
                c.push_back(t.b - start_x);
            } else if (t.arc == ArcKind::HoleSubArc) {
                for (Complex z : {t.arc_from, t.arc_to}) {
                    c.push_back(z.real() - start_x);
                    c.push_back(z.imag());
                }
            }
            break;
    }
    c.erase(std::remove_if(c.begin(), c.end(), [](double v) { return std::abs(v) < 1e-12; }), c.end());
    return c;
}

MeshSet admissible_meshes(const Target& t, double delta_min, double delta_max, double start_x) {
    if (!(delta_min > 0.0) || !(delta_max >= delta_min)) throw ValidationError("mesh range must be positive and ordered");
    MeshSet out;
    auto coords = constrained_coordinates(t, start_x);
    if (coords.empty()) {
        out.unconstrained = true;
        return out;
    }
    // Rational gcd g of the constrained coordinates; admissible meshes are g/k.
    long long gn = 0, gd = 1;
    for (double v : coords) {
        auto q = to_rational(std::abs(v));
        if (!q) throw ValidationError("target coordinate " + std::to_string(v) + " is not rational");
        // gcd(gn/gd, qn/qd) = gcd(gn*qd, qn*gd) / (gd*qd)
        long long num = gcd_ll(gn * q->den, q->num * gd);
        long long den = gd * q->den;
        long long r = gcd_ll(num, den);
        gn = num / r;
        gd = den / r;
    }
    const double g = static_cast<double>(gn) / static_cast<double>(gd);
    const double slack = 1e-12;
    long long kmin = std::max<long long>(1, static_cast<long long>(std::ceil(g / delta_max - slack)));
    long long kmax = static_cast<long long>(std::floor(g / delta_min + slack));
    for (long long k = kmin; k <= kmax; ++k) {
        double d = static_cast<double>(gn) / (static_cast<double>(gd) * static_cast<double>(k));
        if (d <= delta_max * (1 + 1e-12) && d >= delta_min * (1 - 1e-12)) out.meshes.push_back(d);
    }
    return out;
}

bool is_admissible(const Target& t, double delta, double start_x) {
    if (!(delta > 0.0)) return false;
    for (double v : constrained_coordinates(t, start_x)) {
        double q = v / delta;
        if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, std::abs(q))) return false;
    }
    return true;
}

void validate(const Config& cfg) {
    const Domain& d = cfg.domain;
    const Target& t = cfg.target;
    if (!(d.far_radius > 0.0)) fail("far_radius", "must be positive");
    for (std::size_t i = 0; i < d.holes.size(); ++i) {
        const auto& h = d.holes[i];
        std::string path = "holes[" + std::to_string(i) + "]";
        if (h.size() < 4) fail(path, "hole needs at least 4 vertices");
        if (!is_axis_parallel(h)) fail(path, "hole edges must be axis-parallel");
        if (!is_simple(h)) fail(path, "hole polygon is not simple");
        double area = signed_area(h);
        if (area == 0.0) fail(path, "hole has zero area");
        if (area < 0.0) fail(path, "hole vertices must be counterclockwise");
        for (auto v : h)
            if (v.imag() <= 0.0) fail(path, "hole intersects boundary axis");
        for (std::size_t j = 0; j < i; ++j) {
            bool nested = contains_closed(d.holes[j], h[0]) || contains_closed(h, d.holes[j][0]);
            if (nested || polygon_distance(h, d.holes[j]) <= 0.0)
                fail(path, "hole overlaps holes[" + std::to_string(j) + "]");
        }
    }
    switch (t.kind) {
        case TargetKind::InteriorPoint:
            if (!(t.p.imag() > 0.0)) fail("target.p", "interior target must lie in the upper half-plane");
            if (!d.inside(d.to_internal(t.p))) fail("target.p", "interior target lies outside the domain");
            break;
        case TargetKind::PrimeEnd:
            if (t.x_e == d.start_x) fail("target.x_e", "target coincides with the start");
            break;
        case TargetKind::SideArc:
            if (t.arc == ArcKind::AxisInterval) {
                if (!(t.a < t.b)) fail("target.interval", "interval must satisfy a < b");
                if (d.start_x >= t.a && d.start_x <= t.b) fail("target.interval", "interval contains the start");
            } else {
                if (t.hole_index < 0 || t.hole_index >= static_cast<int>(d.holes.size()))
                    fail("target.hole_index", "no such hole");
                if (t.arc == ArcKind::HoleSubArc) {
                    const auto& h = d.holes[t.hole_index];
                    if (!on_boundary(h, t.arc_from, 1e-9) || !on_boundary(h, t.arc_to, 1e-9))
                        fail("target.arc_endpoints", "arc endpoints must lie on the hole boundary");
                    if (std::abs(t.arc_from - t.arc_to) == 0.0) fail("target.arc_endpoints", "arc endpoints coincide");
                }
            }
            break;
    }
    double extent = std::abs(d.start_x);
    for (const auto& h : d.holes)
        for (auto v : h) extent = std::max(extent, std::abs(v));
    extent = std::max(extent, target_extent(d, t));
    if (!(d.far_radius > 5.0 * extent)) fail("far_radius", "far_radius must exceed 5x the domain and target extent");
    if (cfg.mesh) {
        double m = *cfg.mesh;
        if (!(m > 0.0)) fail("mesh", "mesh must be positive");
        if (!(m < 0.5 * d.min_feature_size())) fail("mesh", "mesh must be below half the minimum feature size");
        if (!is_admissible(t, m, d.start_x)) fail("mesh", "unsupported target/mesh combination: target points must lie on the lattice");
    }
}

Config parse_domain(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) fail("", "domain document must be a JSON object");
    Config cfg;
    if (j.contains("holes")) {
        const auto& hs = j["holes"];
        if (!hs.is_array()) fail("holes", "expected a list of polygons");
        for (std::size_t i = 0; i < hs.size(); ++i) {
            std::string path = "holes[" + std::to_string(i) + "]";
            if (!hs[i].is_array()) fail(path, "expected a vertex list");
            Polygon poly;
            for (std::size_t k = 0; k < hs[i].size(); ++k)
                poly.push_back(point_at(hs[i][k], path + "[" + std::to_string(k) + "]"));
            cfg.domain.holes.push_back(std::move(poly));
        }
    }
    if (j.contains("start_x")) cfg.domain.start_x = number_at(j["start_x"], "start_x");
    if (!j.contains("far_radius")) fail("far_radius", "missing");
    cfg.domain.far_radius = number_at(j["far_radius"], "far_radius");
    if (!j.contains("target") || !j["target"].is_object()) fail("target", "missing target object");
    const auto& tj = j["target"];
    if (!tj.contains("kind") || !tj["kind"].is_string()) fail("target.kind", "missing kind");
    const std::string kind = tj["kind"];
    if (kind == "InteriorPoint") {
        if (!tj.contains("p")) fail("target.p", "missing");
        cfg.target = Target::interior(point_at(tj["p"], "target.p"));
    } else if (kind == "PrimeEnd") {
        if (!tj.contains("x_e")) fail("target.x_e", "missing");
        cfg.target = Target::prime_end(number_at(tj["x_e"], "target.x_e"));
    } else if (kind == "SideArc") {
        if (tj.contains("interval")) {
            const auto& iv = tj["interval"];
            if (!iv.is_array() || iv.size() != 2) fail("target.interval", "expected [a, b]");
            cfg.target = Target::axis_arc(number_at(iv[0], "target.interval[0]"), number_at(iv[1], "target.interval[1]"));
        } else if (tj.contains("hole_index")) {
            if (!tj["hole_index"].is_number_integer()) fail("target.hole_index", "expected an integer");
            int h = tj["hole_index"];
            if (tj.contains("arc_endpoints")) {
                const auto& ae = tj["arc_endpoints"];
                if (!ae.is_array() || ae.size() != 2) fail("target.arc_endpoints", "expected two points");
                cfg.target = Target::hole_sub_arc(h, point_at(ae[0], "target.arc_endpoints[0]"),
                                                  point_at(ae[1], "target.arc_endpoints[1]"));
            } else {
                cfg.target = Target::hole_arc(h);
            }
        } else {
            fail("target", "SideArc needs interval or hole_index");
        }
    } else {
        fail("target.kind", "unknown target kind '" + kind + "'");
    }
    if (j.contains("mesh") && !j["mesh"].is_null()) cfg.mesh = number_at(j["mesh"], "mesh");
    validate(cfg);
    return cfg;
}

std::string serialize(const Config& cfg) {
    json j;
    j["holes"] = json::array();
    for (const auto& h : cfg.domain.holes) {
        json poly = json::array();
        for (auto v : h) poly.push_back(point_json(v));
        j["holes"].push_back(poly);
    }
    j["start_x"] = cfg.domain.start_x;
    j["far_radius"] = cfg.domain.far_radius;
    json t;
    t["kind"] = to_string(cfg.target.kind);
    switch (cfg.target.kind) {
        case TargetKind::InteriorPoint: t["p"] = point_json(cfg.target.p); break;
        case TargetKind::PrimeEnd: t["x_e"] = cfg.target.x_e; break;
        case TargetKind::SideArc:
            if (cfg.target.arc == ArcKind::AxisInterval) {
                t["interval"] = json::array({cfg.target.a, cfg.target.b});
            } else {
                t["hole_index"] = cfg.target.hole_index;
                if (cfg.target.arc == ArcKind::HoleSubArc)
                    t["arc_endpoints"] = json::array({point_json(cfg.target.arc_from), point_json(cfg.target.arc_to)});
            }
            break;
    }
    j["target"] = t;
    if (cfg.mesh) j["mesh"] = *cfg.mesh;
    return j.dump(2);
}

}  // namespace lerw
