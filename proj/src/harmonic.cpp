#include "lerw/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace lerw {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

bool SlitMask::contains(std::int64_t site) const { return std::binary_search(frozen.begin(), frozen.end(), site); }

SlitMask make_slit_mask(const GridGraph& g, std::vector<Complex> polyline, double radius) {
    SlitMask m;
    m.polyline = std::move(polyline);
    const double h = g.delta();
    if (radius < 0.0) radius = 0.5 * h;
    const double reach = radius * (1.0 + 1e-9);
    const auto& line = m.polyline;
    auto visit_box = [&](Complex lo, Complex hi, auto&& fn) {
        long i0 = static_cast<long>(std::floor((lo.real() - reach) / h)), i1 = static_cast<long>(std::ceil((hi.real() + reach) / h));
        long j0 = static_cast<long>(std::floor((lo.imag() - reach) / h)), j1 = static_cast<long>(std::ceil((hi.imag() + reach) / h));
        for (long j = j0; j <= j1; ++j)
            for (long i = i0; i <= i1; ++i) {
                std::int64_t s = g.site_at(i, j);
                if (s >= 0 && g.is_vertex(s)) fn(s);
            }
    };
    std::vector<std::int64_t> frozen;
    if (line.size() == 1) {
        visit_box(line[0], line[0], [&](std::int64_t s) {
            if (std::abs(g.site_position(s) - line[0]) <= reach) frozen.push_back(s);
        });
    }
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
        Complex a = line[k], b = line[k + 1];
        Complex lo{std::min(a.real(), b.real()), std::min(a.imag(), b.imag())};
        Complex hi{std::max(a.real(), b.real()), std::max(a.imag(), b.imag())};
        visit_box(lo, hi, [&](std::int64_t s) {
            if (distance_to_segment(g.site_position(s), a, b) <= reach) frozen.push_back(s);
        });
        // Lattice edges crossing this segment.
        visit_box(lo, hi, [&](std::int64_t s) {
            for (int d : {0, 1}) {
                if (!g.linked(s, d)) continue;
                Complex p = g.site_position(s), q = p + h * Complex(kDx[d], kDy[d]);
                if (segment_hit(p, q, a, b)) m.cut_edges.emplace_back(s, d);
            }
        });
    }
    std::sort(frozen.begin(), frozen.end());
    frozen.erase(std::unique(frozen.begin(), frozen.end()), frozen.end());
    m.frozen = std::move(frozen);
    std::sort(m.cut_edges.begin(), m.cut_edges.end());
    m.cut_edges.erase(std::unique(m.cut_edges.begin(), m.cut_edges.end()), m.cut_edges.end());
    return m;
}

double HarmonicField::at(VertexId v) const {
    const GridGraph& g = *grid;
    if (g.is_boundary(v)) {
        const Stub& st = g.stub(v);
        return explicit_at(st.z2) + stub_values[static_cast<std::size_t>(v - g.num_sites())];
    }
    return explicit_at(g.site_position(v)) + values[static_cast<std::size_t>(v)];
}

double HarmonicField::interpolate(Complex z) const {
    const GridGraph& g = *grid;
    const double gx = z.real() / g.delta() - g.ix0(), gy = z.imag() / g.delta() - g.iy0();
    const long i = static_cast<long>(std::floor(gx)), j = static_cast<long>(std::floor(gy));
    if (i < 0 || j < 0 || i + 1 >= g.nx() || j + 1 >= g.ny()) return kNaN;
    const double fx = gx - i, fy = gy - j;
    const std::int64_t s = static_cast<std::int64_t>(j) * g.nx() + i;
    double c[4] = {values[s], values[s + 1], values[s + g.nx()], values[s + g.nx() + 1]};
    double sum = 0.0;
    int finite = 0;
    for (double v : c)
        if (std::isfinite(v)) {
            sum += v;
            ++finite;
        }
    if (finite == 0) return kNaN;
    for (double& v : c)
        if (!std::isfinite(v)) v = sum / finite;
    const double bil = (1 - fx) * (1 - fy) * c[0] + fx * (1 - fy) * c[1] + (1 - fx) * fy * c[2] + fx * fy * c[3];
    return explicit_at(z) + bil;
}

double HarmonicField::laplacian(VertexId v) const {
    const GridGraph& g = *grid;
    if (g.is_boundary(v)) return at(g.stub(v).site) - at(v);
    double acc = 0.0;
    for (int d = 0; d < 4; ++d) acc += at(g.neighbor(v, d));
    return acc - 4.0 * at(v);
}

double HarmonicField::max_residual() const {
    const GridGraph& g = *grid;
    double m = 0.0;
    std::size_t k = 0;
    const auto& stubs = g.stubs();
    for (std::int64_t s = 0; s < g.num_sites(); ++s) {
        if (!g.is_vertex(s) || absorbing[s]) {
            while (k < stubs.size() && stubs[k].site <= s) ++k;
            continue;
        }
        double acc = -4.0 * values[s];
        for (int d = 0; d < 4; ++d) {
            if (g.linked(s, d)) {
                acc += values[s + g.offset(d)];
            } else {
                while (k < stubs.size() && (stubs[k].site < s || (stubs[k].site == s && stubs[k].dir < d))) ++k;
                acc += stub_values[k];
            }
        }
        m = std::max(m, std::abs(acc));
    }
    return m;
}

void HarmonicField::scale(double c) {
    for (auto& v : values) v *= c;
    for (auto& v : stub_values) v *= c;
    if (explicit_part) {
        auto e = explicit_part;
        explicit_part = [e, c](Complex z) { return c * e(z); };
    }
}

HarmonicField solve_dirichlet(GridPtr gp, const SlitMask* mask, const BoundaryData& data, const SolveOptions& opt) {
    const GridGraph& g = *gp;
    const std::int64_t n = g.num_sites();
    const auto& stubs = g.stubs();
    if (!data.stub_values.empty() && data.stub_values.size() != stubs.size())
        throw ValidationError("boundary data size does not match the boundary vertex count");
    auto stub_val = [&](std::size_t k) { return data.stub_values.empty() ? 0.0 : data.stub_values[k]; };

    HarmonicField f;
    f.grid = gp;
    f.tol = opt.tol;
    f.absorbing.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    if (opt.warm_start && static_cast<std::int64_t>(opt.warm_start->size()) == n) {
        for (std::int64_t s = 0; s < n; ++s) {
            double v = (*opt.warm_start)[s];
            u[s] = std::isfinite(v) ? v : 0.0;
        }
    }
    if (mask) {
        for (std::int64_t s : mask->frozen) {
            f.absorbing[s] = 1;
            u[s] = data.slit_value ? data.slit_value(g.site_position(s)) : 0.0;
        }
    }
    for (auto [s, v] : data.fixed) {
        if (s < 0 || s >= n || !g.is_vertex(s)) throw ValidationError("fixed value on a non-vertex site");
        f.absorbing[s] = 1;
        u[s] = v;
    }

    StencilProblem P;
    P.nx = g.nx();
    P.ny = g.ny();
    P.bits.assign(static_cast<std::size_t>(n), 0);
    P.rhs.assign(static_cast<std::size_t>(n), 0.0);
    std::size_t k = 0;
    for (std::int64_t s = 0; s < n; ++s) {
        if (!g.is_vertex(s)) continue;
        while (k < stubs.size() && stubs[k].site < s) ++k;
        if (f.absorbing[s]) continue;
        std::uint8_t b = StencilProblem::kUnknown;
        double r = 0.0;
        std::size_t kk = k;
        for (int d = 0; d < 4; ++d) {
            if (g.linked(s, d)) {
                const std::int64_t t = s + g.offset(d);
                if (f.absorbing[t]) r += u[t];
                else b |= static_cast<std::uint8_t>(1u << d);
            } else {
                while (kk < stubs.size() && stubs[kk].site == s && stubs[kk].dir < d) ++kk;
                r += stub_val(kk);
            }
        }
        P.bits[s] = b;
        P.rhs[s] = r;
    }
    if (P.unknown_count() == 0 && data.fixed.empty() && !mask) throw NumericError("no unknowns");
    f.info = opt.reference ? solve_sor_reference(P, u, opt.tol, opt.max_iter * 50) : solve_mgpcg(P, u, opt.tol, opt.max_iter);
    if (!f.info.converged)
        throw NumericError("Dirichlet solve did not converge: residual " + std::to_string(f.info.residual) + " after " +
                           std::to_string(f.info.iterations) + " iterations");

    f.values.assign(static_cast<std::size_t>(n), kNaN);
    for (std::int64_t s = 0; s < n; ++s)
        if (g.is_vertex(s)) f.values[s] = u[s];
    f.stub_values.resize(stubs.size());
    std::unordered_map<std::int64_t, std::pair<double, int>> ext;
    for (std::size_t q = 0; q < stubs.size(); ++q) {
        f.stub_values[q] = stub_val(q);
        const std::int64_t t = stubs[q].site + g.offset(stubs[q].dir);
        if (t >= 0 && t < n && !g.is_vertex(t)) {
            auto& e = ext[t];
            e.first += f.stub_values[q];
            ++e.second;
        }
    }
    for (const auto& [t, e] : ext) f.values[t] = e.first / e.second;
    return f;
}

HarmonicField green_function(GridPtr g, const SlitMask* mask, Complex pole, const SolveOptions& opt) {
    if (!g->region().inside(pole)) throw ValidationError("pole lies outside the domain");
    if (mask && !mask->polyline.empty() && distance_to_polyline(pole, mask->polyline) <= 0.5 * g->delta())
        throw ValidationError("pole lies inside the slit mask");
    auto S = [pole](Complex z) { return -std::log(std::abs(z - pole)) / (2.0 * kPi); };
    BoundaryData data;
    data.stub_values.resize(g->stubs().size());
    for (std::size_t k = 0; k < g->stubs().size(); ++k) data.stub_values[k] = -S(g->stubs()[k].z2);
    data.slit_value = [S](Complex z) { return -S(z); };
    HarmonicField f = solve_dirichlet(g, mask, data, opt);
    f.explicit_part = S;
    return f;
}

bool stub_on_arc(const GridGraph& g, const Stub& st, const Target& arc) {
    const double tol = 1e-9 * std::max(1.0, g.delta());
    switch (arc.arc) {
        case ArcKind::AxisInterval:
            return st.kind == BoundaryKind::Axis && st.z2.real() >= arc.a - tol && st.z2.real() <= arc.b + tol;
        case ArcKind::Hole: return st.kind == BoundaryKind::Hole && st.hole == arc.hole_index;
        case ArcKind::HoleSubArc: {
            if (st.kind != BoundaryKind::Hole || st.hole != arc.hole_index) return false;
            auto dr = dynamic_cast<const DomainRegion*>(&g.region());
            if (!dr) return false;
            const auto& h = dr->domain().holes.at(static_cast<std::size_t>(arc.hole_index));
            double s1 = boundary_coordinate(h, arc.arc_from + dr->frame_shift());
            double s2 = boundary_coordinate(h, arc.arc_to + dr->frame_shift());
            if (s1 <= s2) return st.s >= s1 - tol && st.s <= s2 + tol;
            return st.s >= s1 - tol || st.s <= s2 + tol;
        }
    }
    return false;
}

HarmonicField harmonic_measure(GridPtr g, const SlitMask* mask, const Target& arc, const SolveOptions& opt) {
    if (arc.kind != TargetKind::SideArc) throw ValidationError("harmonic measure needs a boundary arc");
    BoundaryData data;
    data.stub_values.resize(g->stubs().size());
    for (std::size_t k = 0; k < g->stubs().size(); ++k) data.stub_values[k] = stub_on_arc(*g, g->stubs()[k], arc) ? 1.0 : 0.0;
    return solve_dirichlet(g, mask, data, opt);
}

HarmonicField boundary_poisson_field(GridPtr g, const SlitMask* mask, double x_e, const SolveOptions& opt) {
    if (mask && !mask->polyline.empty() && distance_to_polyline(Complex(x_e, 0.0), mask->polyline) <= 0.5 * g->delta())
        throw ValidationError("prime end lies under the slit mask");
    auto S = [x_e](Complex z) {
        if (!(z.imag() > 0.0)) return 0.0;
        const double dx = z.real() - x_e;
        return z.imag() / (dx * dx + z.imag() * z.imag());
    };
    BoundaryData data;
    data.stub_values.resize(g->stubs().size());
    for (std::size_t k = 0; k < g->stubs().size(); ++k) data.stub_values[k] = -S(g->stubs()[k].z2);
    data.slit_value = [S](Complex z) { return -S(z); };
    HarmonicField f = solve_dirichlet(g, mask, data, opt);
    f.explicit_part = S;
    return f;
}

HarmonicField hit_field(GridPtr g, const SolveOptions& opt) {
    if (g->target().empty()) throw ValidationError("grid has no target set");
    BoundaryData data;
    data.stub_values.assign(g->stubs().size(), 0.0);
    for (VertexId v : g->target()) {
        if (g->is_boundary(v)) data.stub_values[static_cast<std::size_t>(v - g->num_sites())] = 1.0;
        else data.fixed.emplace_back(v, 1.0);
    }
    return solve_dirichlet(g, nullptr, data, opt);
}

double flux_sum(const HarmonicField& f, const std::vector<VertexId>& set) {
    double s = 0.0;
    for (VertexId v : set) s += f.laplacian(v);
    return s;
}

HarmonicField expected_visits(GridPtr gp, VertexId source, const SolveOptions& opt) {
    const GridGraph& g = *gp;
    if (g.is_boundary(source) || !g.is_vertex(source)) throw ValidationError("source must be an interior vertex");
    StencilProblem P;
    P.nx = g.nx();
    P.ny = g.ny();
    P.bits.assign(static_cast<std::size_t>(g.num_sites()), 0);
    P.rhs.assign(static_cast<std::size_t>(g.num_sites()), 0.0);
    for (std::int64_t s = 0; s < g.num_sites(); ++s) {
        if (!g.is_vertex(s)) continue;
        std::uint8_t b = StencilProblem::kUnknown;
        for (int d = 0; d < 4; ++d)
            if (g.linked(s, d)) b |= static_cast<std::uint8_t>(1u << d);
        P.bits[s] = b;
    }
    P.rhs[source] = 4.0;
    std::vector<double> u(static_cast<std::size_t>(g.num_sites()), 0.0);
    HarmonicField f;
    f.grid = gp;
    f.tol = opt.tol;
    f.info = opt.reference ? solve_sor_reference(P, u, opt.tol, opt.max_iter * 50) : solve_mgpcg(P, u, opt.tol, opt.max_iter);
    if (!f.info.converged) throw NumericError("expected-visits solve did not converge");
    f.absorbing.assign(static_cast<std::size_t>(g.num_sites()), 0);
    f.values.assign(static_cast<std::size_t>(g.num_sites()), kNaN);
    for (std::int64_t s = 0; s < g.num_sites(); ++s)
        if (g.is_vertex(s)) f.values[s] = u[s];
    f.stub_values.assign(g.stubs().size(), 0.0);
    return f;
}

HarmonicField observable(GridPtr g, const std::vector<VertexId>& prefix, ObservableKind kind, const SolveOptions& opt) {
    if (prefix.empty()) throw ValidationError("empty prefix");
    if (g->target().empty()) throw ValidationError("grid has no target set");
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const VertexId v = prefix[i];
        if (g->is_boundary(v)) throw ValidationError("prefix must consist of interior vertices");
        // An interior target may be the tip: the walk has arrived.
        const bool arrived = i + 1 == prefix.size() && g->target_is_interior();
        if (g->in_target(v) && !arrived) throw ValidationError("prefix meets the target");
    }
    const VertexId tip = prefix.back();
    auto base_fixed = [&](double tip_value) {
        std::vector<std::pair<std::int64_t, double>> fx;
        for (std::size_t i = 0; i + 1 < prefix.size(); ++i) fx.emplace_back(prefix[i], 0.0);
        fx.emplace_back(tip, tip_value);
        return fx;
    };
    const auto& F = g->target();
    if (g->target_is_interior()) {
        const VertexId w = F.front();
        BoundaryData d2;
        d2.fixed = base_fixed(1.0);
        if (kind == ObservableKind::G) {
            HarmonicField phi = solve_dirichlet(g, nullptr, d2, opt);
            const double at_w = phi.at(w);
            if (!(at_w > 0.0)) throw NumericError("prefix disconnects the tip from the target");
            phi.scale(1.0 / at_w);
            return phi;
        }
        if (tip == w) throw ValidationError("prefix meets the target");
        d2.fixed.emplace_back(w, 0.0);
        HarmonicField phi = solve_dirichlet(g, nullptr, d2, opt);
        const double flux = flux_sum(phi, F);
        if (!(flux > 0.0)) throw NumericError("prefix disconnects the tip from the target");
        phi.scale(1.0 / flux);
        return phi;
    }
    BoundaryData d2;
    d2.fixed = base_fixed(1.0);
    HarmonicField phi2 = solve_dirichlet(g, nullptr, d2, opt);
    const double flux2 = flux_sum(phi2, F);
    if (!(flux2 > 0.0)) throw NumericError("prefix disconnects the tip from the target");
    if (kind == ObservableKind::H) {
        phi2.scale(1.0 / flux2);
        return phi2;
    }
    BoundaryData d1;
    d1.fixed = base_fixed(0.0);
    d1.stub_values.assign(g->stubs().size(), 0.0);
    for (VertexId v : F) d1.stub_values[static_cast<std::size_t>(v - g->num_sites())] = 1.0;
    HarmonicField phi1 = solve_dirichlet(g, nullptr, d1, opt);
    const double c = -flux_sum(phi1, F) / flux2;
    for (std::size_t i = 0; i < phi1.values.size(); ++i) phi1.values[i] += c * phi2.values[i];
    for (std::size_t i = 0; i < phi1.stub_values.size(); ++i) phi1.stub_values[i] += c * phi2.stub_values[i];
    return phi1;
}

bool prefix_disconnects(const GridGraph& g, const std::vector<VertexId>& prefix, VertexId from) {
    if (g.is_boundary(from)) return false;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.num_sites()), 0);
    for (VertexId v : prefix)
        if (!g.is_boundary(v)) seen[v] = 2;
    if (seen[from] == 2) return true;
    std::vector<std::int64_t> q{from};
    seen[from] = 1;
    for (std::size_t h = 0; h < q.size(); ++h) {
        const std::int64_t s = q[h];
        if (g.target_is_interior() && s == g.target().front()) return false;
        for (int d = 0; d < 4; ++d) {
            if (g.linked(s, d)) {
                const std::int64_t t = s + g.offset(d);
                if (!seen[t]) {
                    seen[t] = 1;
                    q.push_back(t);
                }
            } else if (!g.target_is_interior()) {
                VertexId b = g.neighbor(s, d);
                if (b >= 0 && g.in_target(b)) return false;
            }
        }
    }
    return true;
}

std::vector<double> solve_dirichlet_graph(const Graph& g, const std::vector<std::optional<double>>& data, double tol,
                                          int max_iter) {
    const std::size_t n = g.size();
    std::vector<double> u(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
        if (data[v]) u[v] = *data[v];
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t v = 0; v < n; ++v) {
            if (data[v] || g.degree(v) == 0) continue;
            double acc = 0.0;
            for (std::size_t k = 0; k < g.degree(v); ++k) acc += u[g.neighbor(v, k)];
            u[v] = acc / static_cast<double>(g.degree(v));
        }
        double res = 0.0;
        for (std::size_t v = 0; v < n; ++v)
            if (!data[v]) res = std::max(res, std::abs(graph_laplacian(g, u, v)));
        if (res <= tol) return u;
    }
    throw NumericError("graph Dirichlet solve did not converge");
}

double graph_laplacian(const Graph& g, const std::vector<double>& values, std::size_t v) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.degree(v); ++k) acc += values[g.neighbor(v, k)] - values[v];
    return acc;
}

double flux_sum_graph(const Graph& g, const std::vector<double>& values, const std::vector<std::size_t>& set) {
    double s = 0.0;
    for (std::size_t v : set) s += graph_laplacian(g, values, v);
    return s;
}

}  // namespace lerw
