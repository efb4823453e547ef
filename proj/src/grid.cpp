#include "lerw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lerw {

bool Region::may_cut(Complex, Complex) const { return true; }

DomainRegion::DomainRegion(Domain d) : d_(std::move(d)) {
    for (const auto& h : d_.holes) {
        std::array<double, 4> box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (auto v : h) {
            Complex w = d_.to_internal(v);
            box[0] = std::min(box[0], w.real());
            box[1] = std::max(box[1], w.real());
            box[2] = std::min(box[2], w.imag());
            box[3] = std::max(box[3], w.imag());
        }
        boxes_.push_back(box);
    }
}

bool DomainRegion::inside(Complex z) const {
    if (!(z.imag() > 0.0)) return false;
    if (!(std::abs(d_.to_file(z)) < d_.far_radius)) return false;
    for (std::size_t k = 0; k < boxes_.size(); ++k) {
        const auto& b = boxes_[k];
        if (z.real() < b[0] || z.real() > b[1] || z.imag() < b[2] || z.imag() > b[3]) continue;
        if (contains_closed(d_.holes[k], d_.to_file(z))) return false;
    }
    return true;
}

bool DomainRegion::may_cut(Complex a, Complex b) const {
    double x0 = std::min(a.real(), b.real()), x1 = std::max(a.real(), b.real());
    double y0 = std::min(a.imag(), b.imag()), y1 = std::max(a.imag(), b.imag());
    for (const auto& bx : boxes_)
        if (!(x1 < bx[0] || x0 > bx[1] || y1 < bx[2] || y0 > bx[3])) return true;
    return false;
}

std::optional<BoundaryHit> DomainRegion::first_hit(Complex a, Complex b) const {
    std::optional<BoundaryHit> best;
    auto offer = [&](BoundaryHit h) {
        if (!best || h.t < best->t) best = h;
    };
    if (b.imag() <= 0.0 && a.imag() > 0.0) offer({a.imag() / (a.imag() - b.imag()), BoundaryKind::Axis, -1, 0.0});
    Complex af = d_.to_file(a), bf = d_.to_file(b);
    const double R = d_.far_radius;
    if (std::abs(bf) >= R) {
        Complex r = bf - af;
        double rr = std::norm(r);
        double ar = af.real() * r.real() + af.imag() * r.imag();
        double disc = ar * ar - rr * (std::norm(af) - R * R);
        double t = (-ar + std::sqrt(std::max(disc, 0.0))) / rr;
        offer({std::clamp(t, 0.0, 1.0), BoundaryKind::Outer, -1, 0.0});
    }
    if (may_cut(a, b)) {
        for (std::size_t k = 0; k < d_.holes.size(); ++k) {
            auto t = first_boundary_hit(d_.holes[k], af, bf);
            if (t) offer({*t, BoundaryKind::Hole, static_cast<int>(k), boundary_coordinate(d_.holes[k], af + *t * (bf - af))});
        }
    }
    return best;
}

std::array<double, 3> DomainRegion::bounds() const {
    const double R = d_.far_radius, s = d_.start_x;
    return {-R - s, R - s, R};
}

bool BoxRegion::inside(Complex z) const {
    return z.real() > x0_ && z.real() < x1_ && z.imag() > 0.0 && z.imag() < y1_;
}

std::optional<BoundaryHit> BoxRegion::first_hit(Complex a, Complex b) const {
    std::optional<BoundaryHit> best;
    auto offer = [&](double t, BoundaryKind k) {
        if (t > 0.0 && t <= 1.0 && (!best || t < best->t)) best = BoundaryHit{t, k, -1, 0.0};
    };
    Complex r = b - a;
    if (b.imag() <= 0.0) offer(a.imag() / (a.imag() - b.imag()), BoundaryKind::Axis);
    if (b.imag() >= y1_) offer((y1_ - a.imag()) / r.imag(), BoundaryKind::Outer);
    if (b.real() <= x0_) offer((x0_ - a.real()) / r.real(), BoundaryKind::Outer);
    if (b.real() >= x1_) offer((x1_ - a.real()) / r.real(), BoundaryKind::Outer);
    return best;
}

Graph Graph::from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Graph g;
    g.offsets.assign(n + 1, 0);
    for (auto [u, v] : edges) {
        ++g.offsets[u + 1];
        ++g.offsets[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
    g.adj.resize(g.offsets[n]);
    std::vector<std::size_t> fill(g.offsets.begin(), g.offsets.end() - 1);
    for (auto [u, v] : edges) {
        g.adj[fill[u]++] = v;
        g.adj[fill[v]++] = u;
    }
    return g;
}

std::int64_t GridGraph::stub_index(std::int64_t site, int d) const {
    auto it = std::lower_bound(stubs_.begin(), stubs_.end(), std::pair<std::int64_t, int>{site, d},
                               [](const Stub& s, const std::pair<std::int64_t, int>& key) {
                                   return s.site < key.first || (s.site == key.first && s.dir < key.second);
                               });
    if (it == stubs_.end() || it->site != site || it->dir != d) return -1;
    return it - stubs_.begin();
}

VertexId GridGraph::neighbor(std::int64_t site, int d) const {
    if (linked(site, d)) return site + offset(d);
    auto k = stub_index(site, d);
    return k < 0 ? -1 : stub_vertex(static_cast<std::size_t>(k));
}

Complex GridGraph::site_position(std::int64_t site) const {
    long i = static_cast<long>(site % nx_), j = static_cast<long>(site / nx_);
    return {delta_ * static_cast<double>(ix0_ + i), delta_ * static_cast<double>(iy0_ + j)};
}

Complex GridGraph::position(VertexId v) const { return is_boundary(v) ? stub(v).z2 : site_position(v); }

std::int64_t GridGraph::site_at(long ix, long iy) const {
    long i = ix - ix0_, j = iy - iy0_;
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
    return static_cast<std::int64_t>(j) * nx_ + i;
}

std::int64_t GridGraph::nearest_site(Complex z) const {
    return site_at(std::lround(z.real() / delta_), std::lround(z.imag() / delta_));
}

bool GridGraph::in_target(VertexId v) const {
    return std::find(target_.begin(), target_.end(), v) != target_.end();
}

GridStats GridGraph::stats() const {
    GridStats s;
    s.interior = interior_count_;
    s.boundary = stubs_.size();
    std::size_t links = 0;
    for (auto c : cell_) links += static_cast<std::size_t>(__builtin_popcount(c & 15u));
    s.edges = links / 2 + stubs_.size();
    s.target_size = target_.size();
    return s;
}

std::size_t GridGraph::Compact::index_of(const GridGraph& g, VertexId v) const {
    if (g.is_boundary(v)) return ids.size() - g.stubs().size() + static_cast<std::size_t>(v - g.num_sites());
    return static_cast<std::size_t>(index_of_site[static_cast<std::size_t>(v)]);
}

GridGraph::Compact GridGraph::compact() const {
    Compact c;
    c.index_of_site.assign(static_cast<std::size_t>(num_sites()), -1);
    for (std::int64_t s = 0; s < num_sites(); ++s) {
        if (!is_vertex(s)) continue;
        c.index_of_site[s] = static_cast<std::int64_t>(c.ids.size());
        c.ids.push_back(s);
    }
    const std::size_t ni = c.ids.size();
    for (std::size_t k = 0; k < stubs_.size(); ++k) c.ids.push_back(stub_vertex(k));
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < ni; ++i) {
        std::int64_t s = c.ids[i];
        for (int d : {0, 1})
            if (linked(s, d)) edges.emplace_back(i, static_cast<std::size_t>(c.index_of_site[s + offset(d)]));
    }
    for (std::size_t k = 0; k < stubs_.size(); ++k)
        edges.emplace_back(static_cast<std::size_t>(c.index_of_site[stubs_[k].site]), ni + k);
    c.graph = Graph::from_edges(c.ids.size(), edges);
    return c;
}

std::string GridGraph::dump_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "vertex_id,kind,x,y,neighbor_ids\n";
    const double shift = region_->frame_shift();
    for (std::int64_t s = 0; s < num_sites(); ++s) {
        if (!is_vertex(s)) continue;
        Complex z = site_position(s);
        os << s << ",interior," << z.real() + shift << ',' << z.imag() << ',';
        for (int d = 0; d < 4; ++d) os << (d ? " " : "") << neighbor(s, d);
        os << '\n';
    }
    for (std::size_t k = 0; k < stubs_.size(); ++k) {
        const Stub& st = stubs_[k];
        os << stub_vertex(k) << ",boundary," << st.z2.real() + shift << ',' << st.z2.imag() << ',' << st.site << '\n';
    }
    return os.str();
}

Complex nearest_lattice_point(Complex p, double delta) {
    const double fx = std::floor(p.real() / delta), fy = std::floor(p.imag() / delta);
    Complex best{};
    double best_d = std::numeric_limits<double>::infinity(), best_key = -std::numeric_limits<double>::infinity();
    const double tol = 1e-12 * delta;
    for (double ix : {fx, fx + 1})
        for (double iy : {fy, fy + 1}) {
            Complex q{ix * delta, iy * delta};
            double d = std::abs(q - p);
            double key = q.real() + kPi * q.imag();
            if (d < best_d - tol || (std::abs(d - best_d) <= tol && key > best_key)) {
                best = q;
                best_d = std::min(d, best_d);
                best_key = key;
            }
        }
    return best;
}

Target to_internal(const Domain& d, const Target& t) {
    Target u = t;
    const double s = d.start_x;
    u.p -= s;
    u.x_e -= s;
    u.a -= s;
    u.b -= s;
    u.arc_from -= s;
    u.arc_to -= s;
    return u;
}

namespace {

bool in_arc(double s, double s1, double s2, double tol) {
    if (s1 <= s2) return s >= s1 - tol && s <= s2 + tol;
    return s >= s1 - tol || s <= s2 + tol;
}

}  // namespace

GridPtr build_grid_impl(std::shared_ptr<const Region> region, const Target* target_ptr, double delta) {
    if (!(delta > 0.0)) throw ValidationError("mesh must be positive");
    auto g = std::make_shared<GridGraph>();
    g->delta_ = delta;
    g->region_ = region;
    const auto bb = region->bounds();
    g->ix0_ = static_cast<int>(std::floor(bb[0] / delta)) - 1;
    int ix1 = static_cast<int>(std::ceil(bb[1] / delta)) + 1;
    g->iy0_ = 0;
    int iy1 = static_cast<int>(std::ceil(bb[2] / delta)) + 1;
    g->nx_ = ix1 - g->ix0_ + 1;
    g->ny_ = iy1 - g->iy0_ + 1;
    const std::int64_t n = g->num_sites();

    std::vector<std::uint8_t> inside(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < n; ++s) {
        long i = static_cast<long>(s % g->nx_), j = static_cast<long>(s / g->nx_);
        if (i == 0 || j == 0 || i == g->nx_ - 1 || j == g->ny_ - 1) continue;
        inside[s] = region->inside(g->site_position(s)) ? 1 : 0;
    }

    const std::int64_t start = g->site_at(0, 1);
    if (start < 0 || !inside[start]) throw ValidationError("start vertex absent: mesh too coarse near the start");

    g->cell_.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> queue{start};
    g->cell_[start] |= GridGraph::kVertexBit;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::int64_t a = queue[head];
        const Complex za = g->site_position(a);
        for (int d = 0; d < 4; ++d) {
            const std::int64_t b = a + g->offset(d);
            if (!inside[b]) continue;
            const Complex zb = g->site_position(b);
            if (region->may_cut(za, zb) && region->first_hit(za, zb)) continue;
            g->cell_[a] |= static_cast<std::uint8_t>(1u << d);
            if (!(g->cell_[b] & GridGraph::kVertexBit)) {
                g->cell_[b] |= GridGraph::kVertexBit;
                queue.push_back(b);
            }
        }
    }
    g->interior_count_ = queue.size();
    std::sort(queue.begin(), queue.end());
    for (std::int64_t a : queue) {
        const Complex za = g->site_position(a);
        for (int d = 0; d < 4; ++d) {
            if (g->linked(a, d)) continue;
            const Complex zb = za + delta * Complex(kDx[d], kDy[d]);
            BoundaryHit h = region->first_hit(za, zb).value_or(BoundaryHit{1.0, BoundaryKind::Outer, -1, 0.0});
            Stub st;
            st.site = a;
            st.dir = static_cast<std::uint8_t>(d);
            st.z2 = za + h.t * (zb - za);
            if (h.kind == BoundaryKind::Axis) st.z2 = Complex(st.z2.real(), 0.0);
            st.kind = h.kind;
            st.hole = h.hole;
            st.s = h.s;
            g->stubs_.push_back(st);
        }
    }
    g->start_ = start;
    if (!target_ptr) return g;
    const Target& target = *target_ptr;

    const double tol = 1e-9 * std::max(1.0, delta);
    switch (target.kind) {
        case TargetKind::InteriorPoint: {
            Complex q = nearest_lattice_point(target.p, delta);
            std::int64_t s = g->nearest_site(q);
            if (s < 0 || !g->is_vertex(s)) throw ValidationError("target unreachable from start: interior target vertex not in the start component");
            if (s == start) throw ValidationError("target vertex coincides with the start vertex");
            g->target_ = {s};
            g->target_interior_ = true;
            break;
        }
        case TargetKind::PrimeEnd: {
            std::int64_t s = g->site_at(std::lround(target.x_e / delta), 1);
            std::int64_t k = (s >= 0 && g->is_vertex(s)) ? g->stub_index(s, 3) : -1;
            if (k < 0 || std::abs(g->stubs_[k].z2 - Complex(target.x_e, 0.0)) > tol)
                throw ValidationError("target unreachable from start: prime end vertex missing");
            g->target_ = {g->stub_vertex(static_cast<std::size_t>(k))};
            break;
        }
        case TargetKind::SideArc: {
            double s1 = 0.0, s2 = 0.0;
            if (target.arc == ArcKind::HoleSubArc) {
                auto dr = dynamic_cast<const DomainRegion*>(region.get());
                if (!dr) throw ValidationError("hole arcs need a domain region");
                const auto& h = dr->domain().holes.at(static_cast<std::size_t>(target.hole_index));
                s1 = boundary_coordinate(h, target.arc_from + dr->frame_shift());
                s2 = boundary_coordinate(h, target.arc_to + dr->frame_shift());
            }
            for (std::size_t k = 0; k < g->stubs_.size(); ++k) {
                const Stub& st = g->stubs_[k];
                bool hit = false;
                if (target.arc == ArcKind::AxisInterval)
                    hit = st.kind == BoundaryKind::Axis && st.z2.real() >= target.a - tol && st.z2.real() <= target.b + tol;
                else if (st.kind == BoundaryKind::Hole && st.hole == target.hole_index)
                    hit = target.arc == ArcKind::Hole || in_arc(st.s, s1, s2, tol);
                if (hit) g->target_.push_back(g->stub_vertex(k));
            }
            if (g->target_.empty()) throw ValidationError("target unreachable from start: no boundary vertex on the target arc");
            break;
        }
    }
    return g;
}

GridPtr build_grid(std::shared_ptr<const Region> region, const Target& target, double delta) {
    return build_grid_impl(std::move(region), &target, delta);
}

GridPtr build_solve_grid(std::shared_ptr<const Region> region, double delta) {
    return build_grid_impl(std::move(region), nullptr, delta);
}

GridPtr build_grid(const Domain& domain, const Target& target, double delta) {
    return build_grid(std::make_shared<DomainRegion>(domain), to_internal(domain, target), delta);
}

}  // namespace lerw
