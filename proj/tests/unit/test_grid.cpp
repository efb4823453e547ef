#include <cmath>
#include <memory>
#include <set>

#include "doctest.h"
#include "lerw/grid.hpp"
#include "lerw/rng.hpp"

using namespace lerw;

TEST_CASE("grid: box (-1,1) x (0,2) at mesh 1/2 has 9 interior vertices") {
    auto g = build_grid(std::make_shared<BoxRegion>(-1.0, 1.0, 2.0), Target::interior({0, 1}), 0.5);
    auto s = g->stats();
    CHECK(s.interior == 9);
    CHECK(s.boundary == 12);           // 3 stubs per side
    CHECK(s.edges == 12 + 12);         // 12 lattice edges plus one per stub
    CHECK(s.target_size == 1);
    std::set<std::pair<double, double>> pos;
    for (std::int64_t site = 0; site < g->num_sites(); ++site)
        if (g->is_vertex(site)) pos.insert({g->site_position(site).real(), g->site_position(site).imag()});
    for (double x : {-0.5, 0.0, 0.5})
        for (double y : {0.5, 1.0, 1.5}) CHECK(pos.count({x, y}) == 1);
    CHECK(g->position(g->start()) == Complex(0.0, 0.5));
    CHECK(g->position(g->target()[0]) == Complex(0.0, 1.0));
}

TEST_CASE("grid: nearest lattice point and the Re z + pi Im z tie-break") {
    CHECK(nearest_lattice_point({0.26, 1.0}, 0.5) == Complex(0.5, 1.0));
    CHECK(nearest_lattice_point({0.24, 1.0}, 0.5) == Complex(0.0, 1.0));
    CHECK(nearest_lattice_point({0.25, 1.0}, 0.5) == Complex(0.5, 1.0));   // horizontal tie
    CHECK(nearest_lattice_point({0.0, 0.75}, 0.5) == Complex(0.0, 1.0));   // vertical tie
    CHECK(nearest_lattice_point({0.25, 0.75}, 0.5) == Complex(0.5, 1.0));  // four-way tie
    CHECK(nearest_lattice_point({-0.25, 0.75}, 0.5) == Complex(0.0, 1.0));
}

TEST_CASE("grid: boundary vertices have one neighbour and edges avoid holes") {
    Domain d;
    d.holes.push_back({{-0.5, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {-0.5, 1.0}});
    d.far_radius = 4.0;
    auto g = build_grid(d, Target::hole_arc(0), 0.1);
    CHECK(g->target().size() > 0);
    for (std::size_t k = 0; k < g->stubs().size(); ++k) {
        const Stub& st = g->stubs()[k];
        CHECK(g->is_vertex(st.site));
        CHECK_FALSE(g->linked(st.site, st.dir));
        // Segment [z1, z2) stays in the domain.
        Complex z1 = g->site_position(st.site);
        for (double t : {0.0, 0.25, 0.5, 0.75, 0.99})
            CHECK(g->region().inside(z1 + t * (st.z2 - z1)));
    }
    for (std::int64_t s = 0; s < g->num_sites(); ++s) {
        if (!g->is_vertex(s)) continue;
        for (int dir = 0; dir < 4; ++dir) {
            if (!g->linked(s, dir)) continue;
            Complex a = g->site_position(s), b = g->site_position(s + g->offset(dir));
            CHECK_FALSE(g->region().first_hit(a, b).has_value());
            CHECK(g->linked(s + g->offset(dir), opposite(dir)));
        }
    }
}

TEST_CASE("grid: prime end target is the stub below x_e") {
    Domain d;
    d.far_radius = 6.0;
    auto g = build_grid(d, Target::prime_end(1.0), 0.25);
    REQUIRE(g->target().size() == 1);
    CHECK(g->position(g->target()[0]) == Complex(1.0, 0.0));
    CHECK(g->stub(g->target()[0]).kind == BoundaryKind::Axis);
}

TEST_CASE("grid: errors") {
    Domain d;
    d.far_radius = 1.0;
    CHECK_THROWS_AS(build_grid(d, Target::interior({0, 0.5}), 2.0), ValidationError);
    // Target inside a region cut off from the start.
    Domain h;
    h.far_radius = 10;
    h.holes.push_back({{1, 0.5}, {3, 0.5}, {3, 2}, {1, 2}});
    CHECK_THROWS_AS(build_grid(h, Target::prime_end(0.3), 0.25), ValidationError);
}

TEST_CASE("property: lattice scaling gives an isomorphic grid") {
    Domain d;
    d.holes.push_back({{-0.5, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {-0.5, 1.0}});
    d.far_radius = 3.0;
    Target t = Target::interior({0.3, 1.6});
    for (double c : {2.0, 0.5}) {
        Domain dc = d;
        for (auto& v : dc.holes[0]) v *= c;
        dc.far_radius *= c;
        auto g1 = build_grid(d, t, 0.125);
        auto g2 = build_grid(dc, Target::interior(c * t.p), 0.125 * c);
        auto s1 = g1->stats(), s2 = g2->stats();
        CHECK(s1.interior == s2.interior);
        CHECK(s1.boundary == s2.boundary);
        CHECK(s1.edges == s2.edges);
        CHECK(s1.target_size == s2.target_size);
        CHECK(g1->cells() == g2->cells());
        REQUIRE(g1->stubs().size() == g2->stubs().size());
        for (std::size_t k = 0; k < g1->stubs().size(); ++k)
            CHECK(std::abs(c * g1->stubs()[k].z2 - g2->stubs()[k].z2) < 1e-12);
        CHECK(std::abs(c * g1->position(g1->target()[0]) - g2->position(g2->target()[0])) < 1e-12);
    }
}

TEST_CASE("property: grid walk matches the free lattice walk until the boundary") {
    Domain d;
    d.far_radius = 1.5;
    auto region = std::make_shared<DomainRegion>(d);
    const double delta = 1.0 / 16;
    auto g = build_grid(region, Target::interior({0, 0.75}), delta);
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        Rng r1 = rng_stream(3, rep), r2 = rng_stream(3, rep);
        VertexId v = g->start();
        long ix = 0, iy = 1;
        for (int step = 0; step < 100000; ++step) {
            int d1 = static_cast<int>(r1() % 4), d2 = static_cast<int>(r2() % 4);
            REQUIRE(d1 == d2);
            Complex a{ix * delta, iy * delta};
            ix += kDx[d2];
            iy += kDy[d2];
            Complex b{ix * delta, iy * delta};
            VertexId w = g->neighbor(v, d1);
            REQUIRE(w >= 0);
            bool crossed = !region->inside(b) || region->first_hit(a, b).has_value();
            CHECK(g->is_boundary(w) == crossed);
            if (g->is_boundary(w)) break;
            CHECK(std::abs(g->position(w) - b) < 1e-12);
            v = w;
        }
    }
}
