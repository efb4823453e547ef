#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "lerw/stats.hpp"
#include "lerw/verify.hpp"

using namespace lerw;

namespace {

std::vector<Complex> random_walk(std::mt19937_64& rng, std::size_t n, double step) {
    std::vector<Complex> p{{0, 0}};
    std::uniform_int_distribution<int> dir(0, 3);
    const Complex d[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t k = 1; k < n; ++k) p.push_back(p.back() + step * d[dir(rng)]);
    return p;
}

// Minimum over all monotone couplings of the maximum pair distance.
double frechet_brute(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double best = 1e300;
    std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t i, std::size_t j, double m) {
        m = std::max(m, std::abs(a[i] - b[j]));
        if (m >= best) return;
        if (i + 1 == a.size() && j + 1 == b.size()) {
            best = m;
            return;
        }
        if (i + 1 < a.size()) rec(i + 1, j, m);
        if (j + 1 < b.size()) rec(i, j + 1, m);
        if (i + 1 < a.size() && j + 1 < b.size()) rec(i + 1, j + 1, m);
    };
    rec(0, 0, 0.0);
    return best;
}

}  // namespace

TEST_CASE("discrete driving: vertical path, mirror and capacity") {
    std::vector<Complex> up{{0, 0}};
    for (int k = 1; k <= 20; ++k) up.emplace_back(0, 0.05 * k);
    auto dd = discrete_driving(up, Uniformizer::identity());
    REQUIRE(dd.v.size() == 20);
    for (double x : dd.xi) CHECK(std::abs(x) < 1e-3);
    CHECK(dd.v.back() == doctest::Approx(0.25).epsilon(0.01));
    CHECK(std::abs(far_field_time(dd.ex.state) - dd.ex.state.time()) <= 0.01 * dd.ex.state.time());

    std::vector<Complex> bent{{0, 0}, {0, 0.1}, {0.1, 0.1}, {0.1, 0.2}, {0.2, 0.2}, {0.2, 0.3}, {0.1, 0.3}};
    std::vector<Complex> mirror;
    for (auto z : bent) mirror.emplace_back(-z.real(), z.imag());
    auto a = discrete_driving(bent, Uniformizer::identity());
    auto b = discrete_driving(mirror, Uniformizer::identity());
    REQUIRE(a.xi.size() == b.xi.size());
    for (std::size_t k = 0; k < a.xi.size(); ++k) {
        CHECK(std::abs(a.xi[k] + b.xi[k]) < 1e-12);
        CHECK(std::abs(a.v[k] - b.v[k]) < 1e-12);
    }
    CHECK(std::abs(far_field_time(a.ex.state) - a.ex.state.time()) <= 0.01 * a.ex.state.time());
}

TEST_CASE("blocks follow the stopping rule") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    std::vector<double> v{0.0}, xi{0.0};
    for (int k = 0; k < 2000; ++k) {
        v.push_back(v.back() + 1e-4);
        xi.push_back(xi.back() + std::sqrt(2e-4) * n01(rng));
    }
    const double d = 0.1;
    auto blocks = block_indices(v, xi, d, v.size() - 1);
    CHECK(blocks.front() == 0);
    for (std::size_t j = 0; j + 1 < blocks.size(); ++j) {
        std::size_t a = blocks[j], b = blocks[j + 1];
        CHECK((v[b] - v[a] >= d * d || std::abs(xi[b] - xi[a]) >= d));
        CHECK(v[b] - v[a] <= 2 * d * d);
        double step = std::abs(xi[b] - xi[b - 1]);
        for (std::size_t n = a; n <= b; ++n) CHECK(std::abs(xi[n] - xi[a]) <= 2 * d + step);
        for (std::size_t n = a + 1; n < b; ++n) CHECK((v[n] - v[a] < d * d && std::abs(xi[n] - xi[a]) < d));
    }
    auto one = block_indices(v, xi, 100.0, v.size() - 1);
    CHECK(one.size() == 1);
}

TEST_CASE("drift subtraction along a discrete hull") {
    std::vector<Complex> bent{{0, 0}, {0, 0.1}, {0.1, 0.1}, {0.1, 0.2}, {0.2, 0.2}, {0.2, 0.3}};
    auto dd = discrete_driving(bent, Uniformizer::identity());
    TargetImage img;
    img.p = {0.0, 1.0};
    auto sd = subtract_drift(dd, img, 10.0);
    REQUIRE(sd.eta.size() == dd.xi.size());
    for (std::size_t n = 0; n < sd.eta.size(); ++n) CHECK(sd.eta[n] == doctest::Approx(dd.xi[n] - sd.drift[n]));
    // Record-by-record integral of the closed-form drift.
    double acc = 0.0;
    TargetImage it = img;
    for (const auto& r : dd.ex.state.records()) {
        acc += 2.0 * drift_closed_form_halfplane(it.p, r.xi) * r.dt;
        it.advance(r.xi, r.dt);
    }
    CHECK(sd.drift.back() == doctest::Approx(acc).epsilon(1e-12));
    CHECK(sd.blocks.size() == 1);
}

TEST_CASE("martingale checks: argument errors and t = 0") {
    Domain d;
    d.far_radius = 2.0;
    CHECK_THROWS_WITH_AS(martingale_check_discrete(d, Target::interior({0, 1}), 1.0 / 16, {{0.5, 0.5}}, 0, 1),
                         "no samples", ValidationError);
    TargetImage img;
    img.p = {0, 1};
    ContinuousMartingaleOptions opt;
    opt.t_end = 0.0;
    auto rep = martingale_check_continuous(img, {{0, 2}, {0.5, 0.5}}, 10, 1, opt);
    for (const auto& p : rep.probes) {
        CHECK(p.estimate.mean == p.initial);
        CHECK(p.estimate.se == 0.0);
    }
    CHECK(rep.pass);
    // Normalization: P_0 at the pole image equals 1.
    CHECK(poisson_observable(LoewnerState{}, 0.0, img, img.p) == doctest::Approx(1.0));
}

TEST_CASE("discrete martingale: probes near the target stop samples") {
    Domain d;
    d.far_radius = 1.0;
    Target t = Target::interior({0, 0.5});
    auto rep = martingale_check_discrete(d, t, 1.0 / 16, {{0.0625, 0.5}, {0.5, 0.25}}, 200, 3);
    REQUIRE(rep.probes.size() == 2);
    CHECK(rep.probes[0].stopped > 0);
    for (const auto& p : rep.probes) CHECK(std::isfinite(p.z_score));
}

TEST_CASE("quasi-loops") {
    const Complex z{0, 0};
    const double r = 1.0, eps = 0.1;
    std::vector<Complex> witness{{0.5, 0}, {1.5, 0}, {2.5, 0}, {1.5, 0.2}, {0.5, 0.05}};
    auto q = quasi_loops(witness, z, r, eps);
    REQUIRE(q.size() == 1);
    CHECK(q[0] == std::pair<std::size_t, std::size_t>{0, 4});
    std::vector<Complex> inside{{0.5, 0}, {1.5, 0}, {1.9, 0}, {0.5, 0.05}};
    CHECK(quasi_loops(inside, z, r, eps).empty());

    std::mt19937_64 rng(12);
    std::size_t nonempty = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto p = random_walk(rng, 200, 0.1);
        double rr = 0.2 + 0.1 * (trial % 5), e = 0.05 * (1 + trial % 4);
        auto a = quasi_loops(p, {0.05, 0.05}, rr, e);
        auto b = quasi_loops_fast(p, {0.05, 0.05}, rr, e);
        CHECK(a == b);
        nonempty += !a.empty();
    }
    CHECK(nonempty > 50);
}

TEST_CASE("Frechet distance") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    auto curve = [&](std::size_t n) {
        std::vector<Complex> c;
        for (std::size_t k = 0; k < n; ++k) c.emplace_back(u(rng), u(rng));
        return c;
    };
    auto a = curve(10);
    CHECK(frechet_distance(a, a) == 0.0);
    std::vector<Complex> moved;
    for (auto z : a) moved.push_back(z + Complex(0.3, -0.4));
    CHECK(frechet_distance(a, moved) == doctest::Approx(0.5).epsilon(1e-12));
    for (int trial = 0; trial < 30; ++trial) {
        auto x = curve(2 + trial % 11), y = curve(3 + trial % 10), w = curve(4 + trial % 9);
        std::vector<Complex> rev(x.rbegin(), x.rend());
        CHECK(frechet_distance(x, rev) == doctest::Approx(frechet_brute(x, rev)).epsilon(1e-15));
        CHECK(frechet_distance(x, y) == doctest::Approx(frechet_brute(x, y)).epsilon(1e-15));
        CHECK(frechet_distance(x, y) == frechet_distance(y, x));
        CHECK(frechet_distance(x, w) <= frechet_distance(x, y) + frechet_distance(y, w) + 1e-12);
    }
}

TEST_CASE("statistics helpers") {
    std::vector<double> x{1, 2, 3, 4};
    auto m = mean_se(x);
    CHECK(m.mean == 2.5);
    CHECK(m.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(ks_statistic(x, x) == 0.0);
    CHECK(ks_statistic({1, 2}, {3, 4}) == 1.0);
    CHECK(ks_statistic({1, 3}, {2, 4}) == 0.5);
    CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967).epsilon(1e-7));
    CHECK(kolmogorov_q(1.358) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(ks_pvalue(0.0, 100, 100) == doctest::Approx(1.0));
    CHECK(ks_band95(2000, 2000) == doctest::Approx(1.358 * std::sqrt(0.001)));
    CHECK(total_variation({0.5, 0.5}, {1.0, 0.0}) == 0.5);
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    int inv = -1;
    CHECK(trend_decreasing({0.3, 0.2, 0.1}, {0, 0, 0}, &inv));
    CHECK(inv == 0);
    CHECK(trend_decreasing({0.3, 0.31, 0.1}, {0, 0.02, 0.02}, &inv));
    CHECK(inv == 1);
    CHECK_FALSE(trend_decreasing({0.3, 0.4, 0.1}, {0, 0.02, 0.02}, &inv));
    CHECK_FALSE(trend_decreasing({0.3, 0.31, 0.32}, {0.1, 0.1, 0.1}, &inv));
}

TEST_CASE("KS estimate stabilizes as the sample grows") {
    // Same law on both sides: the statistic stays inside its band.
    for (std::size_t n : {500, 2000}) {
        Rng r = rng_stream(31, n);
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = standard_normal(r);
        for (auto& v : b) v = standard_normal(r);
        CHECK(ks_statistic(a, b) <= ks_band95(n, n));
    }
}

TEST_CASE("first crossing height") {
    CHECK(first_crossing_height({{0, 0}, {0, 1}, {1, 1}, {1, 2}}, 0.5) == 1.0);
    CHECK(first_crossing_height({{0, 0}, {1, 2}}, 0.25) == doctest::Approx(0.5));
    CHECK_THROWS_AS(first_crossing_height({{0, 0}, {0, 1}}, 0.5), NumericError);
}

TEST_CASE("rng streams: reproducible and uncorrelated") {
    Rng a = rng_stream(42, 3), b = rng_stream(42, 3);
    bool same = true;
    for (int k = 0; k < 1000000; ++k) same = same && (a() == b());
    CHECK(same);
    Rng c = rng_stream(42, 4), d = rng_stream(42, 5);
    const int n = 100000;
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (int k = 0; k < n; ++k) {
        double x = uniform01(c), y = uniform01(d);
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    double cov = sxy / n - sx / n * sy / n;
    double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::abs(corr) < 4.0 / std::sqrt(double(n)));
    Rng e = rng_stream(43, 3);
    CHECK(e() != rng_stream(42, 3)());
}
