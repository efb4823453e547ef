#include "lerw/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "lerw/types.hpp"

namespace lerw {

namespace {

constexpr std::uint8_t kU = StencilProblem::kUnknown;

struct Level {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> bits;
    std::vector<double> u, f, r;
    std::int64_t size() const { return static_cast<std::int64_t>(nx) * ny; }
};

inline double neighbour_sum(const std::uint8_t b, const double* u, std::int64_t s, int nx) {
    double acc = 0.0;
    if (b & 1) acc += u[s + 1];
    if (b & 2) acc += u[s + nx];
    if (b & 4) acc += u[s - 1];
    if (b & 8) acc += u[s - nx];
    return acc;
}

// One red-black half sweep over sites with (i + j) % 2 == colour.
void smooth_colour(Level& L, int colour) {
    const int nx = L.nx;
    const std::uint8_t* bits = L.bits.data();
    double* u = L.u.data();
    const double* f = L.f.data();
#pragma omp parallel for schedule(static)
    for (int j = 1; j < L.ny - 1; ++j) {
        const std::int64_t row = static_cast<std::int64_t>(j) * nx;
        for (int i = 1 + ((j + colour + 1) & 1); i < nx - 1; i += 2) {
            const std::int64_t s = row + i;
            const std::uint8_t b = bits[s];
            if (!(b & kU)) continue;
            u[s] = 0.25 * (f[s] + neighbour_sum(b, u, s, nx));
        }
    }
}

void compute_residual(Level& L) {
    const int nx = L.nx;
    const std::uint8_t* bits = L.bits.data();
    const double* u = L.u.data();
    const double* f = L.f.data();
    double* r = L.r.data();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < L.ny; ++j) {
        const std::int64_t row = static_cast<std::int64_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::int64_t s = row + i;
            const std::uint8_t b = bits[s];
            r[s] = (b & kU) ? f[s] - 4.0 * u[s] + neighbour_sum(b, u, s, nx) : 0.0;
        }
    }
}

Level coarsen(const Level& F) {
    Level C;
    C.nx = (F.nx + 1) / 2;
    C.ny = (F.ny + 1) / 2;
    const std::int64_t n = C.size();
    C.bits.assign(static_cast<std::size_t>(n), 0);
    for (int J = 0; J < C.ny; ++J)
        for (int I = 0; I < C.nx; ++I) {
            const std::int64_t fs = static_cast<std::int64_t>(2 * J) * F.nx + 2 * I;
            if (2 * I < F.nx && 2 * J < F.ny && (F.bits[fs] & kU)) C.bits[static_cast<std::int64_t>(J) * C.nx + I] = kU;
        }
    for (int J = 0; J < C.ny; ++J)
        for (int I = 0; I < C.nx; ++I) {
            const std::int64_t s = static_cast<std::int64_t>(J) * C.nx + I;
            if (!(C.bits[s] & kU)) continue;
            if (I + 1 < C.nx && (C.bits[s + 1] & kU)) C.bits[s] |= 1;
            if (J + 1 < C.ny && (C.bits[s + C.nx] & kU)) C.bits[s] |= 2;
            if (I > 0 && (C.bits[s - 1] & kU)) C.bits[s] |= 4;
            if (J > 0 && (C.bits[s - C.nx] & kU)) C.bits[s] |= 8;
        }
    C.u.assign(static_cast<std::size_t>(n), 0.0);
    C.f.assign(static_cast<std::size_t>(n), 0.0);
    C.r.assign(static_cast<std::size_t>(n), 0.0);
    return C;
}

// f_c = P^T r_f with bilinear weights (four times full weighting).
void restrict_residual(const Level& F, Level& C) {
    const double w[3] = {0.5, 1.0, 0.5};
#pragma omp parallel for schedule(static)
    for (int J = 0; J < C.ny; ++J) {
        for (int I = 0; I < C.nx; ++I) {
            const std::int64_t s = static_cast<std::int64_t>(J) * C.nx + I;
            if (!(C.bits[s] & kU)) {
                C.f[s] = 0.0;
                continue;
            }
            double acc = 0.0;
            for (int b = -1; b <= 1; ++b) {
                const int j = 2 * J + b;
                if (j < 0 || j >= F.ny) continue;
                for (int a = -1; a <= 1; ++a) {
                    const int i = 2 * I + a;
                    if (i < 0 || i >= F.nx) continue;
                    acc += w[a + 1] * w[b + 1] * F.r[static_cast<std::int64_t>(j) * F.nx + i];
                }
            }
            C.f[s] = acc;
        }
    }
}

void prolongate_add(const Level& C, Level& F) {
    const double* uc = C.u.data();
    const int cnx = C.nx;
#pragma omp parallel for schedule(static)
    for (int j = 1; j < F.ny - 1; ++j) {
        const int J0 = j / 2, J1 = (j + 1) / 2;
        for (int i = 1; i < F.nx - 1; ++i) {
            const std::int64_t s = static_cast<std::int64_t>(j) * F.nx + i;
            if (!(F.bits[s] & kU)) continue;
            const int I0 = i / 2, I1 = (i + 1) / 2;
            const double v = uc[static_cast<std::int64_t>(J0) * cnx + I0] + uc[static_cast<std::int64_t>(J0) * cnx + I1] +
                             uc[static_cast<std::int64_t>(J1) * cnx + I0] + uc[static_cast<std::int64_t>(J1) * cnx + I1];
            F.u[s] += 0.25 * v;
        }
    }
}

void vcycle(std::vector<Level>& levels, std::size_t l) {
    Level& L = levels[l];
    if (l + 1 == levels.size()) {
        std::fill(L.u.begin(), L.u.end(), 0.0);
        for (int k = 0; k < 40; ++k) {
            smooth_colour(L, 0);
            smooth_colour(L, 1);
            smooth_colour(L, 1);
            smooth_colour(L, 0);
        }
        return;
    }
    std::fill(L.u.begin(), L.u.end(), 0.0);
    smooth_colour(L, 0);
    smooth_colour(L, 1);
    smooth_colour(L, 0);
    smooth_colour(L, 1);
    compute_residual(L);
    Level& C = levels[l + 1];
    restrict_residual(L, C);
    vcycle(levels, l + 1);
    prolongate_add(C, L);
    smooth_colour(L, 1);
    smooth_colour(L, 0);
    smooth_colour(L, 1);
    smooth_colour(L, 0);
}

// Deterministic dot product: fixed per-row partial sums, summed in order.
double dot(const std::vector<double>& a, const std::vector<double>& b, int nx, int ny, std::vector<double>& rows) {
    const double* pa = a.data();
    const double* pb = b.data();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) {
        const std::int64_t row = static_cast<std::int64_t>(j) * nx;
        double acc = 0.0;
        for (int i = 0; i < nx; ++i) acc += pa[row + i] * pb[row + i];
        rows[j] = acc;
    }
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += rows[j];
    return s;
}

double max_abs(const std::vector<double>& a, int nx, int ny, std::vector<double>& rows) {
    const double* pa = a.data();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) {
        const std::int64_t row = static_cast<std::int64_t>(j) * nx;
        double m = 0.0;
        for (int i = 0; i < nx; ++i) m = std::max(m, std::abs(pa[row + i]));
        rows[j] = m;
    }
    return *std::max_element(rows.begin(), rows.begin() + ny);
}

void apply(const StencilProblem& p, const std::vector<double>& x, std::vector<double>& y) {
    const int nx = p.nx;
    const std::uint8_t* bits = p.bits.data();
    const double* px = x.data();
    double* py = y.data();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < p.ny; ++j) {
        const std::int64_t row = static_cast<std::int64_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::int64_t s = row + i;
            const std::uint8_t b = bits[s];
            py[s] = (b & kU) ? 4.0 * px[s] - neighbour_sum(b, px, s, nx) : 0.0;
        }
    }
}

}  // namespace

std::int64_t StencilProblem::unknown_count() const {
    std::int64_t c = 0;
    for (auto b : bits) c += (b & kUnknown) ? 1 : 0;
    return c;
}

double residual_norm(const StencilProblem& p, const std::vector<double>& u) {
    double m = 0.0;
    for (std::int64_t s = 0; s < p.size(); ++s) {
        const std::uint8_t b = p.bits[s];
        if (!(b & kU)) continue;
        m = std::max(m, std::abs(p.rhs[s] - 4.0 * u[s] + neighbour_sum(b, u.data(), s, p.nx)));
    }
    return m;
}

SolveInfo solve_mgpcg(const StencilProblem& p, std::vector<double>& u, double tol, int max_iter) {
    SolveInfo info;
    const std::int64_t n = p.size();
    if (static_cast<std::int64_t>(u.size()) != n) u.assign(static_cast<std::size_t>(n), 0.0);
    if (p.unknown_count() == 0) {
        info.converged = true;
        return info;
    }
    std::vector<Level> levels(1);
    levels[0].nx = p.nx;
    levels[0].ny = p.ny;
    levels[0].bits = p.bits;
    levels[0].u.assign(static_cast<std::size_t>(n), 0.0);
    levels[0].f.assign(static_cast<std::size_t>(n), 0.0);
    levels[0].r.assign(static_cast<std::size_t>(n), 0.0);
    while (levels.back().nx > 5 && levels.back().ny > 5) {
        Level c = coarsen(levels.back());
        std::int64_t cnt = 0;
        for (auto b : c.bits) cnt += (b & kU) ? 1 : 0;
        if (cnt == 0) break;
        levels.push_back(std::move(c));
        if (cnt < 16) break;
    }

    std::vector<double> rows(static_cast<std::size_t>(p.ny));
    std::vector<double> r(static_cast<std::size_t>(n)), q(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
    auto true_residual = [&] {
        apply(p, u, q);
#pragma omp parallel for schedule(static)
        for (std::int64_t s = 0; s < n; ++s) r[s] = (p.bits[s] & kU) ? p.rhs[s] - q[s] : 0.0;
    };
    auto precondition = [&] {
        levels[0].f = r;
        vcycle(levels, 0);
    };
    true_residual();
    info.residual = max_abs(r, p.nx, p.ny, rows);
    int restarts = 0;
    while (info.residual > tol && info.iterations < max_iter) {
        precondition();
        d = levels[0].u;
        double rz = dot(r, levels[0].u, p.nx, p.ny, rows);
        while (info.iterations < max_iter) {
            apply(p, d, q);
            const double dq = dot(d, q, p.nx, p.ny, rows);
            if (!(dq > 0.0)) break;
            const double alpha = rz / dq;
#pragma omp parallel for schedule(static)
            for (std::int64_t s = 0; s < n; ++s) {
                u[s] += alpha * d[s];
                r[s] -= alpha * q[s];
            }
            ++info.iterations;
            if (max_abs(r, p.nx, p.ny, rows) <= 0.5 * tol) break;
            precondition();
            const double rz_new = dot(r, levels[0].u, p.nx, p.ny, rows);
            const double beta = rz_new / rz;
            rz = rz_new;
            const double* z = levels[0].u.data();
#pragma omp parallel for schedule(static)
            for (std::int64_t s = 0; s < n; ++s) d[s] = z[s] + beta * d[s];
        }
        true_residual();
        info.residual = max_abs(r, p.nx, p.ny, rows);
        if (++restarts > 20) break;
    }
    info.converged = info.residual <= tol;
    return info;
}

SolveInfo solve_sor_reference(const StencilProblem& p, std::vector<double>& u, double tol, int max_iter, double omega) {
    SolveInfo info;
    const std::int64_t n = p.size();
    if (static_cast<std::int64_t>(u.size()) != n) u.assign(static_cast<std::size_t>(n), 0.0);
    if (omega <= 0.0) omega = 2.0 / (1.0 + std::sin(kPi / std::max(p.nx, p.ny)));
    const int nx = p.nx;
    for (info.iterations = 0; info.iterations < max_iter; ++info.iterations) {
        for (std::int64_t s = 0; s < n; ++s) {
            const std::uint8_t b = p.bits[s];
            if (!(b & kU)) continue;
            const double gs = 0.25 * (p.rhs[s] + neighbour_sum(b, u.data(), s, nx));
            u[s] += omega * (gs - u[s]);
        }
        if ((info.iterations & 7) == 7) {
            info.residual = residual_norm(p, u);
            if (info.residual <= tol) {
                ++info.iterations;
                info.converged = true;
                return info;
            }
        }
    }
    info.residual = residual_norm(p, u);
    info.converged = info.residual <= tol;
    return info;
}

}  // namespace lerw
