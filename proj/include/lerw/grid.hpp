#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lerw/domain.hpp"

namespace lerw {

// Lattice directions in the order E, N, W, S.
inline constexpr std::array<int, 4> kDx{1, 0, -1, 0};
inline constexpr std::array<int, 4> kDy{0, 1, 0, -1};
inline constexpr int opposite(int d) { return (d + 2) & 3; }

enum class BoundaryKind : std::uint8_t { Axis, Hole, Outer };

struct BoundaryHit {
    double t = 0.0;  // fraction of the lattice edge travelled
    BoundaryKind kind = BoundaryKind::Outer;
    int hole = -1;
    double s = 0.0;  // arc-length coordinate along the hole
};

// Open planar region in internal coordinates with the real axis as part of
// its boundary.
class Region {
public:
    virtual ~Region() = default;
    virtual bool inside(Complex z) const = 0;
    // First boundary point met walking from the inside point a to b.
    virtual std::optional<BoundaryHit> first_hit(Complex a, Complex b) const = 0;
    // Box [x0, x1] x [0, y1] containing the region.
    virtual std::array<double, 3> bounds() const = 0;
    virtual bool may_cut(Complex a, Complex b) const;  // cheap prefilter for edge cuts
    virtual double frame_shift() const { return 0.0; }  // internal -> file frame
};

class DomainRegion final : public Region {
public:
    explicit DomainRegion(Domain d);
    bool inside(Complex z) const override;
    std::optional<BoundaryHit> first_hit(Complex a, Complex b) const override;
    std::array<double, 3> bounds() const override;
    bool may_cut(Complex a, Complex b) const override;
    double frame_shift() const override { return d_.start_x; }
    const Domain& domain() const { return d_; }

private:
    Domain d_;
    std::vector<std::array<double, 4>> boxes_;  // hole bounding boxes, internal frame
};

// Open rectangle (x0, x1) x (0, y1); its bottom side is the axis. Used for
// small test geometries and corridors.
class BoxRegion final : public Region {
public:
    BoxRegion(double x0, double x1, double y1) : x0_(x0), x1_(x1), y1_(y1) {}
    bool inside(Complex z) const override;
    std::optional<BoundaryHit> first_hit(Complex a, Complex b) const override;
    std::array<double, 3> bounds() const override { return {x0_, x1_, y1_}; }

private:
    double x0_, x1_, y1_;
};

using VertexId = std::int64_t;

struct Stub {
    std::int64_t site = 0;  // interior endpoint z1
    std::uint8_t dir = 0;
    Complex z2{};           // boundary endpoint
    BoundaryKind kind = BoundaryKind::Outer;
    int hole = -1;
    double s = 0.0;
};

struct GridStats {
    std::size_t interior = 0;
    std::size_t boundary = 0;
    std::size_t edges = 0;
    std::size_t target_size = 0;
};

// Generic undirected graph in CSR form.
struct Graph {
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> adj;
    std::size_t size() const { return offsets.size() - 1; }
    std::size_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
    std::size_t neighbor(std::size_t v, std::size_t k) const { return adj[offsets[v] + k]; }
    static Graph from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);
};

// The lattice approximation D^delta stored on a padded box of sites. Site
// (i, j) sits at delta * ((ix0 + i) + i (iy0 + j)) in internal coordinates.
// Interior vertices are identified by site index; boundary vertices (stubs)
// by num_sites() + stub index.
class GridGraph {
public:
    static constexpr std::uint8_t kVertexBit = 16;

    double delta() const { return delta_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int ix0() const { return ix0_; }
    int iy0() const { return iy0_; }
    std::int64_t num_sites() const { return static_cast<std::int64_t>(nx_) * ny_; }
    const std::vector<std::uint8_t>& cells() const { return cell_; }
    const std::vector<Stub>& stubs() const { return stubs_; }
    const Region& region() const { return *region_; }
    std::shared_ptr<const Region> region_ptr() const { return region_; }

    bool is_vertex(std::int64_t site) const { return (cell_[site] & kVertexBit) != 0; }
    bool linked(std::int64_t site, int d) const { return (cell_[site] >> d) & 1; }
    std::int64_t offset(int d) const { return kDx[d] + static_cast<std::int64_t>(kDy[d]) * nx_; }

    bool is_boundary(VertexId v) const { return v >= num_sites(); }
    const Stub& stub(VertexId v) const { return stubs_[static_cast<std::size_t>(v - num_sites())]; }
    VertexId stub_vertex(std::size_t k) const { return num_sites() + static_cast<VertexId>(k); }
    std::int64_t stub_index(std::int64_t site, int d) const;  // -1 when absent
    VertexId neighbor(std::int64_t site, int d) const;

    Complex site_position(std::int64_t site) const;
    Complex position(VertexId v) const;
    std::int64_t site_at(long ix, long iy) const;  // -1 outside the box
    std::int64_t nearest_site(Complex z) const;

    VertexId start() const { return start_; }
    const std::vector<VertexId>& target() const { return target_; }
    bool target_is_interior() const { return target_interior_; }
    bool in_target(VertexId v) const;
    std::size_t interior_count() const { return interior_count_; }
    GridStats stats() const;

    // Compact CSR copy of the graph; ids maps compact index -> VertexId.
    struct Compact {
        Graph graph;
        std::vector<VertexId> ids;
        std::vector<std::int64_t> index_of_site;  // -1 for non-vertices
        std::size_t index_of(const GridGraph& g, VertexId v) const;
    };
    Compact compact() const;

    std::string dump_csv() const;

    friend std::shared_ptr<const GridGraph> build_grid_impl(std::shared_ptr<const Region>, const Target*, double);

private:
    double delta_ = 0.0;
    int nx_ = 0, ny_ = 0, ix0_ = 0, iy0_ = 0;
    std::vector<std::uint8_t> cell_;
    std::vector<Stub> stubs_;
    std::shared_ptr<const Region> region_;
    VertexId start_ = -1;
    std::vector<VertexId> target_;
    bool target_interior_ = false;
    std::size_t interior_count_ = 0;
};

using GridPtr = std::shared_ptr<const GridGraph>;

// Builds D^delta from a region and a target in internal coordinates.
GridPtr build_grid(std::shared_ptr<const Region> region, const Target& internal_target, double delta);
// Grid without target selection, for field solves.
GridPtr build_solve_grid(std::shared_ptr<const Region> region, double delta);
GridPtr build_grid_impl(std::shared_ptr<const Region> region, const Target* internal_target, double delta);
// Convenience overload: file-frame domain and target.
GridPtr build_grid(const Domain& domain, const Target& target, double delta);

Target to_internal(const Domain& d, const Target& t);

// Nearest lattice point to p with ties broken by the largest Re z + pi Im z.
Complex nearest_lattice_point(Complex p, double delta);

}  // namespace lerw
