#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wnl {

inline constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

/// Axis-parallel box [lo, hi] in dimension 1..3. Unused coordinates stay zero.
struct Box {
    int dim = 1;
    Point lo{};
    Point hi{};

    double extent(int axis) const { return hi[axis] - lo[axis]; }
    double volume() const;
    double diameter() const;
    double min_extent() const;
    Point center() const;
    bool contains(const Box& inner) const;
    bool contains_point(const Point& x) const;
    std::string to_string() const;

    bool operator==(const Box&) const = default;
};

/// [lo, hi]^dim.
Box cube(int dim, double lo, double hi);
/// Box with per-axis bounds; the spans must have equal length 1..3.
Box make_box(std::span<const double> lo, std::span<const double> hi);
Box intersect(const Box& a, const Box& b);
double overlap_volume(const Box& a, const Box& b);

struct MeshSpec {
    enum class Kind { uniform, graded };
    Kind kind = Kind::uniform;
    /// Uniform: 2^level cells per axis.
    int level = 0;
    /// Graded (1-D only): layers [s + l q^{m+1}, s + l q^m] toward singular_point,
    /// each split into `subdivisions` equal cells; the innermost cell reaches s.
    double ratio = 0.5;
    int layers = 0;
    int subdivisions = 1;
    double singular_point = 0.0;

    bool operator==(const MeshSpec&) const = default;
};

struct Cell {
    Box box;
    Point mid{};
    double measure = 0.0;
};

/// Tensor-product partition of a box. Cells are stored row-major, last axis fastest.
class Grid {
public:
    static Grid uniform(const Box& box, int level);
    static Grid graded(const Box& box, double singular_point, double ratio, int layers,
                       int subdivisions = 1);
    static Grid from_spec(const Box& box, const MeshSpec& mesh);

    int dim() const { return box_.dim; }
    const Box& box() const { return box_; }
    const MeshSpec& mesh() const { return mesh_; }
    std::size_t size() const { return measures_.size(); }
    std::size_t axis_cells(int axis) const { return edges_[axis].size() - 1; }
    std::span<const double> edges(int axis) const { return edges_[axis]; }

    Cell cell(std::size_t i) const;
    Box cell_box(std::size_t i) const;
    const Point& midpoint(std::size_t i) const { return mids_[i]; }
    double measure(std::size_t i) const { return measures_[i]; }
    std::span<const double> measures() const { return measures_; }

    std::array<std::size_t, kMaxDim> unflatten(std::size_t i) const;
    std::size_t flatten(const std::array<std::size_t, kMaxDim>& idx) const;

    /// Calls fn(cell_index, overlap_volume) for every cell meeting q in positive volume.
    template <class F>
    void for_each_overlap(const Box& q, F&& fn) const;

    /// Half-open index range [first, last) of cells along `axis` overlapping [lo, hi].
    std::pair<std::size_t, std::size_t> axis_range(int axis, double lo, double hi) const;

    bool operator==(const Grid& other) const {
        return box_ == other.box_ && mesh_ == other.mesh_ && edges_ == other.edges_;
    }

private:
    Grid(const Box& box, const MeshSpec& mesh, std::array<std::vector<double>, kMaxDim> edges);

    Box box_;
    MeshSpec mesh_;
    std::array<std::vector<double>, kMaxDim> edges_;
    std::vector<Point> mids_;
    std::vector<double> measures_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_uniform_grid(const Box& box, int level);
GridPtr make_graded_grid(const Box& box, double singular_point, double ratio, int layers,
                         int subdivisions = 1);

/// Search space approximating "sup over all cubes": dyadic subcubes of `box`,
/// optionally the dyadic lattices shifted by a third of the box, and seeded random cubes.
/// Cubes are cubes relative to the box (equal fractions of each extent) for the lattices,
/// and true cubes (equal side lengths) for the random part.
struct CubeFamily {
    Box box;
    int dyadic_depth = 10;
    bool shifted = true;
    std::size_t random_count = 10000;
    std::uint64_t seed = 0;

    /// Family used when the caller gives no explicit choice.
    static CubeFamily standard(const Box& box, int dyadic_depth = 10, std::uint64_t seed = 0);
    std::string describe() const;
    bool operator==(const CubeFamily&) const = default;
};

std::vector<Box> enumerate_cubes(const CubeFamily& family);

// ---------------------------------------------------------------------------

template <class F>
void Grid::for_each_overlap(const Box& q, F&& fn) const {
    const int n = dim();
    std::array<std::pair<std::size_t, std::size_t>, kMaxDim> r{};
    for (int a = 0; a < n; ++a) {
        r[a] = axis_range(a, q.lo[a], q.hi[a]);
        if (r[a].first >= r[a].second) return;
    }
    for (int a = n; a < kMaxDim; ++a) r[a] = {0, 1};
    std::array<std::size_t, kMaxDim> idx{};
    for (idx[0] = r[0].first; idx[0] < r[0].second; ++idx[0]) {
        for (idx[1] = r[1].first; idx[1] < r[1].second; ++idx[1]) {
            for (idx[2] = r[2].first; idx[2] < r[2].second; ++idx[2]) {
                double v = 1.0;
                for (int a = 0; a < n; ++a) {
                    double lo = std::max(q.lo[a], edges_[a][idx[a]]);
                    double hi = std::min(q.hi[a], edges_[a][idx[a] + 1]);
                    v *= hi - lo;
                }
                if (v > 0.0) fn(flatten(idx), v);
            }
        }
    }
}

}  // namespace wnl
