#include "wnl/grid.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "wnl/error.hpp"

namespace wnl {

double Box::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= std::max(0.0, extent(a));
    return v;
}

double Box::diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += extent(a) * extent(a);
    return std::sqrt(s);
}

double Box::min_extent() const {
    double m = extent(0);
    for (int a = 1; a < dim; ++a) m = std::min(m, extent(a));
    return m;
}

Point Box::center() const {
    Point c{};
    for (int a = 0; a < dim; ++a) c[a] = 0.5 * (lo[a] + hi[a]);
    return c;
}

bool Box::contains(const Box& inner) const {
    if (inner.dim != dim) return false;
    for (int a = 0; a < dim; ++a)
        if (inner.lo[a] < lo[a] || inner.hi[a] > hi[a]) return false;
    return true;
}

bool Box::contains_point(const Point& x) const {
    for (int a = 0; a < dim; ++a)
        if (x[a] < lo[a] || x[a] > hi[a]) return false;
    return true;
}

std::string Box::to_string() const {
    std::ostringstream os;
    os.precision(17);
    for (int a = 0; a < dim; ++a) {
        if (a) os << " x ";
        os << '[' << lo[a] << ", " << hi[a] << ']';
    }
    return os.str();
}

Box cube(int dim, double lo, double hi) {
    if (dim < 1 || dim > kMaxDim) throw UsageError("dimension must be 1..3");
    Box b;
    b.dim = dim;
    for (int a = 0; a < dim; ++a) {
        b.lo[a] = lo;
        b.hi[a] = hi;
    }
    return b;
}

Box make_box(std::span<const double> lo, std::span<const double> hi) {
    if (lo.size() != hi.size() || lo.empty() || lo.size() > kMaxDim)
        throw UsageError("box bounds must have matching length 1..3");
    Box b;
    b.dim = static_cast<int>(lo.size());
    for (int a = 0; a < b.dim; ++a) {
        b.lo[a] = lo[a];
        b.hi[a] = hi[a];
    }
    return b;
}

Box intersect(const Box& a, const Box& b) {
    if (a.dim != b.dim) throw UsageError("box dimension mismatch");
    Box r;
    r.dim = a.dim;
    for (int i = 0; i < a.dim; ++i) {
        r.lo[i] = std::max(a.lo[i], b.lo[i]);
        r.hi[i] = std::max(r.lo[i], std::min(a.hi[i], b.hi[i]));
    }
    return r;
}

double overlap_volume(const Box& a, const Box& b) { return intersect(a, b).volume(); }

// ---------------------------------------------------------------------------

namespace {

void check_box(const Box& box) {
    if (box.dim < 1 || box.dim > kMaxDim) throw UsageError("dimension must be 1..3");
    for (int a = 0; a < box.dim; ++a)
        if (!(box.hi[a] > box.lo[a]) || !std::isfinite(box.lo[a]) || !std::isfinite(box.hi[a]))
            throw UsageError("box must have finite positive extent on every axis");
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t cells) {
    std::vector<double> e(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        e[i] = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(cells));
    e.front() = lo;
    e.back() = hi;
    return e;
}

// Edges of [s, s + len] graded toward s, in increasing order.
std::vector<double> graded_side(double s, double len, double q, int layers, int sub) {
    std::vector<double> e{s, s + len * std::pow(q, layers)};
    for (int m = layers - 1; m >= 0; --m) {
        double lo = s + len * std::pow(q, m + 1);
        double hi = s + len * std::pow(q, m);
        for (int i = 1; i <= sub; ++i) e.push_back(lo + (hi - lo) * (static_cast<double>(i) / sub));
    }
    e.back() = s + len;
    return e;
}

}  // namespace

Grid::Grid(const Box& box, const MeshSpec& mesh, std::array<std::vector<double>, kMaxDim> edges)
    : box_(box), mesh_(mesh), edges_(std::move(edges)) {
    for (int a = box_.dim; a < kMaxDim; ++a) edges_[a] = {0.0, 0.0};
    std::size_t total = 1;
    for (int a = 0; a < box_.dim; ++a) total *= axis_cells(a);
    mids_.resize(total);
    measures_.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        auto idx = unflatten(i);
        Point mid{};
        double m = 1.0;
        for (int a = 0; a < box_.dim; ++a) {
            double lo = edges_[a][idx[a]], hi = edges_[a][idx[a] + 1];
            mid[a] = 0.5 * (lo + hi);
            m *= hi - lo;
        }
        if (!(m > 0.0)) throw UsageError("grid has a cell of zero measure (grading too deep)");
        mids_[i] = mid;
        measures_[i] = m;
    }
}

Grid Grid::uniform(const Box& box, int level) {
    check_box(box);
    if (level < 0 || level > 14) throw UsageError("uniform level must be in 0..14");
    if (level * box.dim > 24) throw UsageError("uniform grid would exceed 2^24 cells");
    std::size_t cells = std::size_t{1} << level;
    std::array<std::vector<double>, kMaxDim> edges;
    for (int a = 0; a < box.dim; ++a) edges[a] = uniform_edges(box.lo[a], box.hi[a], cells);
    MeshSpec mesh;
    mesh.kind = MeshSpec::Kind::uniform;
    mesh.level = level;
    return Grid(box, mesh, std::move(edges));
}

Grid Grid::graded(const Box& box, double s, double q, int layers, int sub) {
    check_box(box);
    if (box.dim != 1) throw UsageError("graded grids are one-dimensional");
    if (!(q > 0.0 && q < 1.0)) throw UsageError("grading ratio must lie in (0,1)");
    if (layers < 0 || sub < 1) throw UsageError("graded grid needs layers >= 0 and subdivisions >= 1");
    if (s < box.lo[0] || s > box.hi[0]) throw UsageError("singular point outside the box");
    std::vector<double> e;
    if (s > box.lo[0]) {
        auto left = graded_side(s, s - box.lo[0], q, layers, sub);
        for (auto it = left.rbegin(); it != left.rend(); ++it) e.push_back(2.0 * s - *it);
        e.front() = box.lo[0];
        e.back() = s;
    }
    if (s < box.hi[0]) {
        auto right = graded_side(s, box.hi[0] - s, q, layers, sub);
        if (e.empty()) e = std::move(right);
        else e.insert(e.end(), right.begin() + 1, right.end());
    }
    MeshSpec mesh;
    mesh.kind = MeshSpec::Kind::graded;
    mesh.ratio = q;
    mesh.layers = layers;
    mesh.subdivisions = sub;
    mesh.singular_point = s;
    std::array<std::vector<double>, kMaxDim> edges;
    edges[0] = std::move(e);
    return Grid(box, mesh, std::move(edges));
}

Grid Grid::from_spec(const Box& box, const MeshSpec& mesh) {
    if (mesh.kind == MeshSpec::Kind::uniform) return uniform(box, mesh.level);
    return graded(box, mesh.singular_point, mesh.ratio, mesh.layers, mesh.subdivisions);
}

Cell Grid::cell(std::size_t i) const { return {cell_box(i), mids_[i], measures_[i]}; }

Box Grid::cell_box(std::size_t i) const {
    auto idx = unflatten(i);
    Box b;
    b.dim = box_.dim;
    for (int a = 0; a < box_.dim; ++a) {
        b.lo[a] = edges_[a][idx[a]];
        b.hi[a] = edges_[a][idx[a] + 1];
    }
    return b;
}

std::array<std::size_t, kMaxDim> Grid::unflatten(std::size_t i) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (int a = kMaxDim - 1; a >= 0; --a) {
        std::size_t n = axis_cells(a);
        idx[a] = i % n;
        i /= n;
    }
    return idx;
}

std::size_t Grid::flatten(const std::array<std::size_t, kMaxDim>& idx) const {
    std::size_t i = 0;
    for (int a = 0; a < kMaxDim; ++a) i = i * axis_cells(a) + idx[a];
    return i;
}

std::pair<std::size_t, std::size_t> Grid::axis_range(int axis, double lo, double hi) const {
    const auto& e = edges_[axis];
    // first cell whose upper edge exceeds lo; last cell whose lower edge is below hi
    auto first = std::upper_bound(e.begin() + 1, e.end(), lo) - (e.begin() + 1);
    auto last = std::lower_bound(e.begin(), e.end() - 1, hi) - e.begin();
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(std::max(first, last))};
}

GridPtr make_uniform_grid(const Box& box, int level) {
    return std::make_shared<const Grid>(Grid::uniform(box, level));
}

GridPtr make_graded_grid(const Box& box, double s, double q, int layers, int sub) {
    return std::make_shared<const Grid>(Grid::graded(box, s, q, layers, sub));
}

// ---------------------------------------------------------------------------

CubeFamily CubeFamily::standard(const Box& box, int dyadic_depth, std::uint64_t seed) {
    CubeFamily f;
    f.box = box;
    f.dyadic_depth = dyadic_depth;
    f.shifted = true;
    f.random_count = 10000;
    f.seed = seed;
    return f;
}

std::string CubeFamily::describe() const {
    std::ostringstream os;
    os << "dyadic(depth=" << dyadic_depth << ")";
    if (shifted) os << "+third-shift";
    if (random_count) os << "+random(K=" << random_count << ",seed=" << seed << ")";
    os << " on " << box.to_string();
    return os.str();
}

namespace {

double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Appends the tensor product of per-axis interval lists.
void append_product(const std::vector<std::vector<std::pair<double, double>>>& axes, int dim,
                    std::vector<Box>& out) {
    std::array<std::size_t, kMaxDim> n{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        n[a] = axes[a].size();
        if (n[a] == 0) return;
    }
    for (std::size_t i = 0; i < n[0]; ++i)
        for (std::size_t j = 0; j < n[1]; ++j)
            for (std::size_t k = 0; k < n[2]; ++k) {
                Box b;
                b.dim = dim;
                std::array<std::size_t, kMaxDim> idx{i, j, k};
                for (int a = 0; a < dim; ++a) {
                    b.lo[a] = axes[a][idx[a]].first;
                    b.hi[a] = axes[a][idx[a]].second;
                }
                out.push_back(b);
            }
}

}  // namespace

std::vector<Box> enumerate_cubes(const CubeFamily& fam) {
    const Box& box = fam.box;
    check_box(box);
    if (fam.dyadic_depth < 0 || fam.dyadic_depth > 20) throw UsageError("dyadic depth must be in 0..20");
    const int n = box.dim;
    std::vector<Box> out;
    std::vector<std::vector<std::pair<double, double>>> axes(n);

    for (int level = 0; level <= fam.dyadic_depth; ++level) {
        double parts = std::ldexp(1.0, level);
        for (int a = 0; a < n; ++a) {
            axes[a].clear();
            double len = box.extent(a);
            for (std::size_t j = 0; j < static_cast<std::size_t>(parts); ++j) {
                double lo = box.lo[a] + len * (static_cast<double>(j) / parts);
                double hi = box.lo[a] + len * (static_cast<double>(j + 1) / parts);
                if (j + 1 == static_cast<std::size_t>(parts)) hi = box.hi[a];
                axes[a].emplace_back(lo, hi);
            }
        }
        append_product(axes, n, out);
    }

    if (fam.shifted) {
        for (int level = 1; level <= fam.dyadic_depth; ++level) {
            double parts = std::ldexp(1.0, level);
            for (int a = 0; a < n; ++a) {
                axes[a].clear();
                double len = box.extent(a);
                // lattice points lo + len*(1/3 + j/parts) whose cell fits in the box
                double third = 1.0 / 3.0;
                long jmin = static_cast<long>(std::ceil(-third * parts));
                long jmax = static_cast<long>(std::floor((1.0 - third) * parts - 1.0));
                for (long j = jmin; j <= jmax; ++j) {
                    double f0 = third + static_cast<double>(j) / parts;
                    double f1 = f0 + 1.0 / parts;
                    if (f0 < 0.0 || f1 > 1.0) continue;
                    axes[a].emplace_back(box.lo[a] + len * f0, box.lo[a] + len * f1);
                }
            }
            append_product(axes, n, out);
        }
    }

    if (fam.random_count > 0) {
        std::mt19937_64 gen(fam.seed);
        double side_max = box.min_extent();
        for (std::size_t r = 0; r < fam.random_count; ++r) {
            double side = side_max * (1.0 - unit_uniform(gen));  // in (0, side_max]
            Box b;
            b.dim = n;
            for (int a = 0; a < n; ++a) {
                double lo = box.lo[a] + (box.extent(a) - side) * unit_uniform(gen);
                b.lo[a] = lo;
                b.hi[a] = std::min(lo + side, box.hi[a]);
            }
            out.push_back(b);
        }
    }
    return out;
}

}  // namespace wnl
