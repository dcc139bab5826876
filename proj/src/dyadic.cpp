#include "dyadic.hpp"

#include <cmath>

#include "wnl/error.hpp"

namespace wnl::detail {

DyadicPyramid::DyadicPyramid(const Grid& grid, const Box& root, const std::function<double(std::size_t)>& value)
    : grid_(grid), dim_(grid.dim()) {
    if (grid.mesh().kind != MeshSpec::Kind::uniform) throw UsageError("dyadic cubes need a uniform grid");
    if (root.dim != dim_) throw UsageError("cube dimension does not match the grid");
    std::size_t span = 0;
    for (int a = 0; a < dim_; ++a) {
        auto e = grid.edges(a);
        double h = e[1] - e[0];
        double fs = (root.lo[a] - e[0]) / h, fe = (root.hi[a] - e[0]) / h;
        long s = std::lround(fs), t = std::lround(fe);
        constexpr double tol = 1e-9;
        if (std::abs(fs - static_cast<double>(s)) > tol || std::abs(fe - static_cast<double>(t)) > tol || s < 0 ||
            t > static_cast<long>(grid.axis_cells(a)) || t <= s)
            throw UsageError("root cube must be a union of grid cells");
        auto len = static_cast<std::size_t>(t - s);
        if (a == 0) span = len;
        if (len != span || (len & (len - 1)) != 0 || static_cast<std::size_t>(s) % len != 0)
            throw UsageError("root cube must be a dyadic cube of the grid");
        start_[a] = static_cast<std::size_t>(s);
    }
    while ((std::size_t{1} << depth_) < span) ++depth_;

    sums_.resize(depth_ + 1);
    sums_[depth_].resize(count(depth_));
    for (std::size_t i = 0; i < sums_[depth_].size(); ++i) sums_[depth_][i] = value(cell_of(unindex(depth_, i)));
    for (int k = depth_ - 1; k >= 0; --k) {
        sums_[k].assign(count(k), 0.0);
        for (std::size_t i = 0; i < sums_[k].size(); ++i) {
            double s = 0.0;
            for (std::size_t c : children(k, i)) s += sums_[k + 1][c];
            sums_[k][i] = s;
        }
    }
}

std::size_t DyadicPyramid::count(int k) const { return std::size_t{1} << (k * dim_); }

std::size_t DyadicPyramid::index_of(int k, const Index& idx) const {
    std::size_t i = 0;
    for (int a = 0; a < dim_; ++a) i = (i << k) + idx[a];
    return i;
}

Index DyadicPyramid::unindex(int k, std::size_t i) const {
    Index idx{};
    std::size_t mask = (std::size_t{1} << k) - 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = i & mask;
        i >>= k;
    }
    return idx;
}

std::size_t DyadicPyramid::cell_of(const Index& idx) const {
    Index c{};
    for (int a = 0; a < dim_; ++a) c[a] = start_[a] + idx[a];
    return grid_.flatten(c);
}

bool DyadicPyramid::local_index(std::size_t cell, Index& idx) const {
    Index c = grid_.unflatten(cell);
    std::size_t side = std::size_t{1} << depth_;
    for (int a = 0; a < dim_; ++a) {
        if (c[a] < start_[a] || c[a] >= start_[a] + side) return false;
        idx[a] = c[a] - start_[a];
    }
    return true;
}

double DyadicPyramid::average(int k, std::size_t i) const { return std::ldexp(sums_[k][i], -dim_ * (depth_ - k)); }

Box DyadicPyramid::box(int k, std::size_t i) const {
    Index idx = unindex(k, i);
    std::size_t cells = std::size_t{1} << (depth_ - k);
    Box b;
    b.dim = dim_;
    for (int a = 0; a < dim_; ++a) {
        auto e = grid_.edges(a);
        b.lo[a] = e[start_[a] + idx[a] * cells];
        b.hi[a] = e[start_[a] + (idx[a] + 1) * cells];
    }
    return b;
}

std::vector<std::size_t> DyadicPyramid::children(int k, std::size_t i) const {
    Index idx = unindex(k, i);
    std::vector<std::size_t> out;
    out.reserve(std::size_t{1} << dim_);
    for (int child = 0; child < (1 << dim_); ++child) {
        Index c{};
        for (int a = 0; a < dim_; ++a) c[a] = 2 * idx[a] + ((child >> (dim_ - 1 - a)) & 1);
        out.push_back(index_of(k + 1, c));
    }
    return out;
}

}  // namespace wnl::detail
