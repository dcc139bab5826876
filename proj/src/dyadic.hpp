#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "wnl/grid.hpp"

namespace wnl::detail {

using Index = std::array<std::size_t, kMaxDim>;

/// Sums of cell values over the dyadic subcubes of a cube made of 2^depth cells per axis
/// of a uniform grid. Generation k has 2^k subcubes per axis, stored row-major.
class DyadicPyramid {
public:
    DyadicPyramid(const Grid& grid, const Box& root, const std::function<double(std::size_t)>& value);

    int depth() const { return depth_; }
    int dim() const { return dim_; }
    std::size_t count(int k) const;
    std::size_t index_of(int k, const Index& idx) const;
    Index unindex(int k, std::size_t i) const;
    /// Grid cell index of the finest-generation subcube idx.
    std::size_t cell_of(const Index& idx) const;
    /// Local finest-generation index of a grid cell; false when the cell lies outside the root.
    bool local_index(std::size_t cell, Index& idx) const;
    /// Average over subcube i of generation k; an exact power-of-two rescaling of the sum.
    double average(int k, std::size_t i) const;
    Box box(int k, std::size_t i) const;
    /// Children of subcube i in lexicographic order.
    std::vector<std::size_t> children(int k, std::size_t i) const;

private:
    const Grid& grid_;
    int dim_ = 1;
    int depth_ = 0;
    Index start_{};
    std::vector<std::vector<double>> sums_;
};

}  // namespace wnl::detail
