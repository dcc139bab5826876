#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wnl/grid.hpp"
#include "wnl/provider.hpp"

namespace wnl {

/// Cell-indexed values on a grid, optionally backed by an analytic provider.
/// When a provider is present each cell value is the provider's exact cell mean.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::vector<double> values);
    GridFunction(GridPtr grid, const Provider& provider);

    static GridFunction constant(GridPtr grid, double c);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::optional<Provider>& provider() const { return provider_; }

    /// All cell values strictly positive and finite.
    bool is_weight() const;

    /// Integral over q intersected with the grid box.
    double integral(const Box& q) const;
    /// Mean over q intersected with the grid box; throws "empty cube" for zero volume.
    double mean(const Box& q) const;

    GridFunction scaled(double c) const;
    GridFunction shifted(double c) const;
    /// |f|^r. Uses the provider when closed under powers; |(|f|^r)|^{1/r} returns f itself.
    GridFunction abs_pow(double r) const;
    GridFunction reciprocal() const { return abs_pow(-1.0); }
    GridFunction times(const GridFunction& other) const;
    /// Cell-wise map; drops the provider.
    GridFunction map(const std::function<double(double)>& fn) const;

    /// Same values with the provider removed (cell-value surrogate).
    GridFunction sampled() const;

private:
    void build_cumulative();
    double cumulative_at(const Point& x) const;
    double cell_sum(const Box& q) const;

    GridPtr grid_;
    std::vector<double> values_;
    std::optional<Provider> provider_;
    std::vector<double> cumulative_;
    // this == |source_|^source_power_ when set
    std::shared_ptr<const GridFunction> source_;
    double source_power_ = 1.0;
};

void require_same_grid(const Grid& a, const Grid& b);

/// Mean of f over Q; see GridFunction::mean.
double cell_average(const GridFunction& f, const Box& q);

/// (sum |f|^p w m)^{1/p}; exact when |f|^p w composes analytically.
double lp_norm(const GridFunction& f, const GridFunction& w, double p);

struct LpNormReport {
    double value = 0.0;        // provider-backed when possible
    double sampled = 0.0;      // from cell values only
    double discrepancy = 0.0;  // |value - sampled|
};
LpNormReport lp_norm_report(const GridFunction& f, const GridFunction& w, double p);

}  // namespace wnl
