#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wnl/grid_function.hpp"

namespace wnl {

/// Dense cell-by-cell matrix; column j already carries the quadrature mass of cell j.
struct DiscreteOperator {
    GridPtr grid;
    Eigen::MatrixXd matrix;
    std::string description;
    bool principal_value = true;

    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
    GridFunction apply(const GridFunction& f) const;
    DiscreteOperator scaled(double c) const;
};

using Kernel = std::function<double(const Point& x, const Point& y)>;

/// Largest cell count accepted for dense assembly in dimension n.
std::size_t max_operator_cells(int dim);

/// A[i][j] = K(x_i, x_j) m_j off the diagonal. The diagonal is 0 for principal-value kernels,
/// otherwise diagonal(x_i) m_i (or K(x_i, x_i) m_i when no diagonal function is given).
DiscreteOperator kernel_operator(GridPtr grid, const Kernel& kernel, bool pv, std::string description,
                                 const std::function<double(const Point&)>& diagonal = {});
/// 1/(x - y), no 1/pi factor.
Kernel hilbert_kernel();
/// (x_j - y_j)/|x - y|^{n+1} with 1-based j, no dimensional constant.
Kernel riesz_kernel(int dim, int j);

DiscreteOperator hilbert(GridPtr grid);
DiscreteOperator riesz(GridPtr grid, int j);
DiscreteOperator identity_operator(GridPtr grid);

/// Dyadic maximal function of |f| restricted to a dyadic cube Q of a uniform grid;
/// zero on cells outside Q.
GridFunction dyadic_maximal(const GridFunction& f, const Box& q);

struct Witness {
    std::string id;
    GridFunction f;
};

struct NormOptions {
    double tolerance = 1e-10;
    int max_iterations = 10000;
    /// Random multiplicative perturbations tried per witness (p != 2).
    int perturbations = 0;
    double perturbation_size = 0.1;
    std::uint64_t seed = 0;
};

struct NormEstimate {
    double p = 2.0;
    std::string method;  // "similarity-spectral" or "witness-lower-bound"
    double value = 0.0;
    std::string witness_id;
    /// Schur-test upper bound of the same discrete operator (witness method only).
    double ceiling = 0.0;
    std::vector<std::string> warnings;
    int iterations = 0;
    bool converged = true;
};

/// Discrete L^p(w) operator norm: exact largest singular value for p = 2 (witnesses unused),
/// lower bound over witnesses otherwise.
NormEstimate weighted_norm(const DiscreteOperator& t, const GridFunction& w, double p,
                           const std::vector<Witness>& witnesses = {}, const NormOptions& options = {});

/// Cell-sampled L^p(w) norm, computed with max-rescaling so powers of two scale exactly.
double discrete_lp_norm(const Eigen::VectorXd& values, const GridFunction& w, double p);

}  // namespace wnl
