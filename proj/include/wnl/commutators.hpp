#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "wnl/operators.hpp"
#include "wnl/weights.hpp"

namespace wnl {

struct ContourConfig {
    double radius = 0.0;
    int nodes = 64;
    int order = 1;
    /// 1 + 2^{n+5} a2; zero when the radius was supplied directly.
    double r_prime = 0.0;
    bool from_rule = false;
    int dim = 1;
    double a2 = 0.0;
    double bmo = 0.0;
};

struct CommutatorResult {
    CommutatorResult(int k, std::string tag, GridFunction out)
        : order(k), method(std::move(tag)), output(std::move(out)) {}

    int order = 1;
    std::string method;  // "recursion", "kernel-power" or "contour"
    GridFunction output;
    /// max |Im| / max |Re| of the contour sum.
    double imaginary_residue = 0.0;
    /// Set by compare(): max |this - reference| / max |reference|.
    std::optional<double> deviation;
};

/// eps = alpha_n / (2 r' bmo) with r' = 1 + 2^{n+5} a2.
ContourConfig radius_rule(int dim, double a2, double bmo, int order = 1, int nodes = 64);

/// T_b^k f = b T_b^{k-1} f - T_b^{k-1}(b f), T_b^0 = T.
CommutatorResult commutator_recursion(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f, int k);
/// Applies the matrix with entries (b_i - b_j)^k A_ij.
CommutatorResult commutator_kernel_power(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f,
                                         int k);
/// (k!/N) sum_m (T_{z_m} f - T f) z_m^{-k}, T_z f = e^{zb} T(e^{-zb} f), z_m = eps e^{2 pi i m/N}.
CommutatorResult contour_commutator(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f,
                                    const ContourConfig& cfg);

/// M_k = diag(b) M_{k-1} - M_{k-1} diag(b), M_0 = A.
Eigen::MatrixXd recursion_matrix(const GridFunction& b, const DiscreteOperator& t, int k);
/// Entries (b_i - b_j)^k A_ij.
Eigen::MatrixXd kernel_power_matrix(const GridFunction& b, const DiscreteOperator& t, int k);
/// The kth-order commutator as an operator, assembled by the kernel-power formula.
DiscreteOperator commutator_operator(const GridFunction& b, const DiscreteOperator& t, int k);

/// max |a - b| / max |b| over entries.
double max_relative_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double max_relative_deviation(const GridFunction& a, const GridFunction& b);
/// Stores the deviation of `result` from `reference` in result.deviation.
void compare(CommutatorResult& result, const CommutatorResult& reference);

/// A_2 products of w e^{2 Re(z_m) b} on the contour circle against 4 a2 beta.
struct CircleA2Report {
    double worst_product = 0.0;
    double ceiling = 0.0;
    double worst_ratio = 0.0;
    Box extremal_cube;
    int extremal_node = 0;
    bool pass = true;
};
CircleA2Report circle_a2_check(const GridFunction& w, const GridFunction& b, const ContourConfig& cfg, double a2,
                               double beta, const CubeFamily& family);

}  // namespace wnl
