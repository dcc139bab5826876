#pragma once

// Exact and high-accuracy box integrals of |x|^a and log|x|.

#include <span>
#include <utility>
#include <vector>

#include "wnl/grid.hpp"

namespace wnl::detail {

/// Gauss-Legendre rule mapped to [0,1]; weights sum to one.
struct UnitRule {
    std::vector<double> x;
    std::vector<double> w;
};
const UnitRule& gauss20();
const UnitRule& gauss15();

/// Integral of |x|^a over [lo, hi]; +inf when the origin makes it diverge.
double power_integral_1d(double lo, double hi, double a);
/// Mean of |x|^a over [lo, hi], computed without forming the integral.
double power_mean_1d(double lo, double hi, double a);
/// Integral of log|x| over [lo, hi].
double log_integral_1d(double lo, double hi);
/// Integral of |log|x| - c| over [lo, hi].
double log_abs_dev_integral_1d(double lo, double hi, double c);
/// Integral of exp(t |sigma log|x| + o - c|) over [lo, hi], t >= 0.
double log_exp_dev_integral_1d(double lo, double hi, double sigma, double o, double c, double t);

/// Integral of |x|^a over the box (Euclidean norm, any dimension 1..3).
double radial_power_integral(const Box& q, double a);
/// Integral of log|x| over the box.
double radial_log_integral(const Box& q);

}  // namespace wnl::detail
