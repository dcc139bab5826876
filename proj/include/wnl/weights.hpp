#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wnl/grid_function.hpp"

namespace wnl {

/// Lower-bound estimate of [w]_{A_p} over a finite cube family.
struct ApReport {
    double p = 2.0;
    double estimate = 1.0;
    Box extremal_cube;
    std::string family;
    std::size_t cubes = 0;
};

struct BmoReport {
    double estimate = 0.0;
    Box extremal_cube;
    std::string family;
    std::size_t cubes = 0;
};

/// John-Nirenberg data: alpha_n = 2^{-(n+2)} and the measured exponential average.
struct JNConstants {
    int dim = 1;
    double alpha = 0.125;
    double bmo = 1.0;
    double tilt = 0.125;  // exponent multiplier actually used
    double beta_measured = 1.0;
    Box extremal_cube;
    std::string family;
};

/// A_p estimate of e^{sb} together with the ceiling beta^p from a John-Nirenberg run.
struct ExpBmoReport {
    double s = 0.0;
    double s_limit = 0.0;  // admissible |s| bound (alpha/bmo) min{1, 1/(p-1)}
    ApReport ap;
    double ceiling = 1.0;
    bool pass = true;
};

struct RhiReport {
    double r_w = 1.0;
    double a2 = 1.0;
    double worst_ratio = 1.0;
    Box extremal_cube;
    bool pass = true;
    std::string family;
};

struct CzCube {
    Box box;
    double average = 0.0;
    int generation = 0;  // dyadic generation below the root
};

/// Maximal dyadic subcubes of the root whose average exceeds lambda.
struct CzDecomposition {
    Box root;
    double lambda = 0.0;
    double root_average = 0.0;
    std::vector<CzCube> cubes;
    /// Cells selected at the grid's finest level (no finer resolution available).
    std::vector<std::size_t> unresolved;
};

struct EqMeasureReport {
    double fraction = 0.0;       // |E_Q| / |Q|
    double dual_fraction = 1.0;  // |{w > w_Q / (2 a2)}| / |Q|
    double threshold = 0.0;      // w_Q / (2 a2)
    bool pass = true;
};

/// w({w > lambda}) <= 2^{n+1} lambda |{w > lambda / (2 a2)}| on the root cube.
struct LevelSetReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

/// 2^{-(n+2)}
double jn_alpha(int dim);
/// 1 + 1 / (2^{n+5} a2)
double rhi_exponent(int dim, double a2);

ApReport ap_constant(const GridFunction& w, double p, const CubeFamily& family);
ApReport ap_constant(const GridFunction& w, double p, const std::vector<Box>& cubes, const std::string& family);
/// A_p product on a single cube.
double ap_product(const GridFunction& w, const GridFunction& dual, double p, const Box& q);

double mean_oscillation(const GridFunction& b, const Box& q);
BmoReport bmo_norm(const GridFunction& b, const CubeFamily& family);

/// (1/|Q|) int_Q exp(t |b - b_Q|); throws when the exponential overflows.
double exp_oscillation(const GridFunction& b, const Box& q, double t);
/// Supremum of the exponential average at tilt tilt_factor * alpha_n / bmo.
JNConstants jn_check(const GridFunction& b, const CubeFamily& family, double bmo, double tilt_factor = 1.0);

/// e^{s b}; exact power weight when b is a log-of-modulus provider.
GridFunction exp_weight(const GridFunction& b, double s);
ApReport exp_bmo_a2(const GridFunction& b, double s, const CubeFamily& family);
ApReport exp_bmo_ap(const GridFunction& b, double s, double p, const CubeFamily& family);
/// Compares [e^{sb}]_{A_p} with beta^p; throws if |s| exceeds the admissible bound.
ExpBmoReport exp_bmo_check(const GridFunction& b, double s, double p, const CubeFamily& family,
                           const JNConstants& jn);

RhiReport rhi_check(const GridFunction& w, const CubeFamily& family, double a2);
/// LHS / RHS of the reverse Hoelder inequality at exponent r on one cube.
double rhi_ratio(const GridFunction& w, const GridFunction& w_r, double r, const Box& q);

CzDecomposition cz_decompose(const GridFunction& w, const Box& q, double lambda);
EqMeasureReport eq_measure_check(const GridFunction& w, const Box& q, double a2);
LevelSetReport level_set_check(const GridFunction& w, const Box& q, double lambda, double a2);

/// Hoelder-chain check: max over cubes of
/// (avg w e^{sb})(avg w^{-1} e^{-sb}) / (4 a2 [e^{s r' b}]_{A_2}^{1/r'}), r' the dual of r_w.
struct HolderChainReport {
    double worst_ratio = 0.0;
    Box extremal_cube;
    double ceiling = 0.0;
    bool pass = true;
};
HolderChainReport holder_chain_check(const GridFunction& w, const GridFunction& b, double s, double a2,
                                     const CubeFamily& family);

}  // namespace wnl
