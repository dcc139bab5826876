#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wnl/grid.hpp"

namespace wnl {

struct ExperimentParams {
    int dim = 1;
    double p = 2.0;
    int k = 1;
    /// Strictly decreasing, each in (0, 1).
    std::vector<double> deltas{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    /// Graded 1-D grids: ratio q, cells per layer, and the depth target q^layers <= grading_tol^{1/delta}.
    double grading_ratio = 0.5;
    int subdivisions = 2;
    double grading_tol = 1e-3;
    /// Fixed layer count; 0 derives it from grading_tol.
    int layers = 0;
    /// Pointwise checks use cells with (innermost edge / x)^delta at most this value.
    double resolved_fraction = 0.05;
    /// Uniform level for n >= 2 grids.
    int level = 5;
    int family_depth = 10;
    std::size_t family_random = 10000;
    std::uint64_t seed = 0;
    /// Slope tolerance.
    double tolerance = 0.1;
    /// "hilbert" or "riesz:j".
    std::string op = "hilbert";
    /// Riesz direction (1-based).
    int j = 1;
    std::size_t mc_samples = 1000000;
    int sample_points = 12;
    double r_max = 1e6;
    /// Random perturbations per witness for p != 2 growth runs.
    int perturbations = 4;

    void validate() const;
};

struct DeltaRecord {
    double delta = 0.0;
    double a2_estimate = 0.0;  // A_p estimate of the sweep weight
    double norm_ratio = 0.0;
    double pointwise_min_margin = 0.0;
    std::size_t cells = 0;
    /// Norm of the test function (exact where available).
    double f_norm = 0.0;
    std::size_t pointwise_samples = 0;
    nlohmann::json grid;
    std::string family;
};

struct SlopeFit {
    std::vector<double> x;  // log of the A_p estimate
    std::vector<double> y;  // log of the measured ratio
    double slope = 0.0;
    double intercept = 0.0;
    double residual_max = 0.0;
    double predicted = 0.0;
    bool lower_bound = false;
    bool pass = false;
};

/// Ordinary least squares on (x, y); needs at least 4 points.
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ExperimentRecord {
    std::string experiment;
    nlohmann::json params;
    std::vector<DeltaRecord> per_delta;
    SlopeFit fit;
    bool pass = false;
    std::uint64_t seed = 0;
    nlohmann::json versions;
    /// Experiment-specific diagnostics.
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json params_to_json(const ExperimentParams& p);
ExperimentParams params_from_json(const nlohmann::json& j);
nlohmann::json versions_json();

/// Layer count so that the innermost cell length q^layers satisfies (q^layers)^delta <= tol.
int graded_layers(double delta, double ratio, double tol);
/// 1-D graded grid on [0,1] toward 0 for one sweep point; rejects unresolvable delta.
GridPtr sweep_grid(const ExperimentParams& params, double delta);

/// [b,H]f(x) for b = log|x|, f = x^{delta-1} on (0,1), by adaptive quadrature.
double hilbert_commutator_exact(double x, double delta);

ExperimentRecord hilbert_sharpness(const ExperimentParams& params);

/// Surface measure of the positive orthant of S^{n-1} by seeded Monte Carlo.
struct OrthantMeasure {
    double value = 0.0;
    double relative_error = 0.0;
};
OrthantMeasure orthant_sphere_measure(int dim, std::size_t samples, std::uint64_t seed);

/// |R^k_{j,b} f(x)| for f = |y|^{delta-n} on E = (0,1)^n cap B(0,1), b = log|x|, x in Omega.
double riesz_commutator_value(const Point& x, int dim, int j, int k, double delta);
/// k! c |x_j| / (delta^{k+1} (|x|+1)^{n+1}).
double riesz_minorant(const Point& x, int dim, int j, int k, double delta, double c);
/// Lower bound for the L^p(w; Omega) norm of the minorant, w = |x|^{(n-delta)(p-1)}.
double riesz_minorant_norm(int dim, int j, int k, double delta, double p, double c, double r_max);

ExperimentRecord riesz_sharpness(const ExperimentParams& params);

ExperimentRecord growth_exponent(const ExperimentParams& params);

struct UpperBoundModel {
    double r = 1.0;
    double a0 = 1.0;
    double c_n = 4.0;
    double gamma_n = 4.0;
    int k = 1;
};

struct PredictedConstant {
    /// a_k a2^{r+k} with a_k = c^k a0 gamma^{kr+(k-2)(k-1)/2}.
    double induction = 0.0;
    /// c^k k! a0 gamma^r a2^r a2^k.
    double corollary = 0.0;
    /// Closed-form solution of a_k = c a_{k-1} gamma^{r+k-1}: exponent kr + k(k-1)/2.
    double recurrence = 0.0;
    std::string smaller;  // "induction", "corollary" or "equal"
};
PredictedConstant predicted_constant(const UpperBoundModel& model, double a2);

/// c_n = C 2^{2n} and gamma_n = 4 beta.
UpperBoundModel default_model(int dim, double beta, double big_c = 1.0, double r = 1.0, double a0 = 1.0, int k = 1);

nlohmann::json record_to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const nlohmann::json& j);
/// RFC-4180 CSV with one row per delta.
std::string record_to_csv(const ExperimentRecord& r);

}  // namespace wnl
