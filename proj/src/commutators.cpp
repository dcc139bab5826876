#include "wnl/commutators.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "wnl/error.hpp"
#include "wnl/parallel.hpp"

namespace wnl {

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

constexpr long double kPi = 3.141592653589793238462643383279502884L;
// Largest |z b| accepted inside exp before the output can no longer be represented.
constexpr double kExpLimit = 700.0;

Eigen::VectorXd to_vector(const GridFunction& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

GridFunction from_vector(const GridPtr& g, const Eigen::VectorXd& v) {
    return GridFunction(g, std::vector<double>(v.data(), v.data() + v.size()));
}

void check_inputs(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f, int k) {
    require_same_grid(b.grid(), *t.grid);
    require_same_grid(f.grid(), *t.grid);
    if (k < 0) throw UsageError("commutator order must be >= 0");
}

Eigen::VectorXd recurse(const Eigen::VectorXd& b, const Eigen::MatrixXd& a, const Eigen::VectorXd& f, int k) {
    if (k == 0) return a * f;
    Eigen::VectorXd bf = b.cwiseProduct(f);
    return b.cwiseProduct(recurse(b, a, f, k - 1)) - recurse(b, a, bf, k - 1);
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

}  // namespace

ContourConfig radius_rule(int dim, double a2, double bmo, int order, int nodes) {
    if (!(a2 >= 1.0)) throw UsageError("a2 must be >= 1");
    if (!(bmo > 0.0)) throw UsageError("bmo must be positive");
    ContourConfig c;
    c.dim = dim;
    c.a2 = a2;
    c.bmo = bmo;
    c.order = order;
    c.nodes = nodes;
    c.from_rule = true;
    c.r_prime = 1.0 + std::ldexp(a2, dim + 5);
    double alpha = jn_alpha(dim);
    c.radius = alpha / (2.0 * c.r_prime * bmo);
    // |2 Re z r'| <= 2 eps r' = alpha / bmo on the whole circle
    if (2.0 * c.radius * c.r_prime * bmo > alpha * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))
        throw Error("radius rule violates the exponential constraint");
    return c;
}

Eigen::MatrixXd recursion_matrix(const GridFunction& b, const DiscreteOperator& t, int k) {
    require_same_grid(b.grid(), *t.grid);
    Eigen::VectorXd bv = to_vector(b);
    Eigen::MatrixXd m = t.matrix;
    for (int s = 0; s < k; ++s) m = bv.asDiagonal() * m - m * bv.asDiagonal();
    return m;
}

Eigen::MatrixXd kernel_power_matrix(const GridFunction& b, const DiscreteOperator& t, int k) {
    require_same_grid(b.grid(), *t.grid);
    const Eigen::Index n = t.matrix.rows();
    Eigen::MatrixXd m(n, n);
    parallel_blocks(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (Eigen::Index j = 0; j < n; ++j)
            for (auto i = static_cast<Eigen::Index>(lo); i < static_cast<Eigen::Index>(hi); ++i) {
                double d = b[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)];
                double p = 1.0;
                for (int s = 0; s < k; ++s) p *= d;
                m(i, j) = p * t.matrix(i, j);
            }
    });
    return m;
}

DiscreteOperator commutator_operator(const GridFunction& b, const DiscreteOperator& t, int k) {
    DiscreteOperator op;
    op.grid = t.grid;
    op.matrix = kernel_power_matrix(b, t, k);
    op.description = "order-" + std::to_string(k) + " commutator of " + t.description;
    op.principal_value = t.principal_value;
    return op;
}

CommutatorResult commutator_recursion(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f,
                                      int k) {
    check_inputs(b, t, f, k);
    Eigen::VectorXd out = recurse(to_vector(b), t.matrix, to_vector(f), k);
    return {k, "recursion", from_vector(t.grid, out)};
}

CommutatorResult commutator_kernel_power(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f,
                                         int k) {
    check_inputs(b, t, f, k);
    Eigen::VectorXd out = kernel_power_matrix(b, t, k) * to_vector(f);
    return {k, "kernel-power", from_vector(t.grid, out)};
}

CommutatorResult contour_commutator(const GridFunction& b, const DiscreteOperator& t, const GridFunction& f,
                                    const ContourConfig& cfg) {
    const int k = cfg.order;
    check_inputs(b, t, f, k);
    if (k < 1) throw UsageError("contour order must be >= 1");
    if (!(cfg.radius > 0.0)) throw UsageError("contour radius must be positive");
    if (cfg.nodes < 2 * (k + 1)) throw UsageError("contour needs at least 2(k+1) nodes");

    const auto n = static_cast<Eigen::Index>(t.size());
    const Grid& g = *t.grid;
    // commutators do not see constants; centring keeps e^{zb} near 1
    long double mass = 0.0L, total = 0.0L;
    for (std::size_t i = 0; i < b.size(); ++i) {
        total += static_cast<long double>(b[i]) * g.measure(i);
        mass += g.measure(i);
    }
    LVector bc(n), fv(n);
    long double bmax = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
        bc[i] = static_cast<long double>(b[static_cast<std::size_t>(i)]) - total / mass;
        fv[i] = f[static_cast<std::size_t>(i)];
        bmax = std::max(bmax, std::abs(bc[i]));
    }
    if (cfg.radius * static_cast<double>(bmax) > kExpLimit) {
        std::ostringstream os;
        os << "e^{zb} overflows: radius * max|b - mean| = " << cfg.radius * static_cast<double>(bmax)
           << "; use radius_rule to choose the radius";
        throw Error(os.str());
    }
    LMatrix a = t.matrix.cast<long double>();
    LVector t0 = a * fv;

    const int nodes = cfg.nodes;
    std::vector<LVector> re(nodes), im(nodes);
    parallel_for(static_cast<std::size_t>(nodes), [&](std::size_t m) {
        long double theta = 2.0L * kPi * static_cast<long double>(m) / nodes;
        std::complex<long double> z = std::polar(static_cast<long double>(cfg.radius), theta);
        LVector gr(n), gi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::complex<long double> e = std::exp(-z * bc[i]) * fv[i];
            gr[i] = e.real();
            gi[i] = e.imag();
        }
        LVector ar = a * gr, ai = a * gi;
        std::complex<long double> zk = std::pow(z, -k);
        LVector r(n), s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::complex<long double> tz = std::exp(z * bc[i]) * std::complex<long double>(ar[i], ai[i]) - t0[i];
            std::complex<long double> term = tz * zk;
            r[i] = term.real();
            s[i] = term.imag();
        }
        re[m] = std::move(r);
        im[m] = std::move(s);
    }, 1);

    LVector sr = LVector::Zero(n), si = LVector::Zero(n);
    for (int m = 0; m < nodes; ++m) {
        sr += re[m];
        si += im[m];
    }
    long double scale = static_cast<long double>(factorial(k)) / nodes;
    Eigen::VectorXd out(n);
    double max_re = 0.0, max_im = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = static_cast<double>(scale * sr[i]);
        if (!std::isfinite(out[i])) throw Error("contour sum overflowed; use radius_rule to choose the radius");
        max_re = std::max(max_re, std::abs(out[i]));
        max_im = std::max(max_im, static_cast<double>(std::abs(scale * si[i])));
    }
    CommutatorResult res{k, "contour", from_vector(t.grid, out)};
    res.imaginary_residue = max_re > 0.0 ? max_im / max_re : max_im;
    return res;
}

double max_relative_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("shape mismatch");
    double scale = b.cwiseAbs().maxCoeff();
    double diff = (a - b).cwiseAbs().maxCoeff();
    return scale > 0.0 ? diff / scale : diff;
}

double max_relative_deviation(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid());
    return max_relative_deviation(Eigen::MatrixXd(to_vector(a)), Eigen::MatrixXd(to_vector(b)));
}

void compare(CommutatorResult& result, const CommutatorResult& reference) {
    result.deviation = max_relative_deviation(result.output, reference.output);
}

CircleA2Report circle_a2_check(const GridFunction& w, const GridFunction& b, const ContourConfig& cfg, double a2,
                               double beta, const CubeFamily& family) {
    require_same_grid(w.grid(), b.grid());
    if (cfg.nodes < 1 || !(cfg.radius > 0.0)) throw UsageError("invalid contour configuration");
    CircleA2Report rep;
    rep.ceiling = 4.0 * a2 * beta;
    auto cubes = enumerate_cubes(family);
    rep.worst_product = 0.0;
    for (int m = 0; m < cfg.nodes; ++m) {
        long double theta = 2.0L * kPi * static_cast<long double>(m) / cfg.nodes;
        double s = static_cast<double>(2.0L * cfg.radius * std::cos(theta));
        GridFunction wz = w.times(exp_weight(b, s));
        ApReport ap = ap_constant(wz, 2.0, cubes, family.describe());
        if (ap.estimate > rep.worst_product) {
            rep.worst_product = ap.estimate;
            rep.extremal_cube = ap.extremal_cube;
            rep.extremal_node = m;
        }
    }
    rep.worst_ratio = rep.worst_product / rep.ceiling;
    rep.pass = rep.worst_ratio <= 1.0;
    return rep;
}

}  // namespace wnl
