#include "wnl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dyadic.hpp"
#include "wnl/error.hpp"
#include "wnl/parallel.hpp"

namespace wnl {

namespace {

Eigen::VectorXd to_vector(const GridFunction& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

void require_operator_grid(const DiscreteOperator& t, const GridFunction& f) {
    require_same_grid(*t.grid, f.grid());
}

}  // namespace

GridFunction DiscreteOperator::apply(const GridFunction& f) const {
    require_operator_grid(*this, f);
    Eigen::VectorXd out = matrix * to_vector(f);
    return GridFunction(grid, std::vector<double>(out.data(), out.data() + out.size()));
}

DiscreteOperator DiscreteOperator::scaled(double c) const {
    DiscreteOperator out = *this;
    out.matrix *= c;
    return out;
}

std::size_t max_operator_cells(int dim) { return dim == 1 ? std::size_t{1} << 14 : std::size_t{1} << 12; }

DiscreteOperator kernel_operator(GridPtr grid, const Kernel& kernel, bool pv, std::string description,
                                 const std::function<double(const Point&)>& diagonal) {
    if (!grid) throw UsageError("null grid");
    const std::size_t n = grid->size();
    if (n > max_operator_cells(grid->dim())) {
        std::ostringstream os;
        os << "grid has " << n << " cells; dense operators allow at most " << max_operator_cells(grid->dim());
        throw UsageError(os.str());
    }
    DiscreteOperator op;
    op.grid = grid;
    op.description = std::move(description);
    op.principal_value = pv;
    op.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Grid& g = *grid;
    parallel_blocks(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Point& x = g.midpoint(i);
            for (std::size_t j = 0; j < n; ++j) {
                double v;
                if (i == j) {
                    if (pv) v = 0.0;
                    else v = (diagonal ? diagonal(x) : kernel(x, x)) * g.measure(j);
                } else {
                    v = kernel(x, g.midpoint(j)) * g.measure(j);
                }
                if (!std::isfinite(v)) {
                    std::ostringstream os;
                    os << "kernel is not finite at cells (" << i << ", " << j << ")";
                    throw Error(os.str());
                }
                op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            }
        }
    }, 16);
    return op;
}

Kernel hilbert_kernel() {
    return [](const Point& x, const Point& y) { return 1.0 / (x[0] - y[0]); };
}

Kernel riesz_kernel(int dim, int j) {
    if (dim < 2) throw UsageError("Riesz transforms need dimension >= 2");
    if (j < 1 || j > dim) throw UsageError("Riesz index j must lie in 1..n");
    const int a = j - 1;
    return [dim, a](const Point& x, const Point& y) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += (x[d] - y[d]) * (x[d] - y[d]);
        double denom = dim == 2 ? r2 * std::sqrt(r2) : r2 * r2;
        return (x[a] - y[a]) / denom;
    };
}

DiscreteOperator hilbert(GridPtr grid) {
    if (!grid || grid->dim() != 1) throw UsageError("the Hilbert transform needs a 1-D grid");
    return kernel_operator(std::move(grid), hilbert_kernel(), true, "hilbert: 1/(x-y), zero diagonal");
}

DiscreteOperator riesz(GridPtr grid, int j) {
    if (!grid) throw UsageError("null grid");
    Kernel k = riesz_kernel(grid->dim(), j);
    return kernel_operator(std::move(grid), k, true,
                           "riesz_" + std::to_string(j) + ": (x_j-y_j)/|x-y|^{n+1}, zero diagonal");
}

DiscreteOperator identity_operator(GridPtr grid) {
    if (!grid) throw UsageError("null grid");
    DiscreteOperator op;
    op.grid = grid;
    op.description = "identity";
    op.principal_value = false;
    auto n = static_cast<Eigen::Index>(grid->size());
    op.matrix = Eigen::MatrixXd::Identity(n, n);
    return op;
}

GridFunction dyadic_maximal(const GridFunction& f, const Box& q) {
    detail::DyadicPyramid pyr(f.grid(), q, [&](std::size_t i) { return std::abs(f[i]); });
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t c = 0; c < f.size(); ++c) {
        detail::Index idx{};
        if (!pyr.local_index(c, idx)) continue;
        double best = 0.0;
        for (int k = 0; k <= pyr.depth(); ++k) {
            detail::Index anc{};
            for (int a = 0; a < pyr.dim(); ++a) anc[a] = idx[a] >> (pyr.depth() - k);
            best = std::max(best, pyr.average(k, pyr.index_of(k, anc)));
        }
        out[c] = best;
    }
    return GridFunction(f.grid_ptr(), std::move(out));
}

double discrete_lp_norm(const Eigen::VectorXd& values, const GridFunction& w, double p) {
    const Grid& g = w.grid();
    // a_i = |v_i| (w_i m_i)^{1/p} with the factors rooted separately, so graded cells do not underflow
    Eigen::VectorXd a(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        auto u = static_cast<std::size_t>(i);
        double root = p == 2.0 ? std::sqrt(w[u]) * std::sqrt(g.measure(u))
                               : std::pow(w[u], 1.0 / p) * std::pow(g.measure(u), 1.0 / p);
        a[i] = std::abs(values[i]) * root;
    }
    double peak = a.maxCoeff();
    if (!(peak > 0.0)) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double t = a[i] / peak;
        s += p == 2.0 ? t * t : std::pow(t, p);
    }
    return peak * (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

namespace {

NormEstimate spectral_norm(const DiscreteOperator& t, const GridFunction& w, const NormOptions& opt) {
    const Grid& g = *t.grid;
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = std::sqrt(w[static_cast<std::size_t>(i)]) * std::sqrt(g.measure(static_cast<std::size_t>(i)));
    NormEstimate est;
    est.p = 2.0;
    est.method = "similarity-spectral";
    est.converged = false;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double sigma = 0.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Eigen::VectorXd u = s.cwiseProduct(t.matrix * v.cwiseQuotient(s));
        double next = u.norm();
        est.iterations = it;
        if (!(next > 0.0)) {
            sigma = 0.0;
            est.converged = true;
            break;
        }
        Eigen::VectorXd y = (t.matrix.transpose() * s.cwiseProduct(u)).cwiseQuotient(s);
        double ny = y.norm();
        bool done = std::abs(next - sigma) <= opt.tolerance * next;
        sigma = next;
        if (!(ny > 0.0)) {
            est.converged = true;
            break;
        }
        v = y / ny;
        if (done) {
            est.converged = true;
            break;
        }
    }
    est.value = sigma;
    if (!est.converged) est.warnings.push_back("power iteration did not reach the tolerance");
    return est;
}

double schur_ceiling(const DiscreteOperator& t, const GridFunction& w, double p) {
    const Grid& g = *t.grid;
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
        s[i] = std::pow(w[static_cast<std::size_t>(i)], 1.0 / p) * std::pow(g.measure(static_cast<std::size_t>(i)), 1.0 / p);
    Eigen::MatrixXd c = s.asDiagonal() * t.matrix.cwiseAbs() * s.cwiseInverse().asDiagonal();
    double col = c.colwise().sum().maxCoeff();
    double row = c.rowwise().sum().maxCoeff();
    return std::pow(col, 1.0 / p) * std::pow(row, 1.0 - 1.0 / p);
}

}  // namespace

NormEstimate weighted_norm(const DiscreteOperator& t, const GridFunction& w, double p,
                           const std::vector<Witness>& witnesses, const NormOptions& options) {
    require_operator_grid(t, w);
    if (!w.is_weight()) throw UsageError("weight must be positive on every cell");
    if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("p must be finite and >= 1");
    if (p == 2.0) return spectral_norm(t, w, options);

    NormEstimate est;
    est.p = p;
    est.method = "witness-lower-bound";
    est.ceiling = schur_ceiling(t, w, p);
    std::mt19937_64 gen(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto consider = [&](const std::string& id, const Eigen::VectorXd& f) {
        double nf = discrete_lp_norm(f, w, p);
        if (!(nf > 0.0)) {
            est.warnings.push_back("witness " + id + " has zero norm; skipped");
            return false;
        }
        double ratio = discrete_lp_norm(t.matrix * f, w, p) / nf;
        if (ratio > est.value) {
            est.value = ratio;
            est.witness_id = id;
        }
        return true;
    };
    for (const auto& wit : witnesses) {
        require_operator_grid(t, wit.f);
        Eigen::VectorXd f = to_vector(wit.f);
        if (!consider(wit.id, f)) continue;
        for (int k = 0; k < options.perturbations; ++k) {
            Eigen::VectorXd g = f;
            for (Eigen::Index i = 0; i < g.size(); ++i) g[i] *= 1.0 + options.perturbation_size * unit(gen);
            consider(wit.id + "~" + std::to_string(k + 1), g);
        }
    }
    if (est.witness_id.empty()) est.warnings.push_back("no usable witness");
    return est;
}

}  // namespace wnl
