#include "wnl/weights.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dyadic.hpp"
#include "wnl/error.hpp"
#include "wnl/parallel.hpp"

namespace wnl {

namespace {

void require_weight(const GridFunction& w) {
    if (!w.is_weight()) throw UsageError("weight must be positive on every cell");
}

// Clipped cube and its volume; throws for cubes outside the grid box.
Box clipped(const GridFunction& f, const Box& q) {
    Box c = intersect(q, f.grid().box());
    if (!(c.volume() > 0.0)) throw UsageError("empty cube");
    return c;
}

std::string describe_cubes(const std::string& family) { return family.empty() ? "explicit cube list" : family; }

}  // namespace

double jn_alpha(int dim) { return std::ldexp(1.0, -(dim + 2)); }

double rhi_exponent(int dim, double a2) { return 1.0 + 1.0 / (std::ldexp(1.0, dim + 5) * a2); }

double ap_product(const GridFunction& w, const GridFunction& dual, double p, const Box& q) {
    double aw = w.mean(q);
    double ad = dual.mean(q);
    return p == 2.0 ? aw * ad : aw * std::pow(ad, p - 1.0);
}

ApReport ap_constant(const GridFunction& w, double p, const std::vector<Box>& cubes, const std::string& family) {
    if (!(p > 1.0) || !std::isfinite(p)) throw UsageError("p must be finite and > 1");
    require_weight(w);
    if (cubes.empty()) throw UsageError("cube family is empty");
    GridFunction dual = w.abs_pow(-1.0 / (p - 1.0));
    ArgMax best = parallel_argmax(cubes.size(), [&](std::size_t i) { return ap_product(w, dual, p, cubes[i]); });
    ApReport r;
    r.p = p;
    r.estimate = best.value;
    r.extremal_cube = cubes[best.index];
    r.family = describe_cubes(family);
    r.cubes = cubes.size();
    return r;
}

ApReport ap_constant(const GridFunction& w, double p, const CubeFamily& family) {
    return ap_constant(w, p, enumerate_cubes(family), family.describe());
}

double mean_oscillation(const GridFunction& b, const Box& q) {
    Box c = clipped(b, q);
    double vol = c.volume();
    double mean = b.mean(c);
    if (b.provider()) {
        if (auto v = b.provider()->abs_deviation_integral(c, mean)) return *v / vol;
    }
    double s = 0.0;
    b.grid().for_each_overlap(c, [&](std::size_t i, double o) { s += std::abs(b[i] - mean) * o; });
    return s / vol;
}

BmoReport bmo_norm(const GridFunction& b, const CubeFamily& family) {
    auto cubes = enumerate_cubes(family);
    ArgMax best = parallel_argmax(cubes.size(), [&](std::size_t i) { return mean_oscillation(b, cubes[i]); });
    BmoReport r;
    r.estimate = std::max(0.0, best.value);
    r.extremal_cube = cubes[best.index];
    r.family = family.describe();
    r.cubes = cubes.size();
    return r;
}

double exp_oscillation(const GridFunction& b, const Box& q, double t) {
    Box c = clipped(b, q);
    double vol = c.volume();
    double mean = b.mean(c);
    double v = std::numeric_limits<double>::quiet_NaN();
    if (b.provider()) {
        if (auto e = b.provider()->exp_deviation_integral(c, mean, t)) v = *e / vol;
    }
    if (std::isnan(v)) {
        double s = 0.0;
        b.grid().for_each_overlap(c, [&](std::size_t i, double o) { s += std::exp(t * std::abs(b[i] - mean)) * o; });
        v = s / vol;
    }
    if (!std::isfinite(v))
        throw Error("exponential average overflows on cube " + q.to_string() + " (BMO norm underestimated?)");
    return v;
}

JNConstants jn_check(const GridFunction& b, const CubeFamily& family, double bmo, double tilt_factor) {
    if (!(bmo > 0.0)) throw UsageError("bmo must be positive");
    JNConstants r;
    r.dim = b.grid().dim();
    r.alpha = jn_alpha(r.dim);
    r.bmo = bmo;
    r.tilt = tilt_factor * r.alpha / bmo;
    auto cubes = enumerate_cubes(family);
    ArgMax best = parallel_argmax(cubes.size(), [&](std::size_t i) { return exp_oscillation(b, cubes[i], r.tilt); });
    r.beta_measured = best.value;
    r.extremal_cube = cubes[best.index];
    r.family = family.describe();
    return r;
}

GridFunction exp_weight(const GridFunction& b, double s) {
    if (b.provider()) {
        if (auto* l = std::get_if<LogAbsFamily>(&b.provider()->family()))
            return GridFunction(b.grid_ptr(), Provider::exp_scaled(s, *l));
        if (auto* k = std::get_if<ConstantFamily>(&b.provider()->family()))
            return GridFunction(b.grid_ptr(), Provider::constant(std::exp(s * k->value)));
    }
    return b.map([s](double v) {
        double e = std::exp(s * v);
        if (!(e > 0.0) || !std::isfinite(e)) throw Error("|s*b| exceeds the exponential range");
        return e;
    });
}

ApReport exp_bmo_ap(const GridFunction& b, double s, double p, const CubeFamily& family) {
    GridFunction w = exp_weight(b, s);
    if (!w.is_weight()) throw Error("|s*b| exceeds the exponential range");
    return ap_constant(w, p, family);
}

ApReport exp_bmo_a2(const GridFunction& b, double s, const CubeFamily& family) { return exp_bmo_ap(b, s, 2.0, family); }

ExpBmoReport exp_bmo_check(const GridFunction& b, double s, double p, const CubeFamily& family, const JNConstants& jn) {
    ExpBmoReport r;
    r.s = s;
    r.s_limit = jn.alpha / jn.bmo * std::min(1.0, 1.0 / (p - 1.0));
    if (std::abs(s) > r.s_limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "|s| = " << std::abs(s) << " exceeds the admissible bound " << r.s_limit;
        throw UsageError(os.str());
    }
    r.ap = exp_bmo_ap(b, s, p, family);
    r.ceiling = std::pow(jn.beta_measured, p);
    r.pass = r.ap.estimate <= r.ceiling;
    return r;
}

double rhi_ratio(const GridFunction& w, const GridFunction& w_r, double r, const Box& q) {
    double lhs = std::pow(w_r.mean(q), 1.0 / r);
    return lhs / w.mean(q);
}

RhiReport rhi_check(const GridFunction& w, const CubeFamily& family, double a2) {
    if (!(a2 >= 1.0)) throw UsageError("a2 must be >= 1");
    require_weight(w);
    RhiReport rep;
    rep.a2 = a2;
    rep.r_w = rhi_exponent(w.grid().dim(), a2);
    GridFunction wr = w.abs_pow(rep.r_w);
    auto cubes = enumerate_cubes(family);
    ArgMax best = parallel_argmax(cubes.size(), [&](std::size_t i) { return rhi_ratio(w, wr, rep.r_w, cubes[i]); });
    rep.worst_ratio = best.value;
    rep.extremal_cube = cubes[best.index];
    rep.pass = rep.worst_ratio <= 2.0;
    rep.family = family.describe();
    return rep;
}

CzDecomposition cz_decompose(const GridFunction& w, const Box& q, double lambda) {
    require_weight(w);
    detail::DyadicPyramid pyr(w.grid(), q, [&](std::size_t i) { return w[i]; });
    CzDecomposition out;
    out.root = q;
    out.lambda = lambda;
    out.root_average = pyr.average(0, 0);
    if (!(lambda > out.root_average)) throw UsageError("level below root average");

    // depth-first, children in lexicographic order
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [k, i] = stack.back();
        stack.pop_back();
        double avg = pyr.average(k, i);
        if (avg > lambda) {
            out.cubes.push_back({pyr.box(k, i), avg, k});
            if (k == pyr.depth()) out.unresolved.push_back(pyr.cell_of(pyr.unindex(k, i)));
            continue;
        }
        if (k == pyr.depth()) continue;
        auto kids = pyr.children(k, i);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(k + 1, *it);
    }
    return out;
}

EqMeasureReport eq_measure_check(const GridFunction& w, const Box& q, double a2) {
    if (!(a2 >= 1.0)) throw UsageError("a2 must be >= 1");
    Box c = clipped(w, q);
    EqMeasureReport r;
    r.threshold = w.mean(c) / (2.0 * a2);
    double below = 0.0, above = 0.0;
    w.grid().for_each_overlap(c, [&](std::size_t i, double o) { (w[i] <= r.threshold ? below : above) += o; });
    double vol = below + above;
    r.fraction = below / vol;
    r.dual_fraction = above / vol;
    r.pass = r.fraction <= 0.5;
    return r;
}

LevelSetReport level_set_check(const GridFunction& w, const Box& q, double lambda, double a2) {
    Box c = clipped(w, q);
    if (!(lambda > w.mean(c))) throw UsageError("level below root average");
    const double n = w.grid().dim();
    double mass = 0.0, measure = 0.0;
    double low = lambda / (2.0 * a2);
    w.grid().for_each_overlap(c, [&](std::size_t i, double o) {
        if (w[i] > lambda) mass += w[i] * o;
        if (w[i] > low) measure += o;
    });
    LevelSetReport r;
    r.lhs = mass;
    r.rhs = std::pow(2.0, n + 1.0) * lambda * measure;
    r.pass = r.lhs <= r.rhs;
    return r;
}

HolderChainReport holder_chain_check(const GridFunction& w, const GridFunction& b, double s, double a2,
                                     const CubeFamily& family) {
    require_weight(w);
    const int n = w.grid().dim();
    double r = rhi_exponent(n, a2);
    double rp = r / (r - 1.0);
    auto cubes = enumerate_cubes(family);
    GridFunction e_plus = exp_weight(b, s), e_minus = exp_weight(b, -s);
    GridFunction left = w.times(e_plus), right = w.reciprocal().times(e_minus);
    ApReport big = ap_constant(exp_weight(b, s * rp), 2.0, cubes, family.describe());
    HolderChainReport rep;
    rep.ceiling = 4.0 * a2 * std::pow(big.estimate, 1.0 / rp);
    ArgMax best =
        parallel_argmax(cubes.size(), [&](std::size_t i) { return left.mean(cubes[i]) * right.mean(cubes[i]); });
    rep.worst_ratio = best.value / rep.ceiling;
    rep.extremal_cube = cubes[best.index];
    rep.pass = rep.worst_ratio <= 1.0;
    return rep;
}

}  // namespace wnl
