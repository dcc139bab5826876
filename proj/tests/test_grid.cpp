#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "wnl/error.hpp"
#include "wnl/grid_function.hpp"

using namespace wnl;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

double riemann(double lo, double hi, std::size_t n, const std::function<double(double)>& f) {
    double h = (hi - lo) / static_cast<double>(n), s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(lo + (static_cast<double>(i) + 0.5) * h);
    return s * h;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Box box1(double lo, double hi) { return cube(1, lo, hi); }

Box box2(double x0, double x1, double y0, double y1) {
    double lo[] = {x0, y0}, hi[] = {x1, y1};
    return make_box(lo, hi);
}

// Nested adaptive quadrature of g(x, y) over a rectangle, split at the coordinate axes.
double quad2(const Box& b, const std::function<double(double, double)>& g) {
    tanh_sinh<double> ts;
    auto pieces = [](double lo, double hi) {
        std::vector<std::pair<double, double>> out;
        if (lo < 0.0 && hi > 0.0) out = {{lo, 0.0}, {0.0, hi}};
        else out = {{lo, hi}};
        return out;
    };
    double total = 0.0;
    for (auto [x0, x1] : pieces(b.lo[0], b.hi[0]))
        for (auto [y0, y1] : pieces(b.lo[1], b.hi[1])) {
            auto inner = [&](double x) {
                return ts.integrate(
                    [&](double y) {
                        double v = g(x, y);
                        return std::isfinite(v) ? v : 0.0;
                    },
                    y0, y1, 1e-13);
            };
            total += ts.integrate(inner, x0, x1, 1e-12);
        }
    return total;
}

}  // namespace

TEST_CASE("uniform grid cells partition the box") {
    for (int dim = 1; dim <= 3; ++dim) {
        Box b = cube(dim, -1.0, 2.0);
        b.hi[0] = 3.0;
        Grid g = Grid::uniform(b, dim == 3 ? 3 : 5);
        double total = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(g.measure(i) > 0.0);
            total += g.measure(i);
            CHECK(g.box().contains(g.cell_box(i)));
        }
        CHECK(rel(total, b.volume()) < 1e-12);
        // congruent cells
        for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.measure(i) == doctest::Approx(g.measure(0)).epsilon(1e-12));
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.flatten(g.unflatten(i)) == i);
    }
}

TEST_CASE("graded grid resolves the singular point") {
    Grid g = Grid::graded(box1(0.0, 1.0), 0.0, 0.5, 10, 2);
    CHECK(g.size() == 21);
    auto e = g.edges(0);
    CHECK(e.front() == 0.0);
    CHECK(e.back() == 1.0);
    CHECK(e[1] == std::ldexp(1.0, -10));
    for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(e[i] < e[i + 1]);
    double total = std::accumulate(g.measures().begin(), g.measures().end(), 0.0);
    CHECK(rel(total, 1.0) < 1e-12);

    Grid two = Grid::graded(box1(-1.0, 1.0), 0.0, 0.5, 6, 1);
    CHECK(two.size() == 14);
    for (std::size_t i = 0; i < two.size(); ++i)
        CHECK(two.midpoint(i)[0] == doctest::Approx(-two.midpoint(two.size() - 1 - i)[0]));
    CHECK_THROWS_AS(Grid::graded(cube(2, 0, 1), 0.0, 0.5, 3), UsageError);
    CHECK_THROWS_AS(Grid::graded(box1(0, 1), 0.0, 1.5, 3), UsageError);
}

TEST_CASE("cell_average of constants and the empty-cube error") {
    auto g = make_uniform_grid(box1(-1, 1), 6);
    auto f = GridFunction::constant(g, 3.5);
    CHECK(cell_average(f, box1(-0.3, 0.71)) == doctest::Approx(3.5));
    CHECK_THROWS_WITH_AS(cell_average(f, box1(0.2, 0.2)), "empty cube", UsageError);
    auto sampled = f.sampled();
    CHECK(cell_average(sampled, box1(-0.3, 0.71)) == doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("power weight averages on [0,L] match the antiderivative and a Riemann sum") {
    auto g = make_uniform_grid(box1(0, 4), 4);
    for (double a : {0.25, 0.75, 2.0}) {
        GridFunction f(g, Provider::power(a));
        for (double L : {0.5, 1.0, 3.0}) {
            double exact = std::pow(L, a) / (a + 1.0);
            double got = cell_average(f, box1(0, L));
            CHECK(rel(got, exact) < 1e-14);
            double rs = riemann(0, L, 1000000, [a](double x) { return std::pow(x, a); }) / L;
            CHECK(rel(got, rs) < 1e-6);
        }
    }
}

TEST_CASE("log average on [1,e]") {
    auto g = make_uniform_grid(box1(0.5, 3), 3);
    GridFunction f(g, Provider::log_abs());
    double e = std::exp(1.0);
    CHECK(rel(cell_average(f, box1(1, e)), 1.0 / (e - 1.0)) < 1e-14);
    double rs = riemann(1, e, 1000000, [](double x) { return std::log(x); }) / (e - 1.0);
    CHECK(rel(cell_average(f, box1(1, e)), rs) < 1e-9);
}

TEST_CASE("provider cell values equal exact cell means") {
    auto g = make_graded_grid(box1(-1, 1), 0.0, 0.5, 12, 2);
    GridFunction w(g, Provider::power(-0.6));
    tanh_sinh<double> ts;
    for (std::size_t i = 0; i < g->size(); i += 5) {
        Box c = g->cell_box(i);
        double q = ts.integrate([](double x) { return std::pow(std::abs(x), -0.6); }, c.lo[0], c.hi[0]) / c.volume();
        CHECK(rel(w[i], q) < 1e-12);
    }
}

TEST_CASE("radial power and log integrals in two dimensions match nested quadrature") {
    std::vector<Box> boxes{box2(0, 1, 0, 1), box2(-0.5, 1, -0.25, 0.75), box2(0.3, 0.31, 0.2, 0.21),
                           box2(-1, 1, 0.001, 0.5), box2(0.01, 2.0, 0.0, 0.003)};
    for (const Box& b : boxes) {
        for (double a : {-1.5, -0.6, 0.5, 1.9}) {
            Provider p = Provider::power(a);
            double oracle = quad2(b, [a](double x, double y) { return std::pow(std::hypot(x, y), a); });
            CHECK_MESSAGE(rel(p.integral(b), oracle) < 1e-9, b.to_string(), " a=", a);
        }
        Provider l = Provider::log_abs();
        double oracle = quad2(b, [](double x, double y) { return std::log(std::hypot(x, y)); });
        CHECK_MESSAGE(std::abs(l.integral(b) - oracle) < 1e-9 * std::max(1.0, std::abs(oracle)), b.to_string());
    }
}

TEST_CASE("radial power integral in three dimensions") {
    Box b = cube(3, 0, 1);
    // integral of |x|^2 over the unit cube is 3 * 1/3 = 1
    CHECK(rel(Provider::power(2.0).integral(b), 1.0) < 1e-13);
    // shifted box against nested quadrature of a smooth integrand
    double lo[] = {0.2, -0.1, 0.3}, hi[] = {0.7, 0.4, 0.5};
    Box q = make_box(lo, hi);
    gauss_kronrod<double, 31> gk;
    auto f = [](double x, double y, double z) { return std::pow(x * x + y * y + z * z, -0.7); };
    double oracle = gk.integrate(
        [&](double x) {
            return gk.integrate(
                [&](double y) { return gk.integrate([&](double z) { return f(x, y, z); }, q.lo[2], q.hi[2], 10, 1e-13); },
                q.lo[1], q.hi[1], 10, 1e-13);
        },
        q.lo[0], q.hi[0], 10, 1e-13);
    CHECK(rel(Provider::power(-1.4).integral(q), oracle) < 1e-10);
    // scaling: integral over [0,2]^3 of |x|^a equals 2^{3+a} times the unit cube value
    double u = Provider::power(-1.4).integral(b);
    CHECK(rel(Provider::power(-1.4).integral(cube(3, 0, 2)), std::pow(2.0, 3 - 1.4) * u) < 1e-12);
}

TEST_CASE("lp_norm examples") {
    auto g = make_uniform_grid(box1(-1, 1), 8);
    Box sub = box1(-0.25, 0.5);
    GridFunction chi(g, Provider::indicator(sub));
    auto one = GridFunction::constant(g, 1.0);
    CHECK(rel(lp_norm(chi, one, 2.0), std::sqrt(0.75)) < 1e-14);

    auto gg = make_graded_grid(box1(-1, 1), 0.0, 0.5, 40, 2);
    double delta = 0.25;
    GridFunction f(gg, Provider::restricted(Provider::power(-1 + delta), box1(0, 1)));
    GridFunction w(gg, Provider::power(1 - delta));
    CHECK(rel(lp_norm(f, w, 2.0), 2.0) < 1e-12);
    for (double p : {1.25, 1.5, 3.0}) {
        GridFunction wp(gg, Provider::power((1 - delta) * (p - 1)));
        CHECK(rel(lp_norm(f, wp, p), std::pow(1 / delta, 1 / p)) < 1e-12);
    }
    CHECK_THROWS_AS(lp_norm(f, GridFunction::constant(g, 1.0), 2.0), UsageError);
}

TEST_CASE("lp_norm is absolutely homogeneous") {
    auto g = make_uniform_grid(box1(0, 1), 7);
    GridFunction f(g, Provider::power(-0.3));
    GridFunction w(g, Provider::power(0.4));
    auto fs = f.sampled();
    for (double c : {-3.0, 0.5, 1e-3, 7.25}) {
        CHECK(rel(lp_norm(f.scaled(c), w, 1.7), std::abs(c) * lp_norm(f, w, 1.7)) < 1e-14);
        CHECK(rel(lp_norm(fs.scaled(c), w, 1.7), std::abs(c) * lp_norm(fs, w, 1.7)) < 1e-14);
    }
}

TEST_CASE("refinement changes a provider-backed norm less than the sampled discrepancy") {
    Box b = box1(0, 1);
    for (int level = 4; level <= 9; ++level) {
        auto g1 = make_uniform_grid(b, level), g2 = make_uniform_grid(b, level + 1);
        GridFunction f1(g1, Provider::power(-0.4)), f2(g2, Provider::power(-0.4));
        GridFunction w1(g1, Provider::power(0.3)), w2(g2, Provider::power(0.3));
        auto r1 = lp_norm_report(f1, w1, 2.0);
        auto r2 = lp_norm_report(f2, w2, 2.0);
        CHECK(std::abs(r1.value - r2.value) <= r1.discrepancy);
        CHECK(r2.discrepancy < r1.discrepancy);
    }
}

TEST_CASE("cell sums over many cells agree with direct summation") {
    auto g = make_uniform_grid(cube(2, 0, 1), 6);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i)) + 2.0;
    GridFunction f(g, v);
    Box q = box2(0.013, 0.87, 0.1, 0.999);
    double direct = 0.0;
    g->for_each_overlap(q, [&](std::size_t i, double vol) { direct += v[i] * vol; });
    CHECK(rel(f.integral(q), direct) < 1e-12);
    double vol = 0.0;
    g->for_each_overlap(q, [&](std::size_t, double o) { vol += o; });
    CHECK(rel(vol, q.volume()) < 1e-12);
}

TEST_CASE("reciprocal of a reciprocal is the original function") {
    auto g = make_uniform_grid(box1(0, 1), 6);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.3 * static_cast<double>(i % 7);
    GridFunction w(g, v);
    auto back = w.reciprocal().reciprocal();
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
    GridFunction p(g, Provider::power(0.7));
    auto pinv = p.reciprocal();
    REQUIRE(pinv.provider());
    CHECK(std::get<PowerFamily>(pinv.provider()->family()).exponent == doctest::Approx(-0.7));
}

TEST_CASE("deviation integrals of log and power providers") {
    tanh_sinh<double> ts;
    Provider l = Provider::log_abs(1.5, 0.2);
    for (auto [lo, hi] : {std::pair{-1.0, 1.0}, std::pair{0.1, 0.9}, std::pair{-0.3, 0.05}}) {
        for (double c : {-1.0, 0.0, 0.4}) {
            double got = *l.abs_deviation_integral(box1(lo, hi), c);
            auto g = [&](double x) { return std::abs(1.5 * std::log(std::abs(x)) + 0.2 - c); };
            double oracle = 0.0;
            std::vector<double> pts{lo};
            double rho = std::exp((c - 0.2) / 1.5);
            for (double s : {-rho, 0.0, rho})
                if (s > lo && s < hi) pts.push_back(s);
            std::sort(pts.begin(), pts.end());
            pts.push_back(hi);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) oracle += ts.integrate(g, pts[i], pts[i + 1]);
            CHECK(rel(got, oracle) < 1e-10);

            double t = 0.3;
            double egot = *l.exp_deviation_integral(box1(lo, hi), c, t);
            double eoracle = 0.0;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i)
                eoracle += ts.integrate([&](double x) { return std::exp(t * g(x)); }, pts[i], pts[i + 1]);
            CHECK(rel(egot, eoracle) < 1e-10);
        }
    }
    Provider p = Provider::power(0.5, 2.0);
    double got = *p.abs_deviation_integral(box1(-1, 2), 1.0);
    double oracle = ts.integrate([](double x) { return std::abs(2 * std::sqrt(std::abs(x)) - 1); }, -1.0, -0.25) +
                    ts.integrate([](double x) { return std::abs(2 * std::sqrt(std::abs(x)) - 1); }, -0.25, 0.0) +
                    ts.integrate([](double x) { return std::abs(2 * std::sqrt(std::abs(x)) - 1); }, 0.0, 0.25) +
                    ts.integrate([](double x) { return std::abs(2 * std::sqrt(std::abs(x)) - 1); }, 0.25, 2.0);
    CHECK(rel(got, oracle) < 1e-10);
}

TEST_CASE("provider algebra") {
    Box q = box2(0.1, 0.9, 0.2, 0.5);
    auto prod = Provider::product({Provider::power(0.5), Provider::power(2.0)});
    // separable: mean of sqrt(x) * y^2
    double ex = (std::pow(0.9, 1.5) - std::pow(0.1, 1.5)) / 1.5 * (std::pow(0.5, 3) - std::pow(0.2, 3)) / 3.0;
    CHECK(rel(prod.integral(q), ex) < 1e-14);
    auto sq = prod.abs_pow(2.0);
    REQUIRE(sq);
    CHECK(rel(sq->integral(q), (0.9 * 0.9 - 0.1 * 0.1) / 2 * (std::pow(0.5, 5) - std::pow(0.2, 5)) / 5) < 1e-13);

    Provider e = Provider::exp_scaled(0.3, LogAbsFamily{1.0, 0.5});
    Provider pw = Provider::power(0.3, std::exp(0.15));
    CHECK(rel(e.integral(q), pw.integral(q)) < 1e-15);
    auto t = Provider::power(1.0).times(Provider::power(-0.25));
    REQUIRE(t);
    CHECK(std::get<PowerFamily>(t->family()).exponent == 0.75);
    CHECK_FALSE(Provider::log_abs().abs_pow(2.0));
    auto ri = Provider::restricted(Provider::power(-0.5), box1(0, 1)).times(Provider::power(0.25));
    REQUIRE(ri);
    CHECK(rel(ri->integral(box1(-1, 1)), 1.0 / 0.75) < 1e-14);
}

TEST_CASE("dyadic enumeration order") {
    CubeFamily fam;
    fam.box = box1(0, 1);
    fam.dyadic_depth = 2;
    fam.shifted = false;
    fam.random_count = 0;
    auto cubes = enumerate_cubes(fam);
    std::vector<std::pair<double, double>> expect{{0, 1}, {0, .5}, {.5, 1}, {0, .25}, {.25, .5}, {.5, .75}, {.75, 1}};
    REQUIRE(cubes.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(cubes[i].lo[0] == expect[i].first);
        CHECK(cubes[i].hi[0] == expect[i].second);
    }
}

TEST_CASE("third-shifted lattice adds the shifted cubes that fit") {
    CubeFamily fam;
    fam.box = box1(0, 1);
    fam.dyadic_depth = 2;
    fam.shifted = true;
    fam.random_count = 0;
    auto cubes = enumerate_cubes(fam);
    REQUIRE(cubes.size() == 7 + 4);
    std::vector<std::pair<double, double>> expect{{1. / 3, 5. / 6}, {1. / 12, 1. / 3}, {1. / 3, 7. / 12}, {7. / 12, 5. / 6}};
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(cubes[7 + i].lo[0] == doctest::Approx(expect[i].first).epsilon(1e-15));
        CHECK(cubes[7 + i].hi[0] == doctest::Approx(expect[i].second).epsilon(1e-15));
    }
}

TEST_CASE("random cubes are deterministic and inside the box") {
    CubeFamily fam;
    fam.box = box2(-1, 2, 0, 1);
    fam.dyadic_depth = 3;
    fam.random_count = 2;
    fam.seed = 42;
    auto a = enumerate_cubes(fam), b = enumerate_cubes(fam);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    fam.random_count = 500;
    for (const Box& q : enumerate_cubes(fam)) {
        CHECK(fam.box.contains(q));
        CHECK(q.volume() > 0.0);
    }
    fam.seed = 43;
    fam.random_count = 2;
    auto c = enumerate_cubes(fam);
    CHECK_FALSE(c.back() == a.back());
}

TEST_CASE("power means stay representable on deeply graded cells") {
    auto g = make_graded_grid(cube(1, 0.0, 1.0), 0.0, 0.5, 640, 2);
    REQUIRE(g->measure(0) < 1e-190);
    for (double a : {0.984375, -0.984375}) {
        GridFunction f(g, Provider::power(a));
        double h = g->edges(0)[1];
        // mean of x^a over [0, h] is h^a / (a + 1)
        CHECK(f[0] == doctest::Approx(std::pow(h, a) / (a + 1.0)).epsilon(1e-13));
        CHECK(f[0] > 0.0);
        for (std::size_t i = 1; i < 8; ++i) {
            Box c = g->cell_box(i);
            long double lo = c.lo[0], hi = c.hi[0];
            long double m = (std::pow(hi, a + 1.0L) - std::pow(lo, a + 1.0L)) / ((a + 1.0L) * (hi - lo));
            CHECK(f[i] == doctest::Approx(static_cast<double>(m)).epsilon(1e-10));
        }
    }
    Box straddle = make_box(std::vector<double>{-0.25}, std::vector<double>{1.0});
    CHECK(Provider::power(-0.5).mean(straddle) == doctest::Approx((2.0 * 0.5 + 2.0) / 1.25).epsilon(1e-14));
}
