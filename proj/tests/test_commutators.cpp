#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "wnl/commutators.hpp"
#include "wnl/error.hpp"

using namespace wnl;
using boost::math::quadrature::tanh_sinh;

namespace {

GridFunction from_fn(const GridPtr& g, const std::function<double(const Point&)>& fn) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g->midpoint(i));
    return GridFunction(g, std::move(v));
}

struct Setup1d {
    GridPtr g = make_uniform_grid(cube(1, -1, 1), 8);
    GridFunction b{g, Provider::log_abs()};
    GridFunction f = from_fn(g, [](const Point& x) { return std::exp(-x[0] * x[0]) * (1.0 + x[0]); });
    DiscreteOperator h = hilbert(g);
};

double bmo_of(const GridFunction& b) {
    auto fam = CubeFamily::standard(b.grid().box(), 8);
    fam.random_count = 2000;
    return bmo_norm(b, fam).estimate;
}

}  // namespace

TEST_CASE("constant symbols and identity operators give zero") {
    Setup1d s;
    auto c = GridFunction::constant(s.g, 4.0);
    for (int k = 1; k <= 3; ++k) {
        auto r = commutator_recursion(c, s.h, s.f, k);
        auto kp = commutator_kernel_power(c, s.h, s.f, k);
        for (std::size_t i = 0; i < s.g->size(); ++i) {
            CHECK(r.output[i] == 0.0);
            CHECK(kp.output[i] == 0.0);
        }
        ContourConfig cfg;
        cfg.radius = 1e-2;
        cfg.order = k;
        auto ct = contour_commutator(c, s.h, s.f, cfg);
        for (std::size_t i = 0; i < s.g->size(); ++i) CHECK(ct.output[i] == 0.0);
        auto id = commutator_recursion(s.b, identity_operator(s.g), s.f, k);
        for (std::size_t i = 0; i < s.g->size(); ++i) CHECK(id.output[i] == 0.0);
    }
}

TEST_CASE("recursion is associative") {
    Setup1d s;
    for (int k = 2; k <= 4; ++k) {
        auto direct = commutator_recursion(s.b, s.h, s.f, k);
        auto lower = [&](const GridFunction& g) { return commutator_recursion(s.b, s.h, g, k - 1).output; };
        auto bf = s.b.times(s.f).sampled();
        auto low_f = lower(s.f), low_bf = lower(GridFunction(s.g, std::vector<double>(bf.values().begin(), bf.values().end())));
        for (std::size_t i = 0; i < s.g->size(); ++i) {
            double expect = s.b[i] * low_f[i] - low_bf[i];
            if (direct.output[i] != expect) FAIL("recursion is not associative at cell " << i);
        }
    }
}

TEST_CASE("kernel-power matrices equal the commutator recursion") {
    Setup1d s;
    auto g2 = make_uniform_grid(cube(2, -1, 1), 5);
    GridFunction b2(g2, Provider::log_abs());
    auto r2 = riesz(g2, 1);
    for (int k = 1; k <= 4; ++k) {
        CHECK(max_relative_deviation(kernel_power_matrix(s.b, s.h, k), recursion_matrix(s.b, s.h, k)) <= 1e-13);
        CHECK(max_relative_deviation(kernel_power_matrix(b2, r2, k), recursion_matrix(b2, r2, k)) <= 1e-13);
        auto rec = commutator_recursion(s.b, s.h, s.f, k);
        auto kp = commutator_kernel_power(s.b, s.h, s.f, k);
        compare(kp, rec);
        REQUIRE(kp.deviation.has_value());
        CHECK(*kp.deviation <= 1e-12);
        CHECK(kp.method == "kernel-power");
        CHECK(rec.method == "recursion");
    }
}

TEST_CASE("kernel-power parity on uniform grids") {
    Setup1d s;
    for (int k = 1; k <= 4; ++k) {
        auto m = kernel_power_matrix(s.b, s.h, k);
        double sign = k % 2 ? 1.0 : -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (m(i, j) != sign * m(j, i)) FAIL("parity broken at " << i << "," << j);
    }
}

TEST_CASE("constructions are linear in f") {
    Setup1d s;
    auto g2 = from_fn(s.g, [](const Point& x) { return std::cos(5 * x[0]); });
    ContourConfig cfg = radius_rule(1, 2.0, bmo_of(s.b), 2);
    for (int k : {1, 2}) {
        cfg.order = k;
        auto a = commutator_recursion(s.b, s.h, s.f, k).output;
        auto a2 = commutator_recursion(s.b, s.h, s.f.scaled(2.0), k).output;
        auto p = commutator_kernel_power(s.b, s.h, s.f, k).output;
        auto p2 = commutator_kernel_power(s.b, s.h, s.f.scaled(-4.0), k).output;
        auto c = contour_commutator(s.b, s.h, s.f, cfg).output;
        auto c2 = contour_commutator(s.b, s.h, s.f.scaled(0.5), cfg).output;
        for (std::size_t i = 0; i < s.g->size(); ++i) {
            CHECK(a2[i] == 2.0 * a[i]);
            CHECK(p2[i] == -4.0 * p[i]);
            CHECK(c2[i] == 0.5 * c[i]);
        }
        std::vector<double> sum(s.g->size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = s.f[i] + g2[i];
        auto lhs = commutator_kernel_power(s.b, s.h, GridFunction(s.g, sum), k).output;
        auto r1 = commutator_kernel_power(s.b, s.h, g2, k).output;
        std::vector<double> rhs(sum.size());
        for (std::size_t i = 0; i < sum.size(); ++i) rhs[i] = p[i] + r1[i];
        CHECK(max_relative_deviation(lhs, GridFunction(s.g, rhs)) < 1e-13);
    }
}

TEST_CASE("first-order log commutator near the diagonal and its sign") {
    auto g = make_uniform_grid(cube(1, 0.5, 1.5), 12);
    GridFunction b(g, Provider::log_abs());
    auto m = kernel_power_matrix(b, hilbert(g), 1);
    for (std::size_t i = 1; i + 1 < g->size(); i += 211) {
        double x = g->midpoint(i)[0];
        CHECK(m(i, i + 1) / g->measure(i + 1) == doctest::Approx(1.0 / x).epsilon(1e-3));
        CHECK(m(i, i - 1) / g->measure(i - 1) == doctest::Approx(1.0 / x).epsilon(1e-3));
    }
    auto fn = [](double y) { return 1.0 + y * y; };
    auto f = from_fn(g, [&](const Point& x) { return fn(x[0]); });
    auto out = commutator_kernel_power(b, hilbert(g), f, 1).output;
    tanh_sinh<double> ts;
    // the zero pv diagonal drops the own cell; the oracle excludes it as well
    for (std::size_t i : {std::size_t{100}, std::size_t{2047}, std::size_t{3900}}) {
        double x = g->midpoint(i)[0];
        Box own = g->cell_box(i);
        auto integrand = [&](double y) { return std::log(x / y) / (x - y) * fn(y); };
        double ref = ts.integrate(integrand, 0.5, own.lo[0], 1e-13) + ts.integrate(integrand, own.hi[0], 1.5, 1e-13);
        CHECK(std::abs(out[i] - ref) < 1e-6);
    }

    const double delta = 0.25;
    auto gg = make_graded_grid(cube(1, 0, 1), 0.0, 0.5, 40, 2);
    GridFunction bg(gg, Provider::log_abs());
    GridFunction fg(gg, Provider::power(delta - 1.0));
    auto sign = commutator_kernel_power(bg, hilbert(gg), fg, 1).output;
    for (std::size_t i = 0; i < gg->size(); ++i) CHECK(sign[i] >= 0.0);
}

TEST_CASE("radius rule") {
    auto c = radius_rule(1, 1.0, 1.0);
    CHECK(c.radius == doctest::Approx(1.0 / 1040.0).epsilon(1e-15));
    CHECK(c.r_prime == 65.0);
    CHECK(c.from_rule);
    for (int n : {1, 2, 3})
        for (double a2 : {1.0, 3.7, 150.0})
            for (double bmo : {0.1, 0.7358, 12.0}) {
                auto r = radius_rule(n, a2, bmo);
                double lhs = r.radius * 2.0 * r.r_prime * bmo;
                CHECK(std::abs(lhs - jn_alpha(n)) <= 2.0 * std::numeric_limits<double>::epsilon() * jn_alpha(n));
                // r' = 1 + 2^{n+5} a2 is affine, so doubling a2 shrinks eps by slightly less than half
                double doubled = radius_rule(n, 2.0 * a2, bmo).radius;
                CHECK(doubled > 0.5 * r.radius);
                CHECK(doubled < 0.51 * r.radius);
            }
    CHECK_THROWS_AS(radius_rule(1, 0.5, 1.0), UsageError);
    CHECK_THROWS_AS(radius_rule(1, 1.0, 0.0), UsageError);
}

TEST_CASE("contour method recovers the recursion") {
    Setup1d s;
    double bmo = bmo_of(s.b);
    for (double a2 : {1.0, 3.07}) {
        for (int k = 1; k <= 3; ++k) {
            auto cfg = radius_rule(1, a2, bmo, k, 64);
            auto rec = commutator_recursion(s.b, s.h, s.f, k);
            auto ct = contour_commutator(s.b, s.h, s.f, cfg);
            compare(ct, rec);
            CHECK(*ct.deviation <= 1e-8);
            CHECK(ct.imaginary_residue < 1e-8);
            CHECK(ct.method == "contour");
        }
    }
}

TEST_CASE("contour aliasing error decays geometrically in the node count") {
    Setup1d s;
    ContourConfig cfg;
    cfg.radius = 1.0;
    for (int k = 1; k <= 3; ++k) {
        cfg.order = k;
        auto rec = commutator_recursion(s.b, s.h, s.f, k);
        std::vector<double> dev;
        for (int nodes : {8, 16, 32, 64}) {
            cfg.nodes = nodes;
            auto ct = contour_commutator(s.b, s.h, s.f, cfg);
            compare(ct, rec);
            dev.push_back(*ct.deviation);
        }
        CHECK(dev[1] < 0.5 * dev[0]);
        CHECK(dev[2] < 0.5 * dev[1]);
        CHECK(dev[3] < 1e-8);
    }
    auto rule = radius_rule(1, 1.0, bmo_of(s.b), 1, 64);
    auto rec = commutator_recursion(s.b, s.h, s.f, 1);
    auto fine = contour_commutator(s.b, s.h, s.f, rule);
    rule.nodes = 4;
    auto coarse = contour_commutator(s.b, s.h, s.f, rule);
    compare(fine, rec);
    compare(coarse, rec);
    CHECK(*coarse.deviation > *fine.deviation);
}

TEST_CASE("contour argument validation") {
    Setup1d s;
    ContourConfig cfg;
    cfg.order = 3;
    cfg.radius = 0.1;
    cfg.nodes = 6;
    CHECK_THROWS_AS(contour_commutator(s.b, s.h, s.f, cfg), UsageError);
    cfg.nodes = 64;
    cfg.radius = 0.0;
    CHECK_THROWS_AS(contour_commutator(s.b, s.h, s.f, cfg), UsageError);
    cfg.radius = 1e4;
    try {
        contour_commutator(s.b, s.h, s.f, cfg);
        FAIL("expected overflow");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("radius_rule") != std::string::npos);
    }
}

TEST_CASE("weights on the contour circle stay in A2") {
    auto box = cube(1, -1, 1);
    auto g = make_uniform_grid(box, 10);
    auto fam = CubeFamily::standard(box, 10);
    fam.random_count = 2000;
    GridFunction b(g, Provider::log_abs());
    double bmo = bmo_norm(b, fam).estimate;
    auto jn = jn_check(b, fam, bmo);
    for (double d : {0.5, 0.1}) {
        GridFunction w(g, Provider::power(1.0 - d));
        double a2 = ap_constant(w, 2.0, fam).estimate;
        auto cfg = radius_rule(1, a2, bmo, 1, 16);
        auto r = circle_a2_check(w, b, cfg, a2, jn.beta_measured, fam);
        CHECK(r.pass);
        CHECK(r.worst_product >= a2);
        CHECK(r.ceiling == doctest::Approx(4.0 * a2 * jn.beta_measured));
    }
}
