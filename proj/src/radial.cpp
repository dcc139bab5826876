#include "radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

namespace wnl::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <unsigned N>
UnitRule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    UnitRule r;
    for (std::size_t i = 0; i < ab.size(); ++i) {
        if (ab[i] == 0.0) {
            r.x.push_back(0.5);
            r.w.push_back(0.5 * wt[i]);
            continue;
        }
        r.x.push_back(0.5 * (1.0 - ab[i]));
        r.w.push_back(0.5 * wt[i]);
        r.x.push_back(0.5 * (1.0 + ab[i]));
        r.w.push_back(0.5 * wt[i]);
    }
    return r;
}

// Integral of x^a over [l, h] with 0 <= l < h.
double power_pos(double l, double h, double a) {
    double b = a + 1.0;
    if (l == 0.0) return b > 0.0 ? std::pow(h, b) / b : kInf;
    double L = std::log1p(-(h - l) / h);  // log(l/h), accurate for close l, h
    if (b == 0.0) return -L;
    return std::pow(h, b) * (-std::expm1(b * L)) / b;
}

// Integral of log x over [l, h] with 0 <= l < h.
double log_pos(double l, double h) {
    if (l == 0.0) return h * std::log(h) - h;
    return (h - l) * (std::log(h) - 1.0) + l * std::log1p((h - l) / l);
}

// Geometric panel breakpoints on [0,1] for features at scale t0.
std::vector<double> panels(double t0) {
    std::vector<double> br{0.0};
    if (t0 < 1.0) {
        for (double t = t0; t < 1.0; t *= 2.0) br.push_back(t);
    }
    br.push_back(1.0);
    return br;
}

// Tensor Gauss rule over [0,1]^m with geometric grading at 1/kappa per axis.
struct TensorRule {
    std::vector<std::vector<double>> x, w;
};

TensorRule graded_rule(std::span<const double> kappa) {
    const UnitRule& g = gauss20();
    TensorRule r;
    for (double k : kappa) {
        std::vector<double> xs, ws;
        auto br = panels(k > 0.0 ? 1.0 / k : 2.0);
        for (std::size_t p = 0; p + 1 < br.size(); ++p) {
            double lo = br[p], len = br[p + 1] - br[p];
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                xs.push_back(lo + len * g.x[i]);
                ws.push_back(len * g.w[i]);
            }
        }
        r.x.push_back(std::move(xs));
        r.w.push_back(std::move(ws));
    }
    return r;
}

// Integral over [0,1]^m of F(1 + sum kappa_o^2 v_o^2).
template <class F>
double face_integral(std::span<const double> kappa, F&& fn) {
    if (kappa.empty()) return fn(1.0);
    TensorRule r = graded_rule(kappa);
    double total = 0.0;
    if (kappa.size() == 1) {
        double k2 = kappa[0] * kappa[0];
        for (std::size_t i = 0; i < r.x[0].size(); ++i) total += r.w[0][i] * fn(1.0 + k2 * r.x[0][i] * r.x[0][i]);
        return total;
    }
    double k0 = kappa[0] * kappa[0], k1 = kappa[1] * kappa[1];
    for (std::size_t i = 0; i < r.x[0].size(); ++i) {
        double base = 1.0 + k0 * r.x[0][i] * r.x[0][i];
        double inner = 0.0;
        for (std::size_t j = 0; j < r.x[1].size(); ++j) inner += r.w[1][j] * fn(base + k1 * r.x[1][j] * r.x[1][j]);
        total += r.w[0][i] * inner;
    }
    return total;
}

// Integral of |x|^a over [0, s_1] x ... x [0, s_n] by pyramid decomposition.
double corner_power(const std::array<double, kMaxDim>& s, int n, double a) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= s[i];
    if (a == 0.0) return prod;
    if (a <= -n) return kInf;
    double sum = 0.0;
    for (int f = 0; f < n; ++f) {
        std::array<double, 2> kap{};
        int m = 0;
        for (int o = 0; o < n; ++o)
            if (o != f) kap[m++] = s[o] / s[f];
        double j = face_integral(std::span<const double>(kap.data(), m),
                                 [a](double u) { return std::pow(u, 0.5 * a); });
        sum += std::pow(s[f], a) * j;
    }
    return prod / (a + n) * sum;
}

double corner_log(const std::array<double, kMaxDim>& s, int n) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= s[i];
    double sum = 0.0;
    for (int f = 0; f < n; ++f) {
        std::array<double, 2> kap{};
        int m = 0;
        for (int o = 0; o < n; ++o)
            if (o != f) kap[m++] = s[o] / s[f];
        double j = face_integral(std::span<const double>(kap.data(), m),
                                 [](double u) { return 0.5 * std::log(u); });
        sum += -1.0 / (n * n) + (std::log(s[f]) + j) / n;
    }
    return prod * sum;
}

template <class Corner>
double origin_split(const Box& q, Corner&& corner) {
    const int n = q.dim;
    double total = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::array<double, kMaxDim> s{};
        bool empty = false;
        for (int a = 0; a < n; ++a) {
            s[a] = (mask >> a & 1) ? q.hi[a] : -q.lo[a];
            if (!(s[a] > 0.0)) empty = true;
        }
        if (!empty) total += corner(s);
    }
    return total;
}

// Tensor Gauss over the box of fn(|x|^2).
template <class F>
double far_field(const Box& q, F&& fn) {
    const UnitRule& g = gauss15();
    const int n = q.dim;
    std::array<std::size_t, kMaxDim> cnt{1, 1, 1};
    for (int a = 0; a < n; ++a) cnt[a] = g.x.size();
    double total = 0.0;
    for (std::size_t i = 0; i < cnt[0]; ++i) {
        double x0 = q.lo[0] + q.extent(0) * g.x[i];
        for (std::size_t j = 0; j < cnt[1]; ++j) {
            double x1 = n > 1 ? q.lo[1] + q.extent(1) * g.x[j] : 0.0;
            double w01 = g.w[i] * (n > 1 ? g.w[j] : 1.0);
            for (std::size_t k = 0; k < cnt[2]; ++k) {
                double x2 = n > 2 ? q.lo[2] + q.extent(2) * g.x[k] : 0.0;
                double w = w01 * (n > 2 ? g.w[k] : 1.0);
                total += w * fn(x0 * x0 + x1 * x1 + x2 * x2);
            }
        }
    }
    return total * q.volume();
}

bool closure_has_origin(const Box& q) {
    for (int a = 0; a < q.dim; ++a)
        if (q.lo[a] > 0.0 || q.hi[a] < 0.0) return false;
    return true;
}

double origin_distance(const Box& q) {
    double d2 = 0.0;
    for (int a = 0; a < q.dim; ++a) {
        double d = q.lo[a] > 0.0 ? q.lo[a] : (q.hi[a] < 0.0 ? -q.hi[a] : 0.0);
        d2 += d * d;
    }
    return std::sqrt(d2);
}

template <class Corner, class Far>
double radial_integral(const Box& q, Corner&& corner, Far&& far, int depth) {
    if (closure_has_origin(q)) return origin_split(q, corner);
    double dist = origin_distance(q);
    if (dist >= q.diameter() || depth > 400) return far(q);
    int axis = 0;
    for (int a = 1; a < q.dim; ++a)
        if (q.extent(a) > q.extent(axis)) axis = a;
    double mid = 0.5 * (q.lo[axis] + q.hi[axis]);
    // split at the origin's coordinate when it lies inside, which lands children on the corner path
    if (q.lo[axis] < 0.0 && q.hi[axis] > 0.0) mid = 0.0;
    Box left = q, right = q;
    left.hi[axis] = mid;
    right.lo[axis] = mid;
    return radial_integral(left, corner, far, depth + 1) + radial_integral(right, corner, far, depth + 1);
}

}  // namespace

const UnitRule& gauss20() {
    static const UnitRule r = make_rule<20>();
    return r;
}

const UnitRule& gauss15() {
    static const UnitRule r = make_rule<15>();
    return r;
}

double power_integral_1d(double lo, double hi, double a) {
    if (!(hi > lo)) return 0.0;
    if (a == 0.0) return hi - lo;
    if (lo < 0.0 && hi > 0.0) return power_pos(0.0, -lo, a) + power_pos(0.0, hi, a);
    if (hi <= 0.0) return power_pos(-hi, -lo, a);
    return power_pos(lo, hi, a);
}

namespace {

// Mean of x^a over [l, h] with 0 <= l < h, scaled by h^a so tiny cells do not underflow.
double power_mean_pos(double l, double h, double a) {
    double b = a + 1.0;
    if (l == 0.0) return b > 0.0 ? std::pow(h, a) / b : kInf;
    double frac = (h - l) / h;
    double L = std::log1p(-frac);
    double ratio = b == 0.0 ? -L / frac : -std::expm1(b * L) / (b * frac);
    return std::pow(h, a) * ratio;
}

}  // namespace

double power_mean_1d(double lo, double hi, double a) {
    if (!(hi > lo)) return std::numeric_limits<double>::quiet_NaN();
    if (a == 0.0) return 1.0;
    if (lo < 0.0 && hi > 0.0) {
        double m = std::max(-lo, hi);
        double b = a + 1.0;
        if (!(b > 0.0)) return kInf;
        double u = -lo / m, v = hi / m;
        return std::pow(m, a) * (std::pow(u, b) + std::pow(v, b)) / (b * (v + u));
    }
    if (hi <= 0.0) return power_mean_pos(-hi, -lo, a);
    return power_mean_pos(lo, hi, a);
}

double log_integral_1d(double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    if (lo < 0.0 && hi > 0.0) return log_pos(0.0, -lo) + log_pos(0.0, hi);
    if (hi <= 0.0) return log_pos(-hi, -lo);
    return log_pos(lo, hi);
}

namespace {

// Sorted breakpoints of [lo, hi] at the given interior points.
std::vector<double> split_points(double lo, double hi, std::initializer_list<double> cuts) {
    std::vector<double> pts{lo};
    std::vector<double> inner;
    for (double c : cuts)
        if (c > lo && c < hi) inner.push_back(c);
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    pts.insert(pts.end(), inner.begin(), inner.end());
    pts.push_back(hi);
    return pts;
}

}  // namespace

double log_abs_dev_integral_1d(double lo, double hi, double c) {
    if (!(hi > lo)) return 0.0;
    double rho = std::exp(c);
    auto pts = split_points(lo, hi, {-rho, 0.0, rho});
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double l = pts[i], h = pts[i + 1];
        double mid = std::abs(0.5 * (l + h));
        double sign = std::log(mid) >= c ? 1.0 : -1.0;
        total += sign * (log_integral_1d(l, h) - c * (h - l));
    }
    return total;
}

double log_exp_dev_integral_1d(double lo, double hi, double sigma, double o, double c, double t) {
    if (!(hi > lo)) return 0.0;
    double d = o - c;
    if (sigma == 0.0) return std::exp(t * std::abs(d)) * (hi - lo);
    double rho = std::exp(-d / sigma);
    auto pts = split_points(lo, hi, {-rho, 0.0, rho});
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double l = pts[i], h = pts[i + 1];
        double mid = std::abs(0.5 * (l + h));
        bool upper = sigma * std::log(mid) + d >= 0.0;
        double sgn = upper ? 1.0 : -1.0;
        double integral = power_integral_1d(l, h, sgn * t * sigma);
        if (integral == 0.0) continue;
        total += std::exp(sgn * t * d + std::log(integral));
    }
    return total;
}

double radial_power_integral(const Box& q, double a) {
    if (q.dim == 1) return power_integral_1d(q.lo[0], q.hi[0], a);
    const int n = q.dim;
    return radial_integral(
        q, [n, a](const std::array<double, kMaxDim>& s) { return corner_power(s, n, a); },
        [a](const Box& b) { return far_field(b, [a](double r2) { return std::pow(r2, 0.5 * a); }); }, 0);
}

double radial_log_integral(const Box& q) {
    if (q.dim == 1) return log_integral_1d(q.lo[0], q.hi[0]);
    const int n = q.dim;
    return radial_integral(
        q, [n](const std::array<double, kMaxDim>& s) { return corner_log(s, n); },
        [](const Box& b) { return far_field(b, [](double r2) { return 0.5 * std::log(r2); }); }, 0);
}

}  // namespace wnl::detail
