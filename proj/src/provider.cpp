#include "wnl/provider.hpp"

#include <algorithm>
#include <cmath>

#include "radial.hpp"
#include "wnl/error.hpp"

namespace wnl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

PowerFamily as_power(const ExpScaledBmoFamily& e) {
    return {e.s * e.base.scale, std::exp(e.s * e.base.offset)};
}

double norm(const Point& x, int dim) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += x[a] * x[a];
    return std::sqrt(s);
}

Box axis_box(const Box& q, int axis) {
    Box b;
    b.dim = 1;
    b.lo[0] = q.lo[axis];
    b.hi[0] = q.hi[axis];
    return b;
}

// Piecewise constant-sign integral of |g - c| over [lo, hi], g given by its integral and values.
template <class Integral, class Value>
double split_abs(double lo, double hi, std::vector<double> cuts, double c, Integral&& integral, Value&& value) {
    std::vector<double> pts{lo};
    std::sort(cuts.begin(), cuts.end());
    for (double x : cuts)
        if (x > pts.back() && x < hi) pts.push_back(x);
    pts.push_back(hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double l = pts[i], h = pts[i + 1];
        double sign = value(0.5 * (l + h)) >= c ? 1.0 : -1.0;
        total += sign * (integral(l, h) - c * (h - l));
    }
    return total;
}

}  // namespace

Provider Provider::restricted(const Provider& base, const Box& b) {
    return Provider(RestrictedFamily{std::make_shared<const Provider>(base), b});
}

Provider Provider::product(const std::vector<Provider>& factors) {
    ProductFamily p;
    for (const auto& f : factors) p.factors.push_back(std::make_shared<const Provider>(f));
    return Provider(std::move(p));
}

std::string Provider::name() const {
    return std::visit(overloaded{[](const ConstantFamily&) { return std::string("constant"); },
                                 [](const PowerFamily&) { return std::string("power"); },
                                 [](const LogAbsFamily&) { return std::string("logabs"); },
                                 [](const IndicatorFamily&) { return std::string("indicator"); },
                                 [](const RestrictedFamily&) { return std::string("restricted"); },
                                 [](const ProductFamily&) { return std::string("product"); },
                                 [](const ExpScaledBmoFamily&) { return std::string("expbmo"); }},
                      family_);
}

double Provider::integral(const Box& q) const {
    return std::visit(
        overloaded{
            [&](const ConstantFamily& c) { return c.value * q.volume(); },
            [&](const PowerFamily& p) {
                if (p.coef == 0.0) return 0.0;
                return p.coef * detail::radial_power_integral(q, p.exponent);
            },
            [&](const LogAbsFamily& l) {
                double v = l.offset * q.volume();
                if (l.scale != 0.0) v += l.scale * detail::radial_log_integral(q);
                return v;
            },
            [&](const IndicatorFamily& i) { return overlap_volume(q, i.box); },
            [&](const RestrictedFamily& r) {
                Box x = intersect(q, r.box);
                return x.volume() > 0.0 ? r.base->integral(x) : 0.0;
            },
            [&](const ProductFamily& p) {
                if (static_cast<int>(p.factors.size()) != q.dim)
                    throw UsageError("product provider needs one factor per axis");
                double v = 1.0;
                for (int a = 0; a < q.dim; ++a) v *= p.factors[a]->integral(axis_box(q, a));
                return v;
            },
            [&](const ExpScaledBmoFamily& e) { return Provider(as_power(e)).integral(q); }},
        family_);
}

double Provider::mean(const Box& q) const {
    double vol = q.volume();
    if (!(vol > 0.0)) throw UsageError("empty cube");
    if (auto* c = std::get_if<ConstantFamily>(&family_)) return c->value;
    if (q.dim == 1) {
        if (auto* p = std::get_if<PowerFamily>(&family_)) return p->coef * detail::power_mean_1d(q.lo[0], q.hi[0], p->exponent);
        if (auto* e = std::get_if<ExpScaledBmoFamily>(&family_)) {
            PowerFamily p = as_power(*e);
            return p.coef * detail::power_mean_1d(q.lo[0], q.hi[0], p.exponent);
        }
    }
    return integral(q) / vol;
}

double Provider::value(const Point& x, int dim) const {
    return std::visit(
        overloaded{[&](const ConstantFamily& c) { return c.value; },
                   [&](const PowerFamily& p) {
                       double r = norm(x, dim);
                       return p.exponent == 0.0 ? p.coef : p.coef * std::pow(r, p.exponent);
                   },
                   [&](const LogAbsFamily& l) { return l.scale * std::log(norm(x, dim)) + l.offset; },
                   [&](const IndicatorFamily& i) { return i.box.contains_point(x) ? 1.0 : 0.0; },
                   [&](const RestrictedFamily& r) { return r.box.contains_point(x) ? r.base->value(x, dim) : 0.0; },
                   [&](const ProductFamily& p) {
                       double v = 1.0;
                       for (int a = 0; a < dim && a < static_cast<int>(p.factors.size()); ++a)
                           v *= p.factors[a]->value(Point{x[a], 0.0, 0.0}, 1);
                       return v;
                   },
                   [&](const ExpScaledBmoFamily& e) { return Provider(as_power(e)).value(x, dim); }},
        family_);
}

std::optional<Provider> Provider::abs_pow(double r) const {
    using R = std::optional<Provider>;
    return std::visit(
        overloaded{[&](const ConstantFamily& c) -> R { return constant(std::pow(std::abs(c.value), r)); },
                   [&](const PowerFamily& p) -> R { return power(p.exponent * r, std::pow(std::abs(p.coef), r)); },
                   [&](const LogAbsFamily& l) -> R {
                       if (l.scale == 0.0) return constant(std::pow(std::abs(l.offset), r));
                       return std::nullopt;
                   },
                   [&](const IndicatorFamily&) -> R {
                       if (r > 0.0) return *this;
                       return std::nullopt;
                   },
                   [&](const RestrictedFamily& rf) -> R {
                       if (!(r > 0.0)) return std::nullopt;
                       auto b = rf.base->abs_pow(r);
                       if (!b) return std::nullopt;
                       return restricted(*b, rf.box);
                   },
                   [&](const ProductFamily& p) -> R {
                       std::vector<Provider> out;
                       for (const auto& f : p.factors) {
                           auto g = f->abs_pow(r);
                           if (!g) return std::nullopt;
                           out.push_back(*g);
                       }
                       return product(out);
                   },
                   [&](const ExpScaledBmoFamily& e) -> R { return Provider(as_power(e)).abs_pow(r); }},
        family_);
}

Provider Provider::scaled(double c) const {
    return std::visit(
        overloaded{[&](const ConstantFamily& k) { return constant(c * k.value); },
                   [&](const PowerFamily& p) { return power(p.exponent, c * p.coef); },
                   [&](const LogAbsFamily& l) { return log_abs(c * l.scale, c * l.offset); },
                   [&](const IndicatorFamily& i) { return restricted(constant(c), i.box); },
                   [&](const RestrictedFamily& r) { return restricted(r.base->scaled(c), r.box); },
                   [&](const ProductFamily& p) {
                       ProductFamily q = p;
                       if (!q.factors.empty()) q.factors[0] = std::make_shared<const Provider>(q.factors[0]->scaled(c));
                       return Provider(std::move(q));
                   },
                   [&](const ExpScaledBmoFamily& e) { return Provider(as_power(e)).scaled(c); }},
        family_);
}

std::optional<Provider> Provider::times(const Provider& other) const {
    using R = std::optional<Provider>;
    if (auto* e = std::get_if<ExpScaledBmoFamily>(&family_)) return Provider(as_power(*e)).times(other);
    if (auto* e = std::get_if<ExpScaledBmoFamily>(&other.family_)) return times(Provider(as_power(*e)));
    if (auto* c = std::get_if<ConstantFamily>(&other.family_)) return scaled(c->value);
    if (auto* c = std::get_if<ConstantFamily>(&family_)) return other.scaled(c->value);
    if (auto* i = std::get_if<IndicatorFamily>(&family_)) return restricted(other, i->box);
    if (auto* i = std::get_if<IndicatorFamily>(&other.family_)) return restricted(*this, i->box);
    if (auto* r = std::get_if<RestrictedFamily>(&family_)) {
        R b = r->base->times(other);
        if (!b) return std::nullopt;
        return restricted(*b, r->box);
    }
    if (auto* r = std::get_if<RestrictedFamily>(&other.family_)) {
        R b = times(*r->base);
        if (!b) return std::nullopt;
        return restricted(*b, r->box);
    }
    auto* p1 = std::get_if<PowerFamily>(&family_);
    auto* p2 = std::get_if<PowerFamily>(&other.family_);
    if (p1 && p2) return power(p1->exponent + p2->exponent, p1->coef * p2->coef);
    auto* f1 = std::get_if<ProductFamily>(&family_);
    auto* f2 = std::get_if<ProductFamily>(&other.family_);
    if (f1 && f2 && f1->factors.size() == f2->factors.size()) {
        std::vector<Provider> out;
        for (std::size_t a = 0; a < f1->factors.size(); ++a) {
            R g = f1->factors[a]->times(*f2->factors[a]);
            if (!g) return std::nullopt;
            out.push_back(*g);
        }
        return product(out);
    }
    return std::nullopt;
}

bool Provider::strictly_positive() const {
    return std::visit(overloaded{[](const ConstantFamily& c) { return c.value > 0.0; },
                                 [](const PowerFamily& p) { return p.coef > 0.0; },
                                 [](const LogAbsFamily&) { return false; },
                                 [](const IndicatorFamily&) { return false; },
                                 [](const RestrictedFamily&) { return false; },
                                 [](const ProductFamily& p) {
                                     for (const auto& f : p.factors)
                                         if (!f->strictly_positive()) return false;
                                     return !p.factors.empty();
                                 },
                                 [](const ExpScaledBmoFamily&) { return true; }},
                      family_);
}

std::optional<double> Provider::abs_deviation_integral(const Box& q, double c) const {
    using R = std::optional<double>;
    return std::visit(
        overloaded{
            [&](const ConstantFamily& k) -> R { return std::abs(k.value - c) * q.volume(); },
            [&](const LogAbsFamily& l) -> R {
                if (l.scale == 0.0) return std::abs(l.offset - c) * q.volume();
                if (q.dim != 1) return std::nullopt;
                return std::abs(l.scale) * detail::log_abs_dev_integral_1d(q.lo[0], q.hi[0], (c - l.offset) / l.scale);
            },
            [&](const PowerFamily& p) -> R {
                if (q.dim != 1) return std::nullopt;
                std::vector<double> cuts{0.0};
                if (p.exponent != 0.0 && c / p.coef > 0.0) {
                    double rho = std::pow(c / p.coef, 1.0 / p.exponent);
                    cuts.push_back(rho);
                    cuts.push_back(-rho);
                }
                return split_abs(
                    q.lo[0], q.hi[0], cuts, c,
                    [&](double l, double h) { return p.coef * detail::power_integral_1d(l, h, p.exponent); },
                    [&](double x) { return p.coef * std::pow(std::abs(x), p.exponent); });
            },
            [&](const IndicatorFamily&) -> R { return std::nullopt; },
            [&](const RestrictedFamily&) -> R { return std::nullopt; },
            [&](const ProductFamily&) -> R { return std::nullopt; },
            [&](const ExpScaledBmoFamily& e) -> R { return Provider(as_power(e)).abs_deviation_integral(q, c); }},
        family_);
}

std::optional<double> Provider::exp_deviation_integral(const Box& q, double c, double t) const {
    if (auto* k = std::get_if<ConstantFamily>(&family_)) return std::exp(t * std::abs(k->value - c)) * q.volume();
    if (auto* l = std::get_if<LogAbsFamily>(&family_)) {
        if (q.dim != 1) return std::nullopt;
        return detail::log_exp_dev_integral_1d(q.lo[0], q.hi[0], l->scale, l->offset, c, t);
    }
    return std::nullopt;
}

}  // namespace wnl
