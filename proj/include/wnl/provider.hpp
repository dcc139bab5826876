#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wnl/grid.hpp"

namespace wnl {

class Provider;

/// c
struct ConstantFamily {
    double value = 1.0;
};
/// coef * |x|^exponent
struct PowerFamily {
    double exponent = 0.0;
    double coef = 1.0;
};
/// scale * log|x| + offset
struct LogAbsFamily {
    double scale = 1.0;
    double offset = 0.0;
};
/// Indicator of a box.
struct IndicatorFamily {
    Box box;
};
/// base restricted to a box (zero outside).
struct RestrictedFamily {
    std::shared_ptr<const Provider> base;
    Box box;
};
/// prod_i g_i(x_i) with one-dimensional factors.
struct ProductFamily {
    std::vector<std::shared_ptr<const Provider>> factors;
};
/// exp(s * (scale log|x| + offset)), which equals a power weight.
struct ExpScaledBmoFamily {
    double s = 0.0;
    LogAbsFamily base;
};

/// Analytic function with exact means over axis-parallel boxes.
class Provider {
public:
    using Family = std::variant<ConstantFamily, PowerFamily, LogAbsFamily, IndicatorFamily,
                                RestrictedFamily, ProductFamily, ExpScaledBmoFamily>;

    Provider(Family f) : family_(std::move(f)) {}

    static Provider constant(double c) { return Provider(ConstantFamily{c}); }
    static Provider power(double exponent, double coef = 1.0) { return Provider(PowerFamily{exponent, coef}); }
    static Provider log_abs(double scale = 1.0, double offset = 0.0) { return Provider(LogAbsFamily{scale, offset}); }
    static Provider indicator(const Box& b) { return Provider(IndicatorFamily{b}); }
    static Provider restricted(const Provider& base, const Box& b);
    static Provider product(const std::vector<Provider>& factors);
    static Provider exp_scaled(double s, const LogAbsFamily& base) { return Provider(ExpScaledBmoFamily{s, base}); }

    const Family& family() const { return family_; }
    std::string name() const;

    /// Integral over q (q has the function's dimension; product factors act per axis).
    double integral(const Box& q) const;
    /// Mean over q; q must have positive volume.
    double mean(const Box& q) const;
    /// Pointwise value (used for diagnostics only).
    double value(const Point& x, int dim) const;

    /// |f|^r as a provider, if the family is closed under it.
    std::optional<Provider> abs_pow(double r) const;
    /// f * g as a provider, if representable.
    std::optional<Provider> times(const Provider& other) const;
    /// c * f
    Provider scaled(double c) const;
    /// True when the function is strictly positive everywhere.
    bool strictly_positive() const;

    /// Exact integral of |f - c| over q when available (1-D log families, constants, powers off-origin).
    std::optional<double> abs_deviation_integral(const Box& q, double c) const;
    /// Exact integral of exp(t |f - c|) over q when available.
    std::optional<double> exp_deviation_integral(const Box& q, double c, double t) const;

private:
    Family family_;
};

using ProviderPtr = std::shared_ptr<const Provider>;

}  // namespace wnl
