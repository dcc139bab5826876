#include "wnl/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wnl/error.hpp"

namespace wnl {

namespace {

// Cells overlapped by q below which direct summation beats the cumulative table.
constexpr std::size_t kDirectLimit = 64;

Box clip(const Grid& g, const Box& q) {
    if (q.dim != g.dim()) throw UsageError("cube dimension does not match the grid");
    return intersect(q, g.box());
}

}  // namespace

void require_same_grid(const Grid& a, const Grid& b) {
    if (&a != &b && !(a == b)) throw UsageError("grid functions live on different grids");
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw UsageError("null grid");
    if (values_.size() != grid_->size()) throw UsageError("value count does not match cell count");
    build_cumulative();
}

GridFunction::GridFunction(GridPtr grid, const Provider& provider) : grid_(std::move(grid)), provider_(provider) {
    if (!grid_) throw UsageError("null grid");
    values_.resize(grid_->size());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = provider.mean(grid_->cell_box(i));
    build_cumulative();
}

GridFunction GridFunction::constant(GridPtr grid, double c) {
    return GridFunction(std::move(grid), Provider::constant(c));
}

bool GridFunction::is_weight() const {
    for (double v : values_)
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    return true;
}

void GridFunction::build_cumulative() {
    const Grid& g = *grid_;
    const int n = g.dim();
    std::array<std::size_t, kMaxDim> nodes{1, 1, 1};
    for (int a = 0; a < n; ++a) nodes[a] = g.axis_cells(a) + 1;
    cumulative_.assign(nodes[0] * nodes[1] * nodes[2], 0.0);
    auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> double& {
        return cumulative_[(i * nodes[1] + j) * nodes[2] + k];
    };
    for (std::size_t c = 0; c < values_.size(); ++c) {
        auto idx = g.unflatten(c);
        std::array<std::size_t, kMaxDim> node{0, 0, 0};
        for (int a = 0; a < n; ++a) node[a] = idx[a] + 1;
        at(node[0], node[1], node[2]) = values_[c] * g.measure(c);
    }
    for (int a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < nodes[0]; ++i)
            for (std::size_t j = 0; j < nodes[1]; ++j)
                for (std::size_t k = 0; k < nodes[2]; ++k) {
                    std::array<std::size_t, kMaxDim> p{i, j, k};
                    if (p[a] == 0) continue;
                    std::array<std::size_t, kMaxDim> prev = p;
                    --prev[a];
                    at(i, j, k) += at(prev[0], prev[1], prev[2]);
                }
    }
}

double GridFunction::cumulative_at(const Point& x) const {
    const Grid& g = *grid_;
    const int n = g.dim();
    std::array<std::size_t, kMaxDim> nodes{1, 1, 1};
    std::array<std::size_t, kMaxDim> k{0, 0, 0};
    std::array<double, kMaxDim> t{0, 0, 0};
    for (int a = 0; a < n; ++a) {
        auto e = g.edges(a);
        nodes[a] = e.size();
        std::size_t cells = e.size() - 1;
        std::size_t c = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x[a]) - e.begin());
        c = c == 0 ? 0 : c - 1;
        if (c >= cells) c = cells - 1;
        k[a] = c;
        t[a] = (x[a] - e[c]) / (e[c + 1] - e[c]);
    }
    double total = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        double wgt = 1.0;
        std::array<std::size_t, kMaxDim> p{0, 0, 0};
        for (int a = 0; a < n; ++a) {
            bool up = mask >> a & 1;
            p[a] = k[a] + (up ? 1 : 0);
            wgt *= up ? t[a] : 1.0 - t[a];
        }
        if (wgt != 0.0) total += wgt * cumulative_[(p[0] * nodes[1] + p[1]) * nodes[2] + p[2]];
    }
    return total;
}

double GridFunction::cell_sum(const Box& q) const {
    const Grid& g = *grid_;
    std::size_t count = 1;
    for (int a = 0; a < g.dim(); ++a) {
        auto r = g.axis_range(a, q.lo[a], q.hi[a]);
        count *= r.second - r.first;
    }
    if (count <= kDirectLimit) {
        double s = 0.0;
        g.for_each_overlap(q, [&](std::size_t i, double v) { s += values_[i] * v; });
        return s;
    }
    double total = 0.0;
    for (int mask = 0; mask < (1 << g.dim()); ++mask) {
        Point corner{};
        int parity = 0;
        for (int a = 0; a < g.dim(); ++a) {
            bool up = mask >> a & 1;
            corner[a] = up ? q.hi[a] : q.lo[a];
            if (!up) ++parity;
        }
        total += (parity % 2 ? -1.0 : 1.0) * cumulative_at(corner);
    }
    return total;
}

double GridFunction::integral(const Box& q) const {
    Box c = clip(*grid_, q);
    if (!(c.volume() > 0.0)) return 0.0;
    if (provider_) return provider_->integral(c);
    return cell_sum(c);
}

double GridFunction::mean(const Box& q) const {
    Box c = clip(*grid_, q);
    double vol = c.volume();
    if (!(vol > 0.0)) throw UsageError("empty cube");
    if (provider_) return provider_->mean(c);
    return cell_sum(c) / vol;
}

GridFunction GridFunction::scaled(double c) const {
    if (provider_) return GridFunction(grid_, provider_->scaled(c));
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::shifted(double c) const {
    if (provider_) {
        if (auto* k = std::get_if<ConstantFamily>(&provider_->family()))
            return GridFunction(grid_, Provider::constant(k->value + c));
        if (auto* l = std::get_if<LogAbsFamily>(&provider_->family()))
            return GridFunction(grid_, Provider::log_abs(l->scale, l->offset + c));
    }
    std::vector<double> v(values_);
    for (double& x : v) x += c;
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::abs_pow(double r) const {
    if (source_ && std::abs(source_power_ * r - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon())
        return *source_;
    auto self = std::make_shared<const GridFunction>(*this);
    std::optional<GridFunction> out;
    if (provider_) {
        if (auto p = provider_->abs_pow(r)) out.emplace(grid_, *p);
    }
    if (!out) {
        std::vector<double> v(values_);
        for (double& x : v) x = std::pow(std::abs(x), r);
        out.emplace(grid_, std::move(v));
    }
    out->source_ = source_ ? source_ : self;
    out->source_power_ = source_ ? source_power_ * r : r;
    return *out;
}

GridFunction GridFunction::times(const GridFunction& other) const {
    require_same_grid(*grid_, *other.grid_);
    if (provider_ && other.provider_) {
        if (auto p = provider_->times(*other.provider_)) return GridFunction(grid_, *p);
    }
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= other.values_[i];
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::map(const std::function<double(double)>& fn) const {
    std::vector<double> v(values_);
    for (double& x : v) x = fn(x);
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::sampled() const { return GridFunction(grid_, values_); }

double cell_average(const GridFunction& f, const Box& q) { return f.mean(q); }

namespace {

double sampled_norm(const GridFunction& f, const GridFunction& w, double p) {
    const Grid& g = f.grid();
    double s = 0.0;
    double ip = 1.0 / p;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double t = std::abs(f[i]) * std::pow(w[i], ip) * std::pow(g.measure(i), ip);
        s += std::pow(t, p);
    }
    return std::pow(s, ip);
}

void check_norm_args(const GridFunction& f, const GridFunction& w, double p) {
    require_same_grid(f.grid(), w.grid());
    if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("p must be finite and >= 1");
}

}  // namespace

double lp_norm(const GridFunction& f, const GridFunction& w, double p) {
    check_norm_args(f, w, p);
    if (f.provider() && w.provider()) {
        if (auto fp = f.provider()->abs_pow(p)) {
            if (auto prod = fp->times(*w.provider())) return std::pow(prod->integral(f.grid().box()), 1.0 / p);
        }
    }
    return sampled_norm(f, w, p);
}

LpNormReport lp_norm_report(const GridFunction& f, const GridFunction& w, double p) {
    LpNormReport r;
    r.value = lp_norm(f, w, p);
    r.sampled = sampled_norm(f, w, p);
    r.discrepancy = std::abs(r.value - r.sampled);
    return r;
}

}  // namespace wnl
