#include "wnl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <type_traits>
#include <variant>

#include <CLI11.hpp>

#include "wnl/commutators.hpp"
#include "wnl/error.hpp"
#include "wnl/experiments.hpp"
#include "wnl/function_spec.hpp"
#include "wnl/json_io.hpp"
#include "wnl/report.hpp"
#include "wnl/store.hpp"

namespace wnl {

using nlohmann::json;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "counts and seeds share one slot type");

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    std::string s = buf;
    if (s.find_first_of(".eni") == std::string::npos) s += ".0";
    return s;
}

CLI::Validator above(double lo) {
    return CLI::Validator(
        [lo](std::string& v) -> std::string {
            double x = 0.0;
            if (!CLI::detail::lexical_cast(v, x) || !(x > lo)) return "must be a number > " + num(lo) + ", got " + v;
            return {};
        },
        "> " + num(lo));
}

std::string verdict(bool pass) { return pass ? "pass" : "FAIL"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// Options bound to typed storage; to_json() gives the resolved values under snake_case keys.
class Schema {
public:
    using Slot = std::variant<double*, int*, std::uint64_t*, std::string*, std::vector<double>*, bool*>;

    explicit Schema(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& value, const std::string& desc) {
        slots_.emplace_back(name, Slot(&value));
        auto* o = app_->add_option("--" + name, value, desc);
        if constexpr (std::is_same_v<T, std::vector<double>>) {
            o->delimiter(',');
        } else if constexpr (std::is_same_v<T, double>) {
            if (!std::isnan(value)) o->capture_default_str();
        } else {
            o->capture_default_str();
        }
        return o;
    }

    CLI::Option* flag(const std::string& name, bool& value, const std::string& desc) {
        slots_.emplace_back(name, Slot(&value));
        return app_->add_flag("--" + name, value, desc);
    }

    json to_json() const {
        json j = json::object();
        for (const auto& [name, slot] : slots_) {
            std::string key = name;
            for (char& c : key)
                if (c == '-') c = '_';
            std::visit([&](auto* p) { j[key] = *p; }, slot);
        }
        return j;
    }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, Slot>> slots_;
};

struct Outcome {
    json payload;
    std::string summary;
    bool pass = true;
};

struct Command {
    CLI::App* app = nullptr;
    std::unique_ptr<Schema> schema;
    std::function<Outcome()> handler;
    bool stores = true;
};

struct Common {
    std::string store = kDefaultStore;
    bool no_store = false;
    std::string format = "json";
    std::string output;
};

struct GridOpts {
    int dim = 1;
    std::vector<double> box{0.0, 1.0};
    int level = 0;
    int family_depth = 10;
    std::uint64_t family_random = 10000;
    bool no_shift = false;
    std::uint64_t seed = 0;

    void bind(Schema& s) {
        s.add("dim", dim, "dimension 1..3")->check(CLI::Range(1, 3));
        s.add("box", box, "lo,hi for every axis, or lo_1..lo_n,hi_1..hi_n");
        s.add("level", level, "uniform grid level, 2^level cells per axis (0 picks 10/5/3 by dimension)")
            ->check(CLI::Range(0, 20));
        s.add("family-depth", family_depth, "deepest dyadic generation of the cube family (capped at --level)")->check(CLI::Range(0, 14));
        s.add("family-random", family_random, "seeded random cubes in the family");
        s.flag("no-shift", no_shift, "omit the third-shifted dyadic lattices");
        s.add("seed", seed, "seed for random cubes and perturbations");
    }

    Box resolve_box() const {
        std::vector<double> lo, hi;
        if (box.size() == 2) {
            lo.assign(dim, box[0]);
            hi.assign(dim, box[1]);
        } else if (box.size() == 2 * static_cast<std::size_t>(dim)) {
            lo.assign(box.begin(), box.begin() + dim);
            hi.assign(box.begin() + dim, box.end());
        } else {
            throw UsageError("--box needs 2 or 2*dim numbers");
        }
        for (int a = 0; a < dim; ++a)
            if (!(lo[a] < hi[a])) throw UsageError("--box needs lo < hi on every axis");
        return make_box(lo, hi);
    }

    GridPtr grid() {
        if (level == 0) level = dim == 1 ? 10 : dim == 2 ? 5 : 3;
        const int limit = dim == 1 ? 20 : dim == 2 ? 10 : 6;
        if (level > limit) throw UsageError("--level must be at most " + std::to_string(limit) + " in dimension " +
                                            std::to_string(dim));
        return make_uniform_grid(resolve_box(), level);
    }

    /// Call after grid(); dyadic generations below the cell size are dropped.
    CubeFamily family() {
        family_depth = std::min(family_depth, level);
        CubeFamily f = CubeFamily::standard(resolve_box(), family_depth, seed);
        f.random_count = family_random;
        f.shifted = !no_shift;
        return f;
    }
};

DiscreteOperator make_operator(const std::string& op, const GridPtr& grid) {
    if (op == "hilbert") {
        if (grid->dim() != 1) throw UsageError("--op hilbert needs --dim 1");
        return hilbert(grid);
    }
    if (op == "identity") return identity_operator(grid);
    if (op.rfind("riesz:", 0) == 0) {
        int j = 0;
        try {
            j = std::stoi(op.substr(6));
        } catch (const std::exception&) {
            throw UsageError("--op riesz:j needs an integer j");
        }
        if (j < 1 || j > grid->dim()) throw UsageError("--op riesz:j needs 1 <= j <= dim");
        return riesz(grid, j);
    }
    throw UsageError("--op must be hilbert, identity or riesz:j, got '" + op + "'");
}

std::string payload_csv(const json& payload) {
    if (payload.contains("per_delta")) return record_to_csv(record_from_json(payload));
    std::string head, row;
    for (const auto& [key, value] : payload.items()) {
        if (!head.empty()) {
            head += ',';
            row += ',';
        }
        head += csv_field(key);
        row += csv_field(value.is_string() ? value.get<std::string>() : value.dump());
    }
    return head + "\r\n" + row + "\r\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot write '" + path + "'");
    os << content;
    if (!os) throw UsageError("write to '" + path + "' failed");
}

std::string experiment_summary(const std::string& name, const ExperimentRecord& r) {
    std::ostringstream os;
    os << name << ": slope " << num(r.fit.slope) << (r.fit.lower_bound ? " (lower bound)" : "") << " vs predicted "
       << num(r.fit.predicted) << ", residual " << num(r.fit.residual_max) << ", " << r.per_delta.size()
       << " deltas (" << verdict(r.pass) << ")";
    return os.str();
}

Outcome experiment_outcome(const std::string& name, const ExperimentRecord& r) {
    return {record_to_json(r), experiment_summary(name, r), r.pass};
}

class Cli {
public:
    Cli() : app_("Weighted commutator norm lab: A_p/BMO analyzers, commutators and sharpness experiments", "wnl") {
        app_.require_subcommand(1);
        app_.footer("Weight, symbol and function flags accept:\n" + function_grammar() +
                    "\nExit codes: 0 success, 1 a checked inequality failed, 2 usage or input error.");
        add_analyzers();
        add_commutator_commands();
        add_experiments();
        add_predict();
        add_report();
    }

    int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
        if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
            bool known = false;
            for (const auto& c : commands_) known = known || c.app->get_name() == args.front();
            if (!known) {
                err << "error: unknown command '" << args.front() << "'\n" << app_.help();
                return 2;
            }
        }
        std::vector<std::string> full;
        try {
            full = with_config(args);
        } catch (const CLI::Error& e) {
            err << "error: --config: " << e.what() << "\n";
            return 2;
        }
        std::vector<std::string> rev(full.rbegin(), full.rend());
        try {
            app_.parse(rev);
        } catch (const CLI::CallForHelp&) {
            out << (app_.get_subcommands().empty() ? app_.help() : app_.get_subcommands().front()->help());
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app_.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << "\n";
            if (app_.get_subcommands().empty()) err << app_.help();
            return 2;
        }
        try {
            for (auto& c : commands_)
                if (c.app->parsed()) return execute(c, out, err);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        } catch (const json::exception& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
        err << app_.help();
        return 2;
    }

private:
    /// Appends `--key=value` for config entries whose option is not already on the command line.
    static std::vector<std::string> with_config(const std::vector<std::string>& args) {
        std::string path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        }
        if (path.empty() || args.empty()) return args;
        std::vector<std::string> out = args;
        for (const auto& item : CLI::ConfigINI().from_file(path)) {
            if (item.name == "++" || item.name == "--") continue;  // section markers
            if (!item.parents.empty() && item.parents.front() != args.front()) continue;
            std::string key = item.name;
            for (char& c : key)
                if (c == '_') c = '-';
            if (key == "config") continue;
            bool given = false;
            for (const auto& a : args) given = given || a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
            if (given) continue;
            std::string value;
            for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
            out.push_back("--" + key + "=" + value);
        }
        return out;
    }

    int execute(Command& c, std::ostream& out, std::ostream& err) {
        Outcome o = c.handler();
        const std::string name = c.app->get_name();
        if (c.stores) {
            json params = c.schema->to_json();
            if (!common_.no_store) ResultStore(common_.store).append(name, params, o.payload);
            if (!common_.output.empty())
                write_file(common_.output, common_.format == "csv" ? payload_csv(o.payload) : o.payload.dump(2) + "\n");
        }
        out << o.summary << "\n";
        if (!o.pass && c.stores) err << name << ": checked inequality failed\n";
        return o.pass ? 0 : 1;
    }

    Command& add_command(const std::string& name, const std::string& desc, bool stores = true) {
        Command c;
        c.app = app_.add_subcommand(name, desc);
        c.app->add_option("--config", config_path_, "key=value file supplying option values (command-line flags win)");
        c.schema = std::make_unique<Schema>(c.app);
        c.stores = stores;
        if (stores) {
            c.app->add_option("--store", common_.store, "JSON-lines result store")->capture_default_str();
            c.app->add_flag("--no-store", common_.no_store, "do not append to the store");
            c.app->add_option("--format", common_.format, "format of --output")
                ->check(CLI::IsMember({"json", "csv"}))
                ->capture_default_str();
            c.app->add_option("--output", common_.output, "also write the record to this file");
        }
        commands_.push_back(std::move(c));
        return commands_.back();
    }

    void add_analyzers() {
        {
            auto& c = add_command("ap-constant", "estimate [w]_{A_p} over a cube family");
            c.schema->add("weight", weight_, "weight spec")->capture_default_str();
            c.schema->add("p", p_, "exponent p > 1")->check(above(1.0));
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto w = make_function(weight_, grid_.grid());
                auto r = ap_constant(w, p_, grid_.family());
                return Outcome{to_json(r),
                               "ap-constant: [w]_A_p estimate " + num(r.estimate) + " at p = " + num(p_) + " over " +
                                   std::to_string(r.cubes) + " cubes",
                               true};
            };
        }
        {
            auto& c = add_command("bmo-norm", "estimate the BMO norm over a cube family");
            c.schema->add("function", function_, "function spec")->capture_default_str();
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto b = make_function(function_, grid_.grid());
                auto r = bmo_norm(b, grid_.family());
                return Outcome{to_json(r),
                               "bmo-norm: ||b||_BMO estimate " + num(r.estimate) + " over " +
                                   std::to_string(r.cubes) + " cubes",
                               true};
            };
        }
        {
            auto& c = add_command("jn-check", "measured John-Nirenberg constant at tilt alpha_n/||b||_BMO");
            c.schema->add("function", function_, "function spec")->capture_default_str();
            c.schema->add("tilt", tilt_, "multiplier on alpha_n/||b||_BMO")->check(CLI::PositiveNumber);
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto b = make_function(function_, grid_.grid());
                auto fam = grid_.family();
                double bmo = bmo_norm(b, fam).estimate;
                auto r = jn_check(b, fam, bmo, tilt_);
                bool ok = std::isfinite(r.beta_measured);
                return Outcome{to_json(r),
                               "jn-check: alpha_n = " + num(r.alpha) + ", bmo = " + num(bmo) + ", beta_measured = " +
                                   num(r.beta_measured) + " (" + verdict(ok) + ")",
                               ok};
            };
        }
        {
            auto& c = add_command("exp-bmo", "compare [e^{sb}]_{A_p} with beta_measured^p");
            c.schema->add("function", function_, "symbol b spec")->capture_default_str();
            c.schema->add("s", s_, "exponent s, |s| <= alpha_n/||b||_BMO")->required();
            c.schema->add("p", p_, "exponent p > 1")->check(above(1.0));
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto b = make_function(function_, grid_.grid());
                auto fam = grid_.family();
                double bmo = bmo_norm(b, fam).estimate;
                auto jn = jn_check(b, fam, bmo);
                auto r = exp_bmo_check(b, s_, p_, fam, jn);
                return Outcome{to_json(r),
                               "exp-bmo: [e^{sb}]_A_p estimate " + num(r.ap.estimate) + ", ceiling " +
                                   num(r.ceiling) + " (" + verdict(r.pass) + ")",
                               r.pass};
            };
        }
        {
            auto& c = add_command("rhi-check", "sharp reverse Hoelder ratio at r_w = 1 + 1/(2^{n+5}[w]_A2)");
            c.schema->add("weight", weight_, "weight spec")->capture_default_str();
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto w = make_function(weight_, grid_.grid());
                auto fam = grid_.family();
                double a2 = ap_constant(w, 2.0, fam).estimate;
                auto r = rhi_check(w, fam, a2);
                return Outcome{to_json(r),
                               "rhi-check: [w]_A2 = " + num(a2) + ", r_w = " + num(r.r_w) + ", worst ratio " +
                                   num(r.worst_ratio) + " <= 2 (" + verdict(r.pass) + ")",
                               r.pass};
            };
        }
        {
            auto& c = add_command("cz-decompose", "local Calderon-Zygmund cubes of w at level lambda");
            c.schema->add("weight", weight_, "weight spec")->capture_default_str();
            c.schema->add("lambda", lambda_, "level above the root average (default twice the average)");
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto w = make_function(weight_, grid_.grid());
                Box root = grid_.resolve_box();
                if (std::isnan(lambda_)) lambda_ = 2.0 * cell_average(w, root);
                auto cz = cz_decompose(w, root, lambda_);
                const double cap = std::ldexp(lambda_, grid_.dim);
                bool ok = true;
                for (const auto& q : cz.cubes) ok = ok && q.average > lambda_ && q.average <= cap;
                double a2 = ap_constant(w, 2.0, grid_.family()).estimate;
                auto eq = eq_measure_check(w, root, a2);
                json payload = to_json(cz);
                payload["bounds_hold"] = ok;
                payload["eq_measure"] = {{"fraction", eq.fraction},
                                         {"dual_fraction", eq.dual_fraction},
                                         {"threshold", eq.threshold},
                                         {"a2", a2},
                                         {"pass", eq.pass}};
                payload["pass"] = ok && eq.pass;
                return Outcome{payload,
                               "cz-decompose: " + std::to_string(cz.cubes.size()) + " cubes at lambda = " +
                                   num(lambda_) + ", averages in (lambda, 2^n lambda]: " + verdict(ok) +
                                   ", |E_Q|/|Q| = " + num(eq.fraction) + " <= 1/2: " + verdict(eq.pass),
                               ok && eq.pass};
            };
        }
    }

    void add_commutator_commands() {
        {
            auto& c = add_command("op-norm", "discrete L^p(w) operator norm");
            c.schema->add("op", op_, "hilbert, identity or riesz:j")->capture_default_str();
            c.schema->add("weight", weight_, "weight spec")->capture_default_str();
            c.schema->add("p", p_, "exponent p > 1")->check(above(1.0));
            c.schema->add("perturbations", perturbations_, "random perturbations per witness (p != 2)")
                ->check(CLI::NonNegativeNumber);
            grid_.bind(*c.schema);
            c.handler = [this] {
                auto grid = grid_.grid();
                auto t = make_operator(op_, grid);
                auto w = make_function(weight_, grid);
                std::vector<Witness> witnesses{{"ones", GridFunction::constant(grid, 1.0)},
                                               {"dual", w.abs_pow(-1.0 / (p_ - 1.0)).sampled()}};
                NormOptions opts;
                opts.perturbations = perturbations_;
                opts.seed = grid_.seed;
                auto r = weighted_norm(t, w, p_, witnesses, opts);
                std::string s = "op-norm: ||" + op_ + "||_{L^p(w)} = " + num(r.value) + " (" + r.method + ")";
                if (r.method == "witness-lower-bound") s += ", Schur ceiling " + num(r.ceiling);
                return Outcome{to_json(r), s, true};
            };
        }
        {
            auto& c = add_command("commutator", "k-th order commutator [b,T]^k f by recursion, kernel power, contour");
            c.schema->add("op", op_, "hilbert, identity or riesz:j")->capture_default_str();
            c.schema->add("symbol", symbol_, "symbol b spec")->capture_default_str();
            c.schema->add("function", fvalue_, "input function f spec")->capture_default_str();
            c.schema->add("k", k_, "order")->check(CLI::Range(0, 8));
            c.schema->add("method", method_, "recursion, kernel-power, contour or all")
                ->check(CLI::IsMember({"recursion", "kernel-power", "contour", "all"}))
                ->capture_default_str();
            c.schema->add("nodes", nodes_, "contour nodes N")->check(CLI::Range(2, 1 << 16));
            c.schema->add("radius", radius_, "contour radius (default: alpha_n/(2 r' ||b||_BMO))");
            c.schema->add("weight", weight_, "weight whose [w]_A2 feeds the radius rule")->capture_default_str();
            c.schema->add("tolerance", tolerance_, "max relative deviation between methods")
                ->check(CLI::PositiveNumber);
            grid_.bind(*c.schema);
            c.handler = [this] { return run_commutator(); };
        }
    }

    Outcome run_commutator() {
        auto grid = grid_.grid();
        auto t = make_operator(op_, grid);
        auto b = make_function(symbol_, grid);
        auto f = make_function(fvalue_, grid);
        std::vector<CommutatorResult> results;
        json contour = nullptr;
        const bool all = method_ == "all";
        if (all || method_ == "recursion") results.push_back(commutator_recursion(b, t, f, k_));
        if (all || method_ == "kernel-power") results.push_back(commutator_kernel_power(b, t, f, k_));
        if (all || method_ == "contour") {
            ContourConfig cfg;
            if (std::isnan(radius_)) {
                auto fam = grid_.family();
                double a2 = ap_constant(make_function(weight_, grid), 2.0, fam).estimate;
                double bmo = bmo_norm(b, fam).estimate;
                cfg = radius_rule(grid->dim(), a2, bmo, k_, nodes_);
            } else {
                if (!(radius_ > 0.0)) throw UsageError("--radius must be positive");
                cfg.radius = radius_;
                cfg.nodes = nodes_;
                cfg.order = k_;
                cfg.dim = grid->dim();
            }
            contour = to_json(cfg);
            results.push_back(contour_commutator(b, t, f, cfg));
        }
        bool ok = true;
        double worst = 0.0;
        for (std::size_t i = 1; i < results.size(); ++i) {
            compare(results[i], results.front());
            worst = std::max(worst, *results[i].deviation);
            ok = ok && *results[i].deviation <= tolerance_;
        }
        json methods = json::array();
        for (const auto& r : results) methods.push_back(to_json(r));
        const auto& ref = results.front().output.values();
        json payload = {{"kind", "commutator"},
                        {"order", k_},
                        {"operator", t.description},
                        {"methods", methods},
                        {"contour", contour},
                        {"reference_output", std::vector<double>(ref.begin(), ref.end())},
                        {"max_deviation", worst},
                        {"pass", ok}};
        std::string s = "commutator: order " + std::to_string(k_) + ", " + std::to_string(results.size()) +
                        " method(s), max |output| " + num(methods.front().at("max_abs_output").get<double>());
        if (results.size() > 1) s += ", max deviation " + num(worst) + " <= " + num(tolerance_);
        return Outcome{payload, s + " (" + verdict(ok) + ")", ok};
    }

    void bind_experiment(Schema& s, ExperimentParams& e, bool graded, bool uniform, bool riesz_opts) {
        s.add("deltas", e.deltas, "strictly decreasing deltas in (0,1)");
        s.add("tolerance", e.tolerance, "slope tolerance")->capture_default_str();
        s.add("seed", e.seed, "seed for cube families and Monte Carlo");
        s.add("family-depth", e.family_depth, "dyadic depth of the A_p estimation family");
        s.add("family-random", e.family_random, "random cubes in the A_p estimation family");
        if (graded) {
            s.add("grading-ratio", e.grading_ratio, "graded grid ratio q");
            s.add("subdivisions", e.subdivisions, "cells per graded layer");
            s.add("grading-tol", e.grading_tol, "graded depth target (q^layers)^delta <= tol");
            s.add("layers", e.layers, "fixed graded layer count (0 derives it)");
        }
        if (uniform) s.add("level", e.level, "uniform grid level for dimension >= 2");
        if (riesz_opts) {
            s.add("mc-samples", e.mc_samples, "Monte Carlo samples for the orthant measure");
            s.add("sample-points", e.sample_points, "pointwise sample points in the negative orthant");
            s.add("r-max", e.r_max, "radial truncation of the minorant norm");
        }
    }

    void add_experiments() {
        {
            auto& c = add_command("sharpness-hilbert", "power-weight sharpness sweep for [b,H]");
            bind_experiment(*c.schema, hilbert_, true, false, false);
            c.schema->add("resolved-fraction", hilbert_.resolved_fraction, "pointwise cells need (edge/x)^delta <= this");
            c.handler = [this] { return experiment_outcome("sharpness-hilbert", hilbert_sharpness(hilbert_)); };
        }
        {
            auto& c = add_command("sharpness-riesz", "orthant sharpness sweep for k-th order Riesz commutators");
            riesz_.dim = 2;
            riesz_.deltas = {0.25, 0.125, 0.0625, 0.03125};
            c.schema->add("dim", riesz_.dim, "dimension 2 or 3")->check(CLI::Range(2, 3));
            c.schema->add("p", riesz_.p, "exponent 1 < p <= 2");
            c.schema->add("k", riesz_.k, "commutator order");
            c.schema->add("j", riesz_.j, "Riesz direction");
            bind_experiment(*c.schema, riesz_, false, true, true);
            c.handler = [this] { return experiment_outcome("sharpness-riesz", riesz_sharpness(riesz_)); };
        }
        {
            auto& c = add_command("growth", "log-log growth of ||[b,T]^k||_{L^p(w)} against [w]_{A_p}");
            c.schema->add("op", growth_.op, "hilbert or riesz:j");
            c.schema->add("dim", growth_.dim, "dimension")->check(CLI::Range(1, 3));
            c.schema->add("p", growth_.p, "exponent p > 1");
            c.schema->add("k", growth_.k, "commutator order");
            c.schema->add("perturbations", growth_.perturbations, "random perturbations per witness (p != 2)");
            bind_experiment(*c.schema, growth_, true, true, false);
            c.handler = [this] { return experiment_outcome("growth", growth_exponent(growth_)); };
        }
    }

    void add_predict() {
        auto& c = add_command("predict-bound", "upper-bound constants from the induction and corollary forms");
        c.schema->add("a2", a2_, "[w]_A2 value >= 1")->required()->check(CLI::Range(1.0, 1e300));
        c.schema->add("k", k_, "commutator order")->check(CLI::Range(0, 8));
        c.schema->add("r", model_r_, "exponent r of the base bound");
        c.schema->add("a0", a0_, "base constant a_0");
        c.schema->add("c-n", c_n_, "constant c_n (default 4, or C 2^{2n} with --beta)");
        c.schema->add("gamma-n", gamma_n_, "constant gamma_n (default 4, or 4 beta with --beta)");
        c.schema->add("beta", beta_, "John-Nirenberg beta; derives c_n and gamma_n");
        c.schema->add("big-c", big_c_, "constant C in c_n = C 2^{2n}");
        c.schema->add("dim", grid_.dim, "dimension for --beta")->check(CLI::Range(1, 3));
        c.handler = [this] {
            UpperBoundModel m;
            if (!std::isnan(beta_)) {
                if (!(beta_ > 0.0)) throw UsageError("--beta must be positive");
                m = default_model(grid_.dim, beta_, big_c_, model_r_, a0_, k_);
            } else {
                m.r = model_r_;
                m.a0 = a0_;
                m.k = k_;
            }
            if (!std::isnan(c_n_)) m.c_n = c_n_;
            if (!std::isnan(gamma_n_)) m.gamma_n = gamma_n_;
            c_n_ = m.c_n;
            gamma_n_ = m.gamma_n;
            auto pc = predicted_constant(m, a2_);
            json payload = {{"kind", "predict-bound"},
                            {"model", {{"r", m.r}, {"a0", m.a0}, {"c_n", m.c_n}, {"gamma_n", m.gamma_n}, {"k", m.k}}},
                            {"a2", a2_},
                            {"induction", pc.induction},
                            {"corollary", pc.corollary},
                            {"recurrence", pc.recurrence},
                            {"smaller", pc.smaller}};
            return Outcome{payload,
                           "predict-bound: induction " + num(pc.induction) + ", corollary " + num(pc.corollary) +
                               ", recurrence " + num(pc.recurrence) + " (smaller: " + pc.smaller + ")",
                           true};
        };
    }

    void add_report() {
        auto& c = add_command("report", "Markdown tables and CSV files from the result store", false);
        c.app->add_option("--store", common_.store, "JSON-lines result store")->capture_default_str();
        c.app->add_option("--filter", filter_, "command name to select (all when empty)");
        c.app->add_option("--output", common_.output, "write the Markdown here instead of stdout");
        c.app->add_option("--csv-dir", csv_dir_, "directory for the CSV bundle");
        c.handler = [this] {
            auto bundle = build_report(ResultStore(common_.store).load(), filter_);
            if (bundle.records == 0) return Outcome{json(), "no records", false};
            if (!csv_dir_.empty()) {
                std::filesystem::create_directories(csv_dir_);
                for (const auto& [file, content] : bundle.csv_files)
                    write_file((std::filesystem::path(csv_dir_) / file).string(), content);
            }
            std::string s;
            if (common_.output.empty()) {
                s = bundle.markdown;
                if (!s.empty() && s.back() == '\n') s.pop_back();
            } else {
                write_file(common_.output, bundle.markdown);
                s = "report: " + std::to_string(bundle.records) + " records -> " + common_.output;
            }
            return Outcome{json(), s, true};
        };
    }

    CLI::App app_;
    std::vector<Command> commands_;
    Common common_;
    GridOpts grid_;
    std::string weight_ = "power:0";
    std::string function_ = "logabs";
    std::string symbol_ = "logabs";
    std::string fvalue_ = "const:1";
    std::string op_ = "hilbert";
    std::string method_ = "all";
    std::string filter_;
    std::string csv_dir_;
    std::string config_path_;
    double p_ = 2.0;
    double tilt_ = 1.0;
    double s_ = 0.0;
    double lambda_ = kUnset;
    double radius_ = kUnset;
    double tolerance_ = 1e-8;
    double a2_ = 1.0;
    double model_r_ = 1.0;
    double a0_ = 1.0;
    double c_n_ = kUnset;
    double gamma_n_ = kUnset;
    double beta_ = kUnset;
    double big_c_ = 1.0;
    int k_ = 1;
    int nodes_ = 64;
    int perturbations_ = 4;
    ExperimentParams hilbert_;
    ExperimentParams riesz_;
    ExperimentParams growth_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Cli cli;
    return cli.run(args, out, err);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

}  // namespace wnl
