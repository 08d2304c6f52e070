#include "varidual/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "varidual/toml_lite.hpp"

namespace varidual {

namespace {

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

double poly2d_eval(const std::vector<std::array<double, 3>>& terms, double x, double y) {
    double acc = 0.0;
    for (const auto& t : terms) acc += t[2] * std::pow(x, t[0]) * std::pow(y, t[1]);
    return acc;
}

struct Binder {
    const TomlDoc* doc;
    std::vector<std::string>* errors;
    std::set<std::string> consumed;

    void error(const std::string& path, const std::string& msg) { errors->push_back(path + ": " + msg); }

    const TomlValue* find(const std::string& path) {
        auto it = doc->entries.find(path);
        if (it == doc->entries.end()) return nullptr;
        consumed.insert(path);
        return &it->second;
    }

    bool get_int(const std::string& path, int* out, bool required = false) {
        const TomlValue* v = find(path);
        if (!v) {
            if (required) error(path, "missing required key");
            return false;
        }
        if (v->type != TomlValue::Type::integer) {
            error(path, "expected an integer");
            return false;
        }
        *out = static_cast<int>(v->i);
        return true;
    }

    bool get_u64(const std::string& path, std::uint64_t* out, bool required = false) {
        const TomlValue* v = find(path);
        if (!v) {
            if (required) error(path, "missing required key (seeds must be explicit)");
            return false;
        }
        if (v->type != TomlValue::Type::integer || v->i < 0) {
            error(path, "expected a nonnegative integer");
            return false;
        }
        *out = static_cast<std::uint64_t>(v->i);
        return true;
    }

    bool get_double(const std::string& path, double* out, bool required = false) {
        const TomlValue* v = find(path);
        if (!v) {
            if (required) error(path, "missing required key");
            return false;
        }
        if (!v->is_number()) {
            error(path, "expected a number");
            return false;
        }
        *out = v->as_double();
        return true;
    }

    bool get_bool(const std::string& path, bool* out) {
        const TomlValue* v = find(path);
        if (!v) return false;
        if (v->type != TomlValue::Type::boolean) {
            error(path, "expected true or false");
            return false;
        }
        *out = v->b;
        return true;
    }

    bool get_string(const std::string& path, std::string* out, bool required = false) {
        const TomlValue* v = find(path);
        if (!v) {
            if (required) error(path, "missing required key");
            return false;
        }
        if (v->type != TomlValue::Type::string) {
            error(path, "expected a string");
            return false;
        }
        *out = v->s;
        return true;
    }

    bool get_double_array(const std::string& path, std::vector<double>* out) {
        const TomlValue* v = find(path);
        if (!v) return false;
        if (v->type != TomlValue::Type::array) {
            error(path, "expected an array");
            return false;
        }
        out->clear();
        for (const TomlValue& e : v->arr) {
            if (!e.is_number()) {
                error(path, "expected numeric entries");
                return false;
            }
            out->push_back(e.as_double());
        }
        return true;
    }

    bool get_int_array(const std::string& path, std::vector<int>* out) {
        const TomlValue* v = find(path);
        if (!v) return false;
        if (v->type != TomlValue::Type::array) {
            error(path, "expected an array");
            return false;
        }
        out->clear();
        for (const TomlValue& e : v->arr) {
            if (e.type != TomlValue::Type::integer) {
                error(path, "expected integer entries");
                return false;
            }
            out->push_back(static_cast<int>(e.i));
        }
        return true;
    }

    // array of [a, b] pairs
    bool get_pair_array(const std::string& path, std::vector<std::pair<double, double>>* out) {
        const TomlValue* v = find(path);
        if (!v) return false;
        if (v->type != TomlValue::Type::array) {
            error(path, "expected an array of pairs");
            return false;
        }
        out->clear();
        for (const TomlValue& e : v->arr) {
            if (e.type != TomlValue::Type::array || e.arr.size() != 2 || !e.arr[0].is_number() ||
                !e.arr[1].is_number()) {
                error(path, "expected [location, height] pairs");
                return false;
            }
            out->emplace_back(e.arr[0].as_double(), e.arr[1].as_double());
        }
        return true;
    }

    bool get_triple_array(const std::string& path, std::vector<std::array<double, 3>>* out) {
        const TomlValue* v = find(path);
        if (!v) return false;
        if (v->type != TomlValue::Type::array) {
            error(path, "expected an array of triples");
            return false;
        }
        out->clear();
        for (const TomlValue& e : v->arr) {
            if (e.type != TomlValue::Type::array || e.arr.size() != 3) {
                error(path, "expected [i, j, coeff] triples");
                return false;
            }
            out->push_back({e.arr[0].as_double(), e.arr[1].as_double(), e.arr[2].as_double()});
        }
        return true;
    }
};

}  // namespace

IntegrandSpec ExperimentConfig::integrand() const {
    const int m = n == 1 ? 1 : (k == 1 ? 2 : 3);
    switch (kind) {
        case IntegrandKind::quadratic: return IntegrandSpec::quadratic(m);
        case IntegrandKind::p_power: return IntegrandSpec::p_power(m, params.at(0));
        case IntegrandKind::minimal_surface: return IntegrandSpec::minimal_surface(m);
        case IntegrandKind::log_barrier:
            return IntegrandSpec::log_barrier(m, params.empty() ? 1.0 : params.at(0));
        case IntegrandKind::abs_value: return IntegrandSpec::abs_value(m);
        default: throw UsageError("integrand: custom_sampled is not constructible from a config");
    }
}

std::shared_ptr<const GridDomain> ExperimentConfig::make_domain() const {
    return std::make_shared<GridDomain>(n, k, h, inner_extent, collar_width);
}

Field ExperimentConfig::boundary_field(const std::shared_ptr<const GridDomain>& dom) const {
    Field g(dom);
    const GridDomain& d = *dom;
    for (int i = 0; i < d.total(0); ++i) {
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j) {
            double x = d.coord(0, i);
            if (d.n == 1)
                g.at(i) = poly_eval(g_poly, x);
            else
                g.at(i, j) = poly2d_eval(g_poly2d, x, d.coord(1, j));
        }
    }
    return g;
}

ConstraintSpec ExperimentConfig::constraint(const std::shared_ptr<const GridDomain>& dom, const Field& g) const {
    if (!has_obstacle) return ConstraintSpec::none();
    Field psi(dom);
    const GridDomain& d = *dom;
    for (int i = 0; i < d.total(0); ++i) {
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j) {
            double x = d.coord(0, i);
            if (d.n == 1)
                psi.at(i) = poly_eval(psi_poly, x);
            else
                psi.at(i, j) = poly2d_eval(psi_poly2d, x, d.coord(1, j));
        }
    }
    return ConstraintSpec::obstacle(std::move(psi), g);
}

double ExperimentConfig::effective_dual_spacing() const {
    if (dual_spacing > 0.0) return dual_spacing;
    // A quarter of the finest smoothing radius: the mollifier then strongly
    // attenuates the dual-grid kink sawtooth in F_j' (the kernel barely
    // smooths kinks spaced at its own width).
    return std::min(0.005, schedule.delta(schedule.j_end) / 4.0);
}

ConfigParseResult parse_config_text(const std::string& text) {
    ConfigParseResult res;
    TomlDoc doc = parse_toml(text);
    res.errors = doc.errors;

    ExperimentConfig cfg;
    Binder b;
    b.doc = &doc;
    b.errors = &res.errors;

    // [domain]
    b.get_int("domain.n", &cfg.n);
    b.get_int("domain.k", &cfg.k);
    b.get_double("domain.h", &cfg.h, true);
    {
        std::vector<int> extent;
        if (b.get_int_array("domain.inner_extent", &extent)) {
            if (extent.size() == 1)
                cfg.inner_extent = {extent[0], 1};
            else if (extent.size() == 2)
                cfg.inner_extent = {extent[0], extent[1]};
            else
                b.error("domain.inner_extent", "expected 1 or 2 entries");
        } else {
            int e = 0;
            if (b.get_int("domain.inner_extent", &e)) cfg.inner_extent = {e, e};
        }
    }
    b.get_int("domain.collar_width", &cfg.collar_width);
    if (cfg.n < 1 || cfg.n > 2) b.error("domain.n", "must be 1 or 2");
    if (cfg.k < 1 || cfg.k > 2) b.error("domain.k", "must be 1 or 2");
    if (!(cfg.h > 0.0)) b.error("domain.h", "must be positive");
    if (cfg.collar_width < cfg.k) b.error("domain.collar_width", "must be >= k");

    // [integrand]
    {
        std::string kind;
        if (b.get_string("integrand.kind", &kind, true)) {
            if (!kind_from_name(kind, &cfg.kind) || cfg.kind == IntegrandKind::custom_sampled)
                b.error("integrand.kind", "unknown integrand kind '" + kind + "'");
        }
        b.get_double_array("integrand.params", &cfg.params);
        if (cfg.kind == IntegrandKind::p_power && (cfg.params.empty() || !(cfg.params[0] > 1.0)))
            b.error("integrand.params", "p_power requires params = [p] with p > 1");
        if (cfg.kind == IntegrandKind::log_barrier && !cfg.params.empty() && !(cfg.params[0] > 0.0))
            b.error("integrand.params", "log_barrier radius must be positive");
    }

    // [boundary]
    {
        std::string preset;
        bool have_poly = b.get_double_array("boundary.poly", &cfg.g_poly);
        bool have_poly2d = b.get_triple_array("boundary.poly2d", &cfg.g_poly2d);
        bool have_preset = b.get_string("boundary.preset", &preset);
        if (have_preset) {
            if (preset == "zero") {
                cfg.g_poly = {0.0};
                cfg.g_poly2d = {};
            } else {
                b.error("boundary.preset", "unknown preset '" + preset + "'");
            }
        }
        if (cfg.n == 1 && !have_poly && !have_preset) b.error("boundary.poly", "missing required key");
        if (cfg.n == 2 && !have_poly2d && !have_preset) b.error("boundary.poly2d", "missing required key");
        if (cfg.g_poly.size() > 5) b.error("boundary.poly", "polynomial degree is capped at 4");
        for (const auto& t : cfg.g_poly2d)
            if (t[0] + t[1] > 4.0) b.error("boundary.poly2d", "polynomial degree is capped at 4");
    }

    // [constraint]
    {
        std::string kind = "none";
        b.get_string("constraint.kind", &kind);
        if (kind == "obstacle") {
            cfg.has_obstacle = true;
            bool have = b.get_double_array("constraint.psi_poly", &cfg.psi_poly);
            bool have2 = b.get_triple_array("constraint.psi_poly2d", &cfg.psi_poly2d);
            if (cfg.n == 1 && !have) b.error("constraint.psi_poly", "obstacle requires psi_poly");
            if (cfg.n == 2 && !have2) b.error("constraint.psi_poly2d", "obstacle requires psi_poly2d");
        } else if (kind != "none") {
            b.error("constraint.kind", "expected 'none' or 'obstacle'");
        }
    }

    // [schedule]
    b.get_int("schedule.j_start", &cfg.schedule.j_start);
    b.get_int("schedule.j_end", &cfg.schedule.j_end);
    b.get_string("schedule.delta_rule", &cfg.schedule.delta_rule.name);
    b.get_double("schedule.delta_scale", &cfg.schedule.delta_rule.scale);
    b.get_string("schedule.mu_rule", &cfg.schedule.mu_rule.name);
    b.get_double("schedule.mu_scale", &cfg.schedule.mu_rule.scale);
    b.get_int("schedule.quadrature_order", &cfg.schedule.quadrature_order);
    if (cfg.schedule.j_start < 2) {
        b.error("schedule.j_start", "must be >= 2: mu_j = 1/(j-1) has a pole at j = 1");
    } else {
        try {
            cfg.schedule.validate();
        } catch (const std::exception& e) {
            b.error("schedule", e.what());
        }
    }

    // [solver]
    b.get_int("solver.max_inner_iters", &cfg.solver.max_inner_iters);
    b.get_double("solver.grad_tol", &cfg.solver.grad_tol);
    b.get_double("solver.armijo_c", &cfg.solver.armijo_c);
    b.get_double("solver.armijo_backtrack", &cfg.solver.armijo_backtrack);
    b.get_double("solver.init_step", &cfg.solver.init_step);
    b.get_u64("solver.seed", &cfg.solver.seed, true);
    b.get_bool("solver.warm_start", &cfg.solver.warm_start);
    try {
        cfg.solver.validate();
    } catch (const std::exception& e) {
        b.error("solver", e.what());
    }

    // [verification]
    b.get_int("verification.n_dirs", &cfg.n_dirs);
    b.get_int("verification.n_test", &cfg.n_test);
    b.get_u64("verification.seed", &cfg.verify_seed, true);
    b.get_double("verification.tau_duality_l1", &cfg.thresholds.tau_duality_l1);
    b.get_double("verification.tau_el", &cfg.thresholds.tau_el);
    b.get_double("verification.tau_div", &cfg.thresholds.tau_div);
    b.get_double("verification.tol_equi", &cfg.thresholds.tol_equi);
    b.get_double("verification.equi_threshold_max", &cfg.thresholds.equi_threshold_max);
    if (cfg.n_dirs < 1) b.error("verification.n_dirs", "must be positive");
    if (cfg.n_test < 1) b.error("verification.n_test", "must be positive");

    // [approximation]
    b.get_double("approximation.cache_radius", &cfg.cache_radius);
    b.get_double("approximation.dual_spacing", &cfg.dual_spacing);
    if (!(cfg.cache_radius > 0.0)) b.error("approximation.cache_radius", "must be positive");

    // [bv]
    b.get_double_array("bv.ac_poly", &cfg.bv_ac_poly);
    b.get_pair_array("bv.jumps", &cfg.bv_jumps);
    b.get_double_array("bv.eps_schedule", &cfg.bv_eps);
    b.get_double_array("bv.h_schedule", &cfg.bv_h);
    if (cfg.bv_eps.size() != cfg.bv_h.size()) b.error("bv.h_schedule", "must align with bv.eps_schedule");

    // [conjugate_table]
    b.get_int_array("conjugate_table.js", &cfg.table_js);
    b.get_double("conjugate_table.radius", &cfg.table_radius);
    b.get_double("conjugate_table.spacing", &cfg.table_spacing);

    // [outputs]
    b.get_string("outputs.csv_dir", &cfg.csv_dir);
    b.get_bool("outputs.svg", &cfg.svg);
    b.get_bool("outputs.dump_fields", &cfg.dump_fields);

    // Unknown keys are rejected, each with its path.
    for (const auto& [path, value] : doc.entries) {
        (void)value;
        if (!b.consumed.count(path)) res.errors.push_back(path + ": unknown key");
    }

    if (res.errors.empty()) res.config = std::move(cfg);
    return res;
}

ConfigParseResult parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        ConfigParseResult res;
        res.errors.push_back(path + ": cannot open");
        return res;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string fmt_array(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}
}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[domain]\n";
    os << "n = " << cfg.n << "\nk = " << cfg.k << "\nh = " << fmt(cfg.h) << "\n";
    os << "inner_extent = [" << cfg.inner_extent[0] << ", " << cfg.inner_extent[1] << "]\n";
    os << "collar_width = " << cfg.collar_width << "\n\n";

    os << "[integrand]\n";
    os << "kind = \"" << kind_name(cfg.kind) << "\"\n";
    os << "params = " << fmt_array(cfg.params) << "\n\n";

    os << "[boundary]\n";
    if (cfg.n == 1) {
        os << "poly = " << fmt_array(cfg.g_poly) << "\n\n";
    } else {
        os << "poly2d = [";
        for (std::size_t i = 0; i < cfg.g_poly2d.size(); ++i) {
            const auto& t = cfg.g_poly2d[i];
            os << (i ? ", " : "") << "[" << fmt(t[0]) << ", " << fmt(t[1]) << ", " << fmt(t[2]) << "]";
        }
        os << "]\n\n";
    }

    os << "[constraint]\n";
    os << "kind = \"" << (cfg.has_obstacle ? "obstacle" : "none") << "\"\n";
    if (cfg.has_obstacle) {
        if (cfg.n == 1)
            os << "psi_poly = " << fmt_array(cfg.psi_poly) << "\n";
        else {
            os << "psi_poly2d = [";
            for (std::size_t i = 0; i < cfg.psi_poly2d.size(); ++i) {
                const auto& t = cfg.psi_poly2d[i];
                os << (i ? ", " : "") << "[" << fmt(t[0]) << ", " << fmt(t[1]) << ", " << fmt(t[2]) << "]";
            }
            os << "]\n";
        }
    }
    os << "\n[schedule]\n";
    os << "j_start = " << cfg.schedule.j_start << "\nj_end = " << cfg.schedule.j_end << "\n";
    os << "delta_rule = \"" << cfg.schedule.delta_rule.name << "\"\n";
    os << "delta_scale = " << fmt(cfg.schedule.delta_rule.scale) << "\n";
    os << "mu_rule = \"" << cfg.schedule.mu_rule.name << "\"\n";
    os << "mu_scale = " << fmt(cfg.schedule.mu_rule.scale) << "\n";
    os << "quadrature_order = " << cfg.schedule.quadrature_order << "\n\n";

    os << "[solver]\n";
    os << "max_inner_iters = " << cfg.solver.max_inner_iters << "\n";
    os << "grad_tol = " << fmt(cfg.solver.grad_tol) << "\n";
    os << "armijo_c = " << fmt(cfg.solver.armijo_c) << "\n";
    os << "armijo_backtrack = " << fmt(cfg.solver.armijo_backtrack) << "\n";
    os << "init_step = " << fmt(cfg.solver.init_step) << "\n";
    os << "seed = " << cfg.solver.seed << "\n";
    os << "warm_start = " << (cfg.solver.warm_start ? "true" : "false") << "\n\n";

    os << "[verification]\n";
    os << "n_dirs = " << cfg.n_dirs << "\nn_test = " << cfg.n_test << "\n";
    os << "seed = " << cfg.verify_seed << "\n";
    os << "tau_duality_l1 = " << fmt(cfg.thresholds.tau_duality_l1) << "\n";
    os << "tau_el = " << fmt(cfg.thresholds.tau_el) << "\n";
    os << "tau_div = " << fmt(cfg.thresholds.tau_div) << "\n";
    os << "tol_equi = " << fmt(cfg.thresholds.tol_equi) << "\n";
    os << "equi_threshold_max = " << fmt(cfg.thresholds.equi_threshold_max) << "\n\n";

    os << "[approximation]\n";
    os << "cache_radius = " << fmt(cfg.cache_radius) << "\n";
    os << "dual_spacing = " << fmt(cfg.dual_spacing) << "\n\n";

    os << "[bv]\n";
    os << "ac_poly = " << fmt_array(cfg.bv_ac_poly) << "\n";
    os << "jumps = [";
    for (std::size_t i = 0; i < cfg.bv_jumps.size(); ++i)
        os << (i ? ", " : "") << "[" << fmt(cfg.bv_jumps[i].first) << ", " << fmt(cfg.bv_jumps[i].second) << "]";
    os << "]\n";
    os << "eps_schedule = " << fmt_array(cfg.bv_eps) << "\n";
    os << "h_schedule = " << fmt_array(cfg.bv_h) << "\n\n";

    os << "[conjugate_table]\n";
    os << "js = [";
    for (std::size_t i = 0; i < cfg.table_js.size(); ++i) os << (i ? ", " : "") << cfg.table_js[i];
    os << "]\n";
    os << "radius = " << fmt(cfg.table_radius) << "\n";
    os << "spacing = " << fmt(cfg.table_spacing) << "\n\n";

    os << "[outputs]\n";
    os << "csv_dir = \"" << cfg.csv_dir << "\"\n";
    os << "svg = " << (cfg.svg ? "true" : "false") << "\n";
    os << "dump_fields = " << (cfg.dump_fields ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace varidual
