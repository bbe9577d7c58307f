#include "pxeig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "pxeig/errors.hpp"
#include "pxeig/field_io.hpp"
#include "pxeig/oned_analytic.hpp"
#include "pxeig/uniqueness_diagnostics.hpp"

namespace pxeig {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

bool verbose() {
    const char* v = std::getenv("PXEIG_VERBOSE");
    return v && *v && std::string(v) != "0";
}

void log(const std::string& msg) {
    if (verbose()) std::cerr << "[pxeig] " << msg << '\n';
}

const json* section(const json& j, const char* key) {
    return j.contains(key) ? &j.at(key) : nullptr;
}

double get_number(const json* s, const char* key, double def, const std::string& path) {
    if (!s || !s->contains(key)) return def;
    const json& v = s->at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(path + "." + key, "expected a finite number");
    return v.get<double>();
}

long long get_int(const json* s, const char* key, long long def, const std::string& path) {
    if (!s || !s->contains(key)) return def;
    const json& v = s->at(key);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    return v.get<long long>();
}

std::string get_string(const json* s, const char* key, const std::string& def, const std::string& path) {
    if (!s || !s->contains(key)) return def;
    const json& v = s->at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json* s, const char* key, bool def, const std::string& path) {
    if (!s || !s->contains(key)) return def;
    const json& v = s->at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key, "expected true or false");
    return v.get<bool>();
}

std::vector<std::int64_t> get_j_list(const json* s, const char* key, std::vector<std::int64_t> def,
                                     const std::string& path) {
    const std::string where = path + "." + key;
    if (s && s->contains(key)) {
        const json& v = s->at(key);
        if (!v.is_array() || v.empty()) throw ConfigError(where, "expected a non-empty array of integers");
        def.clear();
        for (const auto& e : v) {
            if (!e.is_number_integer()) throw ConfigError(where, "expected a non-empty array of integers");
            def.push_back(e.get<std::int64_t>());
        }
    }
    for (std::size_t i = 0; i < def.size(); ++i) {
        if (def[i] < 1) throw ConfigError(where, "entries must be positive");
        if (i > 0 && def[i] <= def[i - 1]) throw ConfigError(where, "entries must be strictly ascending");
    }
    return def;
}

std::vector<double> get_positive_list(const json* s, const char* key, std::vector<double> def, const std::string& path) {
    const std::string where = path + "." + key;
    if (!s || !s->contains(key)) return def;
    const json& v = s->at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(where, "expected a non-empty array of numbers");
    def.clear();
    for (const auto& e : v) {
        if (!e.is_number() || !(e.get<double>() > 0.0) || !std::isfinite(e.get<double>()))
            throw ConfigError(where, "entries must be positive numbers");
        def.push_back(e.get<double>());
    }
    return def;
}

const char* weight_name(WeightMode m) {
    switch (m) {
        case WeightMode::OneOverP: return "one_over_p";
        case WeightMode::Plain: return "plain";
        case WeightMode::OneOverBaseP: return "one_over_base_p";
    }
    return "";
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool is_unit_interval(const GriddedDomain& dom) {
    return dom.dim() == 1 && dom.box().lo[0] == 0.0 && dom.box().hi[0] == 1.0;
}

struct Writer {
    fs::path dir;
    std::vector<std::string> files;

    void field(const std::string& name, const ScalarField& f, const std::string& value_name = "u") {
        write_field_csv(dir / name, f, value_name);
        files.push_back(name);
    }

    void text(const std::string& name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw DataError("cannot write " + (dir / name).string());
        out << body;
        files.push_back(name);
    }
};

ordered_json header(const RunConfig& cfg, const std::string& sub) {
    ordered_json j;
    j["command"] = sub;
    j["config_hash"] = cfg.hash;
    j["seed"] = cfg.seed;
    return j;
}

ordered_json domain_summary(const GriddedDomain& dom) {
    static const char* names[] = {"interval", "rectangle", "mask"};
    ordered_json j;
    j["kind"] = names[static_cast<int>(dom.shape())];
    j["dim"] = dom.dim();
    j["h"] = dom.h();
    j["nodes"] = dom.node_count();
    j["interior_nodes"] = dom.interior_nodes().size();
    j["boundary_nodes"] = dom.boundary_nodes().size();
    return j;
}

ordered_json solution_json(const EigenSolution& s) {
    ordered_json j;
    j["lambda"] = s.lambda;
    j["K"] = s.K;
    j["k"] = s.k;
    j["S"] = s.S;
    j["weak_residual"] = s.weak_residual;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    return j;
}

ScalarField norm_field(const RunConfig& cfg) {
    if (cfg.norm.field == "distance") return distance_function(cfg.domain);
    fs::path p(cfg.norm.field);
    if (!p.is_absolute() && !cfg.base_dir.empty()) p = cfg.base_dir / p;
    try {
        return read_field_csv(p, cfg.domain);
    } catch (const DataError& e) {
        throw ConfigError("norm.field", e.what());
    }
}

ordered_json diagnostics(const RunConfig& cfg, const ScalarField& u, double lambda) {
    const VariableExponent& p = *cfg.exponent;
    const DiagnoseParams& d = cfg.diagnose;
    const GTransform gt{d.A, d.alpha};
    ordered_json j;
    j["A"] = d.A;
    j["alpha"] = d.alpha;
    j["lambda"] = lambda;

    std::mt19937_64 rng(cfg.seed);
    std::vector<double> ts(static_cast<std::size_t>(d.samples));
    for (double& t : ts) t = d.t_max * (1e-3 + (1.0 - 1e-3) * unit_uniform(rng));
    const QPropertyReport q = g_inequalities_check(gt, ts);
    j["qproperty_pass"] = q.pass;
    j["qproperty_samples"] = q.samples;
    j["qproperty_violations"] = q.violations;
    j["qproperty_failed"] = q.failed;
    j["derivative_max_rel_error"] = g_derivative_check(gt, ts);

    const GriddedDomain& dom = u.domain();
    double umax = 0.0;
    std::size_t argmax = dom.interior_nodes().empty() ? 0 : dom.interior_nodes().front();
    for (std::size_t k : dom.interior_nodes()) {
        if (u[k] > umax) {
            umax = u[k];
            argmax = k;
        }
    }
    if (!(umax > 0.0)) throw DataError("diagnose: field has no positive interior node");

    ScalarField v(u.domain_ptr());
    std::vector<std::size_t> region;
    for (std::size_t k : dom.interior_nodes()) {
        if (u[k] <= 0.0) continue;
        v[k] = std::log(d.v_scale * u[k] / umax);
        if (v[k] > 0.0) region.push_back(k);
    }
    j["region_nodes"] = region.size();

    bool sandwich = true;
    for (std::size_t k : region) {
        const GValues g = g_eval(gt, v[k]);
        if (!(g.g_minus_t > 0.0) || !(g.g_minus_t < (d.A - 1.0) / d.alpha)) sandwich = false;
    }
    j["g_sandwich_holds"] = sandwich;

    if (region.empty()) {
        j["mu_proviso_holds"] = false;
        j["mu_min"] = nullptr;
        j["condition_bd"] = nullptr;
    } else {
        try {
            const ScalarField mu = strict_margin_mu(gt, v, p, lambda, region);
            double mu_min = INFINITY;
            for (std::size_t k : region) mu_min = std::min(mu_min, mu[k]);
            j["mu_proviso_holds"] = true;
            j["mu_min"] = mu_min;
        } catch (const PreconditionError& e) {
            j["mu_proviso_holds"] = false;
            j["mu_min"] = nullptr;
            j["mu_error"] = e.what();
        }
        double m2 = INFINITY;
        for (std::size_t k : region) m2 = std::min(m2, u[k]);
        j["condition_bd"] = comparison_condition(u, m2, p, lambda, region);
    }

    const UniquenessRadius r = local_uniqueness_radius(u, p, lambda, argmax);
    j["uniqueness_center"] = {dom.coord(argmax).x, dom.coord(argmax).y};
    j["uniqueness_radius"] = r.radius;
    j["uniqueness_half_width"] = r.half_width;

    const PositivityReport pos = strict_positivity_check(u);
    j["min_interior"] = pos.min_interior;
    j["has_interior_zero"] = pos.has_interior_zero;
    return j;
}

ordered_json rigidity_json(const RigidityReport& r) {
    ordered_json j;
    j["exclusion_holds"] = r.exclusion_holds;
    j["forced_A"] = r.forced_A;
    j["x0"] = r.x0;
    j["lambda"] = r.lambda;
    j["delta_error"] = r.delta_error;
    j["unique"] = r.unique;
    ordered_json probes = ordered_json::array();
    for (const SlopeProbe& p : r.probes) {
        probes.push_back({{"A", p.A}, {"sup_slope", p.sup_slope}, {"lambda_ratio", p.lambda_ratio}});
    }
    j["probes"] = probes;
    if (r.limit_error) {
        j["limit_error"] = *r.limit_error;
        j["limit_matches"] = r.limit_matches;
    }
    return j;
}

std::string sweep_csv(const SweepResult& s) {
    std::ostringstream os;
    os << "j,lambda_j,S_j,gap,iterations,converged\n";
    for (const SweepRow& r : s.rows) {
        os << r.j << ',' << format_double(r.lambda) << ',' << format_double(r.S) << ',' << format_double(r.gap) << ','
           << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

ordered_json sweep_json(const SweepResult& s) {
    ordered_json j;
    j["lambda_infinity"] = s.lambda_infinity_geometric;
    j["convergence_gap"] = s.convergence_gap;
    ordered_json rows = ordered_json::array();
    for (const SweepRow& r : s.rows) {
        rows.push_back({{"j", r.j}, {"lambda", r.lambda}, {"S", r.S}, {"gap", r.gap},
                        {"iterations", r.iterations}, {"converged", r.converged}});
    }
    j["rows"] = rows;
    j["all_converged"] = std::all_of(s.rows.begin(), s.rows.end(), [](const SweepRow& r) { return r.converged; });
    j["limit_sup_norm"] = sup_norm(s.limit_field);
    return j;
}

SweepResult run_sweep(const RunConfig& cfg) {
    return sweep_to_infinity(cfg.domain, *cfg.exponent, cfg.sweep.j_list, cfg.solver, cfg.sweep.start);
}

void require_unit_interval(const RunConfig& cfg, const std::string& sub) {
    if (!is_unit_interval(*cfg.domain)) throw ConfigError("domain", sub + " needs the interval [0, 1]");
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"validate", "norm",       "normtable", "solve", "sweep",
                                                "diagnose", "analytic1d", "family",    "report"};
    return names;
}

RunConfig parse_config(const json& j, const fs::path& base_dir, std::optional<std::uint64_t> seed_override) {
    if (!j.is_object()) throw ConfigError("$", "config must be a JSON object");
    RunConfig cfg;
    cfg.raw = j;
    cfg.base_dir = base_dir;

    if (!j.contains("domain")) throw ConfigError("domain", "missing");
    cfg.domain = domain_from_json(j.at("domain"), base_dir);
    if (!j.contains("exponent")) throw ConfigError("exponent", "missing");
    cfg.exponent = exponent_from_json(j.at("exponent"), cfg.domain->box(), base_dir);

    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (seed_override) cfg.seed = *seed_override;

    const json* s = section(j, "solver");
    cfg.solver.tolerance = get_number(s, "tolerance", cfg.solver.tolerance, "solver");
    cfg.solver.max_iterations = static_cast<int>(get_int(s, "max_iterations", cfg.solver.max_iterations, "solver"));
    cfg.solver.restarts = static_cast<int>(get_int(s, "restarts", cfg.solver.restarts, "solver"));
    const std::string init = get_string(s, "initialization", "distance", "solver");
    if (init == "distance") cfg.solver.initialization = Initialization::Distance;
    else if (init == "random") cfg.solver.initialization = Initialization::Random;
    else throw ConfigError("solver.initialization", "expected 'distance' or 'random'");
    cfg.solver.rng_seed = cfg.seed;
    try {
        cfg.solver.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("solver", e.what());
    }

    const json* n = section(j, "norm");
    cfg.norm.field = get_string(n, "field", cfg.norm.field, "norm");
    const std::string weight = get_string(n, "weight", "one_over_p", "norm");
    if (weight == "one_over_p") cfg.norm.mode = WeightMode::OneOverP;
    else if (weight == "plain") cfg.norm.mode = WeightMode::Plain;
    else if (weight == "one_over_base_p") cfg.norm.mode = WeightMode::OneOverBaseP;
    else throw ConfigError("norm.weight", "expected 'one_over_p', 'plain' or 'one_over_base_p'");
    cfg.norm.j_list = get_j_list(n, "j_list", cfg.norm.j_list, "norm");

    const json* w = section(j, "sweep");
    cfg.sweep.j_list = get_j_list(w, "j_list", cfg.sweep.j_list, "sweep");
    if (cfg.sweep.j_list.back() * cfg.exponent->p_plus() > kMaxSweepExponent) {
        std::ostringstream os;
        os << "j * p+ = " << cfg.sweep.j_list.back() * cfg.exponent->p_plus() << " exceeds " << kMaxSweepExponent;
        throw ConfigError("sweep.j_list", os.str());
    }
    const std::string start = get_string(w, "start", "warm", "sweep");
    if (start == "warm") cfg.sweep.start = SweepStart::Warm;
    else if (start == "cold") cfg.sweep.start = SweepStart::Cold;
    else throw ConfigError("sweep.start", "expected 'warm' or 'cold'");
    cfg.sweep.snapshots = get_bool(w, "snapshots", false, "sweep");

    const json* d = section(j, "diagnose");
    cfg.diagnose.A = get_number(d, "A", cfg.diagnose.A, "diagnose");
    cfg.diagnose.alpha = get_number(d, "alpha", cfg.diagnose.alpha, "diagnose");
    try {
        GTransform{cfg.diagnose.A, cfg.diagnose.alpha}.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("diagnose", e.what());
    }
    const long long samples = get_int(d, "samples", cfg.diagnose.samples, "diagnose");
    if (samples < 1 || samples > 10'000'000) throw ConfigError("diagnose.samples", "expected 1 to 10^7");
    cfg.diagnose.samples = static_cast<int>(samples);
    cfg.diagnose.t_max = get_number(d, "t_max", cfg.diagnose.t_max, "diagnose");
    if (!(cfg.diagnose.t_max > 0.01)) throw ConfigError("diagnose.t_max", "must exceed 0.01");
    cfg.diagnose.v_scale = get_number(d, "v_scale", cfg.diagnose.v_scale, "diagnose");
    if (!(cfg.diagnose.v_scale > 1.0)) throw ConfigError("diagnose.v_scale", "must exceed 1");
    cfg.diagnose.source = get_string(d, "source", cfg.diagnose.source, "diagnose");
    if (cfg.diagnose.source != "solve" && cfg.diagnose.source != "sweep")
        throw ConfigError("diagnose.source", "expected 'solve' or 'sweep'");

    const json* a = section(j, "analytic1d");
    cfg.analytic.A = get_number(a, "A", cfg.analytic.A, "analytic1d");
    cfg.analytic.c_list = get_positive_list(section(j, "family"), "C", cfg.analytic.c_list, "family");

    json canonical = j;
    canonical["seed"] = cfg.seed;
    cfg.hash = fnv1a_hex(canonical.dump());
    return cfg;
}

RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
    return parse_config(j, path.parent_path(), seed_override);
}

ordered_json run(const RunConfig& cfg, const std::string& sub, const fs::path& out_dir) {
    if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
        throw ConfigError("subcommand", "unknown subcommand '" + sub + "'");
    fs::create_directories(out_dir);
    Writer out{out_dir, {}};
    const VariableExponent& p = *cfg.exponent;
    ordered_json j = header(cfg, sub);
    log("running " + sub);

    if (sub == "validate") {
        j["domain"] = domain_summary(*cfg.domain);
        j["p_minus"] = p.p_minus();
        j["p_plus"] = p.p_plus();
        j["lipschitz_bound"] = p.lipschitz_bound();
        const InradiusResult in = inradius_and_lambda_infinity(cfg.domain);
        j["inradius"] = in.inradius;
        j["lambda_infinity"] = in.lambda_infinity;
        j["valid"] = true;
    } else if (sub == "norm") {
        const ScalarField f = norm_field(cfg);
        const ModularSpec spec{p, cfg.norm.mode};
        const double norm = luxemburg_norm(f, spec);
        j["field"] = cfg.norm.field;
        j["weight"] = weight_name(cfg.norm.mode);
        j["norm"] = norm;
        j["modular_at_norm"] = norm > 0.0 ? modular(f, spec, norm) : 0.0;
        j["sup_norm"] = sup_norm(f);
        if (!f.is_zero()) {
            j["gradient_norm"] = gradient_norm(f, p);
            if (f.vanishes_on_boundary()) j["rayleigh_quotient"] = rayleigh_quotient(f, p);
        }
    } else if (sub == "normtable") {
        const ScalarField f = norm_field(cfg);
        const double sup = sup_norm(f);
        std::ostringstream csv;
        csv << "j,norm,sup_norm,relative_gap\n";
        ordered_json rows = ordered_json::array();
        for (const NormTableRow& r : norm_limit_table(f, p, cfg.norm.j_list, cfg.norm.mode)) {
            const double gap = sup > 0.0 ? std::abs(r.norm - sup) / sup : 0.0;
            csv << r.j << ',' << format_double(r.norm) << ',' << format_double(sup) << ',' << format_double(gap) << '\n';
            rows.push_back({{"j", r.j}, {"norm", r.norm}, {"relative_gap", gap}});
        }
        out.text("normtable.csv", csv.str());
        j["field"] = cfg.norm.field;
        j["weight"] = weight_name(cfg.norm.mode);
        j["sup_norm"] = sup;
        j["rows"] = rows;
    } else if (sub == "solve") {
        const EigenSolution s = minimize_rayleigh(cfg.domain, p, cfg.solver);
        j["solution"] = solution_json(s);
        j["p_minus_over_p_plus"] = p.p_minus() / p.p_plus();
        out.field("solve_u.csv", s.u);
    } else if (sub == "sweep") {
        const SweepResult s = run_sweep(cfg);
        j["sweep"] = sweep_json(s);
        out.text("sweep.csv", sweep_csv(s));
        out.field("sweep_limit.csv", s.limit_field);
        if (cfg.sweep.snapshots) {
            for (const SweepRow& r : s.rows) out.field("sweep_u_j" + std::to_string(r.j) + ".csv", r.u);
        }
    } else if (sub == "diagnose") {
        if (cfg.diagnose.source == "sweep") {
            const SweepResult s = run_sweep(cfg);
            j["diagnostics"] = diagnostics(cfg, gradient_normalized(s.limit_field), s.lambda_infinity_geometric);
        } else {
            const EigenSolution s = minimize_rayleigh(cfg.domain, p, cfg.solver);
            j["diagnostics"] = diagnostics(cfg, s.u, s.lambda);
        }
    } else if (sub == "analytic1d") {
        require_unit_interval(cfg, sub);
        const OneDSolution s = analytic_modular_solution(p, cfg.analytic.A, cfg.domain->nx());
        j["A"] = s.A;
        j["x0"] = s.x0;
        j["lambda"] = s.lambda;
        j["lambda_right"] = s.lambda_right;
        j["condition_holds"] = s.eigenvalue_condition_holds;
        j["condition_margin"] = s.condition_margin;
        j["continuity_residual"] = s.continuity_residual;
        j["log_scale"] = s.log_scale;
        out.field("analytic1d_v.csv", s.v, "v");
    } else if (sub == "family") {
        require_unit_interval(cfg, sub);
        std::ostringstream csv;
        csv << "C,A,lambda,x0,ok\n";
        ordered_json rows = ordered_json::array();
        double lo = INFINITY, hi = -INFINITY;
        for (const FamilyRow& r : eigenvalue_family(p, cfg.analytic.c_list, cfg.domain->nx())) {
            csv << format_double(r.C) << ',' << format_double(r.A) << ',' << format_double(r.lambda) << ','
                << format_double(r.x0) << ',' << (r.ok ? 1 : 0) << '\n';
            ordered_json row{{"C", r.C}, {"A", r.A}, {"lambda", r.lambda}, {"x0", r.x0}, {"ok", r.ok}};
            if (!r.ok) row["error"] = r.error;
            rows.push_back(row);
            if (r.ok) {
                lo = std::min(lo, r.lambda);
                hi = std::max(hi, r.lambda);
            }
        }
        out.text("family.csv", csv.str());
        j["rows"] = rows;
        j["lambda_spread"] = hi >= lo ? (hi - lo) / lo : 0.0;
    } else if (sub == "report") {
        const SweepResult s = run_sweep(cfg);
        j["sweep"] = sweep_json(s);
        out.text("sweep.csv", sweep_csv(s));
        out.field("sweep_limit.csv", s.limit_field);
        const ScalarField limit = gradient_normalized(s.limit_field);
        const ScalarField delta = distance_function(cfg.domain);
        double err = 0.0;
        for (std::size_t k : cfg.domain->active_nodes()) err = std::max(err, std::abs(limit[k] - delta[k]));
        j["limit_minus_distance_sup"] = err;
        const LimitResidual lr = limit_equation_residual(s.limit_field, p, s.lambda_infinity_geometric);
        j["limit_residual_max"] = lr.max_abs;
        j["diagnostics"] = diagnostics(cfg, limit, s.lambda_infinity_geometric);
        if (is_unit_interval(*cfg.domain)) {
            j["rigidity"] = rigidity_json(luxemburg_rigidity_check(p, s.limit_field, cfg.domain->nx()));
        } else {
            j["rigidity"] = nullptr;
        }
    }

    j["files"] = out.files;
    const std::string body = j.dump(2) + "\n";
    out.text(sub + ".json", body);
    return j;
}

int run_command(const std::string& sub, const fs::path& config_path, const fs::path& out_dir,
                std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
    try {
        const RunConfig cfg = load_config(config_path, seed);
        const ordered_json j = run(cfg, sub, out_dir);
        out << j.dump(2) << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace pxeig
