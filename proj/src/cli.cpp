// SPDX-License-Identifier: Apache-2.0
#include "shearlab/cli.hpp"

#include "shearlab/acceptance.hpp"
#include "shearlab/errors.hpp"
#include "shearlab/exec.hpp"
#include "shearlab/levelset.hpp"
#include "shearlab/rates.hpp"
#include "shearlab/resolvent.hpp"
#include "shearlab/semigroup.hpp"
#include "shearlab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace shear {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
    fail(ErrorCode::ConfigError, where + ": " + what);
}

void check_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where)
{
    if (!j.is_object()) bad(where, "expected an object");
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) bad(where, "unknown key '" + key + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw std::invalid_argument("not a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw std::invalid_argument("not a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw std::invalid_argument("not an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
                    throw std::invalid_argument("negative");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw std::invalid_argument("not a string");
        }
        out = v.get<T>();
    } catch (const std::exception& e) {
        bad(where + "." + key, std::string("wrong type (") + e.what() + ")");
    }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where)
{
    if (!j.contains(key) || j.at(key).is_null()) return;
    T v{};
    read(j, key, v, where);
    out = v;
}

void read_list(const json& j, const char* key, std::vector<double>& out, const std::string& where)
{
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array()) bad(where + "." + key, "expected an array of numbers");
    std::vector<double> xs;
    for (const auto& x : v) {
        if (!x.is_number()) bad(where + "." + key, "expected an array of numbers");
        xs.push_back(x.get<double>());
    }
    out = std::move(xs);
}

void need(bool cond, const std::string& where, const std::string& what)
{
    if (!cond) bad(where, what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void validate(const RunConfig& c)
{
    if (c.nu) need(positive(*c.nu), "nu", "must be positive");
    if (c.k) need(std::isfinite(*c.k) && *c.k != 0.0, "k", "must be finite and nonzero");
    need(positive(c.grid.margin_factor), "grid.margin_factor", "must be positive");
    need(positive(c.grid.n_per_layer), "grid.n_per_layer", "must be positive");
    need(c.grid.n_min >= 3, "grid.n_min", "must be at least 3");
    need(c.grid.n_cap >= c.grid.n_min, "grid.n_cap", "must be at least n_min");
    need(!c.nu_list.empty(), "sweep.nu_list", "must be nonempty");
    for (double x : c.nu_list) need(positive(x), "sweep.nu_list", "entries must be positive");
    need(!c.k_list.empty(), "sweep.k_list", "must be nonempty");
    for (double x : c.k_list) need(std::isfinite(x) && x != 0.0, "sweep.k_list", "entries must be nonzero");
    need(std::is_sorted(c.lambda_grid.begin(), c.lambda_grid.end()), "sweep.lambda_grid", "must be sorted");
    need(!c.delta_grid.empty(), "sweep.delta_grid", "must be nonempty");
    for (double d : c.delta_grid) need(d > 0.0 && d < 1.0, "sweep.delta_grid", "entries must lie in (0, 1)");
    need(!c.L_list.empty(), "sweep.L_list", "must be nonempty");
    for (std::size_t i = 0; i < c.L_list.size(); ++i)
        need(positive(c.L_list[i]) && (i == 0 || c.L_list[i] > c.L_list[i - 1]), "sweep.L_list",
             "must be positive and increasing");
    need(positive(c.solver.tol), "solver.tol", "must be positive");
    need(c.solver.max_iter >= 1, "solver.max_iter", "must be at least 1");
    need(c.solver.krylov_dim >= 2, "solver.krylov_dim", "must be at least 2");
    need(c.solver.coarse_points >= 3, "solver.coarse_points", "must be at least 3");
    need(positive(c.solver.refine_tol), "solver.refine_tol", "must be positive");
    need(positive(c.solver.convergence_rtol), "solver.convergence_rtol", "must be positive");
    need(c.semigroup.ensemble_size >= 1, "semigroup.ensemble_size", "must be at least 1");
    need(c.semigroup.power_steps >= 1, "semigroup.power_steps", "must be at least 1");
    need(positive(c.semigroup.power_rtol), "semigroup.power_rtol", "must be positive");
    need(c.semigroup.checkpoints >= 5, "semigroup.checkpoints", "must be at least 5");
    need(positive(c.semigroup.horizon), "semigroup.horizon", "must be positive");
    need(positive(c.semigroup.wei_slack), "semigroup.wei_slack", "must be positive");
    (void)decay_method_from_string(c.semigroup.method);
    need(c.tensor.n_axis >= 3, "tensor.n_axis", "must be at least 3");
    need(c.tensor.checkpoints >= 1, "tensor.checkpoints", "must be at least 1");
    need(positive(c.tensor.horizon), "tensor.horizon", "must be positive");
    need(positive(c.tensor.tolerance), "tensor.tolerance", "must be positive");
    need(c.checks.grid_points >= 2, "checks.grid_points", "must be at least 2");
    need(!c.checks.probe_radii.empty(), "checks.probe_radii", "must be nonempty");
    for (std::size_t i = 0; i < c.checks.probe_radii.size(); ++i)
        need(positive(c.checks.probe_radii[i]) && (i == 0 || c.checks.probe_radii[i] > c.checks.probe_radii[i - 1]),
             "checks.probe_radii", "must be positive and increasing");
    need(positive(c.checks.window_span), "checks.window_span", "must be positive");
    need(c.checks.window_lo.has_value() == c.checks.window_hi.has_value(), "checks.window",
         "needs both lo and hi");
    if (c.checks.window_lo) need(*c.checks.window_lo < *c.checks.window_hi, "checks.window", "needs lo < hi");
    need(!c.criteria.empty(), "acceptance.criteria", "must be nonempty");
    for (int id : c.criteria)
        need(id >= 1 && id <= criterion_count, "acceptance.criteria", "entries must lie in 1..10");
    need(c.workers >= 0, "workers", "must be nonnegative");
    (void)parse_format(c.format);
    need(!c.output_dir.empty(), "output_dir", "must be nonempty");
    if (c.profile) (void)make_profile(*c.profile);
    for (const auto& f : c.tensor.factors) (void)make_profile(f);
}

// Helpers shared by the commands.

ShearProfile config_profile(const RunConfig& c)
{
    return make_profile(c.profile.value_or(ProfileConfig{}));
}

double need_param(const std::optional<double>& v, const char* name)
{
    if (!v) fail(ErrorCode::ConfigError, std::string("this command needs '") + name + "' in the config");
    return *v;
}

TruncationPolicy policy_of(const RunConfig& c)
{
    TruncationPolicy p;
    p.margin_factor = c.grid.margin_factor;
    p.n_per_layer = c.grid.n_per_layer;
    p.n_min = c.grid.n_min;
    p.n_cap = c.grid.n_cap;
    return p;
}

PsiSearch search_of(const RunConfig& c)
{
    PsiSearch s;
    s.coarse_points = c.solver.coarse_points;
    s.refine_tol = c.solver.refine_tol;
    s.convergence_rtol = c.solver.convergence_rtol;
    s.check_grid = c.solver.check_grid;
    s.check_truncation = c.solver.check_truncation;
    s.sigma.tol = c.solver.tol;
    s.sigma.max_iter = c.solver.max_iter;
    s.sigma.krylov_dim = c.solver.krylov_dim;
    s.sigma.dense_fallback = c.solver.dense_fallback;
    s.sigma.dense_limit = c.solver.dense_limit;
    s.policy = policy_of(c);
    return s;
}

DecayConfig decay_of(const RunConfig& c)
{
    DecayConfig d;
    d.ensemble_size = c.semigroup.ensemble_size;
    d.power_steps = c.semigroup.power_steps;
    d.power_rtol = c.semigroup.power_rtol;
    d.checkpoints = c.semigroup.checkpoints;
    d.seed = c.seed;
    d.method = decay_method_from_string(c.semigroup.method);
    return d;
}

Interval check_window(const RunConfig& c, const ShearProfile& p)
{
    if (c.checks.window_lo) return {*c.checks.window_lo, *c.checks.window_hi};
    return default_window(p.domain(), c.checks.window_span);
}

struct Outcome {
    int code = ExitPass;
    std::string error;
    std::string message;
};

struct Context {
    const RunConfig& cfg;
    const std::filesystem::path& out;
    Format format;
    std::ostream& log;
};

void wrote(Context& ctx, const std::filesystem::path& p) { ctx.log << "wrote " << p.string() << '\n'; }

Outcome cmd_profile_check(Context& ctx)
{
    const ShearProfile p = config_profile(ctx.cfg);
    const Interval w = check_window(ctx.cfg, p);
    const auto grid = uniform_grid(w.lo, w.hi, ctx.cfg.checks.grid_points);
    const NondegeneracyReport nd = check_nondegeneracy(p, grid);
    const InfinityReport inf = check_infinity_nondegeneracy(p, ctx.cfg.checks.probe_radii);

    json j = {{"profile", p.name()},
              {"m", p.m()},
              {"domain", {{"kind", to_string(p.domain().kind)}, {"a", p.domain().a}, {"b", p.domain().b}}},
              {"window", {w.lo, w.hi}},
              {"nondegeneracy", to_json(nd)},
              {"infinity", to_json(inf)}};
    if (!std::isfinite(p.domain().a)) j["domain"]["a"] = "-inf";
    if (!std::isfinite(p.domain().b)) j["domain"]["b"] = "inf";
    wrote(ctx, emit_json(j, "profile_check", ctx.out));
    if (!inf.vacuous) {
        Table t{"infinity_shells", {"radius", "min_abs_dv"}, {}, "radius", "min_abs_dv"};
        for (std::size_t i = 0; i < inf.shell_minima.size(); ++i)
            t.rows.push_back({ctx.cfg.checks.probe_radii[i], inf.shell_minima[i]});
        wrote(ctx, emit_report(t, ctx.format, ctx.out));
    }
    ctx.log << p.name() << ": non-degeneracy " << (nd.pass ? "ok" : "FAILED") << " (min sum "
            << format_double(nd.min_sum) << "), at infinity "
            << (inf.vacuous ? "vacuous" : (inf.pass ? "ok" : "FAILED")) << " (" << to_string(inf.trend) << ")\n";
    if (!nd.pass) return {ExitCriterion, "criterion_failed", "non-degeneracy failed at y=" + format_double(nd.witness_y)};
    if (!inf.pass) return {ExitCriterion, "criterion_failed", "infinity non-degeneracy failed"};
    return {};
}

Outcome cmd_levelset(Context& ctx)
{
    const ShearProfile p = config_profile(ctx.cfg);
    const Interval w = check_window(ctx.cfg, p);
    std::vector<double> lambdas = ctx.cfg.lambda_grid;
    if (lambdas.empty()) {
        const auto ys = uniform_grid(w.lo, w.hi, ctx.cfg.checks.grid_points);
        double lo = p(ys.front()), hi = lo;
        for (double y : ys) {
            lo = std::min(lo, p(y));
            hi = std::max(hi, p(y));
        }
        lambdas.resize(61);
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            lambdas[i] = lo - 0.5 + (hi - lo + 1.0) * static_cast<double>(i) / 60.0;
    }
    const MeasureSweep s = measure_sweep(p, lambdas, ctx.cfg.delta_grid, p.m(), w);
    wrote(ctx, emit_report(measure_table(s), ctx.format, ctx.out));
    json j = to_json(s);
    j["profile"] = p.name();
    j["window"] = {w.lo, w.hi};
    wrote(ctx, emit_json(j, "levelset", ctx.out));
    ctx.log << p.name() << ": sup m(Ecal)/delta = " << format_double(s.sup_ratio) << " over " << s.rows.size()
            << " rows (" << s.saturated_rows << " saturated)\n";
    return {};
}

Outcome psi_outcome(const PsiEstimate& e)
{
    if (!e.solver_converged) return {ExitNonConvergence, "non_convergence", "sigma_min solver did not converge"};
    if (!e.grid_converged)
        return {ExitNonConvergence, "non_convergence",
                "psi changed by more than the tolerance on the refined grid (" + format_double(e.psi) + " vs " +
                    format_double(e.psi_refined_grid) + ")"};
    if (e.truncation_converged && !*e.truncation_converged)
        return {ExitNonConvergence, "non_convergence", "psi changed under truncation doubling"};
    return {};
}

Outcome cmd_resolvent(Context& ctx)
{
    const double nu = need_param(ctx.cfg.nu, "nu");
    const double k = need_param(ctx.cfg.k, "k");
    const ShearProfile p = config_profile(ctx.cfg);
    const PsiEstimate e = pseudospectral_abscissa(p, nu, k, search_of(ctx.cfg));
    wrote(ctx, emit_report(resolvent_table(e), ctx.format, ctx.out));
    wrote(ctx, emit_json(to_json(e), "psi", ctx.out));
    if (!ctx.cfg.lambda_grid.empty()) {
        const auto pts = resolvent_profile(p, nu, k, ctx.cfg.lambda_grid, policy_of(ctx.cfg), search_of(ctx.cfg).sigma);
        Table t = resolvent_table(pts);
        t.name = "resolvent_profile";
        wrote(ctx, emit_report(t, ctx.format, ctx.out));
    }
    ctx.log << p.name() << ": psi = " << format_double(e.psi) << " at lambda* = " << format_double(e.lambda_star)
            << " (n = " << e.grid.n << ", target rate " << format_double(rate_target(nu, k, p.m())) << ")\n";
    return psi_outcome(e);
}

Outcome cmd_semigroup(Context& ctx)
{
    const double nu = need_param(ctx.cfg.nu, "nu");
    const double k = need_param(ctx.cfg.k, "k");
    const ShearProfile p = config_profile(ctx.cfg);
    const PsiEstimate e = pseudospectral_abscissa(p, nu, k, search_of(ctx.cfg));
    const TimeGrid tg = default_time_grid(p, e.grid, nu, k, ctx.cfg.semigroup.horizon);
    const DecaySeries s = operator_norm_decay_on(p, e.grid, nu, k, tg.dt, tg.T, decay_of(ctx.cfg));
    const WeiCheck w = check_wei_bound(s, e, ctx.cfg.semigroup.wei_slack);
    wrote(ctx, emit_report(decay_table(s), ctx.format, ctx.out));
    json j = {{"profile", p.name()},
              {"psi", e.psi},
              {"fitted_rate", s.fitted_rate},
              {"rate_over_psi", s.fitted_rate / e.psi},
              {"bound", to_json(w)},
              {"series", to_json(s)}};
    wrote(ctx, emit_json(j, "semigroup", ctx.out));
    ctx.log << p.name() << ": fitted rate " << format_double(s.fitted_rate) << ", psi " << format_double(e.psi)
            << ", bound " << (w.holds ? "holds" : "VIOLATED") << '\n';
    if (!w.holds)
        return {ExitCriterion, "criterion_failed",
                "norm exceeds exp(pi/2 - psi t) at t=" + format_double(w.worst_t)};
    return psi_outcome(e);
}

Outcome cmd_sweep(Context& ctx)
{
    const ShearProfile p = config_profile(ctx.cfg);
    SweepOptions o;
    o.search = search_of(ctx.cfg);
    o.with_semigroup = ctx.cfg.semigroup.with_semigroup;
    o.decay = decay_of(ctx.cfg);
    o.horizon = ctx.cfg.semigroup.horizon;
    const RateTable t = psi_sweep(p, ctx.cfg.nu_list, ctx.cfg.k_list, o);
    wrote(ctx, emit_report(rate_table(t), ctx.format, ctx.out));
    json fits = json::object();
    for (Regime r : {Regime::Enhanced, Regime::Taylor}) {
        try {
            const ScalingFit f = fit_scaling(t, r);
            fits[to_string(r)] = to_json(f);
            ctx.log << to_string(r) << ": exponent_nu " << format_double(f.exponent_nu) << ", exponent_k "
                    << format_double(f.exponent_k) << " over " << f.rows << " rows\n";
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientRows) throw;
            fits[to_string(r)] = nullptr;
        }
    }
    wrote(ctx, emit_json({{"table", to_json(t)}, {"fits", fits}}, "sweep", ctx.out));
    for (const auto& row : t.rows) {
        if (!row.error.empty()) return {ExitNonConvergence, "non_convergence", row.error};
        if (!row.grid_converged)
            return {ExitNonConvergence, "non_convergence",
                    "row nu=" + format_double(row.nu) + " k=" + format_double(row.k) + " is not grid-converged"};
    }
    return {};
}

Outcome cmd_tensor(Context& ctx)
{
    const double nu = need_param(ctx.cfg.nu, "nu");
    const double k = need_param(ctx.cfg.k, "k");
    std::vector<ShearProfile> factors;
    for (const auto& f : ctx.cfg.tensor.factors) factors.push_back(make_profile(f));
    if (factors.empty()) {
        factors.push_back(profiles::couette(DomainSpec::interval(-1.0, 1.0)));
        factors.push_back(profiles::poiseuille(DomainSpec::interval(-1.0, 1.0)));
    }
    TensorOptions o;
    o.n_axis = ctx.cfg.tensor.n_axis;
    o.n_cap = ctx.cfg.tensor.n_cap;
    o.checkpoints = ctx.cfg.tensor.checkpoints;
    o.horizon = ctx.cfg.tensor.horizon;
    o.tolerance = ctx.cfg.tensor.tolerance;
    o.seed = ctx.cfg.seed;
    const TensorReport r = tensor_rate(factors, nu, k, o);
    if (r.product_check) wrote(ctx, emit_report(tensor_table(*r.product_check), ctx.format, ctx.out));
    wrote(ctx, emit_json(to_json(r), "tensor_report", ctx.out));
    ctx.log << "sum_rate " << format_double(r.sum_rate);
    if (r.product_check) ctx.log << ", product check rel_err " << format_double(r.product_check->rel_err);
    ctx.log << '\n';
    if (r.product_check && !r.product_check->pass)
        return {ExitCriterion, "criterion_failed",
                "2D norm differs from the product of 1D norms by " + format_double(r.product_check->rel_err)};
    return {};
}

Outcome cmd_counterexample(Context& ctx)
{
    const double nu = need_param(ctx.cfg.nu, "nu");
    const double k = need_param(ctx.cfg.k, "k");
    const ShearProfile p = ctx.cfg.profile ? make_profile(*ctx.cfg.profile) : profiles::taylor_couette();
    const PsiSearch s = search_of(ctx.cfg);
    const auto rows = counterexample_scan(p, nu, k, ctx.cfg.L_list, s);
    const auto ctl = counterexample_scan(profiles::couette(DomainSpec::half_line_right(p.domain().a)), nu, k,
                                         ctx.cfg.L_list, s);
    wrote(ctx, emit_report(counterexample_table(rows), ctx.format, ctx.out));
    wrote(ctx, emit_report(counterexample_table(ctl, "counterexample_control"), ctx.format, ctx.out));

    json j = {{"profile", p.name()}, {"rows", to_json(rows)}, {"control", to_json(ctl)}};
    Outcome out;
    if (rows.size() >= 2) {
        bool decreasing = true;
        for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].psi < rows[i - 1].psi;
        const double drop = rows.back().psi / rows.front().psi;
        const double control = ctl.back().psi / ctl[ctl.size() - 2].psi;
        const bool pass = decreasing && drop <= 0.5 && control >= 0.9;
        j["decreasing"] = decreasing;
        j["last_over_first"] = drop;
        j["control_last_ratio"] = control;
        j["pass"] = pass;
        ctx.log << p.name() << ": psi(L_last)/psi(L_first) = " << format_double(drop) << ", control ratio "
                << format_double(control) << '\n';
        if (!pass) out = {ExitCriterion, "criterion_failed", "no collapse of psi with L, or control not stable"};
    }
    wrote(ctx, emit_json(j, "counterexample_check", ctx.out));
    return out;
}

Outcome cmd_verify_all(Context& ctx)
{
    AcceptanceOptions o;
    o.seed = ctx.cfg.seed;
    const auto results = run_acceptance(ctx.cfg.criteria, o,
                                        [&](const CriterionResult& r) { ctx.log << result_line(r) << std::endl; });
    Table t{"acceptance", {"criterion", "title", "pass", "summary"}, {}, "criterion", "pass"};
    json j = json::array();
    bool criterion_failed = false, numerical = false;
    std::vector<int> failed;
    for (const auto& r : results) {
        t.rows.push_back({std::int64_t{r.id}, r.title, r.pass, r.summary});
        // timings are printed, not saved, so reruns give identical files
        j.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary},
                     {"details", r.details}});
        if (!r.pass) {
            failed.push_back(r.id);
            if (r.numerical_failure)
                numerical = true;
            else
                criterion_failed = true;
        }
    }
    wrote(ctx, emit_report(t, ctx.format, ctx.out));
    wrote(ctx, emit_json(j, "verify_all", ctx.out));
    const std::size_t passed = results.size() - failed.size();
    ctx.log << passed << "/" << results.size() << " criteria passed\n";
    if (failed.empty()) return {};
    std::string ids;
    for (int id : failed) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    if (criterion_failed) return {ExitCriterion, "criterion_failed", "failed criteria: " + ids};
    (void)numerical;
    return {ExitNonConvergence, "non_convergence", "criteria without a converged result: " + ids};
}

} // namespace

ShearProfile make_profile(const ProfileConfig& c) { return profiles::by_name(c.name, c.params); }

json to_json(const ProfileConfig& c)
{
    json j = {{"name", c.name}};
    const auto& q = c.params;
    if (q.degree) j["degree"] = *q.degree;
    if (q.lo) j["lo"] = *q.lo;
    if (q.hi) j["hi"] = *q.hi;
    if (q.domain) j["domain"] = *q.domain;
    if (!q.coeffs.empty()) j["coeffs"] = q.coeffs;
    if (q.m) j["m"] = *q.m;
    if (q.c0_hint) j["c0_hint"] = *q.c0_hint;
    return j;
}

ProfileConfig profile_config_from_json(const json& j)
{
    const std::string where = "profile";
    if (j.is_string()) return ProfileConfig{j.get<std::string>(), {}};
    check_keys(j, {"name", "degree", "lo", "hi", "domain", "coeffs", "m", "c0_hint"}, where);
    ProfileConfig c;
    if (!j.contains("name")) bad(where, "missing 'name'");
    read(j, "name", c.name, where);
    read_opt(j, "degree", c.params.degree, where);
    read_opt(j, "lo", c.params.lo, where);
    read_opt(j, "hi", c.params.hi, where);
    read_opt(j, "domain", c.params.domain, where);
    read_list(j, "coeffs", c.params.coeffs, where);
    read_opt(j, "m", c.params.m, where);
    read_opt(j, "c0_hint", c.params.c0_hint, where);
    return c;
}

RunConfig parse_config(const json& j)
{
    check_keys(j, {"profile", "nu", "k", "grid", "sweep", "solver", "semigroup", "tensor", "checks", "acceptance",
                   "output_dir", "seed", "workers", "format"},
               "config");
    RunConfig c;
    if (j.contains("profile")) c.profile = profile_config_from_json(j.at("profile"));
    read_opt(j, "nu", c.nu, "config");
    read_opt(j, "k", c.k, "config");
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, {"margin_factor", "n_per_layer", "n_min", "n_cap"}, "grid");
        read(g, "margin_factor", c.grid.margin_factor, "grid");
        read(g, "n_per_layer", c.grid.n_per_layer, "grid");
        read(g, "n_min", c.grid.n_min, "grid");
        read(g, "n_cap", c.grid.n_cap, "grid");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, {"nu_list", "k_list", "lambda_grid", "delta_grid", "L_list"}, "sweep");
        read_list(s, "nu_list", c.nu_list, "sweep");
        read_list(s, "k_list", c.k_list, "sweep");
        read_list(s, "lambda_grid", c.lambda_grid, "sweep");
        read_list(s, "delta_grid", c.delta_grid, "sweep");
        read_list(s, "L_list", c.L_list, "sweep");
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        check_keys(s, {"tol", "max_iter", "krylov_dim", "dense_fallback", "dense_limit", "coarse_points", "refine_tol",
                       "convergence_rtol", "check_grid", "check_truncation"},
                   "solver");
        read(s, "tol", c.solver.tol, "solver");
        read(s, "max_iter", c.solver.max_iter, "solver");
        read(s, "krylov_dim", c.solver.krylov_dim, "solver");
        read(s, "dense_fallback", c.solver.dense_fallback, "solver");
        read(s, "dense_limit", c.solver.dense_limit, "solver");
        read(s, "coarse_points", c.solver.coarse_points, "solver");
        read(s, "refine_tol", c.solver.refine_tol, "solver");
        read(s, "convergence_rtol", c.solver.convergence_rtol, "solver");
        read(s, "check_grid", c.solver.check_grid, "solver");
        read(s, "check_truncation", c.solver.check_truncation, "solver");
    }
    if (j.contains("semigroup")) {
        const auto& s = j.at("semigroup");
        check_keys(s, {"ensemble_size", "power_steps", "power_rtol", "checkpoints", "horizon", "method", "wei_slack",
                       "with_semigroup"},
                   "semigroup");
        read(s, "ensemble_size", c.semigroup.ensemble_size, "semigroup");
        read(s, "power_steps", c.semigroup.power_steps, "semigroup");
        read(s, "power_rtol", c.semigroup.power_rtol, "semigroup");
        read(s, "checkpoints", c.semigroup.checkpoints, "semigroup");
        read(s, "horizon", c.semigroup.horizon, "semigroup");
        read(s, "method", c.semigroup.method, "semigroup");
        read(s, "wei_slack", c.semigroup.wei_slack, "semigroup");
        read(s, "with_semigroup", c.semigroup.with_semigroup, "semigroup");
    }
    if (j.contains("tensor")) {
        const auto& s = j.at("tensor");
        check_keys(s, {"factors", "n_axis", "n_cap", "checkpoints", "horizon", "tolerance"}, "tensor");
        if (s.contains("factors")) {
            if (!s.at("factors").is_array()) bad("tensor.factors", "expected an array of profiles");
            for (const auto& f : s.at("factors")) c.tensor.factors.push_back(profile_config_from_json(f));
        }
        read(s, "n_axis", c.tensor.n_axis, "tensor");
        read(s, "n_cap", c.tensor.n_cap, "tensor");
        read(s, "checkpoints", c.tensor.checkpoints, "tensor");
        read(s, "horizon", c.tensor.horizon, "tensor");
        read(s, "tolerance", c.tensor.tolerance, "tensor");
    }
    if (j.contains("checks")) {
        const auto& s = j.at("checks");
        check_keys(s, {"grid_points", "probe_radii", "window_span", "window"}, "checks");
        read(s, "grid_points", c.checks.grid_points, "checks");
        read_list(s, "probe_radii", c.checks.probe_radii, "checks");
        read(s, "window_span", c.checks.window_span, "checks");
        if (s.contains("window") && !s.at("window").is_null()) {
            std::vector<double> w;
            read_list(s, "window", w, "checks");
            need(w.size() == 2, "checks.window", "expected [lo, hi]");
            c.checks.window_lo = w[0];
            c.checks.window_hi = w[1];
        }
    }
    if (j.contains("acceptance")) {
        const auto& s = j.at("acceptance");
        check_keys(s, {"criteria"}, "acceptance");
        if (s.contains("criteria")) {
            if (!s.at("criteria").is_array()) bad("acceptance.criteria", "expected an array of integers");
            c.criteria.clear();
            for (const auto& x : s.at("criteria")) {
                if (!x.is_number_integer()) bad("acceptance.criteria", "expected an array of integers");
                c.criteria.push_back(x.get<int>());
            }
        }
    }
    read(j, "output_dir", c.output_dir, "config");
    read(j, "seed", c.seed, "config");
    read(j, "workers", c.workers, "config");
    read(j, "format", c.format, "config");
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ConfigError, "cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ConfigError, path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c)
{
    json j;
    if (c.profile) j["profile"] = to_json(*c.profile);
    if (c.nu) j["nu"] = *c.nu;
    if (c.k) j["k"] = *c.k;
    j["grid"] = {{"margin_factor", c.grid.margin_factor},
                 {"n_per_layer", c.grid.n_per_layer},
                 {"n_min", c.grid.n_min},
                 {"n_cap", c.grid.n_cap}};
    j["sweep"] = {{"nu_list", c.nu_list},
                  {"k_list", c.k_list},
                  {"lambda_grid", c.lambda_grid},
                  {"delta_grid", c.delta_grid},
                  {"L_list", c.L_list}};
    j["solver"] = {{"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"krylov_dim", c.solver.krylov_dim},
                   {"dense_fallback", c.solver.dense_fallback},
                   {"dense_limit", c.solver.dense_limit},
                   {"coarse_points", c.solver.coarse_points},
                   {"refine_tol", c.solver.refine_tol},
                   {"convergence_rtol", c.solver.convergence_rtol},
                   {"check_grid", c.solver.check_grid},
                   {"check_truncation", c.solver.check_truncation}};
    j["semigroup"] = {{"ensemble_size", c.semigroup.ensemble_size},
                      {"power_steps", c.semigroup.power_steps},
                      {"power_rtol", c.semigroup.power_rtol},
                      {"checkpoints", c.semigroup.checkpoints},
                      {"horizon", c.semigroup.horizon},
                      {"method", c.semigroup.method},
                      {"wei_slack", c.semigroup.wei_slack},
                      {"with_semigroup", c.semigroup.with_semigroup}};
    json factors = json::array();
    for (const auto& f : c.tensor.factors) factors.push_back(to_json(f));
    j["tensor"] = {{"factors", factors},
                   {"n_axis", c.tensor.n_axis},
                   {"n_cap", c.tensor.n_cap},
                   {"checkpoints", c.tensor.checkpoints},
                   {"horizon", c.tensor.horizon},
                   {"tolerance", c.tensor.tolerance}};
    j["checks"] = {{"grid_points", c.checks.grid_points},
                   {"probe_radii", c.checks.probe_radii},
                   {"window_span", c.checks.window_span}};
    if (c.checks.window_lo) j["checks"]["window"] = {*c.checks.window_lo, *c.checks.window_hi};
    j["acceptance"] = {{"criteria", c.criteria}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["format"] = c.format;
    return j;
}

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"profile-check",  "levelset-measure", "resolvent-psi",
                                                "semigroup-decay", "sweep-scaling",    "tensor-check",
                                                "counterexample",  "verify-all"};
    return names;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const RunConfig& c)
{
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return c.output_dir;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const NumericalError*>(&e)) return ExitNonConvergence;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->code()) {
        case ErrorCode::NoConvergence:
        case ErrorCode::SingularMatrix: return ExitNonConvergence;
        case ErrorCode::FactorCheckFailed:
        case ErrorCode::DegenerateProfile:
        case ErrorCode::EdgeNotDecayed:
        case ErrorCode::InsufficientRows: return ExitCriterion;
        default: return ExitConfig;
        }
    }
    return ExitConfig;
}

json make_diagnostic(const std::string& command, int exit_code, const std::string& error, const std::string& message)
{
    const char* status = exit_code == ExitConfig ? "config_error"
                         : exit_code == ExitCriterion ? "criterion_failed"
                                                      : "non_convergence";
    return {{"command", command}, {"exit_code", exit_code}, {"status", status}, {"error", error}, {"message", message}};
}

void emit_diagnostic(const json& d, const std::filesystem::path* out_dir, std::ostream& err)
{
    err << d.dump() << std::endl;
    if (!out_dir) return;
    try {
        emit_json(d, "diagnostic", *out_dir);
    } catch (const std::exception&) {
        // stderr already carries the record
    }
}

int run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& log, std::ostream& err)
{
    Outcome out;
    try {
        if (config.workers > 0) set_threads(config.workers);
        Context ctx{config, out_dir, parse_format(config.format), log};
        if (name == "profile-check")
            out = cmd_profile_check(ctx);
        else if (name == "levelset-measure")
            out = cmd_levelset(ctx);
        else if (name == "resolvent-psi")
            out = cmd_resolvent(ctx);
        else if (name == "semigroup-decay")
            out = cmd_semigroup(ctx);
        else if (name == "sweep-scaling")
            out = cmd_sweep(ctx);
        else if (name == "tensor-check")
            out = cmd_tensor(ctx);
        else if (name == "counterexample")
            out = cmd_counterexample(ctx);
        else if (name == "verify-all")
            out = cmd_verify_all(ctx);
        else
            fail(ErrorCode::ConfigError, "unknown command '" + name + "'");
    } catch (const Error& e) {
        out = {exit_code_for(e), std::string(to_string(e.code())), e.what()};
    } catch (const std::exception& e) {
        out = {ExitConfig, "exception", e.what()};
    }
    if (out.code != ExitPass) {
        const std::filesystem::path* dir = out.error == "IoFailure" ? nullptr : &out_dir;
        emit_diagnostic(make_diagnostic(name, out.code, out.error, out.message), dir, err);
    }
    return out.code;
}

} // namespace shear
