// SPDX-License-Identifier: Apache-2.0
#include "shearlab/report.hpp"

#include "shearlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shear {

using nlohmann::json;

namespace {

// JSON has no literal for nan and inf; they are written as strings so that
// the value reads back bit for bit.
json num(double x)
{
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double get_num(const json& j)
{
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        fail(ErrorCode::ConfigError, "expected a number, got '" + s + "'");
    }
    return j.get<double>();
}

json nums(std::span<const double> xs)
{
    json a = json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

std::vector<double> get_nums(const json& j)
{
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(get_num(x));
    return out;
}

template <class T>
json opt(const std::optional<T>& v)
{
    if (!v) return nullptr;
    if constexpr (std::is_same_v<T, double>)
        return num(*v);
    else
        return *v;
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if constexpr (std::is_same_v<T, double>)
        return get_num(j.at(key));
    else
        return j.at(key).get<T>();
}

Trend trend_from_string(const std::string& s)
{
    if (s == "Increasing") return Trend::Increasing;
    if (s == "Flat") return Trend::Flat;
    if (s == "Vanishing") return Trend::Vanishing;
    fail(ErrorCode::ConfigError, "unknown trend '" + s + "'");
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c, Format f)
{
    return std::visit(
        [f](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
                if (f == Format::Gnuplot && !std::isfinite(v)) return std::isnan(v) ? "NaN" : (v > 0 ? "Inf" : "-Inf");
                return format_double(v);
            } else if constexpr (std::is_same_v<V, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<V, bool>) {
                if (f == Format::Gnuplot) return v ? "1" : "0";
                return v ? "true" : "false";
            } else {
                if (f == Format::Gnuplot) return "\"" + v + "\"";
                return csv_field(v);
            }
        },
        c);
}

json cell_json(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
                return num(v);
            else
                return v;
        },
        c);
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    out << text;
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

} // namespace

Format parse_format(const std::string& s)
{
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "gnuplot-data") return Format::Gnuplot;
    fail(ErrorCode::ConfigError, "unknown format '" + s + "' (csv, json, gnuplot-data)");
}

std::string to_string(Format f)
{
    switch (f) {
    case Format::Csv: return "csv";
    case Format::Json: return "json";
    case Format::Gnuplot: return "gnuplot-data";
    }
    return "csv";
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render(const Table& t, Format f)
{
    std::ostringstream os;
    switch (f) {
    case Format::Csv:
        for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << csv_field(t.columns[c]);
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c], f);
            os << '\n';
        }
        break;
    case Format::Json: {
        json a = json::array();
        for (const auto& row : t.rows) {
            json o = json::object();
            for (std::size_t c = 0; c < row.size(); ++c) o[t.columns[c]] = cell_json(row[c]);
            a.push_back(std::move(o));
        }
        os << a.dump(2) << '\n';
        break;
    }
    case Format::Gnuplot: {
        const std::string x = t.x_axis.empty() ? t.columns.at(0) : t.x_axis;
        const std::string y = t.y_axis.empty() ? t.columns.at(t.columns.size() > 1 ? 1 : 0) : t.y_axis;
        os << "# " << t.name << "\n# x: " << x << "\n# y: " << y << "\n#";
        for (const auto& c : t.columns) os << ' ' << c;
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? " " : "") << cell_text(row[c], f);
            os << '\n';
        }
        break;
    }
    }
    return os.str();
}

std::filesystem::path emit_report(const Table& t, Format f, const std::filesystem::path& dir)
{
    require(!t.rows.empty(), ErrorCode::IoFailure, "no rows to write for '" + t.name + "'");
    require(!t.columns.empty(), ErrorCode::IoFailure, "table '" + t.name + "' has no columns");
    for (const auto& row : t.rows)
        require(row.size() == t.columns.size(), ErrorCode::IoFailure, "ragged row in '" + t.name + "'");
    const char* ext = f == Format::Csv ? ".csv" : (f == Format::Json ? ".json" : ".dat");
    const auto path = dir / (t.name + ext);
    write_file(path, render(t, f));
    return path;
}

std::filesystem::path emit_json(const json& j, const std::string& name, const std::filesystem::path& dir)
{
    require(!j.is_null() && !(j.is_object() && j.empty()), ErrorCode::IoFailure, "no results to write for '" + name + "'");
    const auto path = dir / (name + ".json");
    write_file(path, j.dump(2) + "\n");
    return path;
}

Table measure_table(const MeasureSweep& s)
{
    Table t{"measure_sweep", {"lambda", "delta", "m", "measure_E", "measure_Ecal", "ratio", "saturated"}, {}, "lambda",
            "ratio"};
    for (const auto& r : s.rows)
        t.rows.push_back({r.lambda, r.delta, std::int64_t{r.m}, r.measure_E, r.measure_Ecal, r.ratio, r.saturated});
    return t;
}

Table resolvent_table(const PsiEstimate& e)
{
    Table t{"resolvent", {"lambda", "sigma_min"}, {}, "lambda", "sigma_min"};
    for (const auto& [l, s] : e.scan) t.rows.push_back({l, s});
    return t;
}

Table resolvent_table(std::span<const ResolventPoint> points)
{
    Table t{"resolvent", {"lambda", "sigma_min"}, {}, "lambda", "sigma_min"};
    for (const auto& p : points)
        t.rows.push_back({p.lambda, p.converged ? p.sigma_min : std::numeric_limits<double>::quiet_NaN()});
    return t;
}

Table decay_table(const DecaySeries& s)
{
    Table t{"decay", {"t", "norm_bound", "method"}, {}, "t", "norm_bound"};
    for (std::size_t i = 0; i < s.times.size(); ++i) t.rows.push_back({s.times[i], s.norm_bounds[i], to_string(s.method)});
    return t;
}

Table rate_table(const RateTable& rt)
{
    Table t{"rate_table", {"nu", "k", "psi", "semigroup_rate", "regime", "grid_converged"}, {}, "nu", "psi"};
    for (const auto& r : rt.rows)
        t.rows.push_back({r.nu, r.k, r.psi, r.semigroup_rate, to_string(r.regime), r.grid_converged});
    return t;
}

Table counterexample_table(std::span<const CounterexampleRow> rows, const std::string& name)
{
    Table t{name, {"L", "psi"}, {}, "L", "psi"};
    for (const auto& r : rows) t.rows.push_back({r.L, r.psi});
    return t;
}

Table tensor_table(const ProductCheck& c)
{
    Table t{"tensor", {"t", "norm_2d", "product_1d"}, {}, "t", "norm_2d"};
    for (std::size_t i = 0; i < c.times.size(); ++i) t.rows.push_back({c.times[i], c.norm_2d[i], c.product_1d[i]});
    return t;
}

std::string to_string(Regime r) { return r == Regime::Enhanced ? "enhanced" : "taylor"; }

Regime regime_from_string(const std::string& s)
{
    if (s == "enhanced") return Regime::Enhanced;
    if (s == "taylor") return Regime::Taylor;
    fail(ErrorCode::ConfigError, "unknown regime '" + s + "'");
}

std::string to_string(DecayMethod m) { return m == DecayMethod::Ensemble ? "ensemble" : "power_iteration"; }

DecayMethod decay_method_from_string(const std::string& s)
{
    if (s == "ensemble") return DecayMethod::Ensemble;
    if (s == "power_iteration") return DecayMethod::AdjointPowerIteration;
    fail(ErrorCode::ConfigError, "unknown decay method '" + s + "' (ensemble, power_iteration)");
}

json to_json(const Grid1D& g) { return {{"lo", num(g.lo)}, {"hi", num(g.hi)}, {"n", g.n}}; }

Grid1D grid_from_json(const json& j)
{
    return {get_num(j.at("lo")), get_num(j.at("hi")), j.at("n").get<std::size_t>()};
}

json to_json(const PsiEstimate& e)
{
    json scan = json::array();
    for (const auto& [l, s] : e.scan) scan.push_back({num(l), num(s)});
    return {{"profile", e.profile},
            {"nu", num(e.nu)},
            {"k", num(e.k)},
            {"psi", num(e.psi)},
            {"lambda_star", num(e.lambda_star)},
            {"grid_converged", e.grid_converged},
            {"psi_refined_grid", num(e.psi_refined_grid)},
            {"truncation_converged", opt(e.truncation_converged)},
            {"psi_doubled_truncation", opt(e.psi_doubled_truncation)},
            {"refined", e.refined},
            {"local_minima", e.local_minima},
            {"zero_on_axis", e.zero_on_axis},
            {"solver_converged", e.solver_converged},
            {"grid", to_json(e.grid)},
            {"cut", num(e.cut)},
            {"scan", std::move(scan)}};
}

PsiEstimate psi_from_json(const json& j)
{
    PsiEstimate e;
    e.profile = j.at("profile").get<std::string>();
    e.nu = get_num(j.at("nu"));
    e.k = get_num(j.at("k"));
    e.psi = get_num(j.at("psi"));
    e.lambda_star = get_num(j.at("lambda_star"));
    e.grid_converged = j.at("grid_converged").get<bool>();
    e.psi_refined_grid = get_num(j.at("psi_refined_grid"));
    e.truncation_converged = get_opt<bool>(j, "truncation_converged");
    e.psi_doubled_truncation = get_opt<double>(j, "psi_doubled_truncation");
    e.refined = j.at("refined").get<bool>();
    e.local_minima = j.at("local_minima").get<std::size_t>();
    e.zero_on_axis = j.at("zero_on_axis").get<bool>();
    e.solver_converged = j.at("solver_converged").get<bool>();
    e.grid = grid_from_json(j.at("grid"));
    e.cut = get_num(j.at("cut"));
    for (const auto& p : j.at("scan")) e.scan.emplace_back(get_num(p.at(0)), get_num(p.at(1)));
    return e;
}

json to_json(const ScalingFit& f)
{
    return {{"exponent_nu", num(f.exponent_nu)}, {"exponent_k", num(f.exponent_k)},
            {"nu_identified", f.nu_identified},  {"k_identified", f.k_identified},
            {"prefactor", num(f.prefactor)},     {"r_squared", num(f.r_squared)},
            {"rows", f.rows},                    {"regime", to_string(f.regime)}};
}

ScalingFit scaling_fit_from_json(const json& j)
{
    ScalingFit f;
    f.exponent_nu = get_num(j.at("exponent_nu"));
    f.exponent_k = get_num(j.at("exponent_k"));
    f.nu_identified = j.at("nu_identified").get<bool>();
    f.k_identified = j.at("k_identified").get<bool>();
    f.prefactor = get_num(j.at("prefactor"));
    f.r_squared = get_num(j.at("r_squared"));
    f.rows = j.at("rows").get<std::size_t>();
    f.regime = regime_from_string(j.at("regime").get<std::string>());
    return f;
}

json to_json(const RateTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"nu", num(r.nu)},
                        {"k", num(r.k)},
                        {"psi", num(r.psi)},
                        {"lambda_star", num(r.lambda_star)},
                        {"semigroup_rate", num(r.semigroup_rate)},
                        {"grid_converged", r.grid_converged},
                        {"truncation_converged", opt(r.truncation_converged)},
                        {"regime", to_string(r.regime)},
                        {"n", r.n},
                        {"error", r.error}});
    return {{"profile", t.profile}, {"m", t.m}, {"rows", std::move(rows)}};
}

RateTable rate_table_from_json(const json& j)
{
    RateTable t;
    t.profile = j.at("profile").get<std::string>();
    t.m = j.at("m").get<int>();
    for (const auto& r : j.at("rows")) {
        RateRow row;
        row.nu = get_num(r.at("nu"));
        row.k = get_num(r.at("k"));
        row.psi = get_num(r.at("psi"));
        row.lambda_star = get_num(r.at("lambda_star"));
        row.semigroup_rate = get_num(r.at("semigroup_rate"));
        row.grid_converged = r.at("grid_converged").get<bool>();
        row.truncation_converged = get_opt<bool>(r, "truncation_converged");
        row.regime = regime_from_string(r.at("regime").get<std::string>());
        row.n = r.at("n").get<std::size_t>();
        row.error = r.at("error").get<std::string>();
        t.rows.push_back(std::move(row));
    }
    return t;
}

json to_json(const DecaySeries& s)
{
    return {{"times", nums(s.times)},
            {"norm_bounds", nums(s.norm_bounds)},
            {"ensemble", nums(s.ensemble)},
            {"method", to_string(s.method)},
            {"fitted_rate", num(s.fitted_rate)},
            {"fit_window", {num(s.fit_window.first), num(s.fit_window.second)}},
            {"residual", num(s.residual)},
            {"dt", num(s.dt)},
            {"nu", num(s.nu)},
            {"k", num(s.k)},
            {"grid", to_json(s.grid)}};
}

DecaySeries decay_from_json(const json& j)
{
    DecaySeries s;
    s.times = get_nums(j.at("times"));
    s.norm_bounds = get_nums(j.at("norm_bounds"));
    s.ensemble = get_nums(j.at("ensemble"));
    s.method = decay_method_from_string(j.at("method").get<std::string>());
    s.fitted_rate = get_num(j.at("fitted_rate"));
    s.fit_window = {get_num(j.at("fit_window").at(0)), get_num(j.at("fit_window").at(1))};
    s.residual = get_num(j.at("residual"));
    s.dt = get_num(j.at("dt"));
    s.nu = get_num(j.at("nu"));
    s.k = get_num(j.at("k"));
    s.grid = grid_from_json(j.at("grid"));
    return s;
}

json to_json(const WeiCheck& w)
{
    return {{"holds", w.holds}, {"worst_slack", num(w.worst_slack)}, {"worst_t", num(w.worst_t)}};
}

WeiCheck wei_from_json(const json& j)
{
    return {j.at("holds").get<bool>(), get_num(j.at("worst_slack")), get_num(j.at("worst_t"))};
}

json to_json(const MeasureSweep& s)
{
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"lambda", num(r.lambda)},
                        {"delta", num(r.delta)},
                        {"m", r.m},
                        {"measure_E", num(r.measure_E)},
                        {"measure_Ecal", num(r.measure_Ecal)},
                        {"ratio", num(r.ratio)},
                        {"saturated", r.saturated}});
    return {{"rows", std::move(rows)},
            {"deltas", nums(s.deltas)},
            {"sup_ratio_per_delta", nums(s.sup_ratio_per_delta)},
            {"sup_ratio", num(s.sup_ratio)},
            {"saturated_rows", s.saturated_rows}};
}

MeasureSweep measure_sweep_from_json(const json& j)
{
    MeasureSweep s;
    for (const auto& r : j.at("rows"))
        s.rows.push_back({get_num(r.at("lambda")), get_num(r.at("delta")), r.at("m").get<int>(),
                          get_num(r.at("measure_E")), get_num(r.at("measure_Ecal")), get_num(r.at("ratio")),
                          r.at("saturated").get<bool>()});
    s.deltas = get_nums(j.at("deltas"));
    s.sup_ratio_per_delta = get_nums(j.at("sup_ratio_per_delta"));
    s.sup_ratio = get_num(j.at("sup_ratio"));
    s.saturated_rows = j.at("saturated_rows").get<std::size_t>();
    return s;
}

json to_json(const TensorReport& r)
{
    json j = {{"factor_targets", nums(r.factor_targets)}, {"sum_rate", num(r.sum_rate)}, {"product_check", nullptr}};
    if (r.product_check) {
        const auto& c = *r.product_check;
        j["product_check"] = {{"times", nums(c.times)},
                              {"norm_2d", nums(c.norm_2d)},
                              {"product_1d", nums(c.product_1d)},
                              {"rel_err", num(c.rel_err)},
                              {"pass", c.pass}};
    }
    return j;
}

TensorReport tensor_from_json(const json& j)
{
    TensorReport r;
    r.factor_targets = get_nums(j.at("factor_targets"));
    r.sum_rate = get_num(j.at("sum_rate"));
    if (!j.at("product_check").is_null()) {
        const auto& c = j.at("product_check");
        r.product_check = ProductCheck{get_nums(c.at("times")), get_nums(c.at("norm_2d")),
                                       get_nums(c.at("product_1d")), get_num(c.at("rel_err")),
                                       c.at("pass").get<bool>()};
    }
    return r;
}

json to_json(const NondegeneracyReport& r)
{
    return {{"min_sum", num(r.min_sum)}, {"witness_y", num(r.witness_y)}, {"pass", r.pass}, {"order", r.order}};
}

NondegeneracyReport nondegeneracy_from_json(const json& j)
{
    return {get_num(j.at("min_sum")), get_num(j.at("witness_y")), j.at("pass").get<bool>(), j.at("order").get<int>()};
}

json to_json(const InfinityReport& r)
{
    return {{"liminf_estimate", num(r.liminf_estimate)},
            {"trend", to_string(r.trend)},
            {"pass", r.pass},
            {"vacuous", r.vacuous},
            {"shell_minima", nums(r.shell_minima)}};
}

InfinityReport infinity_from_json(const json& j)
{
    InfinityReport r;
    r.liminf_estimate = get_num(j.at("liminf_estimate"));
    r.trend = trend_from_string(j.at("trend").get<std::string>());
    r.pass = j.at("pass").get<bool>();
    r.vacuous = j.at("vacuous").get<bool>();
    r.shell_minima = get_nums(j.at("shell_minima"));
    return r;
}

json to_json(std::span<const CounterexampleRow> rows)
{
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"L", num(r.L)},
                     {"psi", num(r.psi)},
                     {"lambda_star", num(r.lambda_star)},
                     {"grid_converged", r.grid_converged},
                     {"n", r.n}});
    return a;
}

std::vector<CounterexampleRow> counterexample_from_json(const json& j)
{
    std::vector<CounterexampleRow> out;
    for (const auto& r : j)
        out.push_back({get_num(r.at("L")), get_num(r.at("psi")), get_num(r.at("lambda_star")),
                       r.at("grid_converged").get<bool>(), r.at("n").get<std::size_t>()});
    return out;
}

} // namespace shear
