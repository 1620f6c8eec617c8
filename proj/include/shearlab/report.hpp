// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/levelset.hpp"
#include "shearlab/profiles.hpp"
#include "shearlab/resolvent.hpp"
#include "shearlab/semigroup.hpp"
#include "shearlab/sweep.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace shear {

enum class Format { Csv, Json, Gnuplot };

Format parse_format(const std::string& s);
std::string to_string(Format f);

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// A flat result table. `x_axis`/`y_axis` name the plot axes for the
/// gnuplot-data header; they default to the first two columns.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string x_axis;
    std::string y_axis;
};

/// %.17g, with nan/inf spelled the way strtod reads them back.
std::string format_double(double x);

/// Writes `dir/name.{csv,json,dat}` and returns the path. Empty tables throw
/// IoFailure and leave no file behind.
std::filesystem::path emit_report(const Table& table, Format format, const std::filesystem::path& dir);

/// Writes `dir/name.json` (pretty printed, trailing LF).
std::filesystem::path emit_json(const nlohmann::json& j, const std::string& name, const std::filesystem::path& dir);

std::string render(const Table& table, Format format);

// Column schemas of the module outputs.
Table measure_table(const MeasureSweep& sweep);
Table resolvent_table(const PsiEstimate& e);
Table resolvent_table(std::span<const ResolventPoint> points);
Table decay_table(const DecaySeries& s);
Table rate_table(const RateTable& t);
Table counterexample_table(std::span<const CounterexampleRow> rows, const std::string& name = "counterexample");
Table tensor_table(const ProductCheck& c);

// JSON forms. Every `to_json` has a matching `from_json` that restores the
// value exactly (NaN is written as null, doubles with round-trip precision).
nlohmann::json to_json(const Grid1D& g);
Grid1D grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PsiEstimate& e);
PsiEstimate psi_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScalingFit& f);
ScalingFit scaling_fit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RateTable& t);
RateTable rate_table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecaySeries& s);
DecaySeries decay_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WeiCheck& w);
WeiCheck wei_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MeasureSweep& s);
MeasureSweep measure_sweep_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TensorReport& r);
TensorReport tensor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NondegeneracyReport& r);
NondegeneracyReport nondegeneracy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InfinityReport& r);
InfinityReport infinity_from_json(const nlohmann::json& j);
nlohmann::json to_json(std::span<const CounterexampleRow> rows);
std::vector<CounterexampleRow> counterexample_from_json(const nlohmann::json& j);

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);
std::string to_string(DecayMethod m);
DecayMethod decay_method_from_string(const std::string& s);

} // namespace shear
