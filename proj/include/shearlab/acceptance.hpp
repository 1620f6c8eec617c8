// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/exec.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace shear {

inline constexpr int criterion_count = 10;

struct AcceptanceOptions {
    std::uint64_t seed = 20240607;
    Exec exec = Exec::Parallel;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    bool within_budget = true;
    bool numerical_failure = false;   // a solver gave up rather than a check failing
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string summary;              // one line, the measured quantities
    nlohmann::json details;           // everything the summary is computed from
};

std::string criterion_title(int id);
double criterion_budget(int id);

/// Runs one acceptance criterion (1..10). Never throws for numerical
/// trouble: exceptions are caught and turned into a failed result.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

/// Runs the selected criteria in order and calls `on_result` after each.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& options = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  k-exponent, enhanced regime: ... [12.4 s / 300 s]"
std::string result_line(const CriterionResult& r);

} // namespace shear
