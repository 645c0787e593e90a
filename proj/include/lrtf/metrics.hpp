#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lrtf/dataset.hpp"
#include "lrtf/surrogate.hpp"

namespace lrtf {

/// Per-sample relative errors |yhat - y| / max(|y|, floor), in original
/// target units. The floor keeps near-zero targets from dominating; its value
/// travels with every EvalResult so reported numbers stay interpretable.
Vec relative_errors(std::span<const double> predictions, std::span<const double> targets, double floor = 1e-8);

struct EvalResult {
    std::string label;  // row name, defaults to the model kind
    double test_mre = 0.0;
    double test_maxre = 0.0;
    std::size_t param_count = 0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double error_floor = 1e-8;
    std::string config_hash;
    bool failed = false;
    std::string note;

    bool operator==(const EvalResult&) const = default;
};

/// De-standardized predictions over `rows`, scored against raw targets.
EvalResult evaluate(const SurrogateModel& model, const Dataset& data, std::span<const std::size_t> rows,
                    double floor = 1e-8);

/// Aligned text table, rows sorted by test MRE ascending (failed rows last);
/// columns Model, Params, Test MRE, Test MaxRE, Epoch.
std::string comparison_table_text(std::span<const EvalResult> results);

/// Machine-readable twin of comparison_table_text (same ordering).
std::string comparison_table_csv(std::span<const EvalResult> results);

void write_eval_result(const EvalResult& result, const std::filesystem::path& path);
EvalResult read_eval_result(const std::filesystem::path& path);

}  // namespace lrtf
