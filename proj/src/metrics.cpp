#include "lrtf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lrtf/errors.hpp"

namespace lrtf {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_err(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

std::vector<std::size_t> table_order(std::span<const EvalResult> results) {
    std::vector<std::size_t> order(results.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (results[a].failed != results[b].failed) return !results[a].failed;
        if (results[a].failed) return false;
        return results[a].test_mre < results[b].test_mre;
    });
    return order;
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Vec relative_errors(std::span<const double> predictions, std::span<const double> targets, double floor) {
    if (predictions.size() != targets.size()) throw DimensionError("relative_errors: length mismatch");
    if (predictions.empty()) throw DataError("relative_errors: empty input");
    if (!(floor > 0.0)) throw ConfigError("relative_errors: floor must be positive");
    Vec errors(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i)
        errors[i] = std::abs(predictions[i] - targets[i]) / std::max(std::abs(targets[i]), floor);
    return errors;
}

EvalResult evaluate(const SurrogateModel& model, const Dataset& data, std::span<const std::size_t> rows,
                    double floor) {
    if (rows.empty()) throw DataError("evaluate: no rows");
    if (model.input_dim() != data.input_dim())
        throw DimensionError("evaluate: model input_dim " + std::to_string(model.input_dim()) +
                             " does not match dataset arity " + std::to_string(data.input_dim()));
    Vec preds(rows.size()), targets(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Vec x = data.standardized_row(rows[i]);
        preds[i] = data.destandardize_target(model.forward(x));
        targets[i] = data.raw.targets[rows[i]];
    }
    const Vec errors = relative_errors(preds, targets, floor);
    EvalResult result;
    result.label = to_string(model.kind());
    result.test_mre = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
    result.test_maxre = *std::max_element(errors.begin(), errors.end());
    result.param_count = model.param_count();
    result.error_floor = floor;
    return result;
}

std::string comparison_table_text(std::span<const EvalResult> results) {
    if (results.empty()) throw DataError("comparison_table: no results");
    const std::vector<std::string> header = {"Model", "Params", "Test MRE", "Test MaxRE", "Epoch"};
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i : table_order(results)) {
        const EvalResult& r = results[i];
        if (r.failed)
            cells.push_back({r.label, std::to_string(r.param_count), "failed", "failed",
                             r.note.empty() ? "-" : r.note});
        else
            cells.push_back({r.label, std::to_string(r.param_count), fmt_err(r.test_mre),
                             fmt_err(r.test_maxre), std::to_string(r.epochs_run)});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << row[c];
            if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
        }
        os << '\n';
    };
    emit(header);
    for (std::size_t c = 0; c < header.size(); ++c) {
        os << std::string(width[c], '-');
        if (c + 1 < header.size()) os << "  ";
    }
    os << '\n';
    for (const auto& row : cells) emit(row);
    return os.str();
}

std::string comparison_table_csv(std::span<const EvalResult> results) {
    if (results.empty()) throw DataError("comparison_table: no results");
    auto safe = [](std::string s) {
        for (char& c : s)
            if (c == ',' || c == '\n' || c == '\r') c = ';';
        return s;
    };
    std::ostringstream os;
    os << "model,params,test_mre,test_maxre,epochs_run,best_epoch,error_floor,config_hash,status,note\n";
    for (std::size_t i : table_order(results)) {
        const EvalResult& r = results[i];
        os << safe(r.label) << ',' << r.param_count << ',' << fmt17(r.test_mre) << ',' << fmt17(r.test_maxre)
           << ',' << r.epochs_run << ',' << r.best_epoch << ',' << fmt17(r.error_floor) << ',' << r.config_hash
           << ',' << (r.failed ? "failed" : "ok") << ',' << safe(r.note) << '\n';
    }
    return os.str();
}

void write_eval_result(const EvalResult& result, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << "lrtf-eval v1\n";
    os << "model: " << result.label << '\n';
    os << "test_mre: " << fmt17(result.test_mre) << '\n';
    os << "test_maxre: " << fmt17(result.test_maxre) << '\n';
    os << "param_count: " << result.param_count << '\n';
    os << "epochs_run: " << result.epochs_run << '\n';
    os << "best_epoch: " << result.best_epoch << '\n';
    os << "error_floor: " << fmt17(result.error_floor) << '\n';
    os << "config_hash: " << result.config_hash << '\n';
    os << "status: " << (result.failed ? "failed" : "ok") << '\n';
    os << "note: " << result.note << '\n';
}

EvalResult read_eval_result(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot read " + path.string());
    std::string line;
    if (!std::getline(is, line) || trimmed(line) != "lrtf-eval v1")
        throw DataError(path.string() + ": not an eval result file");
    EvalResult result;
    while (std::getline(is, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const std::string key = trimmed(line.substr(0, colon));
        const std::string value = trimmed(line.substr(colon + 1));
        if (key == "model")
            result.label = value;
        else if (key == "test_mre")
            result.test_mre = std::stod(value);
        else if (key == "test_maxre")
            result.test_maxre = std::stod(value);
        else if (key == "param_count")
            result.param_count = std::stoull(value);
        else if (key == "epochs_run")
            result.epochs_run = std::stoull(value);
        else if (key == "best_epoch")
            result.best_epoch = std::stoull(value);
        else if (key == "error_floor")
            result.error_floor = std::stod(value);
        else if (key == "config_hash")
            result.config_hash = value;
        else if (key == "status")
            result.failed = (value == "failed");
        else if (key == "note")
            result.note = value;
        else
            throw DataError(path.string() + ": unknown key '" + key + "'");
    }
    return result;
}

}  // namespace lrtf
