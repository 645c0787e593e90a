#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "lrtf/errors.hpp"
#include "lrtf/metrics.hpp"
#include "lrtf/rng.hpp"

using namespace lrtf;
namespace fs = std::filesystem;

namespace {

EvalResult mk(const std::string& label, double mre, double maxre, std::size_t params, std::size_t epochs) {
    EvalResult r;
    r.label = label;
    r.test_mre = mre;
    r.test_maxre = maxre;
    r.param_count = params;
    r.epochs_run = epochs;
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

Dataset toy_dataset() {
    RawData raw;
    raw.num_samples = 20;
    raw.input_dim = 2;
    raw.input_names = {"a", "b"};
    Rng rng(99);
    raw.inputs.resize(40);
    raw.targets.resize(20);
    for (double& v : raw.inputs) v = rng.uniform(-1.0, 1.0);
    for (double& v : raw.targets) v = rng.uniform(5.0, 9.0);
    return split_and_standardize(std::move(raw), 0.7, 1);
}

SurrogateModel toy_model() {
    ModelSpec s;
    s.kind = ModelKind::Mlp;
    s.input_dim = 2;
    s.predictor_hidden = {4};
    return SurrogateModel::init(s, 7);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("relative errors implement |yhat-y| / max(|y|, floor)") {
    CHECK(relative_errors(Vec{1.0, 2.0}, Vec{1.0, 2.0}) == Vec{0.0, 0.0});
    CHECK(relative_errors(Vec{2.0}, Vec{1.0})[0] == 1.0);
    CHECK(relative_errors(Vec{-3.0}, Vec{-2.0})[0] == doctest::Approx(0.5).epsilon(1e-15));
    // the floor takes over near zero: |1e-9 - 0| / 1e-8 = 0.1
    CHECK(relative_errors(Vec{1e-9}, Vec{0.0})[0] == doctest::Approx(0.1).epsilon(1e-12));
    // custom floor is honored
    CHECK(relative_errors(Vec{1.0}, Vec{0.0}, 0.5)[0] == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(static_cast<void>(relative_errors(Vec{}, Vec{})), DataError);
    CHECK_THROWS_AS(static_cast<void>(relative_errors(Vec{1.0}, Vec{1.0, 2.0})), DimensionError);
    CHECK_THROWS_AS(static_cast<void>(relative_errors(Vec{1.0}, Vec{1.0}, 0.0)), ConfigError);
}

TEST_CASE("evaluate scores de-standardized predictions against raw targets") {
    const Dataset data = toy_dataset();
    const SurrogateModel model = toy_model();
    const EvalResult r = evaluate(model, data, data.test_idx);

    double sum = 0.0, worst = 0.0;
    for (std::size_t idx : data.test_idx) {
        const double pred = data.destandardize_target(model.forward(data.standardized_row(idx)));
        const double y = data.raw.targets[idx];
        const double e = std::abs(pred - y) / std::max(std::abs(y), 1e-8);
        sum += e;
        worst = std::max(worst, e);
    }
    CHECK(r.test_mre == doctest::Approx(sum / static_cast<double>(data.test_idx.size())).epsilon(1e-14));
    CHECK(r.test_maxre == doctest::Approx(worst).epsilon(1e-14));
    CHECK(r.test_maxre >= r.test_mre);
    CHECK(r.label == "mlp");
    CHECK(r.param_count == model.param_count());
    CHECK(r.error_floor == 1e-8);
    CHECK_FALSE(r.failed);

    CHECK_THROWS_AS(static_cast<void>(evaluate(model, data, {})), DataError);
}

TEST_CASE("mean error is permutation invariant and bounded by the max") {
    const Dataset data = toy_dataset();
    const SurrogateModel model = toy_model();
    std::vector<std::size_t> rows(data.test_idx);
    const EvalResult fwd = evaluate(model, data, rows);
    std::reverse(rows.begin(), rows.end());
    const EvalResult rev = evaluate(model, data, rows);
    CHECK(fwd.test_maxre == rev.test_maxre);
    CHECK(fwd.test_mre == doctest::Approx(rev.test_mre).epsilon(1e-14));
}

TEST_CASE("text table sorts by mean error with failures at the bottom") {
    std::vector<EvalResult> results = {
        mk("mlp", 3.4e-3, 1.2e-2, 8833, 900),
        mk("plrnet", 3.78e-4, 9.02e-3, 2010000, 450),
        mk("tt", 5.1e-3, 2.0e-2, 3048, 700),
    };
    EvalResult broken = mk("tr", 0.0, 0.0, 2742, 0);
    broken.failed = true;
    broken.note = "non-finite training loss (epoch 3)";
    results.push_back(broken);

    const std::string table = comparison_table_text(results);
    const auto lines = lines_of(table);
    REQUIRE(lines.size() == 6);  // header, rule, four rows
    CHECK(lines[0].rfind("Model", 0) == 0);
    CHECK(lines[0].find("Params") != std::string::npos);
    CHECK(lines[0].find("Test MRE") != std::string::npos);
    CHECK(lines[0].find("Test MaxRE") != std::string::npos);
    CHECK(lines[0].find("Epoch") != std::string::npos);
    CHECK(lines[2].rfind("plrnet", 0) == 0);  // smallest mean error first
    CHECK(lines[3].rfind("mlp", 0) == 0);
    CHECK(lines[4].rfind("tt", 0) == 0);
    CHECK(lines[5].rfind("tr", 0) == 0);  // failed row sinks to the bottom
    CHECK(lines[2].find("3.78e-04") != std::string::npos);
    CHECK(lines[2].find("9.02e-03") != std::string::npos);
    CHECK(lines[2].find("2010000") != std::string::npos);
    CHECK(lines[2].find("450") != std::string::npos);
    CHECK(lines[5].find("failed") != std::string::npos);
    CHECK(lines[5].find("non-finite training loss") != std::string::npos);

    // ties keep their input order (stable sort)
    std::vector<EvalResult> ties = {mk("first", 1.0, 1.0, 1, 1), mk("second", 1.0, 1.0, 1, 1)};
    const auto tie_lines = lines_of(comparison_table_text(ties));
    CHECK(tie_lines[2].rfind("first", 0) == 0);
    CHECK(tie_lines[3].rfind("second", 0) == 0);

    CHECK_THROWS_AS(static_cast<void>(comparison_table_text({})), DataError);
}

TEST_CASE("csv table mirrors the text ordering and sanitizes notes") {
    std::vector<EvalResult> results = {mk("tt", 5.1e-3, 2.0e-2, 3048, 700), mk("plrnet", 3.78e-4, 9.02e-3, 3521, 450)};
    results[0].config_hash = "0123456789abcdef";
    EvalResult broken = mk("tr", 0.0, 0.0, 2742, 0);
    broken.failed = true;
    broken.note = "bad, line\nbreak";
    results.push_back(broken);

    const auto lines = lines_of(comparison_table_csv(results));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "model,params,test_mre,test_maxre,epochs_run,best_epoch,error_floor,config_hash,status,note");
    CHECK(lines[1].rfind("plrnet,3521,", 0) == 0);
    CHECK(lines[2].rfind("tt,3048,", 0) == 0);
    CHECK(lines[2].find("0123456789abcdef") != std::string::npos);
    CHECK(lines[3].rfind("tr,2742,", 0) == 0);
    CHECK(lines[3].find("failed") != std::string::npos);
    CHECK(lines[3].find("bad; line;break") != std::string::npos);
}

TEST_CASE("eval files round-trip exactly") {
    EvalResult r = mk("plrnet", 3.7812345678901234e-4, 9.02e-3, 3521, 450);
    r.best_epoch = 433;
    r.error_floor = 1e-8;
    r.config_hash = "00ff00ff00ff00ff";
    r.note = "sweep row 2";
    const fs::path path = fs::temp_directory_path() / "lrtf_eval_roundtrip.txt";
    write_eval_result(r, path);
    const EvalResult back = read_eval_result(path);
    CHECK(back == r);
    fs::remove(path);
}

TEST_CASE("eval files with foreign content are rejected") {
    const fs::path path = fs::temp_directory_path() / "lrtf_eval_bad.txt";
    {
        std::ofstream os(path);
        os << "something else\n";
    }
    CHECK_THROWS_AS(static_cast<void>(read_eval_result(path)), DataError);
    {
        std::ofstream os(path);
        os << "lrtf-eval v1\nmodel: mlp\nbogus_key: 3\n";
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(read_eval_result(path)), doctest::Contains("bogus_key"), DataError);
    CHECK_THROWS_AS(static_cast<void>(read_eval_result(fs::temp_directory_path() / "lrtf_eval_missing.txt")),
                    DataError);
    fs::remove(path);
}

}  // TEST_SUITE
