#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lrtf/datagen.hpp"
#include "lrtf/dataset.hpp"
#include "lrtf/metrics.hpp"
#include "lrtf/optim.hpp"
#include "lrtf/surrogate.hpp"

namespace lrtf {

// ---------------------------------------------------------------------------
// Config files: INI-style sections of `key = value` lines, full-line comments
// starting with '#' or ';'.

struct ConfigFile {
    // section -> key -> value; duplicate keys are rejected at parse time
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile parse(const std::filesystem::path& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin);
};

std::uint64_t fnv1a64(std::string_view text);

struct DatasetSource {
    enum class Kind { Generator, Csv };
    Kind kind = Kind::Generator;
    std::string generator;  // microstrip | cylinder | synthetic
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> grid;  // empty -> uniform random sampling
    ParamBox box;                   // resolved: generator defaults + [box] overrides
    // synthetic generator only:
    ModelKind synth_kind = ModelKind::Lrtfr;
    std::size_t synth_n = 0;
    std::size_t synth_rank = 0;
    std::uint64_t synth_seed = 1;
    double synth_omega0 = 2.0;
    std::filesystem::path csv;  // Kind::Csv
};

/// One experiment, fully resolved (all defaults applied). The config hash is
/// FNV-1a over the canonical text of every effective value except the output
/// location, so artifacts can be traced back to the experiment that made them.
struct ExperimentConfig {
    std::string name;  // artifact prefix; defaults to the config file stem
    DatasetSource dataset;
    ModelSpec model;  // model.input_dim == 0 means "take arity from the data"
    bool has_model = false;
    TrainConfig train;
    double split_ratio = 0.7;
    std::uint64_t split_seed = 0;
    bool split_seed_explicit = false;
    double error_floor = 1e-8;
    std::filesystem::path out_dir = "out";

    static ExperimentConfig load(const std::filesystem::path& path);
    static ExperimentConfig from_text(const std::string& text, const std::string& name);
    static ExperimentConfig from_config(const ConfigFile& file, const std::string& name);

    /// --seed: replaces the dataset seed and training seed (and the split
    /// seed unless the config pinned one explicitly).
    void apply_seed_override(std::uint64_t seed);

    std::string canonical_text() const;
    std::string hash() const;  // 16 hex digits
};

/// Builds the raw rows for a config: runs the configured generator or ingests
/// the configured CSV.
RawData build_raw_data(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Checkpoints: a saved model plus everything needed to evaluate it on fresh
// copies of the dataset (standardization statistics, split recipe, run info).

struct Checkpoint {
    SurrogateModel model;
    Vec input_mean, input_std;
    double target_mean = 0.0;
    double target_std = 1.0;
    double split_ratio = 0.7;
    std::uint64_t split_seed = 0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double error_floor = 1e-8;
    std::string config_hash;

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);
};

// ---------------------------------------------------------------------------
// Subcommand bodies shared by the CLI and the integration tests. Each writes
// its artifacts and returns a process exit code:
//   0 success, 2 config error, 4 numerical failure (training diverged),
//   5 partial sweep. Errors outside their control propagate as exceptions
//   (the CLI maps ConfigError->2, DataError->3, NumericalError->4).

int cmd_generate(const ExperimentConfig& config, std::ostream& log);
int cmd_train(const ExperimentConfig& config, std::ostream& log);
int cmd_eval(const std::filesystem::path& checkpoint_path, const std::filesystem::path& csv_path,
             const std::filesystem::path& out_path, std::ostream& log);
int cmd_sweep(std::span<const std::filesystem::path> config_paths, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed_override, std::ostream& log);

// Paths used by cmd_train/cmd_sweep artifacts, exposed so tests and the CLI
// agree on where things land.
std::filesystem::path dataset_csv_path(const ExperimentConfig& config);
std::filesystem::path checkpoint_path(const ExperimentConfig& config);
std::filesystem::path report_path(const ExperimentConfig& config);
std::filesystem::path curves_path(const ExperimentConfig& config);
std::filesystem::path eval_path(const ExperimentConfig& config);

}  // namespace lrtf
