#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lrtf/tensor.hpp"

namespace lrtf {

/// Unprocessed samples in original units, row-major inputs.
struct RawData {
    std::vector<std::string> input_names;
    std::string target_name = "y";
    std::size_t num_samples = 0;
    std::size_t input_dim = 0;
    Vec inputs;   // num_samples x input_dim
    Vec targets;  // num_samples

    std::span<const double> row(std::size_t i) const { return {inputs.data() + i * input_dim, input_dim}; }
};

/// Samples plus a 7:3 train/test partition and standardization statistics
/// computed from the training rows only.
struct Dataset {
    RawData raw;
    Vec input_mean, input_std;
    double target_mean = 0.0;
    double target_std = 1.0;
    std::vector<std::size_t> train_idx, test_idx;
    std::vector<std::size_t> clamped_input_columns;  // zero-variance, std clamped to 1
    bool target_std_clamped = false;

    std::size_t num_samples() const { return raw.num_samples; }
    std::size_t input_dim() const { return raw.input_dim; }

    /// Row i standardized with the training statistics.
    Vec standardized_row(std::size_t i) const;
    double standardized_target(std::size_t i) const { return (raw.targets[i] - target_mean) / target_std; }
    double destandardize_target(double y_std) const { return y_std * target_std + target_mean; }
};

/// Deterministic shuffle + split (|train| = round(ratio*m)), statistics from
/// the training rows; zero-variance columns get std clamped to 1 and flagged.
Dataset split_and_standardize(RawData raw, double train_ratio, std::uint64_t seed);

/// CSV with header "x_<name>,...,y", 17-significant-digit floats.
void csv_export(const RawData& data, const std::filesystem::path& path);
RawData csv_ingest(const std::filesystem::path& path);

}  // namespace lrtf
