#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lrtf/dataset.hpp"
#include "lrtf/surrogate.hpp"

namespace lrtf {

struct TrainConfig {
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t max_epochs = 1000;
    std::size_t batch_size = 0;  // 0 = full batch
    std::size_t patience = 500;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Decoupled weight decay: theta <- theta - lr*(m_hat/(sqrt(v_hat)+eps) + wd*theta).
class AdamW {
public:
    AdamW(std::size_t n, const TrainConfig& config);

    /// One update; throws NumericalError naming the parameter index if a
    /// gradient is non-finite.
    void step(std::span<double> params, std::span<const double> grads);

    std::size_t steps() const { return step_count_; }

private:
    TrainConfig config_;
    Vec m_, v_;
    std::size_t step_count_ = 0;
};

/// Mean squared residual and its gradient w.r.t. the predictions.
std::pair<double, Vec> mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct TrainReport {
    Vec train_loss;  // standardized-space MSE per epoch (pre-step)
    Vec test_loss;   // standardized-space MSE per epoch (post-step)
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;  // 1-based; 0 = initial parameters retained
    double best_test_loss = 0.0;
    std::size_t param_count = 0;
    std::uint64_t seed = 0;
    bool diverged = false;
    std::string divergence_note;
    double wall_time_sec = 0.0;
    std::vector<std::size_t> clamped_input_columns;
    bool target_std_clamped = false;
    std::string config_echo;
    std::string config_hash;
};

/// MSE/AdamW loop on the standardized data with early stopping; the
/// best-test-loss parameters are restored into the model before returning.
/// Deterministic in config.seed for a fixed LRTF_THREADS setting.
TrainReport train(SurrogateModel& model, const Dataset& data, const TrainConfig& config);

void write_report(const TrainReport& report, const std::filesystem::path& path);
void write_curves(const TrainReport& report, const std::filesystem::path& path);

/// Worker-thread cap from the LRTF_THREADS environment variable (default 1).
std::size_t worker_thread_count();

/// Mean standardized-space MSE of the model over the given dataset rows.
double dataset_mse(const SurrogateModel& model, const Dataset& data, std::span<const std::size_t> rows);

}  // namespace lrtf
