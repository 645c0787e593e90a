#include "lrtf/optim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "lrtf/errors.hpp"
#include "lrtf/rng.hpp"

namespace lrtf {

namespace {

constexpr std::size_t kBlock = 256;  // samples per reduction block

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be positive");
    if (weight_decay < 0.0) throw ConfigError("TrainConfig: weight_decay must be nonnegative");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw ConfigError("TrainConfig: betas must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("TrainConfig: epsilon must be positive");
}

AdamW::AdamW(std::size_t n, const TrainConfig& config) : config_(config), m_(n, 0.0), v_(n, 0.0) {
    config.validate();
}

void AdamW::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw DimensionError("AdamW::step: size mismatch");
    ++step_count_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    const double lr = config_.learning_rate, wd = config_.weight_decay, eps = config_.epsilon;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        if (!std::isfinite(g))
            throw NumericalError("non-finite gradient for parameter " + std::to_string(i) + " at step " +
                                 std::to_string(step_count_));
        m_[i] = b1 * m_[i] + (1.0 - b1) * g;
        v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + wd * params[i]);
    }
}

std::pair<double, Vec> mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw DimensionError("mse_loss: length mismatch");
    if (predictions.empty()) throw DataError("mse_loss: empty input");
    const double inv_m = 1.0 / static_cast<double>(predictions.size());
    double loss = 0.0;
    Vec grad(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - targets[i];
        loss += r * r;
        grad[i] = 2.0 * r * inv_m;
    }
    return {loss * inv_m, grad};
}

std::size_t worker_thread_count() {
    const char* env = std::getenv("LRTF_THREADS");
    if (!env) return 1;
    long n = std::strtol(env, nullptr, 10);
    if (n < 1) return 1;
    return std::min<std::size_t>(static_cast<std::size_t>(n), 64);
}

namespace {

// Runs fn(block) over [0, n_blocks); block results must be stored per-block so
// that merging in block order keeps the reduction bit-stable for any worker
// count.
template <class Fn>
void for_blocks(std::size_t n_blocks, Fn&& fn) {
    const std::size_t workers = std::min(worker_thread_count(), n_blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            try {
                for (std::size_t b; (b = next.fetch_add(1)) < n_blocks;) fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct StdData {
    Vec x;  // rows x n, standardized
    Vec y;  // rows, standardized
    std::size_t n = 0;
    std::size_t rows() const { return y.size(); }
};

StdData standardize_rows(const Dataset& data, std::span<const std::size_t> rows) {
    StdData out;
    out.n = data.input_dim();
    out.x.reserve(rows.size() * out.n);
    out.y.reserve(rows.size());
    for (std::size_t idx : rows) {
        Vec r = data.standardized_row(idx);
        out.x.insert(out.x.end(), r.begin(), r.end());
        out.y.push_back(data.standardized_target(idx));
    }
    return out;
}

// Sum of squared residuals over the index range, optionally accumulating
// sum_i residual_i * dyhat_i/dtheta into grad.
double sq_residual_pass(const SurrogateModel& model, const StdData& d, std::size_t begin, std::size_t end,
                        Vec* grad) {
    ModelTape tape;
    double loss_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const std::span<const double> x(d.x.data() + i * d.n, d.n);
        const double pred = model.forward(x, tape);
        const double res = pred - d.y[i];
        loss_sum += res * res;
        if (grad) model.backward(tape, res, *grad);
    }
    return loss_sum;
}

struct PassResult {
    double loss_sum = 0.0;
    Vec grad;
};

// Mean squared error over d; when grad != nullptr also fills it with the
// gradient of that mean. Block-parallel with in-order merge.
double evaluate_pass(const SurrogateModel& model, const StdData& d, Vec* grad) {
    const std::size_t m = d.rows();
    const std::size_t n_blocks = (m + kBlock - 1) / kBlock;
    std::vector<PassResult> results(n_blocks);
    const std::size_t p = grad ? grad->size() : 0;
    for_blocks(n_blocks, [&](std::size_t b) {
        PassResult& r = results[b];
        if (grad) r.grad.assign(p, 0.0);
        const std::size_t begin = b * kBlock;
        const std::size_t end = std::min(m, begin + kBlock);
        r.loss_sum = sq_residual_pass(model, d, begin, end, grad ? &r.grad : nullptr);
    });
    double loss_sum = 0.0;
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    for (const PassResult& r : results) {
        loss_sum += r.loss_sum;
        if (grad)
            for (std::size_t i = 0; i < p; ++i) (*grad)[i] += r.grad[i];
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    if (grad)
        for (double& g : *grad) g *= 2.0 * inv_m;
    return loss_sum * inv_m;
}

StdData gather_rows(const StdData& d, std::span<const std::size_t> order, std::size_t begin, std::size_t end) {
    StdData out;
    out.n = d.n;
    out.x.reserve((end - begin) * d.n);
    out.y.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        out.x.insert(out.x.end(), d.x.begin() + i * d.n, d.x.begin() + (i + 1) * d.n);
        out.y.push_back(d.y[i]);
    }
    return out;
}

}  // namespace

double dataset_mse(const SurrogateModel& model, const Dataset& data, std::span<const std::size_t> rows) {
    StdData d = standardize_rows(data, rows);
    return evaluate_pass(model, d, nullptr);
}

TrainReport train(SurrogateModel& model, const Dataset& data, const TrainConfig& config) {
    config.validate();
    if (model.input_dim() != data.input_dim())
        throw DimensionError("train: model input_dim " + std::to_string(model.input_dim()) +
                             " does not match dataset arity " + std::to_string(data.input_dim()));

    const auto t_start = std::chrono::steady_clock::now();
    TrainReport report;
    report.seed = config.seed;
    report.param_count = model.param_count();
    report.clamped_input_columns = data.clamped_input_columns;
    report.target_std_clamped = data.target_std_clamped;

    const StdData train_data = standardize_rows(data, data.train_idx);
    const StdData test_data = standardize_rows(data, data.test_idx);
    const std::size_t m_train = train_data.rows();
    const std::size_t batch = (config.batch_size == 0 || config.batch_size >= m_train) ? m_train : config.batch_size;

    Vec params = model.params();
    Vec grad(params.size());
    AdamW opt(params.size(), config);

    Vec best_params = params;
    double best_test = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;

    std::vector<std::size_t> order(m_train);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        double train_loss;
        try {
            if (batch == m_train) {
                train_loss = evaluate_pass(model, train_data, &grad);
                if (!std::isfinite(train_loss)) throw NumericalError("non-finite training loss");
                opt.step(params, grad);
                model.set_params(params);
            } else {
                Rng rng = Rng::stream(config.seed, 0xE000 + epoch);
                rng.shuffle(order);
                double loss_sum = 0.0;
                for (std::size_t begin = 0; begin < m_train; begin += batch) {
                    const std::size_t end = std::min(m_train, begin + batch);
                    StdData chunk = gather_rows(train_data, order, begin, end);
                    const double batch_loss = evaluate_pass(model, chunk, &grad);
                    if (!std::isfinite(batch_loss)) throw NumericalError("non-finite training loss");
                    loss_sum += batch_loss * static_cast<double>(end - begin);
                    opt.step(params, grad);
                    model.set_params(params);
                }
                train_loss = loss_sum / static_cast<double>(m_train);
            }
        } catch (const NumericalError& e) {
            report.diverged = true;
            report.divergence_note = std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")";
            break;
        }

        const double test_loss = test_data.rows() ? evaluate_pass(model, test_data, nullptr) : train_loss;
        if (!std::isfinite(test_loss)) {
            report.diverged = true;
            report.divergence_note = "non-finite test loss (epoch " + std::to_string(epoch) + ")";
            break;
        }

        report.train_loss.push_back(train_loss);
        report.test_loss.push_back(test_loss);
        report.epochs_run = epoch;

        if (test_loss < best_test) {
            best_test = test_loss;
            best_epoch = epoch;
            best_params = params;
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }

    model.set_params(best_params);
    report.best_epoch = best_epoch;
    report.best_test_loss = best_epoch == 0 ? std::numeric_limits<double>::quiet_NaN() : best_test;
    report.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

void write_report(const TrainReport& report, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << "lrtf-train-report v1\n";
    os << "config_hash: " << report.config_hash << '\n';
    os << "seed: " << report.seed << '\n';
    os << "param_count: " << report.param_count << '\n';
    os << "epochs_run: " << report.epochs_run << '\n';
    os << "best_epoch: " << report.best_epoch << '\n';
    os << "best_test_loss: " << fmt17(report.best_test_loss) << '\n';
    os << "final_train_loss: " << (report.train_loss.empty() ? "nan" : fmt17(report.train_loss.back())) << '\n';
    os << "final_test_loss: " << (report.test_loss.empty() ? "nan" : fmt17(report.test_loss.back())) << '\n';
    os << "diverged: " << (report.diverged ? 1 : 0) << '\n';
    os << "divergence_note: " << report.divergence_note << '\n';
    os << "clamped_input_columns:";
    for (std::size_t c : report.clamped_input_columns) os << ' ' << c;
    os << '\n';
    os << "target_std_clamped: " << (report.target_std_clamped ? 1 : 0) << '\n';
    os << "wall_time_sec: " << fmt17(report.wall_time_sec) << '\n';
    os << "config_echo_begin\n" << report.config_echo;
    if (!report.config_echo.empty() && report.config_echo.back() != '\n') os << '\n';
    os << "config_echo_end\n";
    os << "curve: epoch train_loss test_loss\n";
    for (std::size_t e = 0; e < report.train_loss.size(); ++e)
        os << (e + 1) << ' ' << fmt17(report.train_loss[e]) << ' ' << fmt17(report.test_loss[e]) << '\n';
    os << "end\n";
}

void write_curves(const TrainReport& report, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    if (!report.config_hash.empty()) os << "# config_hash " << report.config_hash << '\n';
    os << "epoch,train_loss,test_loss\n";
    for (std::size_t e = 0; e < report.train_loss.size(); ++e)
        os << (e + 1) << ',' << fmt17(report.train_loss[e]) << ',' << fmt17(report.test_loss[e]) << '\n';
}

}  // namespace lrtf
