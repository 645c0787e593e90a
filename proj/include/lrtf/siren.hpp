#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrtf/tensor.hpp"

namespace lrtf {

struct SirenConfig {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 1;
    double omega0 = 30.0;
    bool final_linear = true;

    /// [input_dim, hidden..., output_dim]
    std::vector<std::size_t> layer_dims() const;
    void validate() const;

    bool operator==(const SirenConfig&) const = default;
};

/// Per-layer pre-activations cached by forward for the backward pass.
struct SirenTape {
    Vec input;
    std::vector<Vec> layer_inputs;  // h_{l-1} fed into layer l
    std::vector<Vec> pre_acts;      // z_l = W_l h_{l-1} + b_l
};

/// Sine-activated MLP: hidden layers compute sin(omega0 * (W h + b)); the
/// last layer is affine when final_linear is set.
class SirenNet {
public:
    SirenNet() = default;

    /// First layer U[-1/fan_in, 1/fan_in], later sine layers
    /// U[-sqrt(6/fan_in)/omega0, ...], final linear layer U[-sqrt(6/fan_in), ...],
    /// biases zero. Deterministic in the seed.
    static SirenNet init(const SirenConfig& config, std::uint64_t seed);

    /// All weights and biases zero.
    static SirenNet zeros(const SirenConfig& config);

    const SirenConfig& config() const { return config_; }
    std::size_t num_layers() const { return weights_.size(); }
    bool layer_is_sine(std::size_t l) const;

    Matrix& weight(std::size_t l) { return weights_[l]; }
    const Matrix& weight(std::size_t l) const { return weights_[l]; }
    Vec& bias(std::size_t l) { return biases_[l]; }
    const Vec& bias(std::size_t l) const { return biases_[l]; }

    Vec forward(std::span<const double> x) const;
    Vec forward(std::span<const double> x, SirenTape& tape) const;

    /// Exact reverse-mode pass. Parameter gradients are accumulated (+=) into
    /// grad_params, which must have param_count() entries and follow the flat
    /// layout (per layer: W row-major, then b). Returns the input gradient.
    Vec backward(const SirenTape& tape, std::span<const double> grad_out, std::span<double> grad_params) const;

    std::size_t param_count() const;
    void get_params(std::span<double> out) const;
    void set_params(std::span<const double> in);

private:
    SirenConfig config_;
    std::vector<Matrix> weights_;
    std::vector<Vec> biases_;
};

}  // namespace lrtf
