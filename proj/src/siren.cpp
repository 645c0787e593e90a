#include "lrtf/siren.hpp"

#include <cmath>
#include <string>

#include "lrtf/errors.hpp"
#include "lrtf/rng.hpp"

namespace lrtf {

std::vector<std::size_t> SirenConfig::layer_dims() const {
    std::vector<std::size_t> dims;
    dims.reserve(hidden_dims.size() + 2);
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(output_dim);
    return dims;
}

void SirenConfig::validate() const {
    if (input_dim == 0) throw DimensionError("SirenConfig: input_dim must be positive");
    if (output_dim == 0) throw DimensionError("SirenConfig: output_dim must be positive");
    for (std::size_t d : hidden_dims)
        if (d == 0) throw DimensionError("SirenConfig: hidden dims must be positive");
    if (!(omega0 > 0.0)) throw DimensionError("SirenConfig: omega0 must be positive");
}

bool SirenNet::layer_is_sine(std::size_t l) const {
    if (l + 1 < weights_.size()) return true;
    return !config_.final_linear;
}

SirenNet SirenNet::init(const SirenConfig& config, std::uint64_t seed) {
    config.validate();
    SirenNet net;
    net.config_ = config;
    const auto dims = config.layer_dims();
    const std::size_t num_layers = dims.size() - 1;
    Rng rng = Rng::stream(seed, 0);
    for (std::size_t l = 0; l < num_layers; ++l) {
        const std::size_t fan_in = dims[l];
        const bool sine = (l + 1 < num_layers) || !config.final_linear;
        double bound;
        if (sine && l == 0)
            bound = 1.0 / static_cast<double>(fan_in);
        else if (sine)
            bound = std::sqrt(6.0 / static_cast<double>(fan_in)) / config.omega0;
        else
            bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        net.weights_.push_back(Matrix::random(dims[l + 1], dims[l], rng, -bound, bound));
        net.biases_.emplace_back(dims[l + 1], 0.0);
    }
    return net;
}

SirenNet SirenNet::zeros(const SirenConfig& config) {
    config.validate();
    SirenNet net;
    net.config_ = config;
    const auto dims = config.layer_dims();
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        net.weights_.emplace_back(dims[l + 1], dims[l]);
        net.biases_.emplace_back(dims[l + 1], 0.0);
    }
    return net;
}

Vec SirenNet::forward(std::span<const double> x) const {
    SirenTape tape;
    return forward(x, tape);
}

Vec SirenNet::forward(std::span<const double> x, SirenTape& tape) const {
    if (x.size() != config_.input_dim)
        throw DimensionError("SirenNet::forward: input length " + std::to_string(x.size()) +
                             " does not match input_dim " + std::to_string(config_.input_dim));
    tape.input.assign(x.begin(), x.end());
    tape.layer_inputs.clear();
    tape.pre_acts.clear();
    Vec h = tape.input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        tape.layer_inputs.push_back(h);
        Vec z = matvec(weights_[l], h);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += biases_[l][i];
        tape.pre_acts.push_back(z);
        if (layer_is_sine(l)) {
            h.resize(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) h[i] = std::sin(config_.omega0 * z[i]);
        } else {
            h = std::move(z);
        }
    }
    return h;
}

Vec SirenNet::backward(const SirenTape& tape, std::span<const double> grad_out, std::span<double> grad_params) const {
    if (tape.pre_acts.size() != weights_.size() || tape.layer_inputs.size() != weights_.size())
        throw DimensionError("SirenNet::backward: tape does not match this network");
    if (grad_out.size() != config_.output_dim)
        throw DimensionError("SirenNet::backward: grad_out length mismatch");
    if (grad_params.size() != param_count())
        throw DimensionError("SirenNet::backward: grad_params length mismatch");

    Vec g(grad_out.begin(), grad_out.end());
    std::size_t offset = param_count();
    for (std::size_t l = weights_.size(); l-- > 0;) {
        const Matrix& w = weights_[l];
        const Vec& z = tape.pre_acts[l];
        const Vec& h_in = tape.layer_inputs[l];
        if (z.size() != g.size() || h_in.size() != w.cols())
            throw DimensionError("SirenNet::backward: stale tape at layer " + std::to_string(l));

        Vec dz(z.size());
        if (layer_is_sine(l)) {
            for (std::size_t i = 0; i < z.size(); ++i)
                dz[i] = g[i] * config_.omega0 * std::cos(config_.omega0 * z[i]);
        } else {
            dz = g;
        }

        offset -= w.rows() * w.cols() + w.rows();
        double* gw = grad_params.data() + offset;
        double* gb = gw + w.rows() * w.cols();
        for (std::size_t i = 0; i < w.rows(); ++i) {
            const double d = dz[i];
            for (std::size_t j = 0; j < w.cols(); ++j) gw[i * w.cols() + j] += d * h_in[j];
            gb[i] += d;
        }
        g = matvec_t(w, dz);
    }
    return g;
}

std::size_t SirenNet::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].rows() * (weights_[l].cols() + 1);
    return n;
}

void SirenNet::get_params(std::span<double> out) const {
    if (out.size() != param_count()) throw DimensionError("SirenNet::get_params: length mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (double x : weights_[l].values()) out[k++] = x;
        for (double x : biases_[l]) out[k++] = x;
    }
}

void SirenNet::set_params(std::span<const double> in) {
    if (in.size() != param_count()) throw DimensionError("SirenNet::set_params: length mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (double& x : weights_[l].values()) x = in[k++];
        for (double& x : biases_[l]) x = in[k++];
    }
}

}  // namespace lrtf
