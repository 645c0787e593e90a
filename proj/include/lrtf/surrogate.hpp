#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lrtf/siren.hpp"
#include "lrtf/tensor.hpp"

namespace lrtf {

enum class ModelKind { Mlp, Lrtfr, Tt, Tr, Plrnet };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Architecture description; everything needed to rebuild a model shell.
struct ModelSpec {
    ModelKind kind = ModelKind::Mlp;
    std::size_t input_dim = 0;
    std::vector<std::size_t> ranks;      // per-mode embedding widths (lrtfr, plrnet)
    std::vector<std::size_t> bond_dims;  // tt/tr: rho_0..rho_N
    std::vector<std::size_t> embed_hidden;
    double embed_omega0 = 30.0;
    std::vector<std::size_t> predictor_hidden;  // plrnet predictor / mlp hidden stack
    double predictor_omega0 = 30.0;

    void validate() const;

    /// Output width of each coordinate embedding: ranks[i], or
    /// bond_dims[i]*bond_dims[i+1] for the chain/ring couplings.
    std::vector<std::size_t> embed_output_dims() const;

    std::size_t pair_count() const { return input_dim * (input_dim - 1) / 2; }

    bool operator==(const ModelSpec&) const = default;
};

struct ModelTape {
    Vec input;
    std::vector<SirenTape> embed_tapes;
    std::vector<Vec> embeds;  // R_i
    Vec pair_feats;           // z, plrnet only
    SirenTape predictor_tape;
};

/// One of five scalar-output surrogate architectures behind a common
/// forward / backward / flat-parameter interface:
///   mlp     y = net(x)
///   lrtfr   y = <core, R_1 x ... x R_N>
///   tt      y = C_1(x_1) C_2(x_2) ... C_N(x_N), boundary ranks 1
///   tr      y = trace(C_1(x_1) ... C_N(x_N))
///   plrnet  y = g([R_i^T C_ij R_j]_{i<j})
/// where R_i = f_i(x_i) and the chain/ring cores C_i(x_i) are R_i reshaped
/// row-major to rho_{i-1} x rho_i.
class SurrogateModel {
public:
    SurrogateModel() = default;

    static SurrogateModel init(const ModelSpec& spec, std::uint64_t seed);

    const ModelSpec& spec() const { return spec_; }
    ModelKind kind() const { return spec_.kind; }
    std::size_t input_dim() const { return spec_.input_dim; }

    double forward(std::span<const double> x) const;
    double forward(std::span<const double> x, ModelTape& tape) const;

    /// Accumulates d(grad_out * y)/d(theta) into grad (flat layout, see
    /// get_params). grad must be zeroed by the caller when starting fresh.
    void backward(const ModelTape& tape, double grad_out, std::span<double> grad) const;

    std::size_t param_count() const;
    void get_params(std::span<double> out) const;
    void set_params(std::span<const double> in);
    Vec params() const;

    // component access (tests, persistence)
    const SirenNet& embed(std::size_t i) const { return embeds_[i]; }
    const SirenNet& predictor() const { return predictor_; }
    const DenseTensor& core() const { return core_; }
    const Matrix& pair_core(std::size_t i, std::size_t j) const;
    static std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);

    void save(std::ostream& os) const;
    void save(const std::filesystem::path& path) const;
    static SurrogateModel load(std::istream& is);
    static SurrogateModel load(const std::filesystem::path& path);

private:
    ModelSpec spec_;
    std::vector<SirenNet> embeds_;
    DenseTensor core_;               // lrtfr
    std::vector<Matrix> pair_cores_; // plrnet, lexicographic (i,j)
    SirenNet predictor_;             // plrnet g / mlp net

    std::vector<Matrix> chain_cores(const ModelTape& tape) const;
    std::size_t coupling_param_count() const;
    std::size_t embed_params_total() const;
};

}  // namespace lrtf
