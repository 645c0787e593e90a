#include "lrtf/surrogate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrtf/errors.hpp"
#include "lrtf/rng.hpp"

namespace lrtf {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Mlp: return "mlp";
        case ModelKind::Lrtfr: return "lrtfr";
        case ModelKind::Tt: return "tt";
        case ModelKind::Tr: return "tr";
        case ModelKind::Plrnet: return "plrnet";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "mlp") return ModelKind::Mlp;
    if (name == "lrtfr" || name == "tucker") return ModelKind::Lrtfr;
    if (name == "tt") return ModelKind::Tt;
    if (name == "tr") return ModelKind::Tr;
    if (name == "plrnet" || name == "pairwise") return ModelKind::Plrnet;
    throw ConfigError("unknown model kind '" + name + "'");
}

void ModelSpec::validate() const {
    if (input_dim == 0) throw DimensionError("ModelSpec: input_dim must be positive");
    if (!(embed_omega0 > 0.0) || !(predictor_omega0 > 0.0))
        throw DimensionError("ModelSpec: omega0 values must be positive");
    switch (kind) {
        case ModelKind::Mlp:
            break;
        case ModelKind::Lrtfr:
        case ModelKind::Plrnet:
            if (ranks.size() != input_dim)
                throw DimensionError("ModelSpec: need one rank per input dimension (got " +
                                     std::to_string(ranks.size()) + " for input_dim " +
                                     std::to_string(input_dim) + ")");
            for (std::size_t r : ranks)
                if (r == 0) throw DimensionError("ModelSpec: ranks must be positive");
            if (kind == ModelKind::Plrnet && input_dim < 2)
                throw DimensionError("ModelSpec: pairwise coupling needs input_dim >= 2");
            break;
        case ModelKind::Tt:
        case ModelKind::Tr:
            if (bond_dims.size() != input_dim + 1)
                throw DimensionError("ModelSpec: need input_dim+1 bond dims (got " +
                                     std::to_string(bond_dims.size()) + ")");
            for (std::size_t b : bond_dims)
                if (b == 0) throw DimensionError("ModelSpec: bond dims must be positive");
            if (kind == ModelKind::Tt && (bond_dims.front() != 1 || bond_dims.back() != 1))
                throw DimensionError("ModelSpec: chain boundary bond dims must be 1");
            if (kind == ModelKind::Tr && bond_dims.front() != bond_dims.back())
                throw DimensionError("ModelSpec: ring closure bond dims must match");
            break;
    }
}

std::vector<std::size_t> ModelSpec::embed_output_dims() const {
    std::vector<std::size_t> dims;
    if (kind == ModelKind::Lrtfr || kind == ModelKind::Plrnet) return ranks;
    if (kind == ModelKind::Tt || kind == ModelKind::Tr) {
        dims.reserve(input_dim);
        for (std::size_t i = 0; i < input_dim; ++i) dims.push_back(bond_dims[i] * bond_dims[i + 1]);
    }
    return dims;
}

std::size_t SurrogateModel::pair_index(std::size_t i, std::size_t j, std::size_t n) {
    // lexicographic position of (i,j), i<j, in (0,1),(0,2),...,(n-2,n-1)
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

const Matrix& SurrogateModel::pair_core(std::size_t i, std::size_t j) const {
    return pair_cores_[pair_index(i, j, spec_.input_dim)];
}

SurrogateModel SurrogateModel::init(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    SurrogateModel m;
    m.spec_ = spec;

    if (spec.kind == ModelKind::Mlp) {
        SirenConfig cfg{spec.input_dim, spec.predictor_hidden, 1, spec.predictor_omega0, true};
        m.predictor_ = SirenNet::init(cfg, Rng::stream(seed, 0x200).next_u64());
        return m;
    }

    const auto out_dims = spec.embed_output_dims();
    for (std::size_t i = 0; i < spec.input_dim; ++i) {
        SirenConfig cfg{1, spec.embed_hidden, out_dims[i], spec.embed_omega0, true};
        m.embeds_.push_back(SirenNet::init(cfg, Rng::stream(seed, 0x100 + i).next_u64()));
    }

    if (spec.kind == ModelKind::Lrtfr) {
        Rng rng = Rng::stream(seed, 0x300);
        DenseTensor core(spec.ranks);
        const double bound = std::sqrt(3.0 / static_cast<double>(core.size()));
        for (double& c : core.values()) c = rng.uniform(-bound, bound);
        m.core_ = std::move(core);
    } else if (spec.kind == ModelKind::Plrnet) {
        for (std::size_t i = 0; i < spec.input_dim; ++i)
            for (std::size_t j = i + 1; j < spec.input_dim; ++j) {
                Rng rng = Rng::stream(seed, 0x300 + pair_index(i, j, spec.input_dim));
                const double bound = std::sqrt(3.0 / static_cast<double>(spec.ranks[i] * spec.ranks[j]));
                m.pair_cores_.push_back(Matrix::random(spec.ranks[i], spec.ranks[j], rng, -bound, bound));
            }
        SirenConfig cfg{spec.pair_count(), spec.predictor_hidden, 1, spec.predictor_omega0, true};
        m.predictor_ = SirenNet::init(cfg, Rng::stream(seed, 0x200).next_u64());
    }
    return m;
}

double SurrogateModel::forward(std::span<const double> x) const {
    ModelTape tape;
    return forward(x, tape);
}

std::vector<Matrix> SurrogateModel::chain_cores(const ModelTape& tape) const {
    std::vector<Matrix> mats;
    mats.reserve(spec_.input_dim);
    for (std::size_t i = 0; i < spec_.input_dim; ++i) {
        const Vec& r = tape.embeds[i];
        mats.emplace_back(spec_.bond_dims[i], spec_.bond_dims[i + 1], r);
    }
    return mats;
}

double SurrogateModel::forward(std::span<const double> x, ModelTape& tape) const {
    if (x.size() != spec_.input_dim)
        throw DimensionError("SurrogateModel::forward: input length " + std::to_string(x.size()) +
                             " does not match input_dim " + std::to_string(spec_.input_dim));
    tape.input.assign(x.begin(), x.end());

    if (spec_.kind == ModelKind::Mlp) {
        Vec y = predictor_.forward(x, tape.predictor_tape);
        return y[0];
    }

    tape.embed_tapes.resize(embeds_.size());
    tape.embeds.resize(embeds_.size());
    for (std::size_t i = 0; i < embeds_.size(); ++i)
        tape.embeds[i] = embeds_[i].forward(std::span<const double>(&x[i], 1), tape.embed_tapes[i]);

    switch (spec_.kind) {
        case ModelKind::Lrtfr:
            return multi_mode_contract(core_, tape.embeds);
        case ModelKind::Tt:
            return matrix_chain_contract(chain_cores(tape));
        case ModelKind::Tr:
            return ring_contract(chain_cores(tape));
        case ModelKind::Plrnet: {
            const std::size_t n = spec_.input_dim;
            tape.pair_feats.assign(spec_.pair_count(), 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const Matrix& c = pair_cores_[pair_index(i, j, n)];
                    tape.pair_feats[pair_index(i, j, n)] = dot(tape.embeds[i], matvec(c, tape.embeds[j]));
                }
            Vec y = predictor_.forward(tape.pair_feats, tape.predictor_tape);
            return y[0];
        }
        default:
            throw DimensionError("SurrogateModel::forward: bad kind");
    }
}

void SurrogateModel::backward(const ModelTape& tape, double grad_out, std::span<double> grad) const {
    if (grad.size() != param_count()) throw DimensionError("SurrogateModel::backward: grad length mismatch");
    const Vec g_out{grad_out};
    const std::size_t n = spec_.input_dim;

    if (spec_.kind == ModelKind::Mlp) {
        predictor_.backward(tape.predictor_tape, g_out, grad);
        return;
    }
    if (tape.embeds.size() != n) throw DimensionError("SurrogateModel::backward: stale tape");

    std::vector<Vec> embed_grads(n);  // dF/dR_i scaled by grad_out
    const std::size_t embeds_total = embed_params_total();

    switch (spec_.kind) {
        case ModelKind::Lrtfr: {
            // prefix[i] = core contracted with R_0..R_{i-1}; modes i..N-1 remain
            std::vector<DenseTensor> prefix;
            prefix.reserve(n);
            prefix.push_back(core_);
            for (std::size_t i = 0; i + 1 < n; ++i)
                prefix.push_back(mode_n_vec_product(prefix.back(), 0, tape.embeds[i]));
            for (std::size_t i = 0; i < n; ++i) {
                DenseTensor t = prefix[i];
                for (std::size_t j = n; j-- > i + 1;) {
                    if (t.order() >= 2) {
                        t = mode_n_vec_product(t, t.order() - 1, tape.embeds[j]);
                    }
                }
                embed_grads[i].assign(t.values().begin(), t.values().end());
                for (double& v : embed_grads[i]) v *= grad_out;
            }
            // core gradient: grad_out * outer(R_0, ..., R_{N-1}), row-major
            Vec outer{grad_out};
            for (std::size_t i = 0; i < n; ++i) {
                const Vec& r = tape.embeds[i];
                Vec next(outer.size() * r.size());
                for (std::size_t a = 0; a < outer.size(); ++a)
                    for (std::size_t b = 0; b < r.size(); ++b) next[a * r.size() + b] = outer[a] * r[b];
                outer = std::move(next);
            }
            double* gc = grad.data() + embeds_total;
            for (std::size_t k = 0; k < outer.size(); ++k) gc[k] += outer[k];
            break;
        }
        case ModelKind::Tt: {
            const auto mats = chain_cores(tape);
            std::vector<Vec> left(n + 1), right(n + 1);
            left[0] = Vec{1.0};
            for (std::size_t i = 0; i < n; ++i) left[i + 1] = matvec_t(mats[i], left[i]);
            right[n] = Vec{1.0};
            for (std::size_t i = n; i-- > 0;) right[i] = matvec(mats[i], right[i + 1]);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t p = spec_.bond_dims[i], q = spec_.bond_dims[i + 1];
                Vec& eg = embed_grads[i];
                eg.assign(p * q, 0.0);
                for (std::size_t a = 0; a < p; ++a)
                    for (std::size_t b = 0; b < q; ++b) eg[a * q + b] = grad_out * left[i][a] * right[i + 1][b];
            }
            break;
        }
        case ModelKind::Tr: {
            const auto mats = chain_cores(tape);
            for (std::size_t i = 0; i < n; ++i) {
                // rest of the ring after core i, wrapped around
                Matrix m = Matrix::identity(spec_.bond_dims[i + 1]);
                for (std::size_t k = 1; k < n; ++k) m = matmul(m, mats[(i + k) % n]);
                const std::size_t p = spec_.bond_dims[i], q = spec_.bond_dims[i + 1];
                Vec& eg = embed_grads[i];
                eg.assign(p * q, 0.0);
                for (std::size_t a = 0; a < p; ++a)
                    for (std::size_t b = 0; b < q; ++b) eg[a * q + b] = grad_out * m(b, a);
            }
            break;
        }
        case ModelKind::Plrnet: {
            const std::size_t pred_offset = embeds_total + coupling_param_count();
            Vec gz = predictor_.backward(tape.predictor_tape, g_out,
                                         grad.subspan(pred_offset, predictor_.param_count()));
            for (std::size_t i = 0; i < n; ++i) embed_grads[i].assign(tape.embeds[i].size(), 0.0);
            std::size_t core_offset = embeds_total;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const std::size_t p = pair_index(i, j, n);
                    const Matrix& c = pair_cores_[p];
                    const Vec& ri = tape.embeds[i];
                    const Vec& rj = tape.embeds[j];
                    const double gp = gz[p];
                    double* gcore = grad.data() + core_offset;
                    for (std::size_t a = 0; a < c.rows(); ++a)
                        for (std::size_t b = 0; b < c.cols(); ++b) gcore[a * c.cols() + b] += gp * ri[a] * rj[b];
                    core_offset += c.rows() * c.cols();
                    Vec cr = matvec(c, rj);
                    Vec ctr = matvec_t(c, ri);
                    for (std::size_t a = 0; a < ri.size(); ++a) embed_grads[i][a] += gp * cr[a];
                    for (std::size_t b = 0; b < rj.size(); ++b) embed_grads[j][b] += gp * ctr[b];
                }
            break;
        }
        default:
            throw DimensionError("SurrogateModel::backward: bad kind");
    }

    std::size_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
        embeds_[i].backward(tape.embed_tapes[i], embed_grads[i], grad.subspan(offset, embeds_[i].param_count()));
        offset += embeds_[i].param_count();
    }
}

std::size_t SurrogateModel::embed_params_total() const {
    std::size_t total = 0;
    for (const auto& e : embeds_) total += e.param_count();
    return total;
}

std::size_t SurrogateModel::coupling_param_count() const {
    switch (spec_.kind) {
        case ModelKind::Lrtfr: return core_.size();
        case ModelKind::Plrnet: {
            std::size_t total = 0;
            for (const auto& c : pair_cores_) total += c.rows() * c.cols();
            return total;
        }
        default: return 0;  // chain/ring cores are input-dependent reshapes
    }
}

std::size_t SurrogateModel::param_count() const {
    std::size_t total = embed_params_total() + coupling_param_count();
    if (spec_.kind == ModelKind::Mlp || spec_.kind == ModelKind::Plrnet) total += predictor_.param_count();
    return total;
}

void SurrogateModel::get_params(std::span<double> out) const {
    if (out.size() != param_count()) throw DimensionError("SurrogateModel::get_params: length mismatch");
    std::size_t k = 0;
    for (const auto& e : embeds_) {
        e.get_params(out.subspan(k, e.param_count()));
        k += e.param_count();
    }
    if (spec_.kind == ModelKind::Lrtfr)
        for (double v : core_.values()) out[k++] = v;
    if (spec_.kind == ModelKind::Plrnet)
        for (const auto& c : pair_cores_)
            for (double v : c.values()) out[k++] = v;
    if (spec_.kind == ModelKind::Mlp || spec_.kind == ModelKind::Plrnet)
        predictor_.get_params(out.subspan(k, predictor_.param_count()));
}

void SurrogateModel::set_params(std::span<const double> in) {
    if (in.size() != param_count()) throw DimensionError("SurrogateModel::set_params: length mismatch");
    std::size_t k = 0;
    for (auto& e : embeds_) {
        e.set_params(in.subspan(k, e.param_count()));
        k += e.param_count();
    }
    if (spec_.kind == ModelKind::Lrtfr)
        for (double& v : core_.values()) v = in[k++];
    if (spec_.kind == ModelKind::Plrnet)
        for (auto& c : pair_cores_)
            for (double& v : c.values()) v = in[k++];
    if (spec_.kind == ModelKind::Mlp || spec_.kind == ModelKind::Plrnet)
        predictor_.set_params(in.subspan(k, predictor_.param_count()));
}

Vec SurrogateModel::params() const {
    Vec p(param_count());
    get_params(p);
    return p;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_size_list(std::ostream& os, const std::string& key, const std::vector<std::size_t>& v) {
    os << key << ":";
    for (std::size_t x : v) os << ' ' << x;
    os << '\n';
}

}  // namespace

void SurrogateModel::save(std::ostream& os) const {
    os << "lrtf-model v1\n";
    os << "kind: " << to_string(spec_.kind) << '\n';
    os << "input_dim: " << spec_.input_dim << '\n';
    write_size_list(os, "ranks", spec_.ranks);
    write_size_list(os, "bond_dims", spec_.bond_dims);
    write_size_list(os, "embed_hidden", spec_.embed_hidden);
    os << "embed_omega0: " << fmt17(spec_.embed_omega0) << '\n';
    write_size_list(os, "predictor_hidden", spec_.predictor_hidden);
    os << "predictor_omega0: " << fmt17(spec_.predictor_omega0) << '\n';
    const Vec p = params();
    os << "params: " << p.size() << '\n';
    for (double v : p) os << fmt17(v) << '\n';
    os << "end_params\n";
}

void SurrogateModel::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write model file " + path.string());
    save(os);
}

namespace {

std::vector<std::size_t> parse_size_list(const std::string& rest) {
    std::vector<std::size_t> v;
    std::istringstream iss(rest);
    std::size_t x;
    while (iss >> x) v.push_back(x);
    return v;
}

std::pair<std::string, std::string> split_kv(const std::string& line) {
    auto pos = line.find(':');
    if (pos == std::string::npos) throw DataError("model file: malformed line '" + line + "'");
    std::string key = line.substr(0, pos);
    std::string rest = line.substr(pos + 1);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return {key, rest};
}

}  // namespace

SurrogateModel SurrogateModel::load(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "lrtf-model v1") throw DataError("model file: bad header");
    ModelSpec spec;
    std::size_t n_params = 0;
    while (std::getline(is, line)) {
        auto [key, rest] = split_kv(line);
        if (key == "kind") spec.kind = model_kind_from_string(rest);
        else if (key == "input_dim") spec.input_dim = std::stoull(rest);
        else if (key == "ranks") spec.ranks = parse_size_list(rest);
        else if (key == "bond_dims") spec.bond_dims = parse_size_list(rest);
        else if (key == "embed_hidden") spec.embed_hidden = parse_size_list(rest);
        else if (key == "embed_omega0") spec.embed_omega0 = std::stod(rest);
        else if (key == "predictor_hidden") spec.predictor_hidden = parse_size_list(rest);
        else if (key == "predictor_omega0") spec.predictor_omega0 = std::stod(rest);
        else if (key == "params") {
            n_params = std::stoull(rest);
            break;
        } else {
            throw DataError("model file: unknown key '" + key + "'");
        }
    }
    SurrogateModel m = SurrogateModel::init(spec, 0);
    if (m.param_count() != n_params)
        throw DataError("model file: parameter count " + std::to_string(n_params) +
                        " does not match architecture (" + std::to_string(m.param_count()) + ")");
    Vec p(n_params);
    for (double& v : p)
        if (!(is >> v)) throw DataError("model file: truncated parameter block");
    std::getline(is, line);  // consume end of last value line
    if (!std::getline(is, line) || line != "end_params") throw DataError("model file: missing end_params");
    m.set_params(p);
    return m;
}

SurrogateModel SurrogateModel::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot read model file " + path.string());
    return load(is);
}

}  // namespace lrtf
