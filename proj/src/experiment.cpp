#include "lrtf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "lrtf/errors.hpp"

namespace lrtf {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    const std::string t = trimmed(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError(where + ": expected a number, got '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
    const std::string t = trimmed(text);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || t[0] == '-')
        throw ConfigError(where + ": expected a nonnegative integer, got '" + text + "'");
    return v;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& where) {
    std::vector<std::size_t> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) out.push_back(static_cast<std::size_t>(parse_u64(tok, where)));
    return out;
}

std::string join_sizes(std::span<const std::size_t> v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i]);
    }
    return out;
}

// Pulls a key out of `section`, erasing it so leftover keys can be reported.
std::optional<std::string> take(std::map<std::string, std::string>& section, const std::string& key) {
    auto it = section.find(key);
    if (it == section.end()) return std::nullopt;
    std::string value = it->second;
    section.erase(it);
    return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile file;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header '" + t + "'");
            section = trimmed(t.substr(1, t.size() - 2));
            file.sections[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value', got '" + t + "'");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any [section]");
        const std::string key = trimmed(t.substr(0, eq));
        const std::string value = trimmed(t.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (!file.sections[section].emplace(key, value).second)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + section + "." + key +
                              "'");
    }
    return file;
}

ConfigFile ConfigFile::parse(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_text(buf.str(), path.string());
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// ExperimentConfig

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& file, const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    auto sections = file.sections;  // consumed destructively

    // [dataset]
    {
        auto& ds = sections["dataset"];
        const std::string source = take(ds, "source").value_or("generator");
        if (source == "generator") {
            cfg.dataset.kind = DatasetSource::Kind::Generator;
            const auto gen = take(ds, "generator");
            if (!gen) throw ConfigError(name + ": [dataset] generator is required");
            cfg.dataset.generator = *gen;
            if (auto v = take(ds, "count")) cfg.dataset.count = static_cast<std::size_t>(parse_u64(*v, "dataset.count"));
            if (auto v = take(ds, "seed")) cfg.dataset.seed = parse_u64(*v, "dataset.seed");
            if (auto v = take(ds, "grid")) cfg.dataset.grid = parse_size_list(*v, "dataset.grid");
            if (cfg.dataset.generator == "microstrip") {
                cfg.dataset.box = microstrip_box();
            } else if (cfg.dataset.generator == "cylinder") {
                cfg.dataset.box = cylinder_box();
            } else if (cfg.dataset.generator == "synthetic") {
                const auto kind = take(ds, "kind");
                if (!kind) throw ConfigError(name + ": [dataset] kind is required for the synthetic generator");
                cfg.dataset.synth_kind = model_kind_from_string(*kind);
                const auto n = take(ds, "n");
                const auto rank = take(ds, "rank");
                if (!n || !rank)
                    throw ConfigError(name + ": [dataset] n and rank are required for the synthetic generator");
                cfg.dataset.synth_n = static_cast<std::size_t>(parse_u64(*n, "dataset.n"));
                cfg.dataset.synth_rank = static_cast<std::size_t>(parse_u64(*rank, "dataset.rank"));
                if (auto v = take(ds, "gen_seed")) cfg.dataset.synth_seed = parse_u64(*v, "dataset.gen_seed");
                if (auto v = take(ds, "gen_omega0")) cfg.dataset.synth_omega0 = parse_double(*v, "dataset.gen_omega0");
                for (std::size_t d = 0; d < cfg.dataset.synth_n; ++d)
                    cfg.dataset.box.vars.push_back({"x" + std::to_string(d + 1), "", -1.0, 1.0});
            } else {
                throw ConfigError(name + ": unknown generator '" + cfg.dataset.generator +
                                  "' (expected microstrip, cylinder, or synthetic)");
            }
            if (cfg.dataset.grid.empty() && cfg.dataset.count == 0)
                throw ConfigError(name + ": [dataset] count must be >= 1 (or a grid must be given)");
            if (!cfg.dataset.grid.empty() && cfg.dataset.count != 0)
                throw ConfigError(name + ": [dataset] count and grid are mutually exclusive");
            if (!cfg.dataset.grid.empty() && cfg.dataset.grid.size() != cfg.dataset.box.dim())
                throw ConfigError(name + ": [dataset] grid needs one size per box variable");
        } else if (source == "csv") {
            cfg.dataset.kind = DatasetSource::Kind::Csv;
            const auto path = take(ds, "csv");
            if (!path) throw ConfigError(name + ": [dataset] csv path is required");
            cfg.dataset.csv = *path;
        } else {
            throw ConfigError(name + ": [dataset] source must be 'generator' or 'csv'");
        }
    }

    // [box] range overrides, keyed by variable name
    {
        auto& box = sections["box"];
        for (auto it = box.begin(); it != box.end();) {
            auto var = std::find_if(cfg.dataset.box.vars.begin(), cfg.dataset.box.vars.end(),
                                    [&](const BoxVar& v) { return v.name == it->first; });
            if (var == cfg.dataset.box.vars.end())
                throw ConfigError(name + ": [box] unknown variable '" + it->first + "'");
            std::istringstream is(it->second);
            std::string lo, hi, extra;
            if (!(is >> lo >> hi) || (is >> extra))
                throw ConfigError(name + ": [box] " + it->first + " must be 'lo hi'");
            var->lo = parse_double(lo, "box." + it->first);
            var->hi = parse_double(hi, "box." + it->first);
            it = box.erase(it);
        }
        if (cfg.dataset.kind == DatasetSource::Kind::Generator) cfg.dataset.box.validate();
    }

    // [model]
    {
        auto& md = sections["model"];
        if (!md.empty()) {
            cfg.has_model = true;
            const auto kind = take(md, "kind");
            if (!kind) throw ConfigError(name + ": [model] kind is required");
            cfg.model.kind = model_kind_from_string(*kind);
            if (auto v = take(md, "input_dim"))
                cfg.model.input_dim = static_cast<std::size_t>(parse_u64(*v, "model.input_dim"));
            if (auto v = take(md, "ranks")) cfg.model.ranks = parse_size_list(*v, "model.ranks");
            if (auto v = take(md, "bond_dims")) cfg.model.bond_dims = parse_size_list(*v, "model.bond_dims");
            if (auto v = take(md, "embed_hidden")) cfg.model.embed_hidden = parse_size_list(*v, "model.embed_hidden");
            if (auto v = take(md, "embed_omega0")) cfg.model.embed_omega0 = parse_double(*v, "model.embed_omega0");
            if (auto v = take(md, "predictor_hidden"))
                cfg.model.predictor_hidden = parse_size_list(*v, "model.predictor_hidden");
            if (auto v = take(md, "predictor_omega0"))
                cfg.model.predictor_omega0 = parse_double(*v, "model.predictor_omega0");
        }
    }

    // [train]
    {
        auto& tr = sections["train"];
        if (auto v = take(tr, "learning_rate")) cfg.train.learning_rate = parse_double(*v, "train.learning_rate");
        if (auto v = take(tr, "weight_decay")) cfg.train.weight_decay = parse_double(*v, "train.weight_decay");
        if (auto v = take(tr, "beta1")) cfg.train.beta1 = parse_double(*v, "train.beta1");
        if (auto v = take(tr, "beta2")) cfg.train.beta2 = parse_double(*v, "train.beta2");
        if (auto v = take(tr, "epsilon")) cfg.train.epsilon = parse_double(*v, "train.epsilon");
        if (auto v = take(tr, "max_epochs"))
            cfg.train.max_epochs = static_cast<std::size_t>(parse_u64(*v, "train.max_epochs"));
        if (auto v = take(tr, "batch_size"))
            cfg.train.batch_size = static_cast<std::size_t>(parse_u64(*v, "train.batch_size"));
        if (auto v = take(tr, "patience")) cfg.train.patience = static_cast<std::size_t>(parse_u64(*v, "train.patience"));
        if (auto v = take(tr, "seed")) cfg.train.seed = parse_u64(*v, "train.seed");
        if (auto v = take(tr, "split_ratio")) cfg.split_ratio = parse_double(*v, "train.split_ratio");
        if (auto v = take(tr, "split_seed")) {
            cfg.split_seed = parse_u64(*v, "train.split_seed");
            cfg.split_seed_explicit = true;
        } else {
            cfg.split_seed = cfg.train.seed;
        }
        if (auto v = take(tr, "error_floor")) cfg.error_floor = parse_double(*v, "train.error_floor");
        if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0))
            throw ConfigError(name + ": train.split_ratio must lie in (0, 1)");
        if (!(cfg.error_floor > 0.0)) throw ConfigError(name + ": train.error_floor must be positive");
        cfg.train.validate();
    }

    // [output]
    {
        auto& out = sections["output"];
        if (auto v = take(out, "dir")) cfg.out_dir = *v;
        if (auto v = take(out, "name")) cfg.name = *v;
    }

    // anything left over is a typo
    for (const auto& [section, keys] : sections)
        for (const auto& [key, value] : keys)
            throw ConfigError(name + ": unknown config key '" + section + "." + key + "'");

    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    return from_config(ConfigFile::parse(path), path.stem().string());
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text, const std::string& name) {
    return from_config(ConfigFile::parse_text(text, name), name);
}

void ExperimentConfig::apply_seed_override(std::uint64_t seed) {
    dataset.seed = seed;
    train.seed = seed;
    if (!split_seed_explicit) split_seed = seed;
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream os;
    if (dataset.kind == DatasetSource::Kind::Generator) {
        os << "dataset.source = generator\n";
        os << "dataset.generator = " << dataset.generator << '\n';
        if (dataset.grid.empty())
            os << "dataset.count = " << dataset.count << '\n';
        else
            os << "dataset.grid = " << join_sizes(dataset.grid) << '\n';
        os << "dataset.seed = " << dataset.seed << '\n';
        if (dataset.generator == "synthetic")
            os << "dataset.synthetic = " << to_string(dataset.synth_kind) << ' ' << dataset.synth_n << ' '
               << dataset.synth_rank << ' ' << dataset.synth_seed << ' ' << fmt17(dataset.synth_omega0) << '\n';
        for (const BoxVar& v : dataset.box.vars)
            os << "box." << v.name << " = " << fmt17(v.lo) << ' ' << fmt17(v.hi) << '\n';
    } else {
        os << "dataset.source = csv\n";
        os << "dataset.csv = " << dataset.csv.string() << '\n';
    }
    if (has_model) {
        os << "model.kind = " << to_string(model.kind) << '\n';
        if (model.input_dim) os << "model.input_dim = " << model.input_dim << '\n';
        if (!model.ranks.empty()) os << "model.ranks = " << join_sizes(model.ranks) << '\n';
        if (!model.bond_dims.empty()) os << "model.bond_dims = " << join_sizes(model.bond_dims) << '\n';
        os << "model.embed_hidden = " << join_sizes(model.embed_hidden) << '\n';
        os << "model.embed_omega0 = " << fmt17(model.embed_omega0) << '\n';
        os << "model.predictor_hidden = " << join_sizes(model.predictor_hidden) << '\n';
        os << "model.predictor_omega0 = " << fmt17(model.predictor_omega0) << '\n';
    }
    os << "train.learning_rate = " << fmt17(train.learning_rate) << '\n';
    os << "train.weight_decay = " << fmt17(train.weight_decay) << '\n';
    os << "train.beta1 = " << fmt17(train.beta1) << '\n';
    os << "train.beta2 = " << fmt17(train.beta2) << '\n';
    os << "train.epsilon = " << fmt17(train.epsilon) << '\n';
    os << "train.max_epochs = " << train.max_epochs << '\n';
    os << "train.batch_size = " << train.batch_size << '\n';
    os << "train.patience = " << train.patience << '\n';
    os << "train.seed = " << train.seed << '\n';
    os << "train.split_ratio = " << fmt17(split_ratio) << '\n';
    os << "train.split_seed = " << split_seed << '\n';
    os << "train.error_floor = " << fmt17(error_floor) << '\n';
    return os.str();
}

std::string ExperimentConfig::hash() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_text())));
    return buf;
}

// ---------------------------------------------------------------------------
// Data construction

RawData build_raw_data(const ExperimentConfig& config) {
    const DatasetSource& src = config.dataset;
    if (src.kind == DatasetSource::Kind::Csv) return csv_ingest(src.csv);

    TargetFn target;
    std::string target_name;
    if (src.generator == "microstrip") {
        target = [](std::span<const double> x) {
            return microstrip_return_loss(x[0], x[1], x[2], x[3], x[4], x[5]);
        };
        target_name = "RL_dB";
    } else if (src.generator == "cylinder") {
        target = [](std::span<const double> x) { return cylinder_rcs_db(x[0], x[1], x[2]); };
        target_name = "sigma_dB";
    } else {  // synthetic
        auto gen = std::make_shared<SyntheticGenerator>(
            synthetic_lowrank(src.synth_kind, src.synth_n, src.synth_rank, src.synth_seed, src.synth_omega0));
        target = [gen](std::span<const double> x) { return (*gen)(x); };
        target_name = "y";
    }
    if (!src.grid.empty()) return grid_box(src.box, src.grid, target, target_name);
    return sample_box(src.box, src.count, src.seed, target, target_name);
}

// ---------------------------------------------------------------------------
// Checkpoints

void Checkpoint::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    model.save(os);
    os << "input_mean:";
    for (double v : input_mean) os << ' ' << fmt17(v);
    os << '\n';
    os << "input_std:";
    for (double v : input_std) os << ' ' << fmt17(v);
    os << '\n';
    os << "target_mean: " << fmt17(target_mean) << '\n';
    os << "target_std: " << fmt17(target_std) << '\n';
    os << "split_ratio: " << fmt17(split_ratio) << '\n';
    os << "split_seed: " << split_seed << '\n';
    os << "epochs_run: " << epochs_run << '\n';
    os << "best_epoch: " << best_epoch << '\n';
    os << "error_floor: " << fmt17(error_floor) << '\n';
    os << "config_hash: " << config_hash << '\n';
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot read " + path.string());
    Checkpoint ckpt;
    ckpt.model = SurrogateModel::load(is);
    std::string line;
    while (std::getline(is, line)) {
        const std::string t = trimmed(line);
        if (t.empty()) continue;
        const auto colon = t.find(':');
        if (colon == std::string::npos) throw DataError(path.string() + ": malformed checkpoint line '" + t + "'");
        const std::string key = trimmed(t.substr(0, colon));
        const std::string value = trimmed(t.substr(colon + 1));
        auto parse_vec = [&](Vec& out) {
            out.clear();
            std::istringstream vs(value);
            std::string tok;
            while (vs >> tok) out.push_back(parse_double(tok, path.string() + ": " + key));
        };
        if (key == "input_mean")
            parse_vec(ckpt.input_mean);
        else if (key == "input_std")
            parse_vec(ckpt.input_std);
        else if (key == "target_mean")
            ckpt.target_mean = parse_double(value, key);
        else if (key == "target_std")
            ckpt.target_std = parse_double(value, key);
        else if (key == "split_ratio")
            ckpt.split_ratio = parse_double(value, key);
        else if (key == "split_seed")
            ckpt.split_seed = parse_u64(value, key);
        else if (key == "epochs_run")
            ckpt.epochs_run = static_cast<std::size_t>(parse_u64(value, key));
        else if (key == "best_epoch")
            ckpt.best_epoch = static_cast<std::size_t>(parse_u64(value, key));
        else if (key == "error_floor")
            ckpt.error_floor = parse_double(value, key);
        else if (key == "config_hash")
            ckpt.config_hash = value;
        else
            throw DataError(path.string() + ": unknown checkpoint key '" + key + "'");
    }
    if (ckpt.input_mean.size() != ckpt.model.input_dim() || ckpt.input_std.size() != ckpt.model.input_dim())
        throw DataError(path.string() + ": standardization statistics do not match model arity");
    return ckpt;
}

// ---------------------------------------------------------------------------
// Artifact paths

std::filesystem::path dataset_csv_path(const ExperimentConfig& c) { return c.out_dir / (c.name + ".csv"); }
std::filesystem::path checkpoint_path(const ExperimentConfig& c) { return c.out_dir / (c.name + ".model"); }
std::filesystem::path report_path(const ExperimentConfig& c) { return c.out_dir / (c.name + ".report.txt"); }
std::filesystem::path curves_path(const ExperimentConfig& c) { return c.out_dir / (c.name + ".curves.csv"); }
std::filesystem::path eval_path(const ExperimentConfig& c) { return c.out_dir / (c.name + ".eval.txt"); }

// ---------------------------------------------------------------------------
// Commands

namespace {

void write_meta(const ExperimentConfig& config, const RawData& data, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path.string());
    os << "lrtf-dataset-meta v1\n";
    os << "config_hash: " << config.hash() << '\n';
    os << "generator: " << config.dataset.generator << '\n';
    os << "target: " << data.target_name << '\n';
    os << "rows: " << data.num_samples << '\n';
    if (config.dataset.grid.empty())
        os << "sampling: random seed=" << config.dataset.seed << '\n';
    else
        os << "sampling: grid " << join_sizes(config.dataset.grid) << '\n';
    for (const BoxVar& v : config.dataset.box.vars)
        os << "box: " << v.name << (v.unit.empty() ? "" : " " + v.unit) << " in [" << fmt17(v.lo) << ", "
           << fmt17(v.hi) << "]\n";
    if (config.dataset.generator == "microstrip")
        os << "note: quasi-static closed-form microstrip line terminated by a resistive load; return loss in dB "
              "referenced to 50 ohm\n";
    else if (config.dataset.generator == "cylinder")
        os << "note: TM-polarized echo width of a circular conducting cylinder, exact eigenfunction series; "
              "target is 10*log10(sigma / 1 m)\n";
    else
        os << "note: frozen random " << to_string(config.dataset.synth_kind) << " surrogate on [-1,1]^"
           << config.dataset.synth_n << " (rank " << config.dataset.synth_rank << ", seed "
           << config.dataset.synth_seed << ", omega0 " << fmt17(config.dataset.synth_omega0) << ")\n";
}

Dataset dataset_for_checkpoint(const Checkpoint& ckpt, RawData raw) {
    if (raw.input_dim != ckpt.model.input_dim())
        throw DimensionError("eval: checkpoint expects " + std::to_string(ckpt.model.input_dim()) +
                             " inputs but dataset has " + std::to_string(raw.input_dim));
    Dataset data = split_and_standardize(std::move(raw), ckpt.split_ratio, ckpt.split_seed);
    // Score with the statistics frozen at training time, not ones recomputed
    // from whatever rows this file happens to contain.
    data.input_mean = ckpt.input_mean;
    data.input_std = ckpt.input_std;
    data.target_mean = ckpt.target_mean;
    data.target_std = ckpt.target_std;
    return data;
}

EvalResult evaluate_config(const ExperimentConfig& config, std::ostream& log) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path(config));
    const Dataset data = dataset_for_checkpoint(ckpt, build_raw_data(config));
    EvalResult result = evaluate(ckpt.model, data, data.test_idx, ckpt.error_floor);
    result.epochs_run = ckpt.epochs_run;
    result.best_epoch = ckpt.best_epoch;
    result.config_hash = ckpt.config_hash;
    write_eval_result(result, eval_path(config));
    log << config.name << ": test MRE " << result.test_mre << ", test MaxRE " << result.test_maxre << " ("
        << result.param_count << " parameters)\n";
    return result;
}

std::string first_line(const std::string& text) {
    const auto nl = text.find('\n');
    return nl == std::string::npos ? text : text.substr(0, nl);
}

}  // namespace

int cmd_generate(const ExperimentConfig& config, std::ostream& log) {
    if (config.dataset.kind != DatasetSource::Kind::Generator)
        throw ConfigError(config.name + ": generate needs a generator dataset source, not a CSV");
    const RawData data = build_raw_data(config);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path csv = dataset_csv_path(config);
    csv_export(data, csv);
    write_meta(config, data, csv.string() + ".meta");
    log << "wrote " << data.num_samples << " rows to " << csv.string() << '\n';
    return 0;
}

int cmd_train(const ExperimentConfig& config, std::ostream& log) {
    if (!config.has_model) throw ConfigError(config.name + ": [model] section is required for training");
    RawData raw = build_raw_data(config);
    const Dataset data = split_and_standardize(std::move(raw), config.split_ratio, config.split_seed);

    ModelSpec spec = config.model;
    if (spec.input_dim == 0) spec.input_dim = data.input_dim();
    if (spec.kind == ModelKind::Mlp && spec.predictor_hidden.empty() && !spec.embed_hidden.empty())
        spec.predictor_hidden = spec.embed_hidden;  // convenience: one hidden-stack key for MLP configs
    SurrogateModel model = SurrogateModel::init(spec, config.train.seed);

    TrainReport report = train(model, data, config.train);
    report.config_echo = config.canonical_text();
    report.config_hash = config.hash();

    std::filesystem::create_directories(config.out_dir);
    Checkpoint ckpt;
    ckpt.model = std::move(model);
    ckpt.input_mean = data.input_mean;
    ckpt.input_std = data.input_std;
    ckpt.target_mean = data.target_mean;
    ckpt.target_std = data.target_std;
    ckpt.split_ratio = config.split_ratio;
    ckpt.split_seed = config.split_seed;
    ckpt.epochs_run = report.epochs_run;
    ckpt.best_epoch = report.best_epoch;
    ckpt.error_floor = config.error_floor;
    ckpt.config_hash = report.config_hash;
    ckpt.save(checkpoint_path(config));
    write_report(report, report_path(config));
    write_curves(report, curves_path(config));

    if (report.diverged) {
        log << config.name << ": training diverged (" << report.divergence_note << "); partial report written\n";
        return 4;
    }
    log << config.name << ": " << report.epochs_run << " epochs, best test loss " << report.best_test_loss
        << " at epoch " << report.best_epoch << '\n';
    return 0;
}

int cmd_eval(const std::filesystem::path& checkpoint_file, const std::filesystem::path& csv_path,
             const std::filesystem::path& out_path, std::ostream& log) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_file);
    const Dataset data = dataset_for_checkpoint(ckpt, csv_ingest(csv_path));
    EvalResult result = evaluate(ckpt.model, data, data.test_idx, ckpt.error_floor);
    result.epochs_run = ckpt.epochs_run;
    result.best_epoch = ckpt.best_epoch;
    result.config_hash = ckpt.config_hash;
    if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    write_eval_result(result, out_path);
    log << "test MRE " << result.test_mre << ", test MaxRE " << result.test_maxre << " (" << result.param_count
        << " parameters, floor " << result.error_floor << ")\n";
    return 0;
}

int cmd_sweep(std::span<const std::filesystem::path> config_paths, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed_override, std::ostream& log) {
    if (config_paths.empty()) throw ConfigError("sweep: at least one config is required");
    std::vector<EvalResult> results;
    bool any_failed = false;
    for (const std::filesystem::path& path : config_paths) {
        std::string run_name = path.stem().string();
        try {
            ExperimentConfig config = ExperimentConfig::load(path);
            if (seed_override) config.apply_seed_override(*seed_override);
            config.out_dir = out_dir;
            run_name = config.name;
            if (const int rc = cmd_train(config, log); rc != 0)
                throw NumericalError("training diverged (exit code " + std::to_string(rc) + ")");
            results.push_back(evaluate_config(config, log));
        } catch (const std::exception& e) {
            any_failed = true;
            EvalResult failed;
            failed.label = run_name;
            failed.failed = true;
            failed.note = first_line(e.what());
            results.push_back(failed);
            log << run_name << ": FAILED (" << failed.note << ")\n";
        }
    }
    std::filesystem::create_directories(out_dir);
    const std::string text = comparison_table_text(results);
    {
        std::ofstream os(out_dir / "table.txt");
        if (!os) throw DataError("cannot write " + (out_dir / "table.txt").string());
        os << text;
    }
    {
        std::ofstream os(out_dir / "table.csv");
        if (!os) throw DataError("cannot write " + (out_dir / "table.csv").string());
        os << comparison_table_csv(results);
    }
    log << text;
    return any_failed ? 5 : 0;
}

}  // namespace lrtf
