#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrtf/errors.hpp"
#include "lrtf/experiment.hpp"

using namespace lrtf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream is(path);
    REQUIRE_MESSAGE(bool(is), "missing file: " << path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string without_wall_time(const std::string& report) {
    std::istringstream is(report);
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line))
        if (line.rfind("wall_time_sec:", 0) != 0) os << line << '\n';
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& stem) : path(fs::temp_directory_path() / stem) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const std::string kSyntheticTrainConfig = R"(
[dataset]
generator = synthetic
kind = tucker
n = 3
rank = 2
count = 40
seed = 5

[model]
kind = mlp
embed_hidden = 8

[train]
max_epochs = 3
seed = 9
)";

ExperimentConfig synth_config(const fs::path& out_dir, const std::string& name) {
    ExperimentConfig cfg = ExperimentConfig::from_text(kSyntheticTrainConfig, name);
    cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("ini text parses sections, comments, and whitespace") {
    const ConfigFile f = ConfigFile::parse_text("# leading comment\n"
                                                "[dataset]\n"
                                                "  generator = microstrip  \n"
                                                "; another comment\n"
                                                "count=100\n"
                                                "\n"
                                                "[train]\n"
                                                "seed = 7\n",
                                                "test");
    CHECK(f.sections.at("dataset").at("generator") == "microstrip");
    CHECK(f.sections.at("dataset").at("count") == "100");
    CHECK(f.sections.at("train").at("seed") == "7");
}

TEST_CASE("ini errors carry the origin and line number") {
    CHECK_THROWS_WITH_AS(static_cast<void>(ConfigFile::parse_text("[dataset\n", "cfg")),
                         doctest::Contains("cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(ConfigFile::parse_text("key = 1\n", "cfg")),
                         doctest::Contains("outside any [section]"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(ConfigFile::parse_text("[a]\nnot a pair\n", "cfg")),
                         doctest::Contains("cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(ConfigFile::parse_text("[a]\nk = 1\nk = 2\n", "cfg")),
                         doctest::Contains("duplicate key 'a.k'"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(ConfigFile::parse_text("[a]\n= 3\n", "cfg")),
                         doctest::Contains("empty key"), ConfigError);
    CHECK_THROWS_AS(static_cast<void>(ConfigFile::parse(fs::temp_directory_path() / "lrtf_no_such.cfg")),
                    ConfigError);
}

TEST_CASE("the hash function matches its published test vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("a full config resolves every field") {
    const ExperimentConfig cfg = ExperimentConfig::from_text(R"(
[dataset]
source = generator
generator = microstrip
count = 600
seed = 11

[box]
eps_r = 2.4 2.6

[model]
kind = plrnet
ranks = 4 4 4 4 4 4
embed_hidden = 16 16
embed_omega0 = 25
predictor_hidden = 8
predictor_omega0 = 10

[train]
learning_rate = 0.005
weight_decay = 0.0001
max_epochs = 2000
batch_size = 128
patience = 50
seed = 3
split_ratio = 0.8
split_seed = 99
error_floor = 1e-6

[output]
dir = /tmp/sweepout
name = micro_plrnet
)",
                                                             "fallback");
    CHECK(cfg.name == "micro_plrnet");
    CHECK(cfg.out_dir == fs::path("/tmp/sweepout"));
    CHECK(cfg.dataset.kind == DatasetSource::Kind::Generator);
    CHECK(cfg.dataset.generator == "microstrip");
    CHECK(cfg.dataset.count == 600);
    CHECK(cfg.dataset.seed == 11);
    CHECK(cfg.dataset.box.vars[2].lo == 2.4);
    CHECK(cfg.dataset.box.vars[2].hi == 2.6);
    CHECK(cfg.has_model);
    CHECK(cfg.model.kind == ModelKind::Plrnet);
    CHECK(cfg.model.ranks == std::vector<std::size_t>(6, 4));
    CHECK(cfg.model.embed_hidden == std::vector<std::size_t>{16, 16});
    CHECK(cfg.model.embed_omega0 == 25.0);
    CHECK(cfg.model.predictor_hidden == std::vector<std::size_t>{8});
    CHECK(cfg.model.predictor_omega0 == 10.0);
    CHECK(cfg.train.learning_rate == 0.005);
    CHECK(cfg.train.weight_decay == 0.0001);
    CHECK(cfg.train.max_epochs == 2000);
    CHECK(cfg.train.batch_size == 128);
    CHECK(cfg.train.patience == 50);
    CHECK(cfg.train.seed == 3);
    CHECK(cfg.split_ratio == 0.8);
    CHECK(cfg.split_seed == 99);
    CHECK(cfg.split_seed_explicit);
    CHECK(cfg.error_floor == 1e-6);
}

TEST_CASE("split seed follows the training seed unless pinned") {
    const ExperimentConfig cfg = ExperimentConfig::from_text("[dataset]\ngenerator = cylinder\ncount = 20\n"
                                                             "[train]\nseed = 42\n",
                                                             "c");
    CHECK(cfg.split_seed == 42);
    CHECK_FALSE(cfg.split_seed_explicit);

    ExperimentConfig moved = cfg;
    moved.apply_seed_override(1000);
    CHECK(moved.dataset.seed == 1000);
    CHECK(moved.train.seed == 1000);
    CHECK(moved.split_seed == 1000);

    ExperimentConfig pinned = ExperimentConfig::from_text("[dataset]\ngenerator = cylinder\ncount = 20\n"
                                                          "[train]\nseed = 42\nsplit_seed = 7\n",
                                                          "c");
    pinned.apply_seed_override(1000);
    CHECK(pinned.train.seed == 1000);
    CHECK(pinned.split_seed == 7);  // explicit pin survives the override
}

TEST_CASE("config validation rejects misuse with helpful messages") {
    auto parse = [](const std::string& text) { return ExperimentConfig::from_text(text, "t"); };
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ncount = 5\n")),
                         doctest::Contains("generator is required"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = waveguide\ncount = 5\n")),
                         doctest::Contains("unknown generator"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\n")),
                         doctest::Contains("count must be >= 1"), ConfigError);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\ngrid = 2 2 2 2 2 2\n")),
        doctest::Contains("mutually exclusive"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ngrid = 2 2\n")),
                         doctest::Contains("one size per box variable"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = synthetic\ncount = 5\nn = 3\nrank = 2\n")),
                         doctest::Contains("kind is required"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\ntypo = 1\n")),
                         doctest::Contains("unknown config key 'dataset.typo'"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\n"
                                                 "[box]\nbogus = 0 1\n")),
                         doctest::Contains("unknown variable 'bogus'"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\n"
                                                 "[box]\nW = 0.5 0.2\n")),
                         doctest::Contains("empty range"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\n"
                                                 "[train]\nsplit_ratio = 1.5\n")),
                         doctest::Contains("split_ratio"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\n"
                                                 "[train]\nlearning_rate = abc\n")),
                         doctest::Contains("expected a number"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\nsource = csv\n")),
                         doctest::Contains("csv path is required"), ConfigError);
    CHECK_THROWS_WITH_AS(static_cast<void>(parse("[dataset]\ngenerator = microstrip\ncount = 5\n"
                                                 "[model]\nranks = 3\n")),
                         doctest::Contains("kind is required"), ConfigError);
}

TEST_CASE("the config hash covers effective values but not the output location") {
    const std::string base = "[dataset]\ngenerator = microstrip\ncount = 100\nseed = 1\n[train]\nseed = 2\n";
    const ExperimentConfig a = ExperimentConfig::from_text(base, "a");
    CHECK(a.hash().size() == 16);

    // formatting and comments are invisible
    const ExperimentConfig b = ExperimentConfig::from_text(
        "# hi\n[dataset]\n  generator=microstrip\n\ncount =   100\nseed= 1\n[train]\n seed =2\n", "b");
    CHECK(a.hash() == b.hash());

    // the output location is not part of the identity
    const ExperimentConfig c =
        ExperimentConfig::from_text(base + "[output]\ndir = elsewhere\nname = other\n", "c");
    CHECK(a.hash() == c.hash());

    // effective values are
    const ExperimentConfig d = ExperimentConfig::from_text(
        "[dataset]\ngenerator = microstrip\ncount = 100\nseed = 3\n[train]\nseed = 2\n", "d");
    CHECK(a.hash() != d.hash());
    const ExperimentConfig e = ExperimentConfig::from_text(base + "[box]\nW = 0.3 0.4\n", "e");
    CHECK(a.hash() != e.hash());
}

TEST_CASE("checkpoints round-trip every recorded quantity") {
    TempDir dir("lrtf_ckpt_test");
    ModelSpec spec;
    spec.kind = ModelKind::Tt;
    spec.input_dim = 3;
    spec.bond_dims = {1, 2, 2, 1};
    spec.embed_hidden = {4};
    Checkpoint ckpt;
    ckpt.model = SurrogateModel::init(spec, 21);
    ckpt.input_mean = {0.1, -0.2, 0.3};
    ckpt.input_std = {1.5, 2.5, 3.5};
    ckpt.target_mean = -7.25;
    ckpt.target_std = 0.125;
    ckpt.split_ratio = 0.7;
    ckpt.split_seed = 99;
    ckpt.epochs_run = 123;
    ckpt.best_epoch = 101;
    ckpt.error_floor = 1e-8;
    ckpt.config_hash = "abcdef0123456789";
    const fs::path path = dir.path / "model.ckpt";
    ckpt.save(path);

    const Checkpoint back = Checkpoint::load(path);
    CHECK(back.model.spec() == spec);
    CHECK(back.model.params() == ckpt.model.params());
    CHECK(back.input_mean == ckpt.input_mean);
    CHECK(back.input_std == ckpt.input_std);
    CHECK(back.target_mean == ckpt.target_mean);
    CHECK(back.target_std == ckpt.target_std);
    CHECK(back.split_ratio == ckpt.split_ratio);
    CHECK(back.split_seed == ckpt.split_seed);
    CHECK(back.epochs_run == ckpt.epochs_run);
    CHECK(back.best_epoch == ckpt.best_epoch);
    CHECK(back.error_floor == ckpt.error_floor);
    CHECK(back.config_hash == ckpt.config_hash);

    // statistics whose arity disagrees with the model are rejected at load
    Checkpoint bad = ckpt;
    bad.input_mean = {0.0};
    bad.input_std = {1.0};
    const fs::path bad_path = dir.path / "bad.ckpt";
    bad.save(bad_path);
    CHECK_THROWS_WITH_AS(static_cast<void>(Checkpoint::load(bad_path)), doctest::Contains("arity"), DataError);
}

TEST_CASE("generate writes byte-identical artifacts on repeat runs") {
    TempDir dir("lrtf_generate_test");
    ExperimentConfig cfg = ExperimentConfig::from_text("[dataset]\ngenerator = cylinder\ncount = 25\nseed = 4\n",
                                                       "cyl");
    cfg.out_dir = dir.path / "run1";
    std::ostringstream log1;
    CHECK(cmd_generate(cfg, log1) == 0);
    CHECK(log1.str().find("wrote 25 rows") != std::string::npos);

    const std::string csv1 = slurp(dir.path / "run1" / "cyl.csv");
    const std::string meta1 = slurp(dir.path / "run1" / "cyl.csv.meta");
    CHECK(csv1.rfind("x_a,x_f,x_phi_s,sigma_dB\n", 0) == 0);
    CHECK(meta1.find("config_hash: " + cfg.hash()) != std::string::npos);
    CHECK(meta1.find("rows: 25") != std::string::npos);

    cfg.out_dir = dir.path / "run2";
    std::ostringstream log2;
    CHECK(cmd_generate(cfg, log2) == 0);
    CHECK(slurp(dir.path / "run2" / "cyl.csv") == csv1);
    CHECK(slurp(dir.path / "run2" / "cyl.csv.meta") == meta1);

    // hash stays put because the output location is excluded from it
    ExperimentConfig csv_cfg = ExperimentConfig::from_text("[dataset]\nsource = csv\ncsv = somewhere.csv\n", "c");
    CHECK_THROWS_WITH_AS(static_cast<void>(cmd_generate(csv_cfg, log2)), doctest::Contains("generator"),
                         ConfigError);
}

TEST_CASE("train writes a checkpoint, report, and curves that rerun identically") {
    TempDir dir("lrtf_train_test");
    const ExperimentConfig cfg = synth_config(dir.path / "a", "toy");
    std::ostringstream log;
    REQUIRE(cmd_train(cfg, log) == 0);

    const Checkpoint ckpt = Checkpoint::load(dir.path / "a" / "toy.model");
    CHECK(ckpt.model.kind() == ModelKind::Mlp);
    CHECK(ckpt.model.input_dim() == 3);  // arity taken from the data
    CHECK(ckpt.model.predictor().num_layers() == 2);  // mlp convenience: embed_hidden became the stack
    CHECK(ckpt.epochs_run == 3);
    CHECK(ckpt.input_mean.size() == 3);
    CHECK(ckpt.config_hash == cfg.hash());

    const std::string report = slurp(dir.path / "a" / "toy.report.txt");
    CHECK(report.find("config_hash: " + cfg.hash()) != std::string::npos);
    CHECK(report.find("epochs_run: 3") != std::string::npos);
    CHECK(report.find("diverged: 0") != std::string::npos);
    const std::string curves = slurp(dir.path / "a" / "toy.curves.csv");
    CHECK(curves.rfind("# config_hash " + cfg.hash() + "\n", 0) == 0);

    const ExperimentConfig cfg2 = synth_config(dir.path / "b", "toy");
    std::ostringstream log2;
    REQUIRE(cmd_train(cfg2, log2) == 0);
    CHECK(slurp(dir.path / "b" / "toy.model") == slurp(dir.path / "a" / "toy.model"));
    CHECK(slurp(dir.path / "b" / "toy.curves.csv") == curves);
    CHECK(without_wall_time(slurp(dir.path / "b" / "toy.report.txt")) == without_wall_time(report));

    ExperimentConfig no_model = ExperimentConfig::from_text("[dataset]\ngenerator = cylinder\ncount = 20\n", "x");
    no_model.out_dir = dir.path;
    CHECK_THROWS_WITH_AS(static_cast<void>(cmd_train(no_model, log2)), doctest::Contains("[model]"), ConfigError);
}

TEST_CASE("eval reproduces training-time statistics on a regenerated csv") {
    TempDir dir("lrtf_eval_test");
    const ExperimentConfig cfg = synth_config(dir.path, "toy");
    std::ostringstream log;
    REQUIRE(cmd_generate(cfg, log) == 0);
    REQUIRE(cmd_train(cfg, log) == 0);

    const fs::path out = dir.path / "toy.eval.txt";
    REQUIRE(cmd_eval(dir.path / "toy.model", dir.path / "toy.csv", out, log) == 0);
    const EvalResult result = read_eval_result(out);
    CHECK(result.label == "mlp");
    CHECK(result.epochs_run == 3);
    CHECK(result.config_hash == cfg.hash());
    CHECK(result.test_mre >= 0.0);
    CHECK(result.test_maxre >= result.test_mre);
    CHECK_FALSE(result.failed);

    // the same rows scored in-process give the same numbers
    const Checkpoint ckpt = Checkpoint::load(dir.path / "toy.model");
    RawData raw = csv_ingest(dir.path / "toy.csv");
    Dataset data = split_and_standardize(std::move(raw), ckpt.split_ratio, ckpt.split_seed);
    data.input_mean = ckpt.input_mean;
    data.input_std = ckpt.input_std;
    data.target_mean = ckpt.target_mean;
    data.target_std = ckpt.target_std;
    const EvalResult direct = evaluate(ckpt.model, data, data.test_idx, ckpt.error_floor);
    CHECK(result.test_mre == direct.test_mre);
    CHECK(result.test_maxre == direct.test_maxre);

    // a dataset with the wrong arity is rejected
    ExperimentConfig wrong = ExperimentConfig::from_text("[dataset]\ngenerator = microstrip\ncount = 20\nseed = 1\n",
                                                         "wrong");
    wrong.out_dir = dir.path;
    REQUIRE(cmd_generate(wrong, log) == 0);
    CHECK_THROWS_AS(static_cast<void>(cmd_eval(dir.path / "toy.model", dir.path / "wrong.csv", out, log)),
                    DimensionError);
}

TEST_CASE("sweep trains every config, tabulates, and flags failures") {
    TempDir dir("lrtf_sweep_test");
    const fs::path good = dir.path / "good.cfg";
    const fs::path bad = dir.path / "bad.cfg";
    {
        std::ofstream os(good);
        os << kSyntheticTrainConfig;
    }
    {
        // absurd learning rate: squared residuals overflow within a few steps
        std::ofstream os(bad);
        os << "[dataset]\ngenerator = synthetic\nkind = tucker\nn = 3\nrank = 2\ncount = 40\nseed = 5\n"
           << "[model]\nkind = mlp\nembed_hidden = 8\n"
           << "[train]\nmax_epochs = 50\nseed = 9\nlearning_rate = 1e200\n";
    }

    const fs::path out = dir.path / "out";
    std::ostringstream log;
    const std::vector<fs::path> paths = {good, bad};
    CHECK(cmd_sweep(paths, out, std::nullopt, log) == 5);

    const std::string table = slurp(out / "table.txt");
    CHECK(table.find("mlp") != std::string::npos);  // successful rows use the model kind
    CHECK(table.find("bad") != std::string::npos);  // failed rows fall back to the run name
    CHECK(table.find("failed") != std::string::npos);
    const std::string csv = slurp(out / "table.csv");
    CHECK(csv.find("bad,") != std::string::npos);
    CHECK(csv.find(",failed,") != std::string::npos);
    CHECK(fs::exists(out / "good.eval.txt"));

    // an all-good sweep exits cleanly, and the seed override reaches the run
    const fs::path out2 = dir.path / "out2";
    std::ostringstream log2;
    const std::vector<fs::path> only_good = {good};
    CHECK(cmd_sweep(only_good, out2, 123, log2) == 0);
    const Checkpoint swept = Checkpoint::load(out2 / "good.model");
    CHECK(swept.split_seed == 123);

    CHECK_THROWS_AS(static_cast<void>(cmd_sweep({}, out2, std::nullopt, log2)), ConfigError);
}

TEST_CASE("raw data construction dispatches on the source") {
    TempDir dir("lrtf_build_raw");
    ExperimentConfig gen = ExperimentConfig::from_text("[dataset]\ngenerator = microstrip\ncount = 15\nseed = 2\n",
                                                       "g");
    const RawData sampled = build_raw_data(gen);
    CHECK(sampled.num_samples == 15);
    CHECK(sampled.input_dim == 6);
    CHECK(sampled.target_name == "RL_dB");

    ExperimentConfig grid = ExperimentConfig::from_text(
        "[dataset]\ngenerator = cylinder\ngrid = 2 2 3\n", "grid");
    const RawData gridded = build_raw_data(grid);
    CHECK(gridded.num_samples == 12);

    gen.out_dir = dir.path;
    std::ostringstream log;
    REQUIRE(cmd_generate(gen, log) == 0);
    ExperimentConfig from_csv = ExperimentConfig::from_text(
        "[dataset]\nsource = csv\ncsv = " + (dir.path / "g.csv").string() + "\n", "c");
    const RawData loaded = build_raw_data(from_csv);
    CHECK(loaded.num_samples == 15);
    CHECK(loaded.inputs == sampled.inputs);
    CHECK(loaded.targets == sampled.targets);
}

}  // TEST_SUITE
