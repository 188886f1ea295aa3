#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pressura/ancestor.hpp"
#include "pressura/experiment.hpp"
#include "pressura/stats.hpp"

using namespace pressura;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("pressura_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Small configuration that still exercises births and neutrality sampling.
ExperimentConfig tiny_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.complexity = Complexity::kMedium;
  cfg.scheduler = SchedulerMode::kMeritScaled;
  cfg.capacity = 30;
  cfg.updates = 300;
  cfg.replicates = 2;
  cfg.seed = 99;
  cfg.stats_interval = 10;
  cfg.neutrality_interval = 100;
  cfg.out_dir = out_dir;
  return cfg;
}

}  // namespace

TEST_CASE("presets expand to their defining rows") {
  const ExperimentConfig i = preset_config("set-i");
  CHECK(i.complexity == Complexity::kSimple);
  CHECK(i.scheduler == SchedulerMode::kEqualShare);
  CHECK(!i.fixed_length);
  CHECK(i.rate == 0.0075);
  CHECK(i.ancestor_path.empty());  // must be supplied

  const ExperimentConfig ii = preset_config("set-ii");
  CHECK(ii.complexity == Complexity::kSimple);
  CHECK(ii.scheduler == SchedulerMode::kMeritScaled);
  CHECK(ii.rate == 0.0075);

  const ExperimentConfig iii = preset_config("set-iii");
  CHECK(iii.complexity == Complexity::kMedium);
  const ExperimentConfig iv = preset_config("set-iv");
  CHECK(iv.complexity == Complexity::kComplex);

  for (const auto& [name, rate] : std::vector<std::pair<std::string, double>>{
           {"set-v", 0.005}, {"set-vi", 0.010}, {"set-vii", 0.015}}) {
    const ExperimentConfig cfg = preset_config(name);
    CHECK(cfg.complexity == Complexity::kComplex);
    CHECK(cfg.scheduler == SchedulerMode::kMeritScaled);
    CHECK(cfg.fixed_length);
    CHECK(cfg.genome_length == 100);
    CHECK(cfg.rate == rate);
    CHECK(cfg.ins_rate == 0.0);
    CHECK(cfg.del_rate == 0.0);
  }

  // Desk-scale defaults.
  CHECK(iv.capacity == 400);
  CHECK(iv.updates == 10000);
  CHECK(iv.replicates == 5);

  CHECK(is_preset_name("set-vii"));
  CHECK(!is_preset_name("set-viii"));
  CHECK_THROWS_AS(preset_config("set-ix"), std::invalid_argument);
}

TEST_CASE("load_config parses text, aliases, and bounds") {
  const ExperimentConfig cfg = load_config(
      "environment = medium\nscheduler = equal_share\ncapacity = 50\n"
      "updates = 123\nseed = 7\nR = 0.01\nout_dir = /tmp/x\n");
  CHECK(cfg.complexity == Complexity::kMedium);
  CHECK(cfg.scheduler == SchedulerMode::kEqualShare);
  CHECK(cfg.capacity == 50);
  CHECK(cfg.updates == 123);
  CHECK(cfg.seed == 7);
  CHECK(cfg.rate == 0.01);

  CHECK_THROWS_AS(load_config("R = 0.2\nN = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("bogus_key = 1\n"), ParseError);
  CHECK_THROWS_AS(load_config("capacity\n"), ParseError);
  CHECK_THROWS_AS(load_config("preset = set-v\nrate = 0.2\n"), ParseError);
  // Non-defining overrides ride along with a preset.
  const ExperimentConfig v = load_config("preset = set-v\ncapacity = 64\nseed = 3\n");
  CHECK(v.rate == 0.005);
  CHECK(v.capacity == 64);
  CHECK(v.seed == 3);
}

TEST_CASE("preset names load directly") {
  const ExperimentConfig cfg = load_config("set-vii");
  CHECK(cfg.preset == "set-vii");
  CHECK(cfg.rate == 0.015);
  CHECK(cfg.fixed_length);
}

TEST_CASE("ancestor resolution honors fixed-length padding and files") {
  TempDir dir("ancestor");
  ExperimentConfig cfg = preset_config("set-v");
  cfg.out_dir = (dir.path / "out").string();
  const Genome padded = resolve_ancestor(cfg);
  CHECK(padded.length() == 100);
  CHECK(padded == reference_ancestor(100));

  // A file ancestor with the wrong length is rejected in fixed mode.
  const fs::path genome_path = dir.path / "short.org";
  std::ofstream(genome_path) << serialize_genome(reference_ancestor());
  cfg.ancestor_path = genome_path.string();
  CHECK_THROWS_AS(resolve_ancestor(cfg), std::invalid_argument);

  ExperimentConfig variable = preset_config("set-ii");
  variable.ancestor_path = genome_path.string();
  CHECK(resolve_ancestor(variable) == reference_ancestor());

  ExperimentConfig set_i = preset_config("set-i");
  CHECK_THROWS_AS(resolve_ancestor(set_i), std::invalid_argument);
  set_i.ancestor_path = genome_path.string();
  CHECK(resolve_ancestor(set_i) == reference_ancestor());
}

TEST_CASE("run_experiment writes the declared artifact tree deterministically") {
  TempDir dir("run");
  const ExperimentConfig cfg = tiny_config((dir.path / "out").string());

  const RunArtifacts a = run_experiment(cfg, 0);
  CHECK(!a.extinct);
  CHECK(fs::exists(a.stats_path));
  CHECK(fs::exists(a.snapshot_path));
  CHECK(fs::exists(a.dominant_path));
  REQUIRE(a.neutrality_paths.size() == 3);  // updates 100, 200, 300
  for (const auto& p : a.neutrality_paths) CHECK(fs::exists(p));
  REQUIRE(a.plot_paths.size() == 1);
  CHECK(fs::exists(a.plot_paths[0]));

  const CsvTable stats = parse_csv(slurp(a.stats_path));
  CHECK(stats.rows.size() == 30);  // every 10 updates over 300
  const auto nu_col = stats.column_index("nu");
  REQUIRE(nu_col.has_value());
  CHECK(stats.column_values(*nu_col).size() == 3);
  // update column strictly increasing
  double prev = 0;
  for (const auto& row : stats.rows) {
    CHECK(*row[0] > prev);
    prev = *row[0];
  }

  // Byte-identical on a second run.
  ExperimentConfig again = cfg;
  again.out_dir = (dir.path / "out2").string();
  const RunArtifacts b = run_experiment(again, 0);
  CHECK(slurp(a.stats_path) == slurp(b.stats_path));
  CHECK(slurp(a.snapshot_path) == slurp(b.snapshot_path));
  CHECK(slurp(a.dominant_path) == slurp(b.dominant_path));

  // A different replicate index diverges.
  ExperimentConfig other = cfg;
  other.out_dir = (dir.path / "out3").string();
  const RunArtifacts c = run_experiment(other, 1);
  CHECK(slurp(a.stats_path) != slurp(c.stats_path));

  // The dominant genome file parses.
  CHECK(parse_genome(slurp(a.dominant_path)).length() > 0);
}

TEST_CASE("run_batch aggregates replicates and tolerates failures") {
  TempDir dir("batch");
  ExperimentConfig cfg = tiny_config((dir.path / "out").string());
  cfg.replicates = 3;

  const BatchResult serial = run_batch(cfg, 1);
  CHECK(serial.all_ok);
  REQUIRE(serial.replicates.size() == 3);
  CHECK(fs::exists(serial.aggregate_path));
  CHECK(fs::exists(serial.summary_path));

  // Aggregate equals a recomputation from the per-replicate files.
  std::vector<CsvTable> tables;
  for (const auto& rep : serial.replicates) {
    tables.push_back(parse_csv(slurp(rep.artifacts.stats_path)));
  }
  CHECK(format_csv(aggregate_mean(tables)) == slurp(serial.aggregate_path));

  // Parallel execution produces the identical tree.
  ExperimentConfig par = cfg;
  par.out_dir = (dir.path / "out_par").string();
  const BatchResult parallel = run_batch(par, 3);
  REQUIRE(parallel.replicates.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(slurp(serial.replicates[r].artifacts.stats_path) ==
          slurp(parallel.replicates[r].artifacts.stats_path));
  }
  CHECK(slurp(serial.aggregate_path) == slurp(parallel.aggregate_path));

  SUBCASE("single-replicate aggregate equals the run's stats") {
    ExperimentConfig solo = cfg;
    solo.replicates = 1;
    solo.out_dir = (dir.path / "solo").string();
    const BatchResult b = run_batch(solo, 1);
    CHECK(slurp(b.aggregate_path) == slurp(b.replicates[0].artifacts.stats_path));
  }
}

TEST_CASE("extinction is reported distinctly, not as a crash") {
  TempDir dir("extinct");
  ExperimentConfig cfg = tiny_config((dir.path / "out").string());
  cfg.replicates = 1;
  cfg.updates = 120;
  const fs::path sterile_path = dir.path / "sterile.org";
  std::ofstream(sterile_path) << serialize_genome(
      Genome(std::vector<Instruction>(20, Instruction::kNopA)));
  cfg.ancestor_path = sterile_path.string();

  const RunArtifacts art = run_experiment(cfg, 0);
  CHECK(art.extinct);
  CHECK(fs::exists(art.stats_path));

  const BatchResult batch = run_batch(cfg, 1);
  CHECK(!batch.all_ok);
  CHECK(batch.any_extinct);
  CHECK(slurp(batch.summary_path).find("extinct") != std::string::npos);
}

TEST_CASE("config validation examples") {
  ExperimentConfig cfg;
  cfg.capacity = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig{};
  cfg.fixed_length = true;
  cfg.genome_length = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
