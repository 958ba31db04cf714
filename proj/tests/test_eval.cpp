#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "gdpkit/eval.hpp"

using namespace gdpkit;
namespace fs = std::filesystem;

namespace {

using Labels = std::vector<Label>;

DatasetManifest fake_manifest(std::size_t positives, std::size_t negatives) {
  DatasetManifest manifest;
  for (std::size_t i = 0; i < positives; ++i) {
    manifest.entries.push_back({"m" + std::to_string(i), Label::positive});
  }
  for (std::size_t i = 0; i < negatives; ++i) {
    manifest.entries.push_back({"f" + std::to_string(i), Label::negative});
  }
  return manifest;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / name;
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Writes a small on-disk grating corpus and returns its manifest path.
fs::path write_corpus(const fs::path& dir, int per_class, int size,
                      double jitter, std::uint64_t seed) {
  SyntheticSpec spec{per_class, size, 8, jitter, seed};
  SyntheticCorpus corpus = make_synthetic_textures(spec);
  DatasetManifest manifest;
  for (int i = 0; i < per_class; ++i) {
    std::string name = "h" + std::to_string(i) + ".pgm";
    save_pgm_file(corpus.horizontal[i], dir / name);
    manifest.entries.push_back({name, Label::positive});
  }
  for (int i = 0; i < per_class; ++i) {
    std::string name = "v" + std::to_string(i) + ".pgm";
    save_pgm_file(corpus.vertical[i], dir / name);
    manifest.entries.push_back({name, Label::negative});
  }
  fs::path manifest_path = dir / "manifest.csv";
  std::ofstream(manifest_path) << manifest_to_csv(manifest);
  return manifest_path;
}

}  // namespace

TEST_CASE("stratified kfold balances classes exactly when divisible") {
  auto folds = stratified_kfold(fake_manifest(5, 5), SplitSpec{5, 1, true});
  REQUIRE(folds.size() == 5);
  DatasetManifest manifest = fake_manifest(5, 5);
  for (const auto& fold : folds) {
    REQUIRE(fold.size() == 2);
    int pos = 0;
    for (auto idx : fold) pos += manifest.entries[idx].label == Label::positive;
    CHECK(pos == 1);
  }
}

TEST_CASE("stratified kfold keeps fold sizes within one") {
  auto folds = stratified_kfold(fake_manifest(6, 5), SplitSpec{5, 2, true});
  std::size_t lo = 99, hi = 0;
  for (const auto& fold : folds) {
    lo = std::min(lo, fold.size());
    hi = std::max(hi, fold.size());
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("stratified kfold per-class counts stay within one of proportional") {
  DatasetManifest manifest = fake_manifest(23, 17);
  auto folds = stratified_kfold(manifest, SplitSpec{4, 3, true});
  for (const auto& fold : folds) {
    std::size_t pos = 0;
    for (auto idx : fold) pos += manifest.entries[idx].label == Label::positive;
    std::size_t neg = fold.size() - pos;
    CHECK(pos >= 5);  // 23/4 = 5.75
    CHECK(pos <= 6);
    CHECK(neg >= 4);  // 17/4 = 4.25
    CHECK(neg <= 5);
  }
}

TEST_CASE("folds partition the manifest") {
  DatasetManifest manifest = fake_manifest(13, 9);
  for (bool stratified : {true, false}) {
    auto folds = stratified_kfold(manifest, SplitSpec{3, 7, stratified});
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& fold : folds) {
      total += fold.size();
      for (auto idx : fold) CHECK(seen.insert(idx).second);
    }
    CHECK(total == manifest.entries.size());
  }
}

TEST_CASE("kfold is deterministic in the seed") {
  DatasetManifest manifest = fake_manifest(10, 10);
  SplitSpec spec{5, 42, true};
  CHECK(stratified_kfold(manifest, spec) == stratified_kfold(manifest, spec));
}

TEST_CASE("kfold rejects k larger than a class") {
  CHECK_THROWS_AS(stratified_kfold(fake_manifest(3, 10), SplitSpec{4, 0, true}),
                  std::invalid_argument);
  CHECK_THROWS_AS(stratified_kfold(fake_manifest(10, 10), SplitSpec{1, 0, true}),
                  std::invalid_argument);
}

TEST_CASE("accuracies counts overall and per class") {
  Labels all = {Label::positive, Label::positive, Label::negative, Label::negative};
  ClassAccuracy perfect = accuracies(all, all);
  CHECK(perfect.overall == 1.0);
  CHECK(perfect.positive == 1.0);
  CHECK(perfect.negative == 1.0);

  Labels flipped = {Label::negative, Label::negative, Label::positive, Label::positive};
  ClassAccuracy zero = accuracies(flipped, all);
  CHECK(zero.overall == 0.0);
  CHECK(zero.positive == 0.0);
  CHECK(zero.negative == 0.0);

  // one male item wrong, classes 2/2
  Labels mostly = {Label::positive, Label::negative, Label::negative, Label::negative};
  ClassAccuracy three = accuracies(mostly, all);
  CHECK(three.overall == 0.75);
  CHECK(three.positive == 0.5);
  CHECK(three.negative == 1.0);

  CHECK_THROWS_AS(accuracies({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(accuracies({Label::positive}, all), std::invalid_argument);
}

TEST_CASE("manifest csv parsing") {
  TempDir tmp("gdpkit_manifest_test");
  fs::path csv = tmp.path / "manifest.csv";
  std::ofstream(csv) << "path,label\na.pgm,male\nsub/b.pgm,female\n";
  DatasetManifest manifest = load_manifest(csv);
  REQUIRE(manifest.entries.size() == 2);
  CHECK(manifest.entries[0].label == Label::positive);
  CHECK(manifest.entries[1].label == Label::negative);
  // relative paths resolve against the csv directory
  CHECK(fs::path(manifest.entries[0].path) == tmp.path / "a.pgm");

  std::ofstream(csv) << "path,label\na.pgm,male\na.pgm,female\n";
  CHECK_THROWS_WITH_AS(load_manifest(csv), doctest::Contains("duplicate"),
                       std::runtime_error);

  std::ofstream(csv) << "path,label\na.pgm,cat\n";
  CHECK_THROWS_WITH_AS(load_manifest(csv), doctest::Contains("label"),
                       std::runtime_error);

  std::ofstream(csv) << "nope\n";
  CHECK_THROWS_AS(load_manifest(csv), std::runtime_error);
}

TEST_CASE("feature csv round trip") {
  Labels labels = {Label::positive, Label::negative};
  std::vector<std::vector<double>> rows = {{0.125, 0.875}, {1.0 / 3.0, 0.5}};
  std::string csv = feature_csv(labels, rows);
  CHECK(csv.substr(0, 11) == "label,f1,f2");
  auto [labels2, rows2] = parse_feature_csv(csv);
  CHECK(labels2 == labels);
  REQUIRE(rows2.size() == 2);
  CHECK(rows2[0] == rows[0]);  // short decimals survive 10 digits exactly
  CHECK(rows2[1][1] == 0.5);
  CHECK(rows2[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("empty configuration lists give an empty report") {
  DatasetManifest manifest = fake_manifest(4, 4);
  ExperimentReport report = run_block_size_experiment(
      manifest, {DescriptorKind::gdp}, {}, SplitSpec{2, 0, true}, TrainConfig{});
  CHECK(report.rows.empty());
  CHECK(report_to_csv(report) ==
        "config,kind,n,feature_len,acc_overall,acc_male,acc_female,noise,seed\n");
}

TEST_CASE("block size experiment reports lengths and sane accuracies") {
  TempDir tmp("gdpkit_blockexp_test");
  fs::path manifest_path = write_corpus(tmp.path, 8, 32, 0.0, 5);
  DatasetManifest manifest = load_manifest(manifest_path);

  SplitSpec split{4, 1, true};
  TrainConfig config{1.0, 100, 1e-7, 1};
  ExperimentReport report = run_block_size_experiment(
      manifest, {DescriptorKind::gdp}, {3, 5}, split, config);

  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].config == "gdp-n3");
  CHECK(report.rows[0].feature_len == 72);
  CHECK(report.rows[1].feature_len == 200);
  for (const auto& row : report.rows) {
    CHECK(row.acc_overall >= 0.0);
    CHECK(row.acc_overall <= 1.0);
    CHECK(row.seed == split.seed);
    CHECK(!row.noisy);
  }
  // jitter-free gratings are linearly separable in GDP feature space
  CHECK(report.rows[0].acc_overall == 1.0);

  // reports are a pure function of inputs
  ExperimentReport again = run_block_size_experiment(
      manifest, {DescriptorKind::gdp}, {3, 5}, split, config);
  CHECK(report_to_csv(again) == report_to_csv(report));
  CHECK(render_report(again) == render_report(report));
}

TEST_CASE("chi-square classifier plugs into the harness") {
  TempDir tmp("gdpkit_chi2_test");
  fs::path manifest_path = write_corpus(tmp.path, 6, 32, 0.0, 9);
  DatasetManifest manifest = load_manifest(manifest_path);
  ExperimentReport report = run_block_size_experiment(
      manifest, {DescriptorKind::gdp}, {3}, SplitSpec{3, 2, true}, TrainConfig{},
      ClassifierKind::chi_square);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].acc_overall == 1.0);
  bool found = false;
  for (const auto& [key, value] : report.meta) {
    found |= key == "chi2.scheme";
  }
  CHECK(found);
}

TEST_CASE("noise experiment emits paired clean/noisy rows per kind") {
  TempDir tmp("gdpkit_noiseexp_test");
  fs::path manifest_path = write_corpus(tmp.path, 6, 32, 0.1, 11);
  DatasetManifest manifest = load_manifest(manifest_path);

  std::vector<DescriptorKind> kinds = {DescriptorKind::gdp, DescriptorKind::lbp,
                                       DescriptorKind::lbp_u};
  SplitSpec split{3, 4, true};
  TrainConfig config{1.0, 80, 1e-7, 2};
  NoiseSpec noise{0.0, 0.001, 21};
  ExperimentReport report =
      run_noise_experiment(manifest, kinds, 3, noise, split, config);

  REQUIRE(report.rows.size() == 6);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    CHECK(report.rows[2 * i].kind == kinds[i]);
    CHECK(!report.rows[2 * i].noisy);
    CHECK(report.rows[2 * i + 1].kind == kinds[i]);
    CHECK(report.rows[2 * i + 1].noisy);
  }
}

TEST_CASE("zero-variance noise gives identical clean and noisy rows") {
  TempDir tmp("gdpkit_noise0_test");
  fs::path manifest_path = write_corpus(tmp.path, 5, 32, 0.2, 13);
  DatasetManifest manifest = load_manifest(manifest_path);
  ExperimentReport report = run_noise_experiment(
      manifest, {DescriptorKind::gdp}, 3, NoiseSpec{0.0, 0.0, 1},
      SplitSpec{2, 5, true}, TrainConfig{});
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].acc_overall == report.rows[1].acc_overall);
  CHECK(report.rows[0].acc_male == report.rows[1].acc_male);
  CHECK(report.rows[0].acc_female == report.rows[1].acc_female);
}

TEST_CASE("missing image files are reported by name") {
  DatasetManifest manifest = fake_manifest(2, 2);
  CHECK_THROWS_WITH_AS(
      run_block_size_experiment(manifest, {DescriptorKind::gdp}, {1},
                                SplitSpec{2, 0, true}, TrainConfig{}),
      doctest::Contains("m0"), std::runtime_error);
}

TEST_CASE("report csv embeds config and seeds") {
  ExperimentReport report;
  ReportRow row;
  row.config = "gdp-n9";
  row.kind = DescriptorKind::gdp;
  row.n = 9;
  row.feature_len = 648;
  row.acc_overall = 0.959;
  row.acc_male = 0.9594;
  row.acc_female = 0.9598;
  row.noisy = false;
  row.seed = 77;
  report.rows.push_back(row);
  std::string csv = report_to_csv(report);
  CHECK(csv.find("gdp-n9,gdp,9,648,") != std::string::npos);
  CHECK(csv.find(",77\n") != std::string::npos);
  std::string rendered = render_report(report);
  CHECK(rendered.find("95.90%") != std::string::npos);
}
