// gdpkit command line: synthesize corpora, extract block-histogram
// features, train/apply the linear SVM, and run the evaluation harness.
// Exit codes: 0 success, 1 runtime/data error, 2 usage or validation error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdpkit/eval.hpp"
#include "gdpkit/rng.hpp"

namespace fs = std::filesystem;
using namespace gdpkit;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    if (comma > start) items.push_back(csv.substr(start, comma - start));
    start = comma + 1;
  }
  return items;
}

std::vector<DescriptorKind> parse_kind_list(const std::string& csv) {
  std::vector<DescriptorKind> kinds;
  for (const auto& item : split_list(csv)) {
    auto kind = parse_kind(item);
    if (!kind) {
      throw CLI::ValidationError("--kinds", "unknown descriptor kind '" + item + "'");
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

std::vector<int> parse_int_list(const std::string& csv, const char* flag) {
  std::vector<int> values;
  for (const auto& item : split_list(csv)) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "bad block count '" + item + "'");
    }
  }
  return values;
}

struct SynthArgs {
  int per_class = 0;
  int size = 64;
  int period = 8;
  double jitter = 0.1;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_synth(const SynthArgs& args) {
  fs::path out_dir(args.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << args.out
              << "': " << ec.message() << "\n";
    return 2;
  }

  SyntheticSpec spec;
  spec.images_per_class = args.per_class;
  spec.image_size = args.size;
  spec.grating_period = args.period;
  spec.jitter_amplitude = args.jitter;
  spec.seed = args.seed;
  SyntheticCorpus corpus = make_synthetic_textures(spec);

  DatasetManifest manifest;
  try {
    for (int i = 0; i < args.per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "h_%04d.pgm", i);
      save_pgm_file(corpus.horizontal[i], out_dir / name);
      manifest.entries.push_back({name, Label::positive});
    }
    for (int i = 0; i < args.per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "v_%04d.pgm", i);
      save_pgm_file(corpus.vertical[i], out_dir / name);
      manifest.entries.push_back({name, Label::negative});
    }
    write_text_file(out_dir / "manifest.csv", manifest_to_csv(manifest));
  } catch (const std::exception& e) {
    std::cerr << "error: output directory not writable: " << e.what() << "\n";
    return 2;
  }
  std::cout << "wrote " << 2 * args.per_class << " images and manifest.csv to "
            << out_dir.string() << "\n";
  return 0;
}

struct ExtractArgs {
  std::string manifest;
  std::string kind = "gdp";
  int n = 9;
  std::string out;
};

int cmd_extract(const ExtractArgs& args) {
  DescriptorKind kind = *parse_kind(args.kind);
  DatasetManifest manifest = load_manifest(args.manifest);
  std::vector<Label> labels;
  std::vector<std::vector<double>> rows;
  for (const auto& entry : manifest.entries) {
    GrayImage img = load_pgm_file(entry.path);
    rows.push_back(feature_vector(img, kind, args.n).values);
    labels.push_back(entry.label);
  }
  write_text_file(args.out, feature_csv(labels, rows));
  std::cout << "wrote " << rows.size() << " rows x "
            << (rows.empty() ? 0 : rows.front().size()) << " features to "
            << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string features;
  std::string out;
  TrainConfig config;
};

int cmd_train(const TrainArgs& args) {
  auto [labels, rows] = load_feature_csv(args.features);
  LinearSvmModel model = svm_train(rows, labels, args.config);
  save_model_file(model, args.out);
  std::cout << "trained on " << rows.size() << " rows (dim " << model.dim()
            << "), epochs_run=" << model.epochs_run
            << ", objective=" << model.final_objective << "\n";
  std::cout << "model written to " << args.out << "\n";
  return 0;
}

struct PredictArgs {
  std::string features;
  std::string model;
  std::string out;
};

int cmd_predict(const PredictArgs& args) {
  auto [labels, rows] = load_feature_csv(args.features);
  (void)labels;  // predictions ignore any labels present in the csv
  LinearSvmModel model = load_model_file(args.model);
  std::string out = "row,predicted,score\n";
  char buf[64];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Prediction p = svm_predict(model, rows[i]);
    std::snprintf(buf, sizeof buf, "%zu,%s,%.10g\n", i,
                  std::string(label_name(p.label)).c_str(), p.score);
    out += buf;
  }
  if (args.out.empty()) {
    std::cout << out;
  } else {
    write_text_file(args.out, out);
    std::cout << "wrote " << rows.size() << " predictions to " << args.out << "\n";
  }
  return 0;
}

struct EvalArgs {
  std::string manifest;
  std::string kinds = "gdp";
  std::string blocks = "9";
  std::string classifier = "svm";
  SplitSpec split;
  TrainConfig config;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  auto kinds = parse_kind_list(args.kinds);
  auto n_list = parse_int_list(args.blocks, "--blocks");
  auto classifier = parse_classifier(args.classifier);
  if (!classifier) {
    throw CLI::ValidationError("--classifier", "expected svm or chi2");
  }
  DatasetManifest manifest = load_manifest(args.manifest);
  ExperimentReport report = run_block_size_experiment(
      manifest, kinds, n_list, args.split, args.config, *classifier);
  std::cout << render_report(report);
  if (!args.out.empty()) {
    write_text_file(args.out, report_to_csv(report));
    std::cout << "report csv written to " << args.out << "\n";
  }
  return 0;
}

struct NoiseBenchArgs {
  std::string manifest;
  std::string kinds = "gdp,lbp,lbp_u";
  int n = 9;
  std::string classifier = "svm";
  NoiseSpec noise{0.0, 0.001, 1};
  SplitSpec split;
  TrainConfig config;
  std::string out;
};

int cmd_noise_bench(const NoiseBenchArgs& args) {
  auto kinds = parse_kind_list(args.kinds);
  auto classifier = parse_classifier(args.classifier);
  if (!classifier) {
    throw CLI::ValidationError("--classifier", "expected svm or chi2");
  }
  DatasetManifest manifest = load_manifest(args.manifest);
  ExperimentReport report = run_noise_experiment(
      manifest, kinds, args.n, args.noise, args.split, args.config, *classifier);
  std::cout << render_report(report);
  if (!args.out.empty()) {
    write_text_file(args.out, report_to_csv(report));
    std::cout << "report csv written to " << args.out << "\n";
  }
  return 0;
}

void add_config_file(CLI::App* sub) {
  // Placeholder for help output; the actual file is expanded in main()
  // before parsing, so explicit flags always win.
  sub->add_option("--config", "read defaults from a key=value file");
}

// Splices one "--config FILE" out of the args and appends the file's
// entries as --key=value tokens. Keys already present on the command line
// are skipped; unknown keys surface as ordinary parse errors. Returns
// false when no --config was present.
bool expand_one_config(std::vector<std::string>& args) {
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw CLI::ValidationError("--config", "expects a file path");
      }
      file = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (file.empty()) return false;

  std::ifstream in(file);
  if (!in) {
    throw CLI::ValidationError("--config", "cannot open '" + file + "'");
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos || line[begin] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == begin) {
      throw CLI::ValidationError(
          "--config", "line " + std::to_string(lineno) + " is not key=value");
    }
    std::string key = line.substr(begin, eq - begin);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    if (key == "config") {
      throw CLI::ValidationError("--config", "config files cannot nest");
    }
    std::size_t vbegin = value.find_first_not_of(" \t");
    value = vbegin == std::string::npos ? "" : value.substr(vbegin);

    bool overridden = false;
    for (const auto& arg : args) {
      if (arg == "--" + key || arg.rfind("--" + key + "=", 0) == 0) {
        overridden = true;
        break;
      }
    }
    if (!overridden) args.push_back("--" + key + "=" + value);
  }
  return true;
}

std::vector<std::string> expand_config_args(std::vector<std::string> args) {
  while (expand_one_config(args)) {
  }
  return args;
}

void add_split_options(CLI::App* sub, SplitSpec& split) {
  sub->add_option("--folds", split.k, "cross-validation folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  sub->add_option("--seed", split.seed, "fold assignment seed")
      ->capture_default_str();
  sub->add_flag("--stratified,!--no-stratified", split.stratified,
                "preserve class proportions per fold")
      ->capture_default_str();
}

void add_svm_options(CLI::App* sub, TrainConfig& config,
                     const std::string& seed_flag = "--svm-seed") {
  sub->add_option("--c", config.c, "soft-margin penalty")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--epochs", config.epochs, "max training passes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tolerance", config.tolerance,
                  "stop when the objective change drops below this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option(seed_flag, config.seed, "training shuffle seed")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gdpkit: gradient-direction-pattern texture descriptors, "
               "LBP baselines, linear SVM, and an evaluation harness"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "synth", "write a labeled synthetic grating corpus as PGM + manifest");
  synth_cmd->add_option("--per-class", synth.per_class, "images per class")
      ->required()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--size", synth.size, "square image size in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--period", synth.period, "grating period in pixels")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  synth_cmd->add_option("--jitter", synth.jitter, "per-pixel jitter amplitude")
      ->check(CLI::Range(0.0, 0.5))
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "corpus seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  add_config_file(synth_cmd);

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand(
      "extract", "compute block-histogram feature vectors into a CSV");
  extract_cmd->add_option("--manifest", extract.manifest, "manifest csv")
      ->required()
      ->check(CLI::ExistingFile);
  extract_cmd
      ->add_option("--kind", extract.kind, "descriptor: gdp, lbp or lbp_u")
      ->check(CLI::IsMember({"gdp", "lbp", "lbp_u"}))
      ->capture_default_str();
  extract_cmd->add_option("--blocks", extract.n, "blocks per image side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract_cmd->add_option("--out", extract.out, "output feature csv")->required();
  add_config_file(extract_cmd);

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train", "train the linear SVM on a feature CSV");
  train_cmd->add_option("--features", train.features, "feature csv")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "output model file")->required();
  add_svm_options(train_cmd, train.config, "--seed");
  add_config_file(train_cmd);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand(
      "predict", "apply a trained model to a feature CSV");
  predict_cmd->add_option("--features", predict.features, "feature csv")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--model", predict.model, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict.out,
                          "output csv (stdout when omitted)");
  add_config_file(predict_cmd);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand(
      "eval", "cross-validated accuracy across descriptors and block counts");
  eval_cmd->add_option("--manifest", eval.manifest, "manifest csv")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--kinds", eval.kinds, "comma list of descriptors")
      ->capture_default_str();
  eval_cmd->add_option("--blocks", eval.blocks, "comma list of block counts")
      ->capture_default_str();
  eval_cmd->add_option("--classifier", eval.classifier, "svm or chi2")
      ->check(CLI::IsMember({"svm", "chi2"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "report csv path");
  add_split_options(eval_cmd, eval.split);
  add_svm_options(eval_cmd, eval.config);
  add_config_file(eval_cmd);

  NoiseBenchArgs bench;
  auto* bench_cmd = app.add_subcommand(
      "noise-bench", "paired clean/noisy accuracy per descriptor");
  bench_cmd->add_option("--manifest", bench.manifest, "manifest csv")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--kinds", bench.kinds, "comma list of descriptors")
      ->capture_default_str();
  bench_cmd->add_option("--blocks", bench.n, "blocks per image side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--classifier", bench.classifier, "svm or chi2")
      ->check(CLI::IsMember({"svm", "chi2"}))
      ->capture_default_str();
  bench_cmd->add_option("--noise-mean", bench.noise.mean, "noise mean, [0,1] scale")
      ->capture_default_str();
  bench_cmd
      ->add_option("--noise-variance", bench.noise.variance,
                   "noise variance, [0,1] scale squared")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--noise-seed", bench.noise.seed, "noise seed")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "report csv path");
  add_split_options(bench_cmd, bench.split);
  add_svm_options(bench_cmd, bench.config);
  add_config_file(bench_cmd);

  try {
    std::vector<std::string> args =
        expand_config_args(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (extract_cmd->parsed()) return cmd_extract(extract);
    if (train_cmd->parsed()) return cmd_train(train);
    if (predict_cmd->parsed()) return cmd_predict(predict);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (bench_cmd->parsed()) return cmd_noise_bench(bench);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
