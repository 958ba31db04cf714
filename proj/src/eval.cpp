#include "gdpkit/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gdpkit/rng.hpp"

namespace gdpkit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string format_sig(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& csv_path) {
  auto lines = read_lines(csv_path);
  if (lines.empty() || lines[0] != "path,label") {
    throw std::runtime_error("manifest: expected header 'path,label' in " +
                             csv_path.string());
  }
  std::filesystem::path base = csv_path.parent_path();
  DatasetManifest manifest;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2 || fields[0].empty()) {
      throw std::runtime_error("manifest: malformed row " + std::to_string(i + 1));
    }
    auto label = parse_label(fields[1]);
    if (!label) {
      throw std::runtime_error("manifest: unknown label '" + fields[1] +
                               "' in row " + std::to_string(i + 1));
    }
    if (!seen.insert(fields[0]).second) {
      throw std::runtime_error("manifest: duplicate path '" + fields[0] + "'");
    }
    std::filesystem::path p(fields[0]);
    if (p.is_relative()) p = base / p;
    manifest.entries.push_back({p.string(), *label});
  }
  return manifest;
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::string out = "path,label\n";
  for (const auto& entry : manifest.entries) {
    out += entry.path + "," + std::string(label_name(entry.label)) + "\n";
  }
  return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(
    const DatasetManifest& manifest, const SplitSpec& spec) {
  if (spec.k < 2) {
    throw std::invalid_argument("kfold: k must be >= 2");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    (manifest.entries[i].label == Label::positive ? pos : neg).push_back(i);
  }
  if (pos.size() < static_cast<std::size_t>(spec.k) ||
      neg.size() < static_cast<std::size_t>(spec.k)) {
    throw std::invalid_argument("kfold: k exceeds the size of a class");
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<std::size_t>> folds(spec.k);
  if (spec.stratified) {
    // Deal each shuffled class in turn with one running cursor, so both the
    // per-class and the total fold sizes stay within one of each other.
    deterministic_shuffle(pos, rng);
    deterministic_shuffle(neg, rng);
    std::size_t cursor = 0;
    for (const auto* group : {&pos, &neg}) {
      for (std::size_t idx : *group) {
        folds[cursor % spec.k].push_back(idx);
        ++cursor;
      }
    }
  } else {
    std::vector<std::size_t> all(manifest.entries.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    deterministic_shuffle(all, rng);
    for (std::size_t i = 0; i < all.size(); ++i) {
      folds[i % spec.k].push_back(all[i]);
    }
  }
  return folds;
}

ClassAccuracy accuracies(const std::vector<Label>& predicted,
                         const std::vector<Label>& actual) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("accuracies: length mismatch");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("accuracies: empty input");
  }
  std::size_t correct = 0, pos_total = 0, pos_correct = 0, neg_total = 0,
              neg_correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    bool ok = predicted[i] == actual[i];
    correct += ok;
    if (actual[i] == Label::positive) {
      ++pos_total;
      pos_correct += ok;
    } else {
      ++neg_total;
      neg_correct += ok;
    }
  }
  auto rate = [](std::size_t num, std::size_t den) {
    return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  return ClassAccuracy{rate(correct, predicted.size()),
                       rate(pos_correct, pos_total),
                       rate(neg_correct, neg_total)};
}

std::string_view classifier_id(ClassifierKind kind) {
  return kind == ClassifierKind::svm ? "svm" : "chi2";
}

std::optional<ClassifierKind> parse_classifier(std::string_view id) {
  if (id == "svm") return ClassifierKind::svm;
  if (id == "chi2" || id == "chi-square") return ClassifierKind::chi_square;
  return std::nullopt;
}

namespace {

std::vector<GrayImage> load_images(const DatasetManifest& manifest) {
  std::vector<GrayImage> images;
  images.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    images.push_back(load_pgm_file(entry.path));
  }
  return images;
}

std::vector<std::vector<double>> extract_all(const std::vector<GrayImage>& images,
                                             DescriptorKind kind, int n) {
  std::vector<std::vector<double>> rows;
  rows.reserve(images.size());
  for (const auto& img : images) {
    rows.push_back(feature_vector(img, kind, n).values);
  }
  return rows;
}

// Trains on everything outside each fold and fills the held-out slots of
// `out` (and `out_alt` from `features_alt`, when given) with predictions.
void cross_validate(const std::vector<std::vector<double>>& features,
                    const std::vector<Label>& labels,
                    const std::vector<std::vector<std::size_t>>& folds,
                    const TrainConfig& train_config, ClassifierKind classifier,
                    std::vector<Label>& out,
                    const std::vector<std::vector<double>>* features_alt,
                    std::vector<Label>* out_alt) {
  for (const auto& fold : folds) {
    std::vector<char> held(labels.size(), 0);
    for (std::size_t idx : fold) held[idx] = 1;
    std::vector<std::vector<double>> train_x;
    std::vector<Label> train_y;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!held[i]) {
        train_x.push_back(features[i]);
        train_y.push_back(labels[i]);
      }
    }
    if (classifier == ClassifierKind::svm) {
      LinearSvmModel model = svm_train(train_x, train_y, train_config);
      for (std::size_t idx : fold) {
        out[idx] = svm_predict(model, features[idx]).label;
        if (out_alt) (*out_alt)[idx] = svm_predict(model, (*features_alt)[idx]).label;
      }
    } else {
      ChiSquarePrototypes protos = fit_prototypes(train_x, train_y);
      for (std::size_t idx : fold) {
        out[idx] = chi_square_classify(protos, features[idx]);
        if (out_alt) (*out_alt)[idx] = chi_square_classify(protos, (*features_alt)[idx]);
      }
    }
  }
}

void append_common_meta(ExperimentReport& report, const SplitSpec& split,
                        const TrainConfig& train_config,
                        ClassifierKind classifier) {
  report.meta.emplace_back("split.k", std::to_string(split.k));
  report.meta.emplace_back("split.seed", std::to_string(split.seed));
  report.meta.emplace_back("split.stratified", split.stratified ? "true" : "false");
  report.meta.emplace_back("classifier", std::string(classifier_id(classifier)));
  if (classifier == ClassifierKind::svm) {
    report.meta.emplace_back("svm.solver", "dual-coordinate-descent-v1");
    report.meta.emplace_back("svm.c", format_sig(train_config.c, 17));
    report.meta.emplace_back("svm.epochs", std::to_string(train_config.epochs));
    report.meta.emplace_back("svm.tolerance", format_sig(train_config.tolerance, 17));
    report.meta.emplace_back("svm.seed", std::to_string(train_config.seed));
  } else {
    report.meta.emplace_back("chi2.scheme", "nearest-class-mean-prototype");
  }
}

}  // namespace

ExperimentReport run_block_size_experiment(
    const DatasetManifest& manifest, const std::vector<DescriptorKind>& kinds,
    const std::vector<int>& n_list, const SplitSpec& split,
    const TrainConfig& train_config, ClassifierKind classifier) {
  ExperimentReport report;
  append_common_meta(report, split, train_config, classifier);
  if (kinds.empty() || n_list.empty()) return report;

  std::vector<GrayImage> images = load_images(manifest);
  std::vector<Label> labels;
  for (const auto& entry : manifest.entries) labels.push_back(entry.label);
  auto folds = stratified_kfold(manifest, split);

  for (DescriptorKind kind : kinds) {
    for (int n : n_list) {
      auto features = extract_all(images, kind, n);
      std::vector<Label> predicted(labels.size(), Label::positive);
      cross_validate(features, labels, folds, train_config, classifier,
                     predicted, nullptr, nullptr);
      ClassAccuracy acc = accuracies(predicted, labels);
      ReportRow row;
      row.config = std::string(kind_id(kind)) + "-n" + std::to_string(n);
      row.kind = kind;
      row.n = n;
      row.feature_len = n * n * bins(kind);
      row.acc_overall = acc.overall;
      row.acc_male = acc.positive;
      row.acc_female = acc.negative;
      row.noisy = false;
      row.seed = split.seed;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

ExperimentReport run_noise_experiment(
    const DatasetManifest& manifest, const std::vector<DescriptorKind>& kinds,
    int n, const NoiseSpec& noise, const SplitSpec& split,
    const TrainConfig& train_config, ClassifierKind classifier) {
  ExperimentReport report;
  append_common_meta(report, split, train_config, classifier);
  report.meta.emplace_back("noise.mean", format_sig(noise.mean, 17));
  report.meta.emplace_back("noise.variance", format_sig(noise.variance, 17));
  report.meta.emplace_back("noise.seed", std::to_string(noise.seed));
  report.meta.emplace_back("noise.rng", kRngId);
  if (kinds.empty()) return report;

  std::vector<GrayImage> images = load_images(manifest);
  std::vector<Label> labels;
  for (const auto& entry : manifest.entries) labels.push_back(entry.label);
  auto folds = stratified_kfold(manifest, split);

  // Each image gets its own derived noise seed so the draws stay
  // independent across images while the whole run replays from noise.seed.
  std::vector<GrayImage> noisy_images;
  noisy_images.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    NoiseSpec per_image = noise;
    per_image.seed = mix_seed(noise.seed, i);
    noisy_images.push_back(add_gaussian_noise(images[i], per_image));
  }

  for (DescriptorKind kind : kinds) {
    auto clean_features = extract_all(images, kind, n);
    auto noisy_features = extract_all(noisy_images, kind, n);
    std::vector<Label> predicted_clean(labels.size(), Label::positive);
    std::vector<Label> predicted_noisy(labels.size(), Label::positive);
    cross_validate(clean_features, labels, folds, train_config, classifier,
                   predicted_clean, &noisy_features, &predicted_noisy);

    for (bool noisy : {false, true}) {
      ClassAccuracy acc =
          accuracies(noisy ? predicted_noisy : predicted_clean, labels);
      ReportRow row;
      row.config = std::string(kind_id(kind)) + "-n" + std::to_string(n) +
                   (noisy ? "-noisy" : "-clean");
      row.kind = kind;
      row.n = n;
      row.feature_len = n * n * bins(kind);
      row.acc_overall = acc.overall;
      row.acc_male = acc.positive;
      row.acc_female = acc.negative;
      row.noisy = noisy;
      row.seed = split.seed;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out =
      "config,kind,n,feature_len,acc_overall,acc_male,acc_female,noise,seed\n";
  for (const auto& row : report.rows) {
    out += row.config + "," + std::string(kind_id(row.kind)) + "," +
           std::to_string(row.n) + "," + std::to_string(row.feature_len) + "," +
           format_sig(row.acc_overall, 17) + "," + format_sig(row.acc_male, 17) +
           "," + format_sig(row.acc_female, 17) + "," + (row.noisy ? "1" : "0") +
           "," + std::to_string(row.seed) + "\n";
  }
  return out;
}

std::string render_report(const ExperimentReport& report) {
  std::ostringstream out;
  out << "config          kind    blocks  feature_len  overall   male      female    noise\n";
  for (const auto& row : report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-15s %-7s %dx%-5d %-12d %-9s %-9s %-9s %s\n",
                  row.config.c_str(), std::string(kind_name(row.kind)).c_str(),
                  row.n, row.n, row.feature_len,
                  format_pct(row.acc_overall).c_str(),
                  format_pct(row.acc_male).c_str(),
                  format_pct(row.acc_female).c_str(), row.noisy ? "yes" : "no");
    out << line;
  }
  out << "--\n";
  for (const auto& [key, value] : report.meta) {
    out << key << "=" << value << "\n";
  }
  return out.str();
}

std::string feature_csv(const std::vector<Label>& labels,
                        const std::vector<std::vector<double>>& features) {
  if (labels.size() != features.size()) {
    throw std::invalid_argument("feature_csv: label and row counts differ");
  }
  std::size_t d = features.empty() ? 0 : features.front().size();
  std::string out = "label";
  for (std::size_t j = 1; j <= d; ++j) out += ",f" + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != d) {
      throw std::invalid_argument("feature_csv: rows have mixed dimensions");
    }
    out += std::string(label_name(labels[i]));
    for (double v : features[i]) {
      out += ",";
      out += format_sig(v, 10);
    }
    out += "\n";
  }
  return out;
}

std::pair<std::vector<Label>, std::vector<std::vector<double>>> parse_feature_csv(
    const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("feature csv: empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.substr(0, 5) != "label") {
    throw std::runtime_error("feature csv: expected 'label,f1,...' header");
  }
  std::size_t d = split_csv_line(line).size() - 1;

  std::vector<Label> labels;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != d + 1) {
      throw std::runtime_error("feature csv: row " + std::to_string(lineno) +
                               " has " + std::to_string(fields.size() - 1) +
                               " values, expected " + std::to_string(d));
    }
    auto label = parse_label(fields[0]);
    if (!label) {
      throw std::runtime_error("feature csv: unknown label '" + fields[0] +
                               "' in row " + std::to_string(lineno));
    }
    labels.push_back(*label);
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) {
      try {
        row[j] = std::stod(fields[j + 1]);
      } catch (const std::exception&) {
        throw std::runtime_error("feature csv: bad value in row " +
                                 std::to_string(lineno));
      }
    }
    rows.push_back(std::move(row));
  }
  return {std::move(labels), std::move(rows)};
}

std::pair<std::vector<Label>, std::vector<std::vector<double>>> load_feature_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open feature csv: " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_feature_csv(text);
}

}  // namespace gdpkit
