#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gdpkit/classify.hpp"
#include "gdpkit/features.hpp"
#include "gdpkit/imagecore.hpp"

namespace gdpkit {

struct ManifestEntry {
  std::string path;
  Label label = Label::positive;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

// CSV with header "path,label"; label is male or female. Relative paths are
// resolved against the CSV's directory, so a corpus can be moved as a unit.
DatasetManifest load_manifest(const std::filesystem::path& csv_path);
std::string manifest_to_csv(const DatasetManifest& manifest);

struct SplitSpec {
  int k = 5;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Disjoint folds of manifest indices covering every entry. Stratified mode
// keeps each fold's class counts within one of exact proportionality.
std::vector<std::vector<std::size_t>> stratified_kfold(
    const DatasetManifest& manifest, const SplitSpec& spec);

struct ClassAccuracy {
  double overall = 0.0;
  double positive = 0.0;  // male column
  double negative = 0.0;  // female column
};

ClassAccuracy accuracies(const std::vector<Label>& predicted,
                         const std::vector<Label>& actual);

enum class ClassifierKind { svm, chi_square };

std::string_view classifier_id(ClassifierKind kind);  // "svm" / "chi2"
std::optional<ClassifierKind> parse_classifier(std::string_view id);

struct ReportRow {
  std::string config;  // e.g. "gdp-n9" or "gdp-n9-noisy"
  DescriptorKind kind = DescriptorKind::gdp;
  int n = 0;
  int feature_len = 0;
  double acc_overall = 0.0;
  double acc_male = 0.0;
  double acc_female = 0.0;
  bool noisy = false;
  std::uint64_t seed = 0;  // split seed for this row
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  // Replay recipe: rng id, split protocol, classifier settings, noise spec.
  std::vector<std::pair<std::string, std::string>> meta;
};

// Cross-validated accuracy per (kind, n): features are extracted once per
// image, then each fold's model is trained on the remaining folds and the
// held-out predictions are pooled before scoring.
ExperimentReport run_block_size_experiment(
    const DatasetManifest& manifest, const std::vector<DescriptorKind>& kinds,
    const std::vector<int>& n_list, const SplitSpec& split,
    const TrainConfig& train_config,
    ClassifierKind classifier = ClassifierKind::svm);

// Trains on clean images only and scores each held-out fold twice: on the
// clean images and on noise-injected copies. Two rows per kind.
ExperimentReport run_noise_experiment(
    const DatasetManifest& manifest, const std::vector<DescriptorKind>& kinds,
    int n, const NoiseSpec& noise, const SplitSpec& split,
    const TrainConfig& train_config,
    ClassifierKind classifier = ClassifierKind::svm);

// Data rows only: config,kind,n,feature_len,acc_overall,acc_male,acc_female,
// noise,seed. Accuracies at full precision.
std::string report_to_csv(const ExperimentReport& report);

// Human-readable table (percentages, two decimals) plus the meta block.
std::string render_report(const ExperimentReport& report);

// Feature CSV: header "label,f1,...,fd", one row per image, values with
// 10 significant digits.
std::string feature_csv(const std::vector<Label>& labels,
                        const std::vector<std::vector<double>>& features);
std::pair<std::vector<Label>, std::vector<std::vector<double>>> parse_feature_csv(
    const std::string& text);
std::pair<std::vector<Label>, std::vector<std::vector<double>>> load_feature_csv(
    const std::filesystem::path& path);

}  // namespace gdpkit
