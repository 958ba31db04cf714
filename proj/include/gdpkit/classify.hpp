#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gdpkit {

// Binary labels. Dataset convention: male maps to positive (+1), female to
// negative (-1).
enum class Label { positive, negative };

inline double label_sign(Label l) { return l == Label::positive ? 1.0 : -1.0; }
std::string_view label_name(Label l);  // "male" / "female"
std::optional<Label> parse_label(std::string_view name);

struct TrainConfig {
  double c = 1.0;           // soft-margin penalty
  int epochs = 500;         // hard cap on training passes
  double tolerance = 1e-6;  // stop when the objective change drops below this
  std::uint64_t seed = 0;   // per-epoch example ordering
};

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;        // echo of the training configuration
  int epochs_run = 0;
  double final_objective = 0.0;
  std::map<std::string, std::string> extra_meta;  // free-form, round-tripped

  std::size_t dim() const { return weights.size(); }
};

// Primal soft-margin objective: 0.5*||w||^2 + c * sum of hinge losses.
double svm_objective(const std::vector<double>& weights, double bias,
                     const std::vector<std::vector<double>>& features,
                     const std::vector<Label>& labels, double c);

// Deterministic soft-margin trainer. Same inputs give a bit-identical
// model; the returned iterate never has a worse objective than the zero
// starting point.
LinearSvmModel svm_train(const std::vector<std::vector<double>>& features,
                         const std::vector<Label>& labels,
                         const TrainConfig& config);

struct Prediction {
  Label label = Label::positive;
  double score = 0.0;  // w . x + b
};

// score >= 0 predicts positive (ties go to positive).
Prediction svm_predict(const LinearSvmModel& model, std::span<const double> x);

// Sum over coordinates of (a-b)^2 / (a+b); terms with a+b == 0 contribute 0.
// Inputs must be non-negative.
double chi_square_distance(std::span<const double> a, std::span<const double> b);

// Per-class mean feature vectors.
struct ChiSquarePrototypes {
  std::vector<double> positive;
  std::vector<double> negative;
};

ChiSquarePrototypes fit_prototypes(const std::vector<std::vector<double>>& features,
                                   const std::vector<Label>& labels);

// Label of the nearer prototype in chi-square distance; tie -> positive.
Label chi_square_classify(const ChiSquarePrototypes& protos,
                          std::span<const double> x);

// Versioned text format:
//   GDPKIT-SVM v1
//   dim=<d>
//   bias=<real>
//   <d space-separated weights>
//   meta.<key>=<value> ...
// Reals carry 17 significant digits, so the round trip is exact.
inline constexpr const char* kSvmModelMagic = "GDPKIT-SVM v1";

std::string save_model(const LinearSvmModel& model);
LinearSvmModel load_model(std::string_view text);
void save_model_file(const LinearSvmModel& model, const std::filesystem::path& path);
LinearSvmModel load_model_file(const std::filesystem::path& path);

}  // namespace gdpkit
