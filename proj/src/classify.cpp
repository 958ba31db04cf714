#include "gdpkit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gdpkit/rng.hpp"

namespace gdpkit {

std::string_view label_name(Label l) {
  return l == Label::positive ? "male" : "female";
}

std::optional<Label> parse_label(std::string_view name) {
  if (name == "male") return Label::positive;
  if (name == "female") return Label::negative;
  return std::nullopt;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void check_matrix(const std::vector<std::vector<double>>& features,
                  const std::vector<Label>& labels) {
  if (features.size() != labels.size()) {
    throw std::invalid_argument("svm: feature and label counts differ");
  }
  if (features.size() < 2) {
    throw std::invalid_argument("svm: need at least two training examples");
  }
  std::size_t d = features.front().size();
  for (const auto& row : features) {
    if (row.size() != d) {
      throw std::invalid_argument("svm: feature rows have mixed dimensions");
    }
  }
  bool has_pos = false, has_neg = false;
  for (Label l : labels) {
    (l == Label::positive ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("svm: training data must contain both classes");
  }
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double svm_objective(const std::vector<double>& weights, double bias,
                     const std::vector<std::vector<double>>& features,
                     const std::vector<Label>& labels, double c) {
  double obj = 0.5 * dot(weights, weights);
  for (std::size_t i = 0; i < features.size(); ++i) {
    double margin = label_sign(labels[i]) * (dot(weights, features[i]) + bias);
    obj += c * std::max(0.0, 1.0 - margin);
  }
  return obj;
}

// Coordinate descent on the dual of the L1-loss problem, with the bias
// handled as an unregularized-looking augmented feature of constant 1
// (liblinear's scheme). One dual variable per example, box [0, c]:
//
//   alpha_i <- clip(alpha_i - (y_i (w.x_i + b) - 1) / (x_i.x_i + 1), 0, c)
//
// Example order is reshuffled every epoch from config.seed. The primal
// objective (without the bias term, as reported) is evaluated after each
// epoch; the best iterate seen is returned, so it can never be worse than
// the zero start.
LinearSvmModel svm_train(const std::vector<std::vector<double>>& features,
                         const std::vector<Label>& labels,
                         const TrainConfig& config) {
  check_matrix(features, labels);
  if (config.c <= 0.0) {
    throw std::invalid_argument("svm: c must be > 0");
  }
  if (config.epochs <= 0) {
    throw std::invalid_argument("svm: epochs must be > 0");
  }
  if (config.tolerance <= 0.0) {
    throw std::invalid_argument("svm: tolerance must be > 0");
  }

  const std::size_t count = features.size();
  const std::size_t d = features.front().size();

  std::vector<double> q_diag(count);
  for (std::size_t i = 0; i < count; ++i) {
    q_diag[i] = dot(features[i], features[i]) + 1.0;
  }

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> alpha(count, 0.0);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);

  LinearSvmModel model;
  model.config = config;
  model.weights = w;
  model.bias = b;
  model.final_objective = svm_objective(w, b, features, labels, config.c);

  double prev_obj = model.final_objective;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    for (std::size_t i : order) {
      double y = label_sign(labels[i]);
      double g = y * (dot(w, features[i]) + b) - 1.0;
      if ((alpha[i] == 0.0 && g >= 0.0) || (alpha[i] == config.c && g <= 0.0)) {
        continue;
      }
      double next = std::clamp(alpha[i] - g / q_diag[i], 0.0, config.c);
      double delta = next - alpha[i];
      if (delta == 0.0) continue;
      alpha[i] = next;
      const auto& x = features[i];
      for (std::size_t j = 0; j < d; ++j) w[j] += delta * y * x[j];
      b += delta * y;
    }
    double obj = svm_objective(w, b, features, labels, config.c);
    model.epochs_run = epoch;
    if (obj < model.final_objective) {
      model.weights = w;
      model.bias = b;
      model.final_objective = obj;
    }
    if (std::abs(prev_obj - obj) < config.tolerance) break;
    prev_obj = obj;
  }
  return model;
}

Prediction svm_predict(const LinearSvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw std::invalid_argument("svm_predict: feature dimension " +
                                std::to_string(x.size()) + " != model dimension " +
                                std::to_string(model.dim()));
  }
  double score = dot(model.weights, x) + model.bias;
  return Prediction{score >= 0.0 ? Label::positive : Label::negative, score};
}

double chi_square_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("chi_square_distance: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0.0 || b[i] < 0.0) {
      throw std::invalid_argument("chi_square_distance: negative entries");
    }
    double denom = a[i] + b[i];
    if (denom == 0.0) continue;
    double diff = a[i] - b[i];
    sum += diff * diff / denom;
  }
  return sum;
}

ChiSquarePrototypes fit_prototypes(const std::vector<std::vector<double>>& features,
                                   const std::vector<Label>& labels) {
  check_matrix(features, labels);
  std::size_t d = features.front().size();
  ChiSquarePrototypes protos;
  protos.positive.assign(d, 0.0);
  protos.negative.assign(d, 0.0);
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto& acc = labels[i] == Label::positive ? protos.positive : protos.negative;
    (labels[i] == Label::positive ? n_pos : n_neg) += 1;
    for (std::size_t j = 0; j < d; ++j) acc[j] += features[i][j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    protos.positive[j] /= static_cast<double>(n_pos);
    protos.negative[j] /= static_cast<double>(n_neg);
  }
  return protos;
}

Label chi_square_classify(const ChiSquarePrototypes& protos,
                          std::span<const double> x) {
  if (protos.positive.size() != protos.negative.size() ||
      x.size() != protos.positive.size()) {
    throw std::invalid_argument("chi_square_classify: dimension mismatch");
  }
  double d_pos = chi_square_distance(protos.positive, x);
  double d_neg = chi_square_distance(protos.negative, x);
  return d_pos <= d_neg ? Label::positive : Label::negative;
}

std::string save_model(const LinearSvmModel& model) {
  std::string out = std::string(kSvmModelMagic) + "\n";
  out += "dim=" + std::to_string(model.dim()) + "\n";
  out += "bias=" + format_real(model.bias) + "\n";
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (i) out += ' ';
    out += format_real(model.weights[i]);
  }
  out += '\n';
  out += "meta.c=" + format_real(model.config.c) + "\n";
  out += "meta.epochs=" + std::to_string(model.config.epochs) + "\n";
  out += "meta.tolerance=" + format_real(model.config.tolerance) + "\n";
  out += "meta.seed=" + std::to_string(model.config.seed) + "\n";
  out += "meta.epochs_run=" + std::to_string(model.epochs_run) + "\n";
  out += "meta.final_objective=" + format_real(model.final_objective) + "\n";
  for (const auto& [key, value] : model.extra_meta) {
    out += "meta." + key + "=" + value + "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("model file: bad ") + what + " value");
  }
}

}  // namespace

LinearSvmModel load_model(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0].substr(0, 10) != "GDPKIT-SVM") {
    throw std::runtime_error("model file: bad magic");
  }
  if (lines[0] != kSvmModelMagic) {
    throw std::runtime_error("model file: unsupported version: " + lines[0]);
  }
  if (lines.size() < 4) {
    throw std::runtime_error("model file: truncated");
  }
  if (lines[1].substr(0, 4) != "dim=") {
    throw std::runtime_error("model file: missing dim line");
  }
  std::size_t dim = 0;
  try {
    dim = std::stoul(lines[1].substr(4));
  } catch (const std::exception&) {
    throw std::runtime_error("model file: bad dim value");
  }
  if (lines[2].substr(0, 5) != "bias=") {
    throw std::runtime_error("model file: missing bias line");
  }

  LinearSvmModel model;
  model.bias = parse_real(lines[2].substr(5), "bias");
  std::istringstream weights(lines[3]);
  model.weights.reserve(dim);
  double v;
  while (weights >> v) model.weights.push_back(v);
  if (model.weights.size() != dim) {
    throw std::runtime_error("model file: weight payload does not match dim");
  }

  for (std::size_t i = 4; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (line.substr(0, 5) != "meta." ||
        line.find('=') == std::string::npos) {
      throw std::runtime_error("model file: malformed meta line: " + line);
    }
    std::size_t eq = line.find('=');
    std::string key = line.substr(5, eq - 5);
    std::string value = line.substr(eq + 1);
    if (key == "c") model.config.c = parse_real(value, "meta.c");
    else if (key == "epochs") model.config.epochs = std::stoi(value);
    else if (key == "tolerance") model.config.tolerance = parse_real(value, "meta.tolerance");
    else if (key == "seed") model.config.seed = std::stoull(value);
    else if (key == "epochs_run") model.epochs_run = std::stoi(value);
    else if (key == "final_objective") model.final_objective = parse_real(value, "meta.final_objective");
    else model.extra_meta[key] = value;
  }
  return model;
}

void save_model_file(const LinearSvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path.string());
  }
  out << save_model(model);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

LinearSvmModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return load_model(text);
}

}  // namespace gdpkit
