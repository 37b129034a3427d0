#include "seizure/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "binary_io.hpp"
#include "seizure/layers.hpp"

namespace seizure {

double quantize4(double p) { return std::round(p * kQuantumScale) / kQuantumScale; }

ClassProbabilities quantize4(const ClassProbabilities& p) {
  ClassProbabilities q;
  for (std::size_t k = 0; k < kNumClasses; ++k) q.values[k] = quantize4(p.values[k]);
  return q;
}

bool is_quantized(double value) {
  return value >= 0.0 && value <= 1.0 && quantize4(value) == value;
}

bool is_quantized(const ClassProbabilities& p) {
  return std::all_of(p.values.begin(), p.values.end(), [](double v) { return is_quantized(v); });
}

CombinerInput build_input(const ClassProbabilities& p_eeg, const ClassProbabilities& p_ecg) {
  if (!is_quantized(p_eeg) || !is_quantized(p_ecg)) {
    throw std::invalid_argument("combiner inputs must be quantized to 4 decimal digits");
  }
  CombinerInput in;
  std::copy(p_eeg.values.begin(), p_eeg.values.end(), in.x.begin());
  std::copy(p_ecg.values.begin(), p_ecg.values.end(), in.x.begin() + kNumClasses);
  return in;
}

std::array<double, kNumClasses> lr_logits(const CombinerInput& x, const CombinerParams& params) {
  std::array<double, kNumClasses> z{};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    double acc = params.b[k];
    for (std::size_t i = 0; i < kCombinerInputs; ++i) acc += params.W[k][i] * x.x[i];
    z[k] = acc;
  }
  return z;
}

ClassProbabilities lr_forward(const CombinerInput& x, const CombinerParams& params) {
  const auto z = lr_logits(x, params);
  return softmax(z);
}

LabelClass argmax_class(std::span<const double, kNumClasses> scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return static_cast<LabelClass>(best);
}

LabelClass predict(const ClassProbabilities& p) { return argmax_class(p.values); }

CombinerLoss lr_loss_and_gradient(std::span<const CombinerExample> dataset,
                                  const CombinerParams& params) {
  if (dataset.empty()) throw std::invalid_argument("combiner dataset is empty");
  CombinerLoss out;
  const double inv_n = 1.0 / static_cast<double>(dataset.size());
  for (const auto& ex : dataset) {
    const auto p = lr_forward(ex.input, params);
    const std::size_t t = index(ex.label);
    out.loss -= std::log(std::max(p.values[t], kProbabilityClamp)) * inv_n;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const double residual = (p.values[k] - (k == t ? 1.0 : 0.0)) * inv_n;
      out.gradient.b[k] += residual;
      for (std::size_t i = 0; i < kCombinerInputs; ++i) {
        out.gradient.W[k][i] += residual * ex.input.x[i];
      }
    }
  }
  return out;
}

CombinerFit lr_fit(std::span<const CombinerExample> dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("combiner dataset is empty");
  for (const auto& ex : dataset) {
    for (double v : ex.input.x) {
      if (!is_quantized(v)) {
        throw std::invalid_argument("combiner training inputs must be quantized");
      }
    }
  }
  if (!(cfg.learning_rate > 0.0) || cfg.max_epochs == 0) {
    throw std::invalid_argument("combiner needs a positive learning rate and epoch budget");
  }
  CombinerFit fit;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto step = lr_loss_and_gradient(dataset, fit.params);
    fit.loss_history.push_back(step.loss);
    double max_norm = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      max_norm = std::max(max_norm, std::abs(step.gradient.b[k]));
      for (double g : step.gradient.W[k]) max_norm = std::max(max_norm, std::abs(g));
    }
    if (max_norm < kCombinerGradientTolerance) {
      fit.converged = true;
      break;
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      fit.params.b[k] -= cfg.learning_rate * step.gradient.b[k];
      for (std::size_t i = 0; i < kCombinerInputs; ++i) {
        fit.params.W[k][i] -= cfg.learning_rate * step.gradient.W[k][i];
      }
    }
    ++fit.epochs;
  }
  return fit;
}

CombinerParams lr_train(std::span<const CombinerExample> dataset, const TrainConfig& cfg) {
  return lr_fit(dataset, cfg).params;
}

void save_combiner(const CombinerParams& params, const std::filesystem::path& path) {
  nlohmann::json j;
  j["W"] = params.W;
  j["b"] = params.b;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  detail::write_text_file(path, j.dump(2) + "\n");
}

CombinerParams load_combiner(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("combiner file not found: " + path.string());
  try {
    const auto j = nlohmann::json::parse(detail::read_text_file(path));
    CombinerParams p;
    const auto& W = j.at("W");
    const auto& b = j.at("b");
    if (W.size() != kNumClasses || b.size() != kNumClasses) {
      throw ShapeError(path.string() + ": combiner must be 5x10 weights and 5 biases");
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (W[k].size() != kCombinerInputs) {
        throw ShapeError(path.string() + ": combiner weight rows need 10 columns");
      }
      for (std::size_t i = 0; i < kCombinerInputs; ++i) p.W[k][i] = W[k][i].get<double>();
      p.b[k] = b[k].get<double>();
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace seizure
