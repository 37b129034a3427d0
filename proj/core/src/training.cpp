#include "seizure/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace seizure {

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0)) throw std::invalid_argument("beta1 must be in (0,1)");
  if (!(cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) throw std::invalid_argument("beta2 must be in (0,1)");
  if (!(cfg.adam_epsilon > 0.0)) throw std::invalid_argument("adam_epsilon must be positive");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (cfg.max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (cfg.patience == 0) throw std::invalid_argument("patience must be positive");
}

AdamState make_adam_state(std::span<const std::span<double>> params) {
  AdamState s;
  for (const auto p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(std::span<const std::span<double>> params, const Gradients& grads,
               AdamState& state, const TrainConfig& cfg) {
  if (grads.tensors.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and moment counts differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads.tensors[k].size() != params[k].size() || state.m[k].size() != params[k].size() ||
        state.v[k].size() != params[k].size()) {
      throw ShapeError("adam_step: shape mismatch in tensor " + std::to_string(k));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k];
    const auto& g = grads.tensors[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
  }
}

namespace {

std::vector<ExampleRef> as_examples(const WindowRefs& windows) {
  std::vector<ExampleRef> out;
  out.reserve(windows.size());
  for (const auto* w : windows) out.push_back({&w->data, w->label});
  return out;
}

void check_sensor(const WindowRefs& windows, Sensor sensor, const char* what) {
  if (windows.empty()) throw std::invalid_argument(std::string(what) + " set is empty");
  for (const auto* w : windows) {
    if (w->sensor != sensor) {
      throw std::invalid_argument(std::string(what) + " set mixes sensors: model is " +
                                  std::string(to_string(sensor)) + ", window " +
                                  std::to_string(w->window_index) + " is " +
                                  std::string(to_string(w->sensor)));
    }
  }
}

WindowRefs refs_of(std::span<const LabeledWindow> windows) {
  WindowRefs out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(&w);
  return out;
}

}  // namespace

Evaluation evaluate(const SensorModel& model, const WindowRefs& windows,
                    const FocalLossConfig& loss_cfg) {
  SensorModel frozen_view = model;
  frozen_view.mode = Mode::Inference;
  Evaluation e;
  if (windows.empty()) return e;
  std::size_t correct = 0;
  for (const auto* w : windows) {
    const auto probs = model_forward(frozen_view, w->data);
    e.mean_loss += focal_loss(probs, w->label, loss_cfg);
    const auto best = std::max_element(probs.values.begin(), probs.values.end());
    if (static_cast<std::size_t>(best - probs.values.begin()) == index(w->label)) ++correct;
  }
  e.mean_loss /= static_cast<double>(windows.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(windows.size());
  return e;
}

TrainResult train(SensorModel model, const WindowRefs& train_windows,
                  const WindowRefs& val_windows, const FocalLossConfig& loss_cfg,
                  const TrainConfig& train_cfg) {
  validate(train_cfg);
  check_shapes(model);
  check_sensor(train_windows, model.sensor, "training");
  check_sensor(val_windows, model.sensor, "validation");

  const auto examples = as_examples(train_windows);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(train_cfg.seed);

  model.mode = Mode::Train;
  auto params = trainable_parameters(model);
  AdamState adam = make_adam_state(params);

  TrainResult result;
  result.model = model;
  result.model.mode = Mode::Inference;
  bool have_best = false;
  std::size_t stale = 0;
  std::vector<ExampleRef> batch;

  for (std::size_t epoch = 1; epoch <= train_cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += train_cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + train_cfg.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(examples[order[i]]);
      const auto step = backward(model, batch, loss_cfg);
      adam_step(params, step.grads, adam, train_cfg);
      update_running_stats(model.batchnorm, step.batch_stats);
      loss_sum += step.loss * static_cast<double>(batch.size());
    }

    const auto val = evaluate(model, val_windows, loss_cfg);
    EpochRecord record{epoch, loss_sum / static_cast<double>(order.size()), val.mean_loss,
                       val.accuracy};
    result.report.epochs.push_back(record);

    if (!have_best || val.mean_loss < result.report.best_val_loss) {
      have_best = true;
      stale = 0;
      result.report.best_epoch = epoch;
      result.report.best_val_loss = val.mean_loss;
      result.model = model;
      result.model.mode = Mode::Inference;
    } else if (++stale >= train_cfg.patience) {
      break;
    }
  }
  return result;
}

TrainResult train(SensorModel model, std::span<const LabeledWindow> train_windows,
                  std::span<const LabeledWindow> val_windows, const FocalLossConfig& loss_cfg,
                  const TrainConfig& train_cfg) {
  return train(std::move(model), refs_of(train_windows), refs_of(val_windows), loss_cfg,
               train_cfg);
}

void write_train_report_csv(const TrainReport& report, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,train_loss,val_loss,val_accuracy\n";
  for (const auto& e : report.epochs) {
    out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.val_accuracy << '\n';
  }
  detail::write_text_file(path, out.str());
}

}  // namespace seizure
