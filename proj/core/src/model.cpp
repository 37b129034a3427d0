#include "seizure/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace seizure {

std::size_t Architecture::pooled_length() const {
  if (pool_size == 0) throw std::invalid_argument("pool_size must be positive");
  std::size_t t = input_length;
  for (std::size_t b = 0; b < kConvBlocks; ++b) t = (t + pool_size - 1) / pool_size;
  return t;
}

SensorModel make_model(Sensor sensor, const Architecture& arch, std::uint64_t seed) {
  if (arch.channels == 0 || arch.input_length == 0 || arch.kernel_length == 0 ||
      arch.pool_size == 0 || arch.hidden1 == 0 || arch.hidden2 == 0) {
    throw std::invalid_argument("architecture sizes must be positive");
  }
  SensorModel m;
  m.sensor = sensor;
  m.arch = arch;
  m.seed = seed;
  m.batchnorm = make_batchnorm(arch.channels);

  std::mt19937_64 rng(seed);
  auto fill_uniform = [&rng](std::span<double> values, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : values) v = dist(rng);
  };

  const std::size_t C = arch.channels;
  for (auto& block : m.blocks) {
    block.kernels = Tensor({C, C, arch.kernel_length});
    block.bias.assign(C, 0.0);
    block.pool_size = arch.pool_size;
    fill_uniform(block.kernels.values(), C * arch.kernel_length);
  }
  const std::array<std::size_t, kDenseLayers + 1> widths = {arch.flatten_size(), arch.hidden1,
                                                            arch.hidden2, kNumClasses};
  for (std::size_t l = 0; l < kDenseLayers; ++l) {
    m.dense[l].weights = Tensor({widths[l + 1], widths[l]});
    m.dense[l].bias.assign(widths[l + 1], 0.0);
    fill_uniform(m.dense[l].weights.values(), widths[l]);
  }
  return m;
}

void check_shapes(const SensorModel& model) {
  const auto& a = model.arch;
  const std::size_t C = a.channels;
  if (model.batchnorm.channels() != C || model.batchnorm.beta.size() != C ||
      model.batchnorm.running_mean.size() != C || model.batchnorm.running_var.size() != C) {
    throw ShapeError("batchnorm parameters do not match channel count");
  }
  for (const auto& block : model.blocks) {
    if (block.kernels.shape() != std::vector<std::size_t>{C, C, a.kernel_length} ||
        block.bias.size() != C || block.pool_size != a.pool_size) {
      throw ShapeError("conv block must map " + std::to_string(C) + " channels to " +
                       std::to_string(C) + ", got kernels " + block.kernels.shape_string());
    }
  }
  const std::array<std::size_t, kDenseLayers + 1> widths = {a.flatten_size(), a.hidden1, a.hidden2,
                                                            kNumClasses};
  for (std::size_t l = 0; l < kDenseLayers; ++l) {
    const auto& d = model.dense[l];
    if (d.weights.shape() != std::vector<std::size_t>{widths[l + 1], widths[l]} ||
        d.bias.size() != widths[l + 1]) {
      throw ShapeError("dense layer " + std::to_string(l + 1) + " expects " +
                       std::to_string(widths[l + 1]) + "x" + std::to_string(widths[l]) +
                       ", got " + d.weights.shape_string());
    }
  }
}

namespace {

void check_window(const SensorModel& model, const Tensor& window) {
  if (window.rank() != 2 || window.dim(0) != model.arch.channels ||
      window.dim(1) != model.arch.input_length) {
    throw ShapeError("model expects window [" + std::to_string(model.arch.channels) + "x" +
                     std::to_string(model.arch.input_length) + "], got " + window.shape_string());
  }
}

// Activations kept for the reverse pass of one example.
struct ExampleCache {
  Tensor xhat;                                       // normalized input before gamma/beta
  std::array<Tensor, kConvBlocks + 1> h;             // h[0] batchnorm output, h[b+1] block b output
  std::array<Tensor, kConvBlocks> pooled;            // pooled pre-activations
  std::array<std::vector<std::size_t>, kConvBlocks> argmax;
  std::array<std::vector<std::size_t>, kConvBlocks> conv_shape;
  std::vector<double> z1, u1, z2, u2;
  std::array<double, kNumClasses> logits{};
};

Tensor normalize(const Tensor& window, const ChannelStats& stats, double epsilon) {
  const std::size_t C = window.dim(0);
  const std::size_t T = window.dim(1);
  Tensor xhat(window.shape());
  for (std::size_t c = 0; c < C; ++c) {
    const double inv = 1.0 / std::sqrt(stats.var[c] + epsilon);
    const double* in = window.data() + c * T;
    double* out = xhat.data() + c * T;
    for (std::size_t t = 0; t < T; ++t) out[t] = (in[t] - stats.mean[c]) * inv;
  }
  return xhat;
}

// Pools before the ReLU; ReLU is monotone so this equals conv -> ReLU -> maxpool.
void forward_example(const SensorModel& model, const Tensor& window, const ChannelStats& stats,
                     ExampleCache& cache) {
  const auto& bn = model.batchnorm;
  cache.xhat = normalize(window, stats, bn.epsilon);
  const std::size_t C = window.dim(0);
  const std::size_t T = window.dim(1);
  cache.h[0] = Tensor(window.shape());
  for (std::size_t c = 0; c < C; ++c) {
    const double* in = cache.xhat.data() + c * T;
    double* out = cache.h[0].data() + c * T;
    for (std::size_t t = 0; t < T; ++t) out[t] = bn.gamma[c] * in[t] + bn.beta[c];
  }

  for (std::size_t b = 0; b < kConvBlocks; ++b) {
    const auto& block = model.blocks[b];
    const Tensor conv = conv1d_forward(cache.h[b], block);
    cache.conv_shape[b] = conv.shape();
    cache.pooled[b] = maxpool1d(conv, block.pool_size, &cache.argmax[b]);
    cache.h[b + 1] = cache.pooled[b];
    relu_inplace(cache.h[b + 1].values());
  }

  const auto flat = cache.h[kConvBlocks].values();
  cache.z1 = dense_forward(flat, model.dense[0]);
  cache.u1 = cache.z1;
  relu_inplace(cache.u1);
  cache.z2 = dense_forward(cache.u1, model.dense[1]);
  cache.u2 = cache.z2;
  relu_inplace(cache.u2);
  const auto z3 = dense_forward(cache.u2, model.dense[2]);
  std::copy(z3.begin(), z3.end(), cache.logits.begin());
}

ChannelStats running_stats(const BatchNormParams& bn) {
  return ChannelStats{bn.running_mean, bn.running_var, 0};
}

// Moments over every window of the batch, in batch order.
ChannelStats pooled_stats(std::span<const ExampleRef> batch) {
  const Tensor& first = *batch.front().window;
  const std::size_t C = first.dim(0);
  const std::size_t T = first.dim(1);
  ChannelStats s;
  s.mean.assign(C, 0.0);
  s.var.assign(C, 0.0);
  s.count = batch.size() * T;
  const double n = static_cast<double>(s.count);
  for (std::size_t c = 0; c < C; ++c) {
    double sum = 0.0;
    for (const auto& ex : batch) {
      const double* row = ex.window->data() + c * T;
      for (std::size_t t = 0; t < T; ++t) sum += row[t];
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& ex : batch) {
      const double* row = ex.window->data() + c * T;
      for (std::size_t t = 0; t < T; ++t) {
        const double d = row[t] - mean;
        sq += d * d;
      }
    }
    s.mean[c] = mean;
    s.var[c] = sq / n;
  }
  return s;
}

ChannelStats stats_for(const SensorModel& model, std::span<const ExampleRef> batch) {
  return model.mode == Mode::Train ? pooled_stats(batch) : running_stats(model.batchnorm);
}

void check_batch(const SensorModel& model, std::span<const ExampleRef> batch) {
  if (batch.empty()) throw std::invalid_argument("batch must not be empty");
  for (const auto& ex : batch) {
    if (ex.window == nullptr) throw std::invalid_argument("batch entry has no window");
    check_window(model, *ex.window);
  }
}

}  // namespace

std::array<double, kNumClasses> model_logits(const SensorModel& model, const Tensor& window) {
  check_window(model, window);
  const ExampleRef ref{&window, LabelClass::Interictal};
  ExampleCache cache;
  forward_example(model, window, stats_for(model, std::span(&ref, 1)), cache);
  return cache.logits;
}

ClassProbabilities model_forward(const SensorModel& model, const Tensor& window) {
  const auto logits = model_logits(model, window);
  return softmax(logits);
}

std::vector<std::span<double>> trainable_parameters(SensorModel& model) {
  std::vector<std::span<double>> out;
  out.emplace_back(model.batchnorm.gamma);
  out.emplace_back(model.batchnorm.beta);
  for (auto& block : model.blocks) {
    out.push_back(block.kernels.values());
    out.emplace_back(block.bias);
  }
  for (auto& d : model.dense) {
    out.push_back(d.weights.values());
    out.emplace_back(d.bias);
  }
  return out;
}

std::vector<std::span<const double>> trainable_parameters(const SensorModel& model) {
  auto mutable_views = trainable_parameters(const_cast<SensorModel&>(model));
  return {mutable_views.begin(), mutable_views.end()};
}

std::vector<std::string> trainable_parameter_names() {
  std::vector<std::string> names = {"batchnorm.gamma", "batchnorm.beta"};
  for (std::size_t b = 0; b < kConvBlocks; ++b) {
    names.push_back("block" + std::to_string(b + 1) + ".kernels");
    names.push_back("block" + std::to_string(b + 1) + ".bias");
  }
  for (std::size_t l = 0; l < kDenseLayers; ++l) {
    names.push_back("dense" + std::to_string(l + 1) + ".weights");
    names.push_back("dense" + std::to_string(l + 1) + ".bias");
  }
  return names;
}

std::size_t Gradients::total_size() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

Gradients zero_gradients(const SensorModel& model) {
  Gradients g;
  for (const auto view : trainable_parameters(model)) g.tensors.emplace_back(view.size(), 0.0);
  return g;
}

double focal_loss(const ClassProbabilities& probs, LabelClass target, const FocalLossConfig& cfg) {
  const double p = std::max(probs[target], kProbabilityClamp);
  const double one_minus = std::max(0.0, 1.0 - p);
  const double alpha = cfg.alpha[index(target)];
  if (one_minus == 0.0) return 0.0;
  return -alpha * std::pow(one_minus, cfg.gamma) * std::log(p);
}

std::array<double, kNumClasses> focal_loss_logit_gradient(const ClassProbabilities& probs,
                                                          LabelClass target,
                                                          const FocalLossConfig& cfg) {
  std::array<double, kNumClasses> g{};
  const double p = probs[target];
  // Below the clamp the loss is constant in the logits; at p = 1 it is
  // stationary.
  if (p < kProbabilityClamp || p >= 1.0) return g;
  const double alpha = cfg.alpha[index(target)];
  const double q = 1.0 - p;
  // dL/dp * p, then chain through the softmax Jacobian p_t (delta_tj - p_j).
  double dl_dp_times_p = -alpha * std::pow(q, cfg.gamma);
  if (cfg.gamma != 0.0) dl_dp_times_p += alpha * cfg.gamma * std::pow(q, cfg.gamma - 1.0) * p * std::log(p);
  for (std::size_t j = 0; j < kNumClasses; ++j) {
    const double delta = j == index(target) ? 1.0 : 0.0;
    g[j] = dl_dp_times_p * (delta - probs[j]);
  }
  return g;
}

std::array<double, kNumClasses> inverse_frequency_alpha(std::span<const LabelClass> labels) {
  std::array<double, kNumClasses> counts{};
  for (auto l : labels) counts[index(l)] += 1.0;
  double min_count = 0.0;
  for (double c : counts) {
    if (c > 0.0 && (min_count == 0.0 || c < min_count)) min_count = c;
  }
  std::array<double, kNumClasses> alpha{};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    alpha[k] = counts[k] > 0.0 ? min_count / counts[k] : 1.0;
  }
  return alpha;
}

double mean_focal_loss(const SensorModel& model, std::span<const ExampleRef> batch,
                       const FocalLossConfig& cfg) {
  check_batch(model, batch);
  const auto stats = stats_for(model, batch);
  double total = 0.0;
  ExampleCache cache;
  for (const auto& ex : batch) {
    forward_example(model, *ex.window, stats, cache);
    total += focal_loss(softmax(cache.logits), ex.label, cfg);
  }
  return total / static_cast<double>(batch.size());
}

BackwardResult backward(const SensorModel& model, std::span<const ExampleRef> batch,
                        const FocalLossConfig& cfg) {
  check_batch(model, batch);
  check_shapes(model);
  BackwardResult result;
  result.grads = zero_gradients(model);
  result.batch_stats = stats_for(model, batch);
  auto& g = result.grads.tensors;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const std::size_t C = model.arch.channels;

  // Scratch tensors wrapping the gradient buffers with their parameter shapes.
  std::array<Tensor, kConvBlocks> grad_kernels;
  for (std::size_t b = 0; b < kConvBlocks; ++b) {
    grad_kernels[b] = Tensor(model.blocks[b].kernels.shape());
  }
  std::array<Tensor, kDenseLayers> grad_weights;
  for (std::size_t l = 0; l < kDenseLayers; ++l) {
    grad_weights[l] = Tensor(model.dense[l].weights.shape());
  }

  ExampleCache cache;
  std::vector<double> g_u2(model.arch.hidden2), g_u1(model.arch.hidden1),
      g_flat(model.arch.flatten_size());
  for (const auto& ex : batch) {
    forward_example(model, *ex.window, result.batch_stats, cache);
    const auto probs = softmax(cache.logits);
    result.loss += focal_loss(probs, ex.label, cfg) * inv_batch;
    if (std::max_element(probs.values.begin(), probs.values.end()) - probs.values.begin() ==
        static_cast<std::ptrdiff_t>(index(ex.label))) {
      ++result.correct;
    }

    auto g_z3 = focal_loss_logit_gradient(probs, ex.label, cfg);
    for (double& v : g_z3) v *= inv_batch;

    dense_backward(cache.u2, model.dense[2], g_z3, grad_weights[2], g[15], g_u2);
    for (std::size_t i = 0; i < g_u2.size(); ++i) {
      if (!(cache.z2[i] > 0.0)) g_u2[i] = 0.0;
    }
    dense_backward(cache.u1, model.dense[1], g_u2, grad_weights[1], g[13], g_u1);
    for (std::size_t i = 0; i < g_u1.size(); ++i) {
      if (!(cache.z1[i] > 0.0)) g_u1[i] = 0.0;
    }
    dense_backward(cache.h[kConvBlocks].values(), model.dense[0], g_u1, grad_weights[0], g[11],
                   g_flat);

    Tensor g_h(cache.h[kConvBlocks].shape(), g_flat);
    for (std::size_t bi = kConvBlocks; bi-- > 0;) {
      const auto& pooled = cache.pooled[bi];
      for (std::size_t k = 0; k < g_h.size(); ++k) {
        if (!(pooled[k] > 0.0)) g_h[k] = 0.0;
      }
      const Tensor g_conv = maxpool1d_backward(g_h, cache.argmax[bi], cache.conv_shape[bi]);
      Tensor g_in;
      conv1d_backward(cache.h[bi], model.blocks[bi], g_conv, grad_kernels[bi], g[3 + 2 * bi],
                      &g_in);
      g_h = std::move(g_in);
    }

    // g_h is now the gradient at the batchnorm output.
    const std::size_t T = g_h.dim(1);
    for (std::size_t c = 0; c < C; ++c) {
      const double* go = g_h.data() + c * T;
      const double* xh = cache.xhat.data() + c * T;
      double dgamma = 0.0, dbeta = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        dgamma += go[t] * xh[t];
        dbeta += go[t];
      }
      g[0][c] += dgamma;
      g[1][c] += dbeta;
    }
  }

  for (std::size_t b = 0; b < kConvBlocks; ++b) {
    std::copy(grad_kernels[b].values().begin(), grad_kernels[b].values().end(),
              g[2 + 2 * b].begin());
  }
  for (std::size_t l = 0; l < kDenseLayers; ++l) {
    std::copy(grad_weights[l].values().begin(), grad_weights[l].values().end(),
              g[10 + 2 * l].begin());
  }
  return result;
}

}  // namespace seizure
