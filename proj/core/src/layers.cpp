#include "seizure/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seizure {

namespace {

// Splits a [C x T] or [B x C x T] tensor into (batch, channels, time).
struct Layout {
  std::size_t batch, channels, time;
};

Layout layout_of(const Tensor& x) {
  if (x.rank() == 2) return {1, x.dim(0), x.dim(1)};
  if (x.rank() == 3) return {x.dim(0), x.dim(1), x.dim(2)};
  throw ShapeError("expected [C x T] or [B x C x T], got " + x.shape_string());
}

}  // namespace

BatchNormParams make_batchnorm(std::size_t channels) {
  BatchNormParams p;
  p.gamma.assign(channels, 1.0);
  p.beta.assign(channels, 0.0);
  p.running_mean.assign(channels, 0.0);
  p.running_var.assign(channels, 1.0);
  return p;
}

ChannelStats batch_statistics(const Tensor& x) {
  const auto [B, C, T] = layout_of(x);
  ChannelStats s;
  s.mean.assign(C, 0.0);
  s.var.assign(C, 0.0);
  s.count = B * T;
  const double n = static_cast<double>(s.count);
  for (std::size_t c = 0; c < C; ++c) {
    double sum = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double* row = x.data() + (b * C + c) * T;
      for (std::size_t t = 0; t < T; ++t) sum += row[t];
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double* row = x.data() + (b * C + c) * T;
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

Tensor batchnorm_apply(const Tensor& x, const BatchNormParams& params, const ChannelStats& stats) {
  const auto [B, C, T] = layout_of(x);
  if (C != params.channels() || stats.mean.size() != C) {
    throw ShapeError("batchnorm expects " + std::to_string(params.channels()) +
                     " channels, got " + x.shape_string());
  }
  Tensor y(x.shape());
  for (std::size_t c = 0; c < C; ++c) {
    const double scale = params.gamma[c] / std::sqrt(stats.var[c] + params.epsilon);
    const double mean = stats.mean[c];
    const double shift = params.beta[c];
    for (std::size_t b = 0; b < B; ++b) {
      const double* in = x.data() + (b * C + c) * T;
      double* out = y.data() + (b * C + c) * T;
      for (std::size_t t = 0; t < T; ++t) out[t] = (in[t] - mean) * scale + shift;
    }
  }
  return y;
}

void update_running_stats(BatchNormParams& params, const ChannelStats& batch) {
  const double m = params.momentum;
  const double n = static_cast<double>(batch.count);
  const double unbias = batch.count > 1 ? n / (n - 1.0) : 1.0;
  for (std::size_t c = 0; c < params.channels(); ++c) {
    params.running_mean[c] = (1.0 - m) * params.running_mean[c] + m * batch.mean[c];
    params.running_var[c] = (1.0 - m) * params.running_var[c] + m * batch.var[c] * unbias;
  }
}

Tensor batchnorm_forward(const Tensor& x, BatchNormParams& params, Mode mode) {
  const auto [B, C, T] = layout_of(x);
  (void)B;
  (void)T;
  if (C != params.channels()) {
    throw ShapeError("batchnorm expects " + std::to_string(params.channels()) +
                     " channels, got " + x.shape_string());
  }
  if (mode == Mode::Inference) {
    return batchnorm_apply(x, params, ChannelStats{params.running_mean, params.running_var, 0});
  }
  const auto stats = batch_statistics(x);
  auto y = batchnorm_apply(x, params, stats);
  update_running_stats(params, stats);
  return y;
}

Tensor conv1d_forward(const Tensor& x, const ConvBlockParams& params) {
  if (x.rank() != 2 || params.kernels.rank() != 3 || x.dim(0) != params.in_channels() ||
      params.bias.size() != params.out_channels()) {
    throw ShapeError("conv1d: input " + x.shape_string() + " does not match kernels " +
                     params.kernels.shape_string());
  }
  const std::size_t C_in = params.in_channels();
  const std::size_t C_out = params.out_channels();
  const std::size_t K = params.kernel_length();
  const auto T = static_cast<std::ptrdiff_t>(x.dim(1));
  const auto pad = static_cast<std::ptrdiff_t>((K - 1) / 2);

  Tensor y({C_out, x.dim(1)});
  for (std::size_t o = 0; o < C_out; ++o) {
    double* out = y.data() + o * x.dim(1);
    std::fill(out, out + T, params.bias[o]);
    for (std::size_t i = 0; i < C_in; ++i) {
      const double* in = x.data() + i * x.dim(1);
      for (std::size_t j = 0; j < K; ++j) {
        const double w = params.kernels.at(o, i, j);
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(j) - pad;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -s);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(T, T - s);
        for (std::ptrdiff_t t = lo; t < hi; ++t) out[t] += w * in[t + s];
      }
    }
  }
  return y;
}

void conv1d_backward(const Tensor& x, const ConvBlockParams& params, const Tensor& grad_output,
                     Tensor& grad_kernels, std::span<double> grad_bias, Tensor* grad_input) {
  const std::size_t C_in = params.in_channels();
  const std::size_t C_out = params.out_channels();
  const std::size_t K = params.kernel_length();
  const auto T = static_cast<std::ptrdiff_t>(x.dim(1));
  const auto pad = static_cast<std::ptrdiff_t>((K - 1) / 2);
  if (grad_output.shape() != std::vector<std::size_t>{C_out, x.dim(1)}) {
    throw ShapeError("conv1d_backward: gradient shape mismatch");
  }
  if (grad_input) *grad_input = Tensor(x.shape());

  for (std::size_t o = 0; o < C_out; ++o) {
    const double* g = grad_output.data() + o * x.dim(1);
    double gb = 0.0;
    for (std::ptrdiff_t t = 0; t < T; ++t) gb += g[t];
    grad_bias[o] += gb;
    for (std::size_t i = 0; i < C_in; ++i) {
      const double* in = x.data() + i * x.dim(1);
      double* gin = grad_input ? grad_input->data() + i * x.dim(1) : nullptr;
      for (std::size_t j = 0; j < K; ++j) {
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(j) - pad;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -s);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(T, T - s);
        double gw = 0.0;
        for (std::ptrdiff_t t = lo; t < hi; ++t) gw += g[t] * in[t + s];
        grad_kernels.at(o, i, j) += gw;
        if (gin) {
          const double w = params.kernels.at(o, i, j);
          for (std::ptrdiff_t t = lo; t < hi; ++t) gin[t + s] += w * g[t];
        }
      }
    }
  }
}

Tensor maxpool1d(const Tensor& x, std::size_t pool_size, std::vector<std::size_t>* argmax) {
  if (pool_size == 0) throw std::invalid_argument("pool_size must be positive");
  if (x.rank() != 2) throw ShapeError("maxpool1d expects [C x T], got " + x.shape_string());
  const std::size_t C = x.dim(0);
  const std::size_t T = x.dim(1);
  const std::size_t out_len = (T + pool_size - 1) / pool_size;
  Tensor y({C, out_len});
  if (argmax) argmax->assign(C * out_len, 0);
  for (std::size_t c = 0; c < C; ++c) {
    const double* in = x.data() + c * T;
    for (std::size_t k = 0; k < out_len; ++k) {
      const std::size_t begin = k * pool_size;
      const std::size_t end = std::min(T, begin + pool_size);
      std::size_t best = begin;
      for (std::size_t t = begin + 1; t < end; ++t) {
        if (in[t] > in[best]) best = t;
      }
      y.at(c, k) = in[best];
      if (argmax) (*argmax)[c * out_len + k] = c * T + best;
    }
  }
  return y;
}

Tensor maxpool1d_backward(const Tensor& grad_output, std::span<const std::size_t> argmax,
                          const std::vector<std::size_t>& input_shape) {
  Tensor g(input_shape);
  for (std::size_t k = 0; k < argmax.size(); ++k) g[argmax[k]] += grad_output[k];
  return g;
}

void relu_inplace(std::span<double> values) {
  for (double& v : values) v = v > 0.0 ? v : 0.0;
}

std::vector<double> dense_forward(std::span<const double> x, const DenseParams& params) {
  if (x.size() != params.in_features() || params.bias.size() != params.out_features()) {
    throw ShapeError("dense: input of " + std::to_string(x.size()) + " features, weights " +
                     params.weights.shape_string());
  }
  std::vector<double> y(params.out_features());
  for (std::size_t o = 0; o < y.size(); ++o) {
    const auto w = params.weights.row(o);
    double acc = params.bias[o];
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i];
    y[o] = acc;
  }
  return y;
}

void dense_backward(std::span<const double> x, const DenseParams& params,
                    std::span<const double> grad_output, Tensor& grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_input) {
  const std::size_t in = params.in_features();
  if (!grad_input.empty()) std::fill(grad_input.begin(), grad_input.end(), 0.0);
  for (std::size_t o = 0; o < params.out_features(); ++o) {
    const double g = grad_output[o];
    grad_bias[o] += g;
    if (g == 0.0) continue;
    auto gw = grad_weights.row(o);
    const auto w = params.weights.row(o);
    for (std::size_t i = 0; i < in; ++i) gw[i] += g * x[i];
    if (!grad_input.empty()) {
      for (std::size_t i = 0; i < in; ++i) grad_input[i] += g * w[i];
    }
  }
}

ClassProbabilities softmax(std::span<const double, kNumClasses> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  ClassProbabilities p;
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    p.values[k] = std::exp(logits[k] - m);
    sum += p.values[k];
  }
  for (double& v : p.values) v /= sum;
  return p;
}

}  // namespace seizure
