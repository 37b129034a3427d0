#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seizure/tensor.hpp"
#include "seizure/types.hpp"

namespace seizure {

enum class Mode { Train, Inference };

struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;
  double momentum = 0.1;

  std::size_t channels() const { return gamma.size(); }
};

BatchNormParams make_batchnorm(std::size_t channels);

// Per-channel statistics used for normalization.
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> var;  // biased (population) variance
  std::size_t count = 0;    // samples per channel that produced the moments
};

// Moments over every axis except the channel axis. `x` is [C x T] or [B x C x T].
ChannelStats batch_statistics(const Tensor& x);

// gamma * (x - mean) / sqrt(var + eps) + beta with the given statistics.
Tensor batchnorm_apply(const Tensor& x, const BatchNormParams& params, const ChannelStats& stats);

// Exponential moving average of the running statistics; the variance is
// tracked unbiased.
void update_running_stats(BatchNormParams& params, const ChannelStats& batch);

// Train mode normalizes with batch moments and updates the running moments.
// Inference mode uses the running moments and leaves `params` untouched.
Tensor batchnorm_forward(const Tensor& x, BatchNormParams& params, Mode mode);

struct ConvBlockParams {
  Tensor kernels;             // [out_channels x in_channels x kernel_len]
  std::vector<double> bias;   // [out_channels]
  std::size_t pool_size = 4;

  std::size_t out_channels() const { return kernels.dim(0); }
  std::size_t in_channels() const { return kernels.dim(1); }
  std::size_t kernel_length() const { return kernels.dim(2); }
};

// Stride-1 cross-correlation with zero "same" padding: (K-1)/2 zeros on the
// left, the rest on the right. Output is [C_out x T].
Tensor conv1d_forward(const Tensor& x, const ConvBlockParams& params);

// Accumulates kernel and bias gradients; writes the input gradient when
// `grad_input` is non-null.
void conv1d_backward(const Tensor& x, const ConvBlockParams& params, const Tensor& grad_output,
                     Tensor& grad_kernels, std::span<double> grad_bias, Tensor* grad_input);

// Non-overlapping max pooling with stride == pool_size. A trailing partial
// window is pooled as-is, so the output length is ceil(T / pool_size).
// `argmax` receives the flat input index of each selected element.
Tensor maxpool1d(const Tensor& x, std::size_t pool_size, std::vector<std::size_t>* argmax = nullptr);

Tensor maxpool1d_backward(const Tensor& grad_output, std::span<const std::size_t> argmax,
                          const std::vector<std::size_t>& input_shape);

void relu_inplace(std::span<double> values);

struct DenseParams {
  Tensor weights;            // [out x in]
  std::vector<double> bias;  // [out]

  std::size_t out_features() const { return weights.dim(0); }
  std::size_t in_features() const { return weights.dim(1); }
};

std::vector<double> dense_forward(std::span<const double> x, const DenseParams& params);

void dense_backward(std::span<const double> x, const DenseParams& params,
                    std::span<const double> grad_output, Tensor& grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_input);

// Max-subtracted softmax.
ClassProbabilities softmax(std::span<const double, kNumClasses> logits);

}  // namespace seizure
