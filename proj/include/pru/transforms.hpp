// The three building-block transformations: linear, grouped linear, and
// pyramidal (multi-level subsampled) with an optional residual connection.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pru/autodiff.hpp"
#include "pru/rng.hpp"

namespace pru {

enum class SubsampleMode { kSkip, kAvgPool, kMaxPool, kLearnedConv };

const char* subsample_mode_name(SubsampleMode mode);
SubsampleMode subsample_mode_from_name(const std::string& name);  // ConfigError

// Closed-form weight counts (biases excluded).
std::size_t linear_weight_count(std::size_t in, std::size_t out);
std::size_t grouped_weight_count(std::size_t in, std::size_t out, std::size_t groups);
std::size_t pyramidal_weight_count(std::size_t in, std::size_t out, std::size_t levels);

// Stride-2, width-3 window reduction producing the next pyramid level.
// avg_pool fixes kappa at [1/3,1/3,1/3]; skip at [0,1,0]; neither trains.
// learned_conv draws kappa from N(0, 0.1) and bounds the output with tanh.
class SubsampleKernel {
 public:
  SubsampleKernel(SubsampleMode mode, Rng& rng, const std::string& name);

  SubsampleMode mode() const { return mode_; }
  bool trainable() const { return mode_ == SubsampleMode::kLearnedConv; }

  Var apply(Tape& tape, Var x);
  Tensor apply(const Tensor& x) const;  // tape-free, for analysis paths

  void collect_params(std::vector<Parameter*>& out);
  Parameter& kappa() { return kappa_; }
  const Parameter& kappa() const { return kappa_; }

 private:
  SubsampleMode mode_;
  Parameter kappa_;  // [3]
};

// y = W x (+ b), W stored [out x in].
class LinearTransform {
 public:
  LinearTransform(std::size_t in, std::size_t out, bool with_bias, Rng& rng,
                  const std::string& name);

  Var forward(Tape& tape, Var x);
  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  std::size_t weight_param_count() const { return in_ * out_; }
  void collect_params(std::vector<Parameter*>& out);

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  bool with_bias_;
  Parameter weight_;  // [out x in]
  Parameter bias_;    // [out]
};

// Splits the input into g contiguous groups, maps each with its own
// (out/g x in/g) weight, concatenates. g=1 reproduces LinearTransform.
class GroupedLinear {
 public:
  GroupedLinear(std::size_t in, std::size_t out, std::size_t groups, bool with_bias,
                Rng& rng, const std::string& name);

  Var forward(Tape& tape, Var h);
  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  std::size_t groups() const { return groups_; }
  std::size_t weight_param_count() const { return in_ * out_ / groups_; }
  void collect_params(std::vector<Parameter*>& out);

  Parameter& group_weight(std::size_t i) { return weights_[i]; }

 private:
  std::size_t in_, out_, groups_;
  bool with_bias_;
  std::vector<Parameter> weights_;  // g x [(out/g) x (in/g)]
  Parameter bias_;
};

// K-level multi-resolution transform: level k sees the input subsampled
// k-1 times and maps it to out/K coordinates; levels are concatenated.
// With residual enabled and in == out, the input is added element-wise
// after the bias. K=1 reproduces LinearTransform.
class PyramidalTransform {
 public:
  PyramidalTransform(std::size_t in, std::size_t out, std::size_t levels,
                     SubsampleMode mode, bool residual, bool with_bias, Rng& rng,
                     const std::string& name);

  Var forward(Tape& tape, Var x);
  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  std::size_t levels() const { return levels_; }
  bool residual() const { return residual_; }
  std::size_t weight_param_count() const;
  void collect_params(std::vector<Parameter*>& out);

  Parameter& level_weight(std::size_t k) { return weights_[k]; }
  SubsampleKernel& kernel() { return kernel_; }

 private:
  std::size_t in_, out_, levels_;
  bool residual_, with_bias_;
  std::vector<Parameter> weights_;  // K x [(out/K) x (in/2^{k-1})]
  SubsampleKernel kernel_;
  Parameter bias_;
};

}  // namespace pru
