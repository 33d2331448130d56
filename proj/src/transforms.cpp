#include "pru/transforms.hpp"

#include <cmath>

namespace pru {

namespace {

Tensor init_weight(std::size_t out, std::size_t in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  return rng.uniform_tensor({out, in}, -bound, bound);
}

void check_divisible(std::size_t value, std::size_t divisor, const char* what) {
  if (divisor == 0 || value % divisor != 0) {
    throw ConfigError(std::string(what) + ": " + std::to_string(value) +
                      " not divisible by " + std::to_string(divisor));
  }
}

}  // namespace

const char* subsample_mode_name(SubsampleMode mode) {
  switch (mode) {
    case SubsampleMode::kSkip: return "skip";
    case SubsampleMode::kAvgPool: return "avg";
    case SubsampleMode::kMaxPool: return "max";
    case SubsampleMode::kLearnedConv: return "conv";
  }
  return "?";
}

SubsampleMode subsample_mode_from_name(const std::string& name) {
  if (name == "skip") return SubsampleMode::kSkip;
  if (name == "avg" || name == "avg_pool") return SubsampleMode::kAvgPool;
  if (name == "max" || name == "max_pool") return SubsampleMode::kMaxPool;
  if (name == "conv" || name == "learned_conv") return SubsampleMode::kLearnedConv;
  throw ConfigError("unknown subsample mode: " + name);
}

std::size_t linear_weight_count(std::size_t in, std::size_t out) { return in * out; }

std::size_t grouped_weight_count(std::size_t in, std::size_t out, std::size_t groups) {
  check_divisible(in, groups, "grouped input dim");
  check_divisible(out, groups, "grouped output dim");
  return in * out / groups;
}

std::size_t pyramidal_weight_count(std::size_t in, std::size_t out, std::size_t levels) {
  if (levels == 0) throw ConfigError("pyramid levels must be positive");
  check_divisible(in, std::size_t{1} << (levels - 1), "pyramidal input dim");
  check_divisible(out, levels, "pyramidal output dim");
  std::size_t total = 0;
  for (std::size_t k = 1; k <= levels; ++k) {
    total += (out / levels) * (in >> (k - 1));
  }
  return total;
}

SubsampleKernel::SubsampleKernel(SubsampleMode mode, Rng& rng, const std::string& name)
    : mode_(mode) {
  Tensor taps;
  switch (mode) {
    case SubsampleMode::kSkip:
      taps = Tensor({3}, {0.0, 1.0, 0.0});
      break;
    case SubsampleMode::kAvgPool:
      taps = Tensor({3}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      break;
    case SubsampleMode::kMaxPool:
      taps = Tensor({3});  // unused
      break;
    case SubsampleMode::kLearnedConv:
      taps = rng.normal_tensor({3}, 0.0, 0.1);
      break;
  }
  kappa_ = Parameter(name + ".kappa", std::move(taps));
}

Var SubsampleKernel::apply(Tape& tape, Var x) {
  switch (mode_) {
    case SubsampleMode::kMaxPool:
      return tape.max_subsample(x);
    case SubsampleMode::kLearnedConv:
      return tape.tanh(tape.kernel_subsample(x, tape.param(kappa_)));
    default:
      return tape.kernel_subsample(x, tape.leaf(kappa_.value));
  }
}

Tensor SubsampleKernel::apply(const Tensor& x) const {
  Tape tape;
  Var vx = tape.leaf(x);
  switch (mode_) {
    case SubsampleMode::kMaxPool:
      return tape.value(tape.max_subsample(vx));
    case SubsampleMode::kLearnedConv:
      return tape.value(tape.tanh(tape.kernel_subsample(vx, tape.leaf(kappa_.value))));
    default:
      return tape.value(tape.kernel_subsample(vx, tape.leaf(kappa_.value)));
  }
}

void SubsampleKernel::collect_params(std::vector<Parameter*>& out) {
  if (trainable()) out.push_back(&kappa_);
}

LinearTransform::LinearTransform(std::size_t in, std::size_t out, bool with_bias,
                                 Rng& rng, const std::string& name)
    : in_(in),
      out_(out),
      with_bias_(with_bias),
      weight_(name + ".w", init_weight(out, in, rng)),
      bias_(name + ".b", Tensor({out})) {
  if (in == 0 || out == 0) throw ConfigError("linear dims must be positive");
}

Var LinearTransform::forward(Tape& tape, Var x) {
  Var y = tape.matmul(x, tape.param(weight_));
  if (with_bias_) y = tape.add_rowwise(y, tape.param(bias_));
  return y;
}

void LinearTransform::collect_params(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  if (with_bias_) out.push_back(&bias_);
}

GroupedLinear::GroupedLinear(std::size_t in, std::size_t out, std::size_t groups,
                             bool with_bias, Rng& rng, const std::string& name)
    : in_(in), out_(out), groups_(groups), with_bias_(with_bias),
      bias_(name + ".b", Tensor({out})) {
  check_divisible(in, groups, "grouped input dim");
  check_divisible(out, groups, "grouped output dim");
  weights_.reserve(groups);
  for (std::size_t i = 0; i < groups; ++i) {
    weights_.emplace_back(name + ".w" + std::to_string(i + 1),
                          init_weight(out / groups, in / groups, rng));
  }
}

Var GroupedLinear::forward(Tape& tape, Var h) {
  std::size_t gin = in_ / groups_;
  std::vector<Var> pieces;
  pieces.reserve(groups_);
  for (std::size_t i = 0; i < groups_; ++i) {
    Var part = tape.slice(h, i * gin, gin);
    pieces.push_back(tape.matmul(part, tape.param(weights_[i])));
  }
  Var z = tape.concat(pieces);
  if (with_bias_) z = tape.add_rowwise(z, tape.param(bias_));
  return z;
}

void GroupedLinear::collect_params(std::vector<Parameter*>& out) {
  for (Parameter& w : weights_) out.push_back(&w);
  if (with_bias_) out.push_back(&bias_);
}

PyramidalTransform::PyramidalTransform(std::size_t in, std::size_t out,
                                       std::size_t levels, SubsampleMode mode,
                                       bool residual, bool with_bias, Rng& rng,
                                       const std::string& name)
    : in_(in), out_(out), levels_(levels), residual_(residual), with_bias_(with_bias),
      kernel_(mode, rng, name), bias_(name + ".b", Tensor({out})) {
  pyramidal_weight_count(in, out, levels);  // validates divisibility
  residual_ = residual && in == out;        // element-wise sum needs matching dims
  weights_.reserve(levels);
  for (std::size_t k = 1; k <= levels; ++k) {
    weights_.emplace_back(name + ".w" + std::to_string(k),
                          init_weight(out / levels, in >> (k - 1), rng));
  }
}

Var PyramidalTransform::forward(Tape& tape, Var x) {
  std::vector<Var> pieces;
  pieces.reserve(levels_);
  Var level = x;
  for (std::size_t k = 0; k < levels_; ++k) {
    if (k > 0) level = kernel_.apply(tape, level);
    pieces.push_back(tape.matmul(level, tape.param(weights_[k])));
  }
  Var y = tape.concat(pieces);
  if (with_bias_) y = tape.add_rowwise(y, tape.param(bias_));
  if (residual_) y = tape.add(y, x);
  return y;
}

std::size_t PyramidalTransform::weight_param_count() const {
  return pyramidal_weight_count(in_, out_, levels_);
}

void PyramidalTransform::collect_params(std::vector<Parameter*>& out) {
  for (Parameter& w : weights_) out.push_back(&w);
  kernel_.collect_params(out);
  if (with_bias_) out.push_back(&bias_);
}

}  // namespace pru
