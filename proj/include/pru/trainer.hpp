// SGD training loop with global-norm gradient clipping, truncated BPTT
// state carrying, per-epoch validation, and best-checkpoint tracking.
#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pru/batching.hpp"
#include "pru/language_model.hpp"

namespace pru {

struct TrainConfig {
  LMConfig model;
  double lr = 20.0;
  double clip_norm = 0.25;
  double lr_decay = 4.0;        // divide lr by this when validation stalls
  std::size_t epochs = 1;
  std::size_t batch_size = 20;
  std::size_t bptt = 35;
  std::uint64_t seed = 1234;
  std::size_t min_count = 1;
  std::string init_checkpoint;  // warm start; shape must match when set
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_ppl = 0.0;
  double valid_ppl = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  LanguageModel best;           // minimum-validation-loss snapshot
  double best_valid_nll;
};

// Clips the global L2 norm of all grads to clip_norm (direction preserved),
// then applies p <- p - lr * grad. Throws NumericError on non-finite grads.
void sgd_step(std::vector<Parameter*>& params, double lr, double clip_norm);

double grad_global_norm(const std::vector<Parameter*>& params);

// Mean NLL of the model over a token stream (eval mode, states carried).
double evaluate_nll(LanguageModel& model, const std::vector<int>& ids,
                    std::size_t batch_size, std::size_t bptt);

TrainResult train(const TrainConfig& cfg, const std::vector<int>& train_ids,
                  const std::vector<int>& valid_ids, std::ostream* log_rows = nullptr);

// One CSV row per epoch; header row written by callers.
std::string format_epoch_row(const EpochRecord& rec);
inline constexpr const char* kLogHeader = "epoch,train_ppl,valid_ppl,lr,wall_seconds";

}  // namespace pru
