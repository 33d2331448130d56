#include "pru/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pru/checkpoint.hpp"

namespace pru {

double grad_global_norm(const std::vector<Parameter*>& params) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    const double* g = p->grad.data();
    for (std::size_t i = 0; i < p->grad.size(); ++i) sq += g[i] * g[i];
  }
  return std::sqrt(sq);
}

void sgd_step(std::vector<Parameter*>& params, double lr, double clip_norm) {
  double norm = grad_global_norm(params);
  if (!std::isfinite(norm)) {
    throw NumericError("sgd_step: non-finite gradient norm, aborting update");
  }
  double scale = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;
  for (Parameter* p : params) {
    double* v = p->value.mut();
    const double* g = p->grad.data();
    for (std::size_t i = 0; i < p->value.size(); ++i) v[i] -= lr * scale * g[i];
  }
}

double evaluate_nll(LanguageModel& model, const std::vector<int>& ids,
                    std::size_t batch_size, std::size_t bptt) {
  BatchPlan plan(ids, batch_size, bptt);
  std::vector<CellState> states = model.zero_states(batch_size);
  double total = 0.0;
  std::size_t positions = 0;
  for (std::size_t i = 0; i < plan.batch_count(); ++i) {
    Batch b = plan.batch(i);
    LanguageModel::EvalResult r = model.evaluate(
        std::span<const std::vector<int>>(b.inputs.data(), b.inputs.size()),
        std::span<const std::vector<int>>(b.targets.data(), b.targets.size()), states);
    total += r.mean_nll * static_cast<double>(r.positions);
    positions += r.positions;
    states = std::move(r.states);
  }
  return total / static_cast<double>(positions);
}

TrainResult train(const TrainConfig& cfg, const std::vector<int>& train_ids,
                  const std::vector<int>& valid_ids, std::ostream* log_rows) {
  cfg.model.validate();
  Rng init_rng(cfg.seed);
  LanguageModel model(cfg.model, init_rng);
  if (!cfg.init_checkpoint.empty()) {
    LanguageModel warm = load_checkpoint(cfg.init_checkpoint);
    require_same_model_shape(warm.config(), cfg.model);
    model = std::move(warm);
  }
  Rng dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

  TrainResult result{.log = {}, .best = model, .best_valid_nll =
                         std::numeric_limits<double>::infinity()};
  std::vector<Parameter*> params = model.parameters();
  double lr = cfg.lr;
  double prev_valid = std::numeric_limits<double>::infinity();

  BatchPlan plan(train_ids, cfg.batch_size, cfg.bptt);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CellState> states = model.zero_states(cfg.batch_size);
    double nll_sum = 0.0;
    std::size_t positions = 0;
    Tape tape;
    for (std::size_t i = 0; i < plan.batch_count(); ++i) {
      Batch b = plan.batch(i);
      tape.reset();
      LanguageModel::Forward fwd = model.forward(
          tape, std::span<const std::vector<int>>(b.inputs.data(), b.inputs.size()),
          std::span<const std::vector<int>>(b.targets.data(), b.targets.size()), states,
          RunMode::kTrain, dropout_rng);
      double batch_nll = tape.value(fwd.mean_nll).item();
      if (!std::isfinite(batch_nll)) {
        throw NumericError("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(i));
      }
      nll_sum += batch_nll * static_cast<double>(fwd.positions);
      positions += fwd.positions;
      zero_grads(params);
      tape.backward(fwd.mean_nll);
      sgd_step(params, lr, cfg.clip_norm);
      states = std::move(fwd.states);  // detached: BPTT stops at the boundary
    }

    double train_nll = nll_sum / static_cast<double>(positions);
    double valid_nll = evaluate_nll(model, valid_ids, cfg.batch_size, cfg.bptt);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    EpochRecord rec{epoch, perplexity(train_nll), perplexity(valid_nll), lr, seconds};
    result.log.push_back(rec);
    if (log_rows) *log_rows << format_epoch_row(rec) << "\n" << std::flush;

    if (valid_nll < result.best_valid_nll) {
      result.best_valid_nll = valid_nll;
      result.best = model;  // cheap copy-on-write snapshot
    }
    if (valid_nll >= prev_valid) lr /= cfg.lr_decay;
    prev_valid = valid_nll;
  }
  return result;
}

std::string format_epoch_row(const EpochRecord& rec) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6g,%.3f", rec.epoch, rec.train_ppl,
                rec.valid_ppl, rec.lr, rec.seconds);
  return buf;
}

}  // namespace pru
