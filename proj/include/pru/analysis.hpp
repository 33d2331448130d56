// Diagnostics: parameter accounting, next-token entropy histograms,
// embedding variance by category, gradient-norm saliency, and MAC/walltime
// benchmarking of the recurrent unit.
#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pru/language_model.hpp"
#include "pru/vocab.hpp"

namespace pru {

struct ParamReport {
  struct LayerCounts {
    std::size_t pyramidal = 0;  // weights, all four gates
    std::size_t grouped = 0;
    std::size_t biases = 0;
  };
  std::vector<LayerCounts> layers;
  std::size_t ru_weights = 0;        // recurrent unit, biases excluded
  std::size_t ru_biases = 0;
  std::size_t embedding = 0;
  std::size_t decoder = 0;           // projection/untied weights + bias
  std::size_t grand_total = 0;       // embedding + RU + decoder, incl. biases
  std::size_t lstm_ru_weights = 0;   // same-shape plain LSTM, for comparison
  double ru_reduction_vs_lstm = 0.0; // 1 - ru/lstm
};

ParamReport param_report(const LMConfig& cfg);
void write_param_report_csv(std::ostream& out, const ParamReport& report);

// -sum p ln p with the 0 ln 0 = 0 convention.
double entropy(std::span<const double> probs);

// Softmax of the final-position logits for one context (eval mode).
std::vector<double> next_token_distribution(LanguageModel& model,
                                            std::span<const int> context);

struct EntropyHistogram {
  double bin_width = 0.23;
  std::vector<std::size_t> counts;   // bin i covers [i*w, (i+1)*w)
  std::vector<double> entropies;     // per context
  double mean = 0.0;
};

EntropyHistogram next_token_entropy(LanguageModel& model,
                                    std::span<const std::vector<int>> contexts,
                                    double bin_width = 0.23);
void write_entropy_csv(std::ostream& out, const EntropyHistogram& hist);

// Mean squared euclidean distance to the category mean, per category.
// Rows of `embeddings` are indexed by the ids in `categories`; empty
// categories are skipped (reported via the `skipped` list).
struct VarianceReport {
  std::map<std::string, double> variance;
  std::map<std::string, std::size_t> count;
  std::vector<std::string> skipped;
};
VarianceReport embedding_variance(const Tensor& embeddings,
                                  const std::map<std::string, std::vector<int>>& categories);
void write_variance_csv(std::ostream& out, const VarianceReport& report);

// token<TAB>category lines -> category -> member ids (unknown tokens dropped).
std::map<std::string, std::vector<int>> load_category_map(const std::string& path,
                                                          const Vocab& vocab);

struct SaliencyMap {
  std::vector<int> context;
  std::vector<double> scores;   // squared L2 grad norm per input token
  int predicted = -1;           // top-1 id at the target position
};

// Relevance of each input token for the model's top-1 prediction at
// target_position: squared norm of d log p(top1) / d embedded(token).
SaliencyMap saliency(LanguageModel& model, std::span<const int> context,
                     std::size_t target_position);
void write_saliency_json(std::ostream& out, const SaliencyMap& map, const Vocab* vocab);

// Multiply-accumulate counts per timestep (kernel taps included; skip and
// max windows multiply nothing).
std::size_t linear_macs(std::size_t in, std::size_t out);
std::size_t grouped_macs(std::size_t in, std::size_t out, std::size_t groups);
std::size_t pyramidal_macs(std::size_t in, std::size_t out, std::size_t levels,
                           SubsampleMode mode);
std::size_t pru_cell_step_macs(std::size_t in, std::size_t hidden, std::size_t levels,
                               std::size_t groups, SubsampleMode mode);
std::size_t lstm_cell_step_macs(std::size_t in, std::size_t hidden);

struct BenchResult {
  std::size_t steps = 0;
  double seconds = 0.0;
  double steps_per_sec = 0.0;
};

// Forward-only cell steps (batch 1) after a warmup; wall time only.
BenchResult bench_cell(std::size_t in, std::size_t hidden, std::size_t levels,
                       std::size_t groups, SubsampleMode mode, std::size_t steps,
                       std::uint64_t seed);

}  // namespace pru
