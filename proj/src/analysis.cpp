#include "pru/analysis.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pru {

ParamReport param_report(const LMConfig& cfg) {
  cfg.validate();
  ParamReport rep;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    std::size_t in = cfg.layer_input(l), hid = cfg.layer_hidden(l);
    ParamReport::LayerCounts lc;
    lc.pyramidal = 4 * pyramidal_weight_count(in, hid, cfg.levels);
    lc.grouped = 4 * grouped_weight_count(hid, hid, cfg.groups);
    lc.biases = 4 * hid;
    if (cfg.mode == SubsampleMode::kLearnedConv) lc.biases += 4 * 3;  // kernel taps
    rep.layers.push_back(lc);
    rep.ru_weights += lc.pyramidal + lc.grouped;
    rep.ru_biases += lc.biases;
    rep.lstm_ru_weights += 4 * (linear_weight_count(in, hid) + linear_weight_count(hid, hid));
  }
  rep.embedding = cfg.vocab * cfg.embed_dim;
  rep.decoder = cfg.vocab;  // bias
  if (cfg.tie_weights) {
    if (cfg.top_dim() != cfg.embed_dim) rep.decoder += cfg.embed_dim * cfg.top_dim();
  } else {
    rep.decoder += cfg.vocab * cfg.top_dim();
  }
  rep.grand_total = rep.embedding + rep.ru_weights + rep.ru_biases + rep.decoder;
  rep.ru_reduction_vs_lstm =
      1.0 - static_cast<double>(rep.ru_weights) / static_cast<double>(rep.lstm_ru_weights);
  return rep;
}

void write_param_report_csv(std::ostream& out, const ParamReport& rep) {
  out << "part,weights\n";
  for (std::size_t l = 0; l < rep.layers.size(); ++l) {
    out << "layer" << l << ".pyramidal," << rep.layers[l].pyramidal << "\n";
    out << "layer" << l << ".grouped," << rep.layers[l].grouped << "\n";
    out << "layer" << l << ".biases," << rep.layers[l].biases << "\n";
  }
  out << "recurrent_unit," << rep.ru_weights << "\n";
  out << "recurrent_unit_biases," << rep.ru_biases << "\n";
  out << "embedding," << rep.embedding << "\n";
  out << "decoder," << rep.decoder << "\n";
  out << "grand_total," << rep.grand_total << "\n";
  out << "lstm_recurrent_unit," << rep.lstm_ru_weights << "\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", rep.ru_reduction_vs_lstm);
  out << "ru_reduction_vs_lstm," << buf << "\n";
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

std::vector<double> next_token_distribution(LanguageModel& model,
                                            std::span<const int> context) {
  if (context.empty()) throw ContractError("next_token_distribution: empty context");
  Tape tape;
  Rng rng(0);
  std::vector<std::vector<int>> inputs;
  inputs.reserve(context.size());
  for (int id : context) inputs.push_back({id});
  LanguageModel::Forward fwd =
      model.forward(tape, std::span<const std::vector<int>>(inputs.data(), inputs.size()),
                    {}, model.zero_states(1), RunMode::kEval, rng);
  const Tensor& logits = tape.value(fwd.logits.back());
  std::size_t v = logits.size();
  const double* l = logits.data();
  double mx = l[0];
  for (std::size_t i = 1; i < v; ++i) mx = std::max(mx, l[i]);
  double se = 0.0;
  std::vector<double> probs(v);
  for (std::size_t i = 0; i < v; ++i) {
    probs[i] = std::exp(l[i] - mx);
    se += probs[i];
  }
  for (double& p : probs) p /= se;
  return probs;
}

EntropyHistogram next_token_entropy(LanguageModel& model,
                                    std::span<const std::vector<int>> contexts,
                                    double bin_width) {
  if (contexts.empty()) throw ContractError("next_token_entropy: no contexts");
  if (bin_width <= 0.0) throw ConfigError("entropy bin width must be positive");
  EntropyHistogram hist;
  hist.bin_width = bin_width;
  double total = 0.0;
  for (const std::vector<int>& ctx : contexts) {
    std::vector<double> p = next_token_distribution(model, ctx);
    double h = entropy(p);
    hist.entropies.push_back(h);
    total += h;
    std::size_t bin = static_cast<std::size_t>(h / bin_width);
    if (hist.counts.size() <= bin) hist.counts.resize(bin + 1, 0);
    ++hist.counts[bin];
  }
  hist.mean = total / static_cast<double>(contexts.size());
  return hist;
}

void write_entropy_csv(std::ostream& out, const EntropyHistogram& hist) {
  out << "bin_lo,bin_hi,count\n";
  char buf[96];
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%zu", static_cast<double>(i) * hist.bin_width,
                  static_cast<double>(i + 1) * hist.bin_width, hist.counts[i]);
    out << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "mean,%.6f,%zu", hist.mean, hist.entropies.size());
  out << buf << "\n";
}

VarianceReport embedding_variance(const Tensor& embeddings,
                                  const std::map<std::string, std::vector<int>>& categories) {
  if (embeddings.rank() != 2) throw ShapeError("embedding_variance: matrix required");
  std::size_t v = embeddings.extent(0), d = embeddings.extent(1);
  const double* e = embeddings.data();
  VarianceReport rep;
  for (const auto& [name, ids] : categories) {
    if (ids.empty()) {
      rep.skipped.push_back(name);
      continue;
    }
    for (int id : ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= v) {
        throw ContractError("embedding_variance: id out of range");
      }
    }
    std::vector<double> mean(d, 0.0);
    for (int id : ids) {
      const double* row = e + static_cast<std::size_t>(id) * d;
      for (std::size_t k = 0; k < d; ++k) mean[k] += row[k];
    }
    for (double& m : mean) m /= static_cast<double>(ids.size());
    double acc = 0.0;
    for (int id : ids) {
      const double* row = e + static_cast<std::size_t>(id) * d;
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double diff = row[k] - mean[k];
        sq += diff * diff;
      }
      acc += sq;
    }
    rep.variance[name] = acc / static_cast<double>(ids.size());
    rep.count[name] = ids.size();
  }
  return rep;
}

void write_variance_csv(std::ostream& out, const VarianceReport& rep) {
  out << "category,count,variance\n";
  char buf[64];
  for (const auto& [name, var] : rep.variance) {
    std::snprintf(buf, sizeof(buf), "%.9f", var);
    out << name << "," << rep.count.at(name) << "," << buf << "\n";
  }
}

std::map<std::string, std::vector<int>> load_category_map(const std::string& path,
                                                          const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open category map: " + path);
  std::map<std::string, std::vector<int>> cats;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("category map line missing tab: " + line);
    std::string token = line.substr(0, tab);
    std::string category = line.substr(tab + 1);
    if (vocab.contains(token)) cats[category].push_back(vocab.id(token));
  }
  if (cats.empty()) throw DataError("category map matched no vocabulary tokens");
  return cats;
}

SaliencyMap saliency(LanguageModel& model, std::span<const int> context,
                     std::size_t target_position) {
  if (context.empty()) throw ContractError("saliency: empty context");
  if (target_position >= context.size()) {
    throw ContractError("saliency: target position out of range");
  }
  Tape tape;
  Rng rng(0);
  std::vector<std::vector<int>> inputs;
  inputs.reserve(context.size());
  for (int id : context) inputs.push_back({id});
  LanguageModel::Forward fwd =
      model.forward(tape, std::span<const std::vector<int>>(inputs.data(), inputs.size()),
                    {}, model.zero_states(1), RunMode::kEval, rng);

  const Tensor& logits = tape.value(fwd.logits[target_position]);
  int top = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[static_cast<std::size_t>(top)]) top = static_cast<int>(i);
  }
  // d log p(top) / d inputs = -d nll(top) / d inputs
  Var loss = tape.scale(tape.nll(fwd.logits[target_position], std::array{top}), -1.0);
  tape.backward(loss);

  SaliencyMap map;
  map.context.assign(context.begin(), context.end());
  map.predicted = top;
  map.scores.reserve(context.size());
  for (Var e : fwd.embedded) {
    const Tensor& g = tape.grad(e);
    double sq = 0.0;
    const double* gp = g.data();
    for (std::size_t i = 0; i < g.size(); ++i) sq += gp[i] * gp[i];
    map.scores.push_back(sq);
  }
  return map;
}

void write_saliency_json(std::ostream& out, const SaliencyMap& map, const Vocab* vocab) {
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  out << "{\n  \"predicted\": ";
  if (vocab) {
    out << '"' << escape(vocab->token(map.predicted)) << '"';
  } else {
    out << map.predicted;
  }
  out << ",\n  \"tokens\": [\n";
  char buf[48];
  for (std::size_t i = 0; i < map.context.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", map.scores[i]);
    out << "    {\"token\": ";
    if (vocab) {
      out << '"' << escape(vocab->token(map.context[i])) << '"';
    } else {
      out << map.context[i];
    }
    out << ", \"score\": " << buf << "}";
    out << (i + 1 < map.context.size() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
}

std::size_t linear_macs(std::size_t in, std::size_t out) { return in * out; }

std::size_t grouped_macs(std::size_t in, std::size_t out, std::size_t groups) {
  return grouped_weight_count(in, out, groups);
}

std::size_t pyramidal_macs(std::size_t in, std::size_t out, std::size_t levels,
                           SubsampleMode mode) {
  std::size_t macs = pyramidal_weight_count(in, out, levels);
  if (mode == SubsampleMode::kAvgPool || mode == SubsampleMode::kLearnedConv) {
    for (std::size_t k = 2; k <= levels; ++k) macs += 3 * (in >> (k - 1));
  }
  return macs;
}

std::size_t pru_cell_step_macs(std::size_t in, std::size_t hidden, std::size_t levels,
                               std::size_t groups, SubsampleMode mode) {
  std::size_t per_gate = pyramidal_macs(in, hidden, levels, mode) +
                         grouped_macs(hidden, hidden, groups);
  return 4 * per_gate + 3 * hidden;  // f*c + i*chat (2M) and o*tanh(c) (M)
}

std::size_t lstm_cell_step_macs(std::size_t in, std::size_t hidden) {
  return 4 * (linear_macs(in, hidden) + linear_macs(hidden, hidden)) + 3 * hidden;
}

BenchResult bench_cell(std::size_t in, std::size_t hidden, std::size_t levels,
                       std::size_t groups, SubsampleMode mode, std::size_t steps,
                       std::uint64_t seed) {
  if (steps == 0) throw ContractError("bench: steps must be positive");
  Rng rng(seed);
  PRUCell cell(in, hidden, levels, groups, mode, /*residual=*/false, rng, "bench");
  Tensor x = rng.uniform_tensor({in}, -1.0, 1.0);
  CellState state = cell.zero_state(1);

  auto run = [&](std::size_t n) {
    Tape tape;
    for (std::size_t i = 0; i < n; ++i) {
      tape.reset();
      CellStateVar prev{tape.leaf(state.h), tape.leaf(state.c)};
      CellStateVar next = cell.step(tape, tape.leaf(x), prev);
      state.h = tape.value(next.h);
      state.c = tape.value(next.c);
    }
  };

  run(std::max<std::size_t>(steps / 10, 2));  // warmup
  auto t0 = std::chrono::steady_clock::now();
  run(steps);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return BenchResult{steps, seconds, static_cast<double>(steps) / seconds};
}

}  // namespace pru
