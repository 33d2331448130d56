#include "pru/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pru {

Vocab Vocab::build(const std::vector<std::string>& tokens, std::size_t min_count) {
  if (tokens.empty()) throw DataError("build_vocab: empty token stream");
  std::unordered_map<std::string, std::size_t> counts;
  for (const std::string& t : tokens) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> kept;
  kept.reserve(counts.size());
  for (const auto& [tok, n] : counts) {
    if (n >= min_count) kept.emplace_back(tok, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab v;
  for (const auto& [tok, n] : kept) {
    v.token_to_id_.emplace(tok, static_cast<int>(v.id_to_token_.size()));
    v.id_to_token_.push_back(tok);
  }
  for (const char* reserved : {kEosToken, kUnkToken}) {
    if (!v.token_to_id_.count(reserved)) {
      v.token_to_id_.emplace(reserved, static_cast<int>(v.id_to_token_.size()));
      v.id_to_token_.push_back(reserved);
    }
  }
  v.unk_id_ = v.token_to_id_.at(kUnkToken);
  v.eos_id_ = v.token_to_id_.at(kEosToken);
  return v;
}

int Vocab::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? unk_id_ : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw ContractError("vocab: id out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(const std::string& token) const {
  return token_to_id_.count(token) != 0;
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> tokenize_text(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    std::string w;
    bool any = false;
    while (words >> w) {
      tokens.push_back(w);
      any = true;
    }
    if (any) tokens.push_back(kEosToken);
  }
  return tokens;
}

std::vector<std::string> tokenize_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<std::string> tokens = tokenize_text(buf.str());
  if (tokens.empty()) throw DataError("corpus file has no tokens: " + path);
  return tokens;
}

}  // namespace pru
