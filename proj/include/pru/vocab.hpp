// Token <-> id mapping with frequency-ordered ids, plus corpus loading
// (UTF-8, whitespace tokens, one sentence per line, <eos> appended).
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "pru/common.hpp"

namespace pru {

inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kEosToken = "<eos>";

class Vocab {
 public:
  // Ids are assigned by descending frequency, ties broken lexicographically.
  // Tokens seen fewer than min_count times are dropped (they map to <unk>).
  // <unk> and <eos> are always present.
  static Vocab build(const std::vector<std::string>& tokens, std::size_t min_count);

  std::size_t size() const { return id_to_token_.size(); }
  int id(const std::string& token) const;        // unk id if absent
  const std::string& token(int id) const;        // ContractError if out of range
  bool contains(const std::string& token) const;

  int unk_id() const { return unk_id_; }
  int eos_id() const { return eos_id_; }

  std::vector<int> encode(const std::vector<std::string>& tokens) const;

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
  int unk_id_ = -1;
  int eos_id_ = -1;
};

// Whitespace-tokenizes a corpus file, appending <eos> at each line end.
// Throws DataError on missing files or no tokens.
std::vector<std::string> tokenize_file(const std::string& path);
std::vector<std::string> tokenize_text(const std::string& text);

}  // namespace pru
