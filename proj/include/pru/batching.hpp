// BPTT batching: the id stream is cut into B parallel streams and served
// as consecutive fixed-length (input, target) windows. Targets are inputs
// shifted by one; no pair crosses a stream boundary.
#pragma once

#include <vector>

#include "pru/common.hpp"

namespace pru {

struct Batch {
  // Time-major: inputs[t][b]. targets[t][b] == inputs[t+1][b] within a stream.
  std::vector<std::vector<int>> inputs;
  std::vector<std::vector<int>> targets;
};

class BatchPlan {
 public:
  // Truncates ids to a multiple of batch_size, reshapes into batch_size
  // contiguous streams. Throws DataError when too short to emit anything.
  BatchPlan(const std::vector<int>& ids, std::size_t batch_size, std::size_t bptt_len);

  std::size_t batch_size() const { return batch_size_; }
  std::size_t bptt_len() const { return bptt_len_; }
  std::size_t stream_len() const { return stream_len_; }
  std::size_t batch_count() const;
  Batch batch(std::size_t index) const;

 private:
  std::size_t batch_size_, bptt_len_, stream_len_;
  std::vector<int> data_;  // stream-major: stream b occupies [b*S, (b+1)*S)
};

}  // namespace pru
