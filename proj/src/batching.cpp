#include "pru/batching.hpp"

namespace pru {

BatchPlan::BatchPlan(const std::vector<int>& ids, std::size_t batch_size,
                     std::size_t bptt_len)
    : batch_size_(batch_size), bptt_len_(bptt_len) {
  if (batch_size == 0 || bptt_len == 0) {
    throw ConfigError("batchify: batch size and bptt length must be positive");
  }
  if (ids.size() < batch_size * 2) {
    throw DataError("batchify: corpus too short for requested batch size");
  }
  stream_len_ = ids.size() / batch_size;
  data_.assign(ids.begin(), ids.begin() + static_cast<long>(stream_len_ * batch_size));
  if (batch_count() == 0) {
    throw DataError("batchify: streams too short for one bptt window");
  }
}

std::size_t BatchPlan::batch_count() const {
  return (stream_len_ - 1) / bptt_len_;  // each window needs bptt_len + 1 tokens
}

Batch BatchPlan::batch(std::size_t index) const {
  if (index >= batch_count()) throw ContractError("batch index out of range");
  std::size_t off = index * bptt_len_;
  Batch b;
  b.inputs.assign(bptt_len_, std::vector<int>(batch_size_));
  b.targets.assign(bptt_len_, std::vector<int>(batch_size_));
  for (std::size_t t = 0; t < bptt_len_; ++t) {
    for (std::size_t s = 0; s < batch_size_; ++s) {
      b.inputs[t][s] = data_[s * stream_len_ + off + t];
      b.targets[t][s] = data_[s * stream_len_ + off + t + 1];
    }
  }
  return b;
}

}  // namespace pru
