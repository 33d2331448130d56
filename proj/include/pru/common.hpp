// Error taxonomy shared by all pru modules.
#pragma once

#include <stdexcept>
#include <string>

namespace pru {

// Tensor/vector extents do not line up.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration (divisibility, bad hyperparameters, unknown keys).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Corpus ingestion problems (missing file, empty stream, too-short corpus).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite ones are required (divergence, bad grads).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint file is malformed, truncated, or fails its checksum.
struct PersistenceError : std::runtime_error {
  explicit PersistenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// API precondition violated by the caller (non-scalar loss, bad index).
struct ContractError : std::logic_error {
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace pru
