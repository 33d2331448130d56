// Single-file checkpoint: magic "PRU1", format version, canonical-text
// config block, named tensors (little-endian 64-bit reals), and a trailing
// 64-bit FNV-1a checksum over all prior bytes. Round-trips bit-exactly.
#pragma once

#include <string>

#include "pru/language_model.hpp"

namespace pru {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(LanguageModel& model, const std::string& path);
LanguageModel load_checkpoint(const std::string& path);

// Canonical key=value rendering of a model config (one key per line,
// fixed order); also what the checkpoint embeds.
std::string canonical_config_text(const LMConfig& cfg);
LMConfig parse_config_text(const std::string& text);

// Shape compatibility for warm-starting training from a checkpoint.
// Evaluation never calls this: any loadable checkpoint may be evaluated.
void require_same_model_shape(const LMConfig& checkpoint, const LMConfig& train);

}  // namespace pru
