#pragma once

#include <string>

#include "gas/model.hpp"

namespace gas {

// Line-oriented text checkpoint. Doubles are printed with %.17g, so a
// save/load/save cycle is byte-identical and values round-trip exactly.
// The embedding table (vocabulary and vectors) is stored in full: a
// checkpoint is self-contained for scoring.
void save_checkpoint(const std::string& path, ModelParams& params);

// Throws CheckpointError on version mismatch, truncation, unknown or
// missing parameter groups, or shape disagreements.
ModelParams load_checkpoint(const std::string& path);

}  // namespace gas
