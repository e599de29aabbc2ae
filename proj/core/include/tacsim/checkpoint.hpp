#pragma once

#include <filesystem>
#include <string>

#include "tacsim/mlp.hpp"

namespace tacsim {

inline constexpr int kCheckpointVersion = 1;

/// JSON document {version, task, rep_kind, layer_widths, head, layers:[{weights
/// (row-major), bias}], input_mean, input_scale}. Doubles are written in
/// shortest round-trip form, so load(save(m)) reproduces m bit-for-bit.
std::string checkpoint_to_json(const MlpModel& model);
/// Throws Error{Schema} on version or shape mismatch.
MlpModel checkpoint_from_json(const std::string& text);

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace tacsim
