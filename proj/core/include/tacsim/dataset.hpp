#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tacsim/scenarios.hpp"

namespace tacsim {

/// One JSON object per line:
///   {"task","episode","step","rep_kind","rep":[..],"label":[..],
///    "params":{"f_push","f_pull","damping"},"seed"}
std::string sample_to_json_line(const Sample& sample);
/// Throws Error{Schema} naming the offending field.
Sample sample_from_json_line(const std::string& line);

/// Checks rep/label lengths against the task and representation schema.
void validate_sample(const Sample& sample, std::size_t pin_count);

void write_dataset(const std::filesystem::path& path, std::span<const Sample> samples);
std::vector<Sample> read_dataset(const std::filesystem::path& path);

}  // namespace tacsim
