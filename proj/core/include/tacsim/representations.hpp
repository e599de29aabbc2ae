#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacsim/dynamics.hpp"
#include "tacsim/geometry.hpp"
#include "tacsim/random.hpp"

namespace tacsim {

enum class RepKind { PinPositions, Threshold, WeightedAverage };

std::string_view to_string(RepKind kind);
/// Accepts `pin_positions | threshold | weighted_average`.
RepKind parse_rep_kind(std::string_view text);
std::size_t rep_length(RepKind kind, std::size_t pin_count);

struct Representation {
  RepKind kind = RepKind::PinPositions;
  std::vector<double> values;
};

inline constexpr double kThresholdGain = 1.2;
inline constexpr double kThresholdFloor = 0.05;
inline constexpr double kDefaultPinNoise = 1e-2;

/// Pins relative to the central pin (index 0), divided by (mean|x| + mean|y|)/2.
/// Throws Error{DegenerateFrame} when that divisor is below 1e-12.
TactileFrame normalize_pins(const TactileFrame& frame);

/// Interleaved (x, y) of every pin, as given.
Representation rep_pin_positions(const TactileFrame& frame);

/// max(1.2 * mean_i |p_i - rest_i|, 0.05).
double threshold_value(const TactileFrame& frame, const TactileFrame& rest);

/// 1 where a pin's displacement reaches the threshold value, else 0.
Representation rep_threshold(const TactileFrame& frame, const TactileFrame& rest);

/// (x, y) weighted by squared displacement, plus mean displacement magnitude.
/// All-zero displacement yields (0, 0, 0).
Representation rep_weighted_average(const TactileFrame& frame, const TactileFrame& rest);

/// I.i.d. N(0, sigma^2) on every coordinate of a PinPositions vector.
Representation add_pin_noise(const Representation& rep, double sigma, Rng& rng);

/// Full encoding path: normalise both frames, perturb the current pins with
/// `noise_sigma` (skipped when zero), then build the requested representation.
Representation encode(RepKind kind, const TactileFrame& frame, const TactileFrame& rest,
                      double noise_sigma, Rng& rng);

/// Rebuilds a frame from a PinPositions vector.
TactileFrame frame_from_positions(const Representation& rep);

}  // namespace tacsim
