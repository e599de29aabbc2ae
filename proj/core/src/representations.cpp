#include "tacsim/representations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tacsim/error.hpp"

namespace tacsim {
namespace {

void require_same_length(const TactileFrame& a, const TactileFrame& b, const char* where) {
  if (a.pins.size() != b.pins.size())
    fail(ErrorKind::Schema, std::string(where) + ": frame has " + std::to_string(a.pins.size()) +
                                " pins, reference has " + std::to_string(b.pins.size()));
  if (a.pins.empty()) fail(ErrorKind::Schema, std::string(where) + ": empty frame");
}

std::vector<double> displacement_norms(const TactileFrame& frame, const TactileFrame& rest) {
  std::vector<double> out(frame.pins.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (frame.pins[i] - rest.pins[i]).norm();
  return out;
}

}  // namespace

std::string_view to_string(RepKind kind) {
  switch (kind) {
    case RepKind::PinPositions: return "pin_positions";
    case RepKind::Threshold: return "threshold";
    case RepKind::WeightedAverage: return "weighted_average";
  }
  return "pin_positions";
}

RepKind parse_rep_kind(std::string_view text) {
  if (text == "pin_positions") return RepKind::PinPositions;
  if (text == "threshold") return RepKind::Threshold;
  if (text == "weighted_average") return RepKind::WeightedAverage;
  fail(ErrorKind::Config, "unknown representation '" + std::string(text) +
                              "' (expected pin_positions | threshold | weighted_average)");
}

std::size_t rep_length(RepKind kind, std::size_t pin_count) {
  switch (kind) {
    case RepKind::PinPositions: return 2 * pin_count;
    case RepKind::Threshold: return pin_count;
    case RepKind::WeightedAverage: return 3;
  }
  return 0;
}

TactileFrame normalize_pins(const TactileFrame& frame) {
  if (frame.pins.empty()) fail(ErrorKind::DegenerateFrame, "normalize_pins: empty frame");
  const Vec2 centre = frame.pins.front();
  TactileFrame out{std::vector<Vec2>(frame.pins.size()), frame.step};
  double sum_x = 0.0;
  double sum_y = 0.0;
  for (std::size_t i = 0; i < frame.pins.size(); ++i) {
    out.pins[i] = frame.pins[i] - centre;
    sum_x += std::abs(out.pins[i].x());
    sum_y += std::abs(out.pins[i].y());
  }
  const double n = static_cast<double>(frame.pins.size());
  const double scale = 0.5 * (sum_x / n + sum_y / n);
  if (!(scale >= 1e-12)) fail(ErrorKind::DegenerateFrame, "normalize_pins: frame has no spatial extent");
  for (Vec2& p : out.pins) p /= scale;
  return out;
}

Representation rep_pin_positions(const TactileFrame& frame) {
  Representation rep{RepKind::PinPositions, std::vector<double>(2 * frame.pins.size())};
  for (std::size_t i = 0; i < frame.pins.size(); ++i) {
    rep.values[2 * i] = frame.pins[i].x();
    rep.values[2 * i + 1] = frame.pins[i].y();
  }
  return rep;
}

double threshold_value(const TactileFrame& frame, const TactileFrame& rest) {
  require_same_length(frame, rest, "threshold_value");
  double sum = 0.0;
  for (double d : displacement_norms(frame, rest)) sum += d;
  return std::max(kThresholdGain * sum / static_cast<double>(frame.pins.size()), kThresholdFloor);
}

Representation rep_threshold(const TactileFrame& frame, const TactileFrame& rest) {
  const double c = threshold_value(frame, rest);
  const std::vector<double> disp = displacement_norms(frame, rest);
  Representation rep{RepKind::Threshold, std::vector<double>(disp.size())};
  // H[0] = 1.
  for (std::size_t i = 0; i < disp.size(); ++i) rep.values[i] = disp[i] - c >= 0.0 ? 1.0 : 0.0;
  return rep;
}

Representation rep_weighted_average(const TactileFrame& frame, const TactileFrame& rest) {
  require_same_length(frame, rest, "rep_weighted_average");
  const std::vector<double> disp = displacement_norms(frame, rest);
  double weight_sum = 0.0;
  double disp_sum = 0.0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t i = 0; i < disp.size(); ++i) {
    const double w = disp[i] * disp[i];
    weight_sum += w;
    disp_sum += disp[i];
    acc += w * frame.pins[i];
  }
  if (weight_sum == 0.0) return Representation{RepKind::WeightedAverage, {0.0, 0.0, 0.0}};
  const Vec2 centre = acc / weight_sum;
  return Representation{RepKind::WeightedAverage,
                        {centre.x(), centre.y(), disp_sum / static_cast<double>(disp.size())}};
}

Representation add_pin_noise(const Representation& rep, double sigma, Rng& rng) {
  if (rep.kind != RepKind::PinPositions)
    fail(ErrorKind::Domain, "add_pin_noise: noise applies to pin positions only");
  if (!(sigma >= 0.0)) fail(ErrorKind::Domain, "add_pin_noise: sigma must be >= 0");
  Representation out = rep;
  if (sigma == 0.0) return out;
  for (double& v : out.values) v += normal(rng, 0.0, sigma);
  return out;
}

TactileFrame frame_from_positions(const Representation& rep) {
  if (rep.kind != RepKind::PinPositions || rep.values.size() % 2 != 0)
    fail(ErrorKind::Schema, "frame_from_positions: expected an interleaved pin-position vector");
  TactileFrame frame{std::vector<Vec2>(rep.values.size() / 2), 0};
  for (std::size_t i = 0; i < frame.pins.size(); ++i)
    frame.pins[i] = Vec2(rep.values[2 * i], rep.values[2 * i + 1]);
  return frame;
}

Representation encode(RepKind kind, const TactileFrame& frame, const TactileFrame& rest,
                      double noise_sigma, Rng& rng) {
  require_same_length(frame, rest, "encode");
  Representation positions = rep_pin_positions(normalize_pins(frame));
  if (noise_sigma > 0.0) positions = add_pin_noise(positions, noise_sigma, rng);
  if (kind == RepKind::PinPositions) return positions;
  const TactileFrame current = frame_from_positions(positions);
  const TactileFrame reference = normalize_pins(rest);
  return kind == RepKind::Threshold ? rep_threshold(current, reference)
                                    : rep_weighted_average(current, reference);
}

}  // namespace tacsim
