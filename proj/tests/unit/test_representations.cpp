#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Geometry>

#include "oracle.hpp"
#include "tacsim/error.hpp"
#include "tacsim/mesh.hpp"
#include "tacsim/representations.hpp"

using namespace tacsim;

namespace {

TactileFrame frame_of(std::initializer_list<Vec2> pins) { return TactileFrame{std::vector<Vec2>(pins), 0}; }

TactileFrame random_frame(Rng& rng, std::size_t n) {
  TactileFrame f;
  for (std::size_t i = 0; i < n; ++i) f.pins.emplace_back(uniform(rng, -20, 20), uniform(rng, -20, 20));
  return f;
}

TactileFrame rest91() { return rest_frame(generate_tip_mesh()); }

}  // namespace

TEST_CASE("normalize_pins hand example") {
  const TactileFrame f = frame_of({Vec2(0, 0), Vec2(1, 0), Vec2(-1, 0), Vec2(0, 2), Vec2(0, -2)});
  // Centre included: mean|x| = 2/5, mean|y| = 4/5, divisor 0.6.
  const TactileFrame n = normalize_pins(f);
  CHECK(n.pins[1].x() == doctest::Approx(1.0 / 0.6).epsilon(1e-14));
  CHECK(n.pins[3].y() == doctest::Approx(2.0 / 0.6).epsilon(1e-14));
  CHECK(n.pins[0] == Vec2(0, 0));
}

TEST_CASE("normalize_pins matches the hand oracle") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const TactileFrame f = random_frame(rng, 91);
    std::vector<oracle::P2> raw;
    for (const Vec2& p : f.pins) raw.push_back({p.x(), p.y()});
    const auto ref = oracle::normalize(raw);
    const TactileFrame n = normalize_pins(f);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::abs(n.pins[i].x() - ref[i][0]) < 1e-12);
      CHECK(std::abs(n.pins[i].y() - ref[i][1]) < 1e-12);
    }
  }
}

TEST_CASE("normalize_pins invariances over random frames") {
  Rng rng(12);
  double worst_scale = 0.0;
  double worst_shift = 0.0;
  double worst_twice = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const TactileFrame f = random_frame(rng, 91);
    const double s = std::exp(uniform(rng, -5.0, 5.0));
    const Vec2 shift(uniform(rng, -100, 100), uniform(rng, -100, 100));
    TactileFrame scaled = f;
    TactileFrame shifted = f;
    for (Vec2& p : scaled.pins) p *= s;
    for (Vec2& p : shifted.pins) p += shift;
    const TactileFrame a = normalize_pins(f);
    const TactileFrame b = normalize_pins(scaled);
    const TactileFrame c = normalize_pins(shifted);
    const TactileFrame d = normalize_pins(a);
    for (std::size_t i = 0; i < a.pins.size(); ++i) {
      worst_scale = std::max(worst_scale, (a.pins[i] - b.pins[i]).cwiseAbs().maxCoeff());
      worst_shift = std::max(worst_shift, (a.pins[i] - c.pins[i]).cwiseAbs().maxCoeff());
      worst_twice = std::max(worst_twice, (a.pins[i] - d.pins[i]).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst_scale < 1e-12);
  CHECK(worst_shift < 1e-12);
  CHECK(worst_twice < 1e-12);
}

TEST_CASE("normalize_pins rejects degenerate frames") {
  CHECK_THROWS_AS(normalize_pins(frame_of({Vec2(3, 3), Vec2(3, 3)})), Error);
  CHECK_THROWS_AS(normalize_pins(TactileFrame{}), Error);
  try {
    normalize_pins(frame_of({Vec2(1, 1)}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFrame);
  }
}

TEST_CASE("pin positions") {
  const TactileFrame rest = rest91();
  Rng rng(1);
  const Representation r = encode(RepKind::PinPositions, rest, rest, 0.0, rng);
  REQUIRE(r.values.size() == 182);
  const TactileFrame n = normalize_pins(rest);
  CHECK(r.values[2] == n.pins[1].x());
  CHECK(r.values[3] == n.pins[1].y());
  CHECK(std::any_of(r.values.begin(), r.values.end(), [](double v) { return v != 0.0; }));

  // Permuting pins permutes (x, y) blocks.
  TactileFrame perm = rest;
  std::reverse(perm.pins.begin(), perm.pins.end());
  const Representation a = rep_pin_positions(rest);
  const Representation b = rep_pin_positions(perm);
  for (std::size_t i = 0; i < 91; ++i) {
    CHECK(b.values[2 * i] == a.values[2 * (90 - i)]);
    CHECK(b.values[2 * i + 1] == a.values[2 * (90 - i) + 1]);
  }
  CHECK(rep_length(RepKind::PinPositions, 91) == 182);
  CHECK(rep_length(RepKind::Threshold, 91) == 91);
  CHECK(rep_length(RepKind::WeightedAverage, 91) == 3);
}

TEST_CASE("threshold value") {
  const TactileFrame rest = rest91();
  CHECK(threshold_value(rest, rest) == 0.05);
  TactileFrame moved = rest;
  for (Vec2& p : moved.pins) p += Vec2(0.6, 0.8);
  CHECK(threshold_value(moved, rest) == doctest::Approx(1.2).epsilon(1e-14));
  TactileFrame small = rest;
  for (Vec2& p : small.pins) p += Vec2(0.01, 0.0);
  CHECK(threshold_value(small, rest) == 0.05);
  CHECK_THROWS_AS(threshold_value(frame_of({Vec2(0, 0)}), rest), Error);
}

TEST_CASE("threshold representation") {
  const TactileFrame rest = rest91();
  const Representation zero = rep_threshold(rest, rest);
  CHECK(zero.values.size() == 91);
  CHECK(std::all_of(zero.values.begin(), zero.values.end(), [](double v) { return v == 0.0; }));

  // Five pins: displacements 0.1, 0.1, 0.1, 0.1, 1.0 -> C = 1.2 * 1.4 / 5 = 0.336.
  const TactileFrame r5 = frame_of({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)});
  TactileFrame f5 = r5;
  for (std::size_t i = 0; i < 4; ++i) f5.pins[i] += Vec2(0.1, 0.0);
  f5.pins[4] += Vec2(0.0, 1.0);
  CHECK(threshold_value(f5, r5) == doctest::Approx(0.336).epsilon(1e-14));
  const Representation t5 = rep_threshold(f5, r5);
  CHECK(t5.values == std::vector<double>{0, 0, 0, 0, 1});

  // Five of six pins moved by 0.5 put C exactly at 0.5; H[0] = 1 marks them.
  const TactileFrame r6 = frame_of({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0), Vec2(4, 0), Vec2(5, 0)});
  TactileFrame f6 = r6;
  for (std::size_t i = 1; i < 6; ++i) f6.pins[i] += Vec2(0.5, 0.0);
  REQUIRE(threshold_value(f6, r6) == 0.5);
  CHECK(rep_threshold(f6, r6).values == std::vector<double>{0, 1, 1, 1, 1, 1});

  SUBCASE("depends only on displacement magnitudes") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      TactileFrame f = rest;
      TactileFrame g = rest;
      for (std::size_t i = 0; i < f.pins.size(); ++i) {
        const double m = uniform(rng, 0.0, 0.3);
        const double a = uniform(rng, 0.0, 2 * kPi);
        const double b = uniform(rng, 0.0, 2 * kPi);
        f.pins[i] += m * Vec2(std::cos(a), std::sin(a));
        g.pins[i] += m * Vec2(std::cos(b), std::sin(b));
      }
      const Representation x = rep_threshold(f, rest);
      const Representation y = rep_threshold(g, rest);
      std::size_t diff = 0;
      for (std::size_t i = 0; i < x.values.size(); ++i) diff += x.values[i] != y.values[i];
      // Magnitudes agree to rounding; a flip needs a pin within ~1e-15 of C.
      CHECK(diff == 0);
    }
  }
}

TEST_CASE("weighted average") {
  const TactileFrame rest = rest91();
  const Representation z = rep_weighted_average(rest, rest);
  CHECK(z.values == std::vector<double>{0, 0, 0});

  TactileFrame one = rest;
  one.pins[17] += Vec2(0.3, -0.4);
  const Representation o = rep_weighted_average(one, rest);
  CHECK(o.values[0] == doctest::Approx(one.pins[17].x()).epsilon(1e-14));
  CHECK(o.values[1] == doctest::Approx(one.pins[17].y()).epsilon(1e-14));
  CHECK(o.values[2] == doctest::Approx(0.5 / 91.0).epsilon(1e-14));

  std::vector<Vec2> pins(91, Vec2(0, 5));
  pins[1] = Vec2(1, 0);
  pins[2] = Vec2(-1, 0);
  TactileFrame r2{pins, 0};
  TactileFrame f2 = r2;
  f2.pins[1] = Vec2(1, 0);
  f2.pins[2] = Vec2(-1, 0);
  r2.pins[1] = Vec2(1, 0.25);
  r2.pins[2] = Vec2(-1, 0.25);
  const Representation w = rep_weighted_average(f2, r2);
  CHECK(std::abs(w.values[0]) < 1e-15);
  CHECK(std::abs(w.values[1]) < 1e-15);
  CHECK(w.values[2] == doctest::Approx(0.25 * 2.0 / 91.0).epsilon(1e-14));

  SUBCASE("lies inside the bounding box of current pins") {
    Rng rng(9);
    for (int t = 0; t < 500; ++t) {
      TactileFrame f = rest;
      for (Vec2& p : f.pins) p += Vec2(uniform(rng, -1, 1), uniform(rng, -1, 1));
      const Representation r = rep_weighted_average(f, rest);
      // Convex-combination check in every direction of a small fan.
      for (int k = 0; k < 12; ++k) {
        const Vec2 dir(std::cos(k * kPi / 6), std::sin(k * kPi / 6));
        double hi = -1e300;
        for (const Vec2& p : f.pins) hi = std::max(hi, dir.dot(p));
        CHECK(dir.dot(Vec2(r.values[0], r.values[1])) <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("pin noise") {
  const Representation base{RepKind::PinPositions, std::vector<double>(100000, 0.0)};
  Rng a(3);
  CHECK(add_pin_noise(base, 0.0, a).values == base.values);
  Rng r1(4);
  Rng r2(4);
  const Representation n1 = add_pin_noise(base, 0.01, r1);
  const Representation n2 = add_pin_noise(base, 0.01, r2);
  CHECK(n1.values == n2.values);
  double sum = 0.0;
  double sq = 0.0;
  for (double v : n1.values) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(n1.values.size());
  const double sd = std::sqrt((sq - sum * sum / n) / (n - 1));
  CHECK(sd >= 0.0099);
  CHECK(sd <= 0.0101);
  CHECK_THROWS_AS(add_pin_noise(base, -1.0, a), Error);
  CHECK_THROWS_AS(add_pin_noise(Representation{RepKind::Threshold, {0, 1}}, 0.1, a), Error);
}

TEST_CASE("encode applies noise before the derived representations") {
  const TactileFrame rest = rest91();
  Rng a(8);
  Rng b(8);
  const Representation noisy = encode(RepKind::PinPositions, rest, rest, 0.05, a);
  const Representation thr = encode(RepKind::Threshold, rest, rest, 0.05, b);
  const TactileFrame current = frame_from_positions(noisy);
  CHECK(thr.values == rep_threshold(current, normalize_pins(rest)).values);
  for (double v : thr.values) CHECK((v == 0.0 || v == 1.0));
  CHECK(std::any_of(thr.values.begin(), thr.values.end(), [](double v) { return v == 1.0; }));
  CHECK(parse_rep_kind("weighted_average") == RepKind::WeightedAverage);
  CHECK_THROWS_AS(parse_rep_kind("pins"), Error);
}
