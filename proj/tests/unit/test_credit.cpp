#include <cmath>

#include "coexplorer/credit.hpp"
#include "doctest.h"

using namespace coexplorer;

namespace {

// One pair every 0.1 s starting at t = 0, up to and including `until`.
TrajectoryWindow ten_hz(double until, std::size_t capacity = 128) {
  TrajectoryWindow w(capacity);
  for (int i = 0; i * 0.1 <= until + 1e-9; ++i) w.push(ParameterState{{i * 0.001}}, ActionId{0, +1}, i * 0.1);
  return w;
}

SpaceConfig space(int n) {
  SpaceConfig s;
  s.n = n;
  return s;
}

}  // namespace

TEST_CASE("credit window at 10 Hz covers [1.0, 4.8] s") {
  const auto w = ten_hz(5.0);
  const auto credited = credit_window({FeedbackKind::Guiding, +1, 5.0}, w);
  // brute force: stamps k/10 with 10 <= k <= 48
  int expected = 0;
  for (int k = 0; k <= 50; ++k)
    if (k >= 10 && k <= 48) ++expected;
  REQUIRE(expected == 39);
  REQUIRE(credited.size() == 39);
  CHECK(credited.front().state[0] == doctest::Approx(0.010));
  CHECK(credited.back().state[0] == doctest::Approx(0.048));
  for (const auto& s : credited) {
    CHECK(s.weight == doctest::Approx(1.0 / 39.0));
    CHECK(s.target == 1.0);
  }
}

TEST_CASE("credit window before any data is empty") {
  const auto w = ten_hz(0.0);
  CHECK(credit_window({FeedbackKind::Guiding, +1, 0.05}, w).empty());
}

TEST_CASE("two feedbacks give independent credit sets") {
  const auto w = ten_hz(6.0);
  const auto a = credit_window({FeedbackKind::Guiding, +1, 5.0}, w);
  const auto b = credit_window({FeedbackKind::Guiding, -1, 5.5}, w);
  CHECK(a.size() == 39);
  CHECK(b.size() == 39);
  CHECK(b.front().target == -1.0);
}

TEST_CASE("guiding credit decays as exp(-j)") {
  const auto w = ten_hz(5.0);
  const auto credited = guiding_credit({FeedbackKind::Guiding, +1, 5.0}, w);
  REQUIRE(credited.size() == 10);
  CHECK(credited[0].target == 1.0);
  CHECK(credited[1].target == doctest::Approx(0.3679).epsilon(1e-4));
  for (int j = 0; j < 10; ++j) {
    CHECK(credited[j].target == doctest::Approx(std::exp(-j)).epsilon(1e-12));
    CHECK(credited[j].weight == 1.0);
    CHECK(credited[j].state[0] == doctest::Approx((50 - j) * 0.001));
  }
  const auto neg = guiding_credit({FeedbackKind::Guiding, -1, 5.0}, w);
  CHECK(neg[0].target == -1.0);
}

TEST_CASE("guiding credit on a short window and ignoring later pairs") {
  const auto w = ten_hz(0.3);
  CHECK(guiding_credit({FeedbackKind::Guiding, +1, 0.3}, w).size() == 4);
  const auto late = ten_hz(5.0);
  const auto credited = guiding_credit({FeedbackKind::Guiding, +1, 2.0}, late);
  REQUIRE_FALSE(credited.empty());
  CHECK(credited[0].state[0] == doctest::Approx(0.020));
  CHECK_THROWS(guiding_credit({FeedbackKind::Guiding, 0, 1.0}, late));
}

TEST_CASE("gamma curve peaks at its mode") {
  const auto w = ten_hz(5.0);
  CreditOptions o;
  o.curve = GuidingCurve::Gamma;
  const auto credited = guiding_credit({FeedbackKind::Guiding, +1, 5.0}, w, o);
  REQUIRE(credited.size() == 10);
  // shape 2, scale 0.3 s: mode at 0.3 s, i.e. j = 3
  CHECK(credited[3].target == doctest::Approx(1.0));
  for (const auto& s : credited) CHECK(s.target <= 1.0 + 1e-12);
}

TEST_CASE("zone expansion counts") {
  const auto s10 = space(10);
  const auto interior = zone_expand(center_state(s10), +1, s10);
  CHECK(interior.size() == 200);
  const auto corner = zone_expand(ParameterState{std::vector<double>(10, 0.0)}, +1, s10);
  CHECK(corner.size() == 100);
  const auto repulsive = zone_expand(center_state(s10), -1, s10);
  REQUIRE(repulsive.size() == 200);
  for (std::size_t i = 0; i < interior.size(); ++i) {
    CHECK(repulsive[i].state == interior[i].state);
    CHECK(repulsive[i].action == interior[i].action);
    CHECK(repulsive[i].target == -1.0);
  }
}

TEST_CASE("zone expansion pairs point back at the label") {
  const auto s = space(3);
  const ParameterState label{{0.5, 0.02, 1.0}};
  const auto samples = zone_expand(label, +1, s);
  // dim0: 20, dim1: 10 above + 2 below, dim2: 10 below
  CHECK(samples.size() == 42);
  for (const auto& smp : samples) {
    CHECK(is_valid_state(smp.state, s));
    const auto next = apply_action(smp.state, smp.action, s);
    CHECK(linf_distance(next, label) < linf_distance(smp.state, label));
    CHECK(smp.weight == 1.0);
  }
}
