#include <cmath>
#include <random>
#include <sstream>

#include "coexplorer/pca.hpp"
#include "doctest.h"

using namespace coexplorer;

TEST_CASE("rank-1 trajectory has no second component") {
  std::vector<TimedState> states;
  const std::vector<double> dir = {0.2, -0.1, 0.4, 0.05, 0.3};
  for (int i = 0; i < 40; ++i) {
    TimedState s{i * 0.1, {}};
    for (double d : dir) s.values.push_back(0.5 + (i - 20) * 0.01 * d);
    states.push_back(s);
  }
  const auto p = project_pca(states);
  REQUIRE(p.points.size() == 40);
  for (const auto& pt : p.points) CHECK(std::abs(pt.pc2) <= 1e-8);
  CHECK(p.axis1[0] > 0);
  CHECK(p.points[0].time == 0.0);
}

TEST_CASE("three 2-D points against the closed-form 2x2 eigen solve") {
  const std::vector<TimedState> states = {{0.0, {0.1, 0.3}}, {1.0, {0.6, 0.2}}, {2.0, {0.35, 0.9}}};
  // sample covariance by hand
  double mx = 0, my = 0;
  for (const auto& s : states) {
    mx += s.values[0] / 3;
    my += s.values[1] / 3;
  }
  double a = 0, b = 0, c = 0;
  for (const auto& s : states) {
    const double dx = s.values[0] - mx, dy = s.values[1] - my;
    a += dx * dx / 2;
    b += dx * dy / 2;
    c += dy * dy / 2;
  }
  const double mid = (a + c) / 2, rad = std::sqrt((a - c) * (a - c) / 4 + b * b);
  const double l1 = mid + rad, l2 = mid - rad;
  // eigenvector for l1: (b, l1 - a), normalized, first nonzero loading positive
  double v1x = b, v1y = l1 - a;
  const double n1 = std::hypot(v1x, v1y);
  v1x /= n1;
  v1y /= n1;
  if (v1x < 0) {
    v1x = -v1x;
    v1y = -v1y;
  }
  double v2x = -v1y, v2y = v1x;
  if (v2x < 0 || (v2x == 0 && v2y < 0)) {
    v2x = -v2x;
    v2y = -v2y;
  }
  const auto p = project_pca(states);
  CHECK(std::abs(p.variance1 - l1) <= 1e-9);
  CHECK(std::abs(p.variance2 - l2) <= 1e-9);
  for (std::size_t i = 0; i < 3; ++i) {
    const double dx = states[i].values[0] - mx, dy = states[i].values[1] - my;
    CHECK(std::abs(p.points[i].pc1 - (dx * v1x + dy * v1y)) <= 1e-9);
    CHECK(std::abs(p.points[i].pc2 - (dx * v2x + dy * v2y)) <= 1e-9);
  }
}

TEST_CASE("pairwise distances survive for data in a 2-D subspace") {
  const std::vector<double> u = {0.6, 0.0, 0.8, 0.0}, v = {0.0, 1.0, 0.0, 0.0};
  std::vector<TimedState> states;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-1, 1);
  for (int i = 0; i < 25; ++i) {
    const double x = coord(rng), y = coord(rng);
    TimedState s{double(i), {}};
    for (int d = 0; d < 4; ++d) s.values.push_back(0.3 + x * u[d] + y * v[d]);
    states.push_back(s);
  }
  const auto p = project_pca(states);
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      double full = 0;
      for (int d = 0; d < 4; ++d) full += std::pow(states[i].values[d] - states[j].values[d], 2);
      full = std::sqrt(full);
      const double proj = std::hypot(p.points[i].pc1 - p.points[j].pc1, p.points[i].pc2 - p.points[j].pc2);
      CHECK(std::abs(proj - full) / full <= 1e-6);
    }
}

TEST_CASE("degenerate and invalid inputs") {
  const std::vector<TimedState> same = {{0, {0.5, 0.5}}, {1, {0.5, 0.5}}, {2, {0.5, 0.5}}};
  CHECK_THROWS_AS(project_pca(same), DegenerateTrajectory);
  CHECK_THROWS_AS(project_pca({{0, {0.5}}}), std::invalid_argument);
  CHECK_THROWS_AS(project_pca({{0, {0.5}}, {1, {0.5, 0.1}}}), std::invalid_argument);
  const auto one_d = project_pca({{0, {0.1}}, {1, {0.4}}});
  CHECK(one_d.axis2 == std::vector<double>{0.0});
}

TEST_CASE("states are read from a session log") {
  std::istringstream log(R"({"time":0.0,"type":"state","payload":{"t":0,"values":[0.5,0.5]}}
not json at all
{"time":0.1,"type":"feedback","payload":{"kind":"guide","valence":1}}
{"time":0.2,"type":"state","payload":{"t":1,"values":[0.51,0.5]}}
)");
  const auto states = read_logged_states(log);
  REQUIRE(states.size() == 2);
  CHECK(states[1].time == 0.2);
  CHECK(states[1].values == std::vector<double>{0.51, 0.5});
  std::ostringstream csv;
  write_projection_csv(csv, project_pca(states).points);
  CHECK(csv.str().rfind("t,pc1,pc2\n", 0) == 0);
}
