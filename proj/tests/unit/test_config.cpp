#include <sstream>

#include "coexplorer/config.hpp"
#include "doctest.h"

using namespace coexplorer;

TEST_CASE("defaults are the reference hyperparameters") {
  const Config c;
  CHECK(c.space.n == 10);
  CHECK(c.space.step == 0.01);
  CHECK(c.hidden_units == 100);
  CHECK(c.hidden_layers == 2);
  CHECK(c.learning_rate == 0.002);
  CHECK(c.batch_size == 32);
  CHECK(c.replay_memory == 700);
  CHECK(c.credit.reward_length == 10);
  CHECK(c.epsilon.start == 0.1);
  CHECK(c.epsilon.end == 0.0);
  CHECK(c.action_hz == 10.0);
  CHECK(c.tiles.num_tilings == 64);
  CHECK(c.tiles.tile_width == 0.4);
  CHECK(c.bonus.beta == 1.0);
  CHECK(c.bonus.c == 0.01);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("parse flat key = value text") {
  std::istringstream in(R"(# comment
n = 6
step = 0.05   # trailing comment
  learning_rate=0.01
mode = stepwise
bind_address = 0.0.0.0
n = 4
)");
  const Config c = parse_config(in);
  CHECK(c.space.n == 4);
  CHECK(c.space.step == 0.05);
  CHECK(c.learning_rate == 0.01);
  CHECK(c.mode == StartMode::Stepwise);
  CHECK(c.bind_address == "0.0.0.0");
}

TEST_CASE("bad keys and values are rejected") {
  Config c;
  CHECK_THROWS_AS(set_config_value(c, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "n", "ten"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "mode", "sideways"), ConfigError);
  std::istringstream missing_eq("n 4\n");
  CHECK_THROWS_AS(parse_config(missing_eq), ConfigError);
  CHECK_THROWS(load_config("/nonexistent/coexplorer.conf"));
}

TEST_CASE("write then parse is lossless") {
  Config c;
  c.space.n = 3;
  c.space.step = 0.1;
  c.space.lo = {0.0, -1.0, 0.0};
  c.space.hi = {1.0, 1.0, 2.0};
  c.learning_rate = 1.0 / 3.0;
  c.credit.curve = GuidingCurve::Gamma;
  c.tiles.offset_seed = 17;
  c.osc_out = "127.0.0.1:57120";
  c.seed = 123456789;
  c.mode = StartMode::Stepwise;
  std::stringstream ss;
  write_config(ss, c);
  const Config back = parse_config(ss);
  CHECK(back.space.n == 3);
  CHECK(back.space.lo == c.space.lo);
  CHECK(back.space.hi == c.space.hi);
  CHECK(back.learning_rate == c.learning_rate);
  CHECK(back.credit.curve == GuidingCurve::Gamma);
  CHECK(back.tiles.offset_seed == c.tiles.offset_seed);
  CHECK(back.osc_out == c.osc_out);
  CHECK(back.seed == c.seed);
  CHECK(back.mode == StartMode::Stepwise);
}
