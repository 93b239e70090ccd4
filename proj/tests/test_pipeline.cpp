#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "jitterscope/config.hpp"
#include "jitterscope/stages.hpp"
#include "jitterscope/synthetic.hpp"
#include "properties.hpp"
#include "test_paths.hpp"

using namespace jitterscope;
using namespace jitterscope::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("jitterscope_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config: written config parses back to the same text") {
  const auto cfg = load_config(test_paths::data_dir / "jitterscope.conf");
  std::ostringstream a;
  write_config(a, cfg);
  std::istringstream in(a.str());
  const auto back = parse_config(in, test_paths::data_dir);
  std::ostringstream b;
  write_config(b, back);
  CHECK(a.str() == b.str());
  CHECK(cfg.multipliers == std::vector<double>{2.0, 2.5, 3.0});
}

TEST_CASE("config: unknown keys and bad values are rejected") {
  std::istringstream unknown("[events]\nbandwith = 600\n");
  CHECK_THROWS(parse_config(unknown, "."));
  std::istringstream negative("[events]\nevaluation_lag = -1\n");
  CHECK_THROWS(parse_config(negative, "."));
  CHECK(format_multiplier(2.5) == "2.5");
  CHECK(format_multiplier(2.0) == "2");
}

TEST_CASE("an empty tweet file stops at calibration") {
  const auto dir = scratch("empty");
  auto cfg = load_config(test_paths::data_dir / "jitterscope.conf");
  std::ofstream(dir / "tweets.jsonl").close();
  cfg.tweets = dir / "tweets.jsonl";
  cfg.out_dir = dir / "out";
  fs::create_directories(cfg.out_dir);
  try {
    run_calibrate(cfg);
    FAIL("expected a fatal error");
  } catch (const FatalError& e) {
    CHECK(e.stage() == "calibrate");
  }
}

TEST_CASE("synthetic generation is deterministic per seed") {
  const auto s = synth::default_scenario(7);
  const auto a = synth::generate_synthetic(s);
  const auto b = synth::generate_synthetic(s);
  CHECK(a.tweets == b.tweets);
  CHECK(a.bars == b.bars);
  CHECK(a.truth == b.truth);
  const auto c = synth::generate_synthetic(synth::default_scenario(8));
  CHECK(!(c.tweets == a.tweets));
  CHECK(a.truth.at("events").size() == 20);
}

TEST_CASE("no planted events and no background gives no tweets") {
  auto s = synth::default_scenario(7);
  s.planted.clear();
  s.background_rate = 0.0;
  const auto d = synth::generate_synthetic(s);
  CHECK(d.tweets.empty());
  CHECK(!d.bars.empty());
}

TEST_CASE("reruns, staged runs and runs without future data agree") {
  const auto rep = props::determinism_checks(scratch("determinism"), 7);
  std::string diff;
  for (const auto& d : rep.differing) diff += d + " ";
  CHECK_MESSAGE(rep.repeat_identical, diff);
  CHECK_MESSAGE(rep.staged_identical, diff);
  CHECK_MESSAGE(rep.model_without_future_identical, diff);
}
