#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "streambet/errors.hpp"
#include "streambet/score_table.hpp"
#include "streambet/stream.hpp"

using namespace streambet;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  REQUIRE(f != nullptr);
  std::fwrite(body.data(), 1, body.size(), f);
  std::fclose(f);
}

}  // namespace

TEST_CASE("gaussian pair generation is deterministic and indexed from 1") {
  StreamSpec x = StreamSpec::gaussian_spec(0.0, 1.0, {}, 11);
  StreamSpec y = StreamSpec::gaussian_spec(-1.0, 0.5, {}, 22);
  auto a = generate(x, y, 50);
  auto b = generate(x, y, 50);
  REQUIRE(a.size() == 50);
  CHECK(a.front().t == 1);
  CHECK(a.back().t == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].score_x == b[i].score_x);
    CHECK(a[i].score_y == b[i].score_y);
  }

  auto c = generate(x.with_seed(23), y, 50);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].score_x != c[i].score_x) any_diff = true;
    CHECK(a[i].score_y == c[i].score_y);  // y side untouched
  }
  CHECK(any_diff);
}

TEST_CASE("zero-sd gaussian is a constant stream") {
  StreamSpec x = StreamSpec::gaussian_spec(2.5, 0.0, {}, 1);
  StreamSpec y = StreamSpec::gaussian_spec(2.5, 0.0, {}, 2);
  for (const ScoreObservation& obs : generate(x, y, 20)) {
    CHECK(obs.score_x == 2.5);
    CHECK(obs.score_y == 2.5);
  }
}

TEST_CASE("clipping is exact at the edges") {
  StreamSpec x = StreamSpec::gaussian_spec(0.0, 10.0, {{-0.25, 0.25}}, 5);
  StreamSpec y = StreamSpec::gaussian_spec(0.0, 0.0, {}, 6);
  int at_edge = 0;
  for (const ScoreObservation& obs : generate(x, y, 400)) {
    CHECK(obs.score_x >= -0.25);
    CHECK(obs.score_x <= 0.25);
    if (obs.score_x == -0.25 || obs.score_x == 0.25) ++at_edge;
  }
  // sd = 10 against a half-width of 0.25: nearly every draw clips.
  CHECK(at_edge > 350);
}

TEST_CASE("presets keep the score gap within the published bound") {
  for (const std::string& name : preset_names()) {
    Preset p = paper_preset(name);
    auto stream = generate(p.x, p.y, 600);
    double worst = 0.0;
    for (const ScoreObservation& obs : stream) {
      worst = std::max(worst, std::abs(obs.score_x - obs.score_y));
    }
    CHECK(worst <= p.calibration.d);
    CHECK(p.calibration.epsilon < p.calibration.d);
  }
}

TEST_CASE("preset catalogue carries the published triples") {
  Preset flash = paper_preset("fastdetect-neo27-flash");
  CHECK(flash.delta == 2.4786);
  CHECK(flash.calibration.epsilon == 0.3634);
  CHECK(flash.calibration.d == 7.6444);
  CHECK(flash.x.mean - flash.y.mean == doctest::Approx(2.4786).epsilon(1e-12));
  CHECK(flash.x.sd == doctest::Approx(7.6444 / 6.0).epsilon(1e-12));

  Preset pro = paper_preset("fastdetect-neo27-pro");
  CHECK(pro.delta == 1.2992);
  CHECK(pro.calibration.epsilon == 0.3660);
  CHECK(pro.calibration.d == 6.5104);

  Preset palm = paper_preset("fastdetect-neo27-palm2");
  CHECK(palm.delta == 3.6338);
  CHECK(palm.calibration.epsilon == 0.4232);
  CHECK(palm.calibration.d == 9.1603);

  Preset null_case = paper_preset("h0-identical");
  CHECK(null_case.delta == 0.0);
  CHECK(null_case.calibration.epsilon == 0.0);
  auto stream = generate(null_case.x, null_case.y, 10);
  for (const ScoreObservation& obs : stream) {
    CHECK(obs.score_x == obs.score_y);
  }

  CHECK_THROWS_AS(paper_preset("no-such-preset"), ConfigError);
  CHECK(preset_names().size() == 5);
}

TEST_CASE("mixture switches segment exactly at the boundary") {
  StreamSpec seg1 = StreamSpec::gaussian_spec(1.0, 0.0, {}, 0);
  StreamSpec seg2 = StreamSpec::gaussian_spec(-4.0, 0.0, {}, 0);
  StreamSpec mix = StreamSpec::mixture_spec({{3, seg1}, {4, seg2}}, 77);
  StreamSpec flat = StreamSpec::gaussian_spec(0.0, 0.0, {}, 1);

  auto stream = generate(mix, flat, 7);
  for (int i = 0; i < 3; ++i) CHECK(stream[i].score_x == 1.0);
  for (int i = 3; i < 7; ++i) CHECK(stream[i].score_x == -4.0);

  CHECK_THROWS_AS(generate(mix, flat, 8), InvalidInputError);
}

TEST_CASE("empirical resampling draws from the pool") {
  auto csv = temp_file("stream_pool.csv");
  write_text(csv, "score\n0.5\n-1.25\n3.75\n0.5\n2.125\n");

  StreamSpec emp = StreamSpec::empirical_spec(csv.string(), "score",
                                              ResampleMode::with_replacement, 3);
  StreamSpec flat = StreamSpec::gaussian_spec(0.0, 0.0, {}, 1);
  std::vector<double> pool = {0.5, -1.25, 3.75, 0.5, 2.125};
  for (const ScoreObservation& obs : generate(emp, flat, 200)) {
    CHECK(std::count(pool.begin(), pool.end(), obs.score_x) > 0);
  }

  StreamSpec once = StreamSpec::empirical_spec(
      csv.string(), "score", ResampleMode::without_replacement, 3);
  auto drawn = generate(once, flat, 5);
  std::vector<double> xs;
  for (const ScoreObservation& obs : drawn) xs.push_back(obs.score_x);
  std::sort(xs.begin(), xs.end());
  std::vector<double> sorted_pool = pool;
  std::sort(sorted_pool.begin(), sorted_pool.end());
  CHECK(xs == sorted_pool);

  CHECK_THROWS_AS(generate(once, flat, 6), InvalidInputError);
}

TEST_CASE("paired file streams replay the file verbatim") {
  auto csv = temp_file("stream_pairs.csv");
  write_text(csv, "score_x,score_y\n0.1,0.2\n-1.5,2.5\n0.25,-0.75\n");

  StreamSpec fp = StreamSpec::file_paired_spec(csv.string());
  auto stream = generate(fp, fp, 2);
  REQUIRE(stream.size() == 2);
  CHECK(stream[0].score_x == 0.1);
  CHECK(stream[0].score_y == 0.2);
  CHECK(stream[1].score_x == -1.5);
  CHECK(stream[1].score_y == 2.5);

  CHECK_THROWS_AS(generate(fp, fp, 4), InvalidInputError);

  StreamSpec other = StreamSpec::file_paired_spec("somewhere_else.csv");
  CHECK_THROWS_AS(generate(fp, other, 2), ConfigError);
  StreamSpec flat = StreamSpec::gaussian_spec(0.0, 0.0, {}, 1);
  CHECK_THROWS_AS(generate(fp, flat, 2), ConfigError);
}

TEST_CASE("score tables round-trip awkward doubles exactly") {
  ScoreTable table;
  table.columns = {"score_x", "score_y"};
  table.cells = {{0.1, 1e-17, -3.5e300, 1.0 / 3.0},
                 {-0.30000000000000004, 2.2250738585072014e-308, 0.0, 6.02e23}};
  auto csv = temp_file("stream_roundtrip.csv");
  save_scores(csv, table);
  ScoreTable back = load_scores(csv);
  REQUIRE(back.columns == table.columns);
  REQUIRE(back.rows() == 4);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK(back.cells[c][r] == table.cells[c][r]);
    }
  }
}

TEST_CASE("loader errors carry the path and line number") {
  auto csv = temp_file("stream_bad.csv");
  write_text(csv, "score_x,score_y\n1.0,2.0\n1.0,oops\n");
  try {
    load_scores(csv);
    FAIL("expected a parse failure");
  } catch (const IoError& e) {
    std::string msg = e.what();
    CHECK(msg.find("stream_bad.csv") != std::string::npos);
    CHECK(msg.find(":3") != std::string::npos);
  }

  auto missing = temp_file("does_not_exist_726.csv");
  try {
    load_scores(missing);
    FAIL("expected a missing-file failure");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("does_not_exist_726.csv") !=
          std::string::npos);
  }

  auto headerless = temp_file("stream_headerless.csv");
  write_text(headerless, "");
  CHECK_THROWS_AS(load_scores(headerless), IoError);

  auto ragged = temp_file("stream_ragged.csv");
  write_text(ragged, "a,b\n1.0,2.0\n3.0\n");
  CHECK_THROWS_AS(load_scores(ragged), IoError);
}

TEST_CASE("spec validation rejects malformed shapes") {
  CHECK_THROWS_AS(StreamSpec::gaussian_spec(0.0, -1.0, {}, 1), ConfigError);
  CHECK_THROWS_AS(StreamSpec::gaussian_spec(0.0, 1.0, {{2.0, -2.0}}, 1),
                  ConfigError);

  StreamSpec ok = StreamSpec::gaussian_spec(0.0, 1.0, {}, 1);
  CHECK_THROWS_AS(StreamSpec::mixture_spec({{0, ok}}, 1), ConfigError);
  CHECK_THROWS_AS(
      StreamSpec::mixture_spec({{2, StreamSpec::file_paired_spec("x.csv")}}, 1),
      ConfigError);

  // Direct struct mutation is caught by validate() itself.
  StreamSpec mutated = ok;
  mutated.sd = -0.5;
  CHECK_THROWS_AS(mutated.validate(), ConfigError);
}
