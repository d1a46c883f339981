#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "tcid/errors.hpp"
#include "tcid/io.hpp"

using namespace tcid;

namespace {

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_observations(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("observation CSV round-trips exactly at full precision") {
  const auto sim = simulate(SourceSpec{0.9, 1e4, 4},
                            CoderConfig{{TransformKind::Dct2, 5, 0},
                                        {sample_log_uniform_steps(5, 0.1, 10, 4)}},
                            9);
  std::ostringstream out;
  write_observations(out, sim.observations);
  CHECK(out.str().rfind("# dim=5 count=9\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_observations(in);
  REQUIRE(back.size() == sim.observations.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK((back[i] - sim.observations[i]).cwiseAbs().maxCoeff() <= 1e-110);
  }
}

TEST_CASE("17-digit output parses back within double rounding") {
  std::vector<Vector> obs = {Vector::Constant(2, Real(1) / 3)};
  std::ostringstream out;
  write_observations(out, obs, 17);
  std::istringstream in(out.str());
  const auto back = read_observations(in);
  CHECK(abs(back[0](0) - Real(1) / 3) < 1e-16);
}

TEST_CASE("reader accepts headerless input, comments and blank lines") {
  std::istringstream in("1,2\n\n# a comment\n  3 , 4.5e0 \n");
  const auto obs = read_observations(in);
  REQUIRE(obs.size() == 2);
  CHECK(obs[1](1) == Real(4.5));
}

TEST_CASE("reader reports the offending line") {
  CHECK(parse_error_line("1,2\n3,x\n") == 2);
  CHECK(parse_error_line("1,2\n3\n") == 2);
  CHECK(parse_error_line("# dim=3\n1,2\n") == 2);
  CHECK(parse_error_line("1,2\n,\n") == 2);
  CHECK(parse_error_line("1,2\nnan,1\n") == 2);
  CHECK(parse_error_line("1,2\n1e999999,1\n") == 2);
  CHECK(parse_error_line("# dim=2 count=3\n1,2\n3,4\n") == 3);
  CHECK(parse_error_line("# dim=two\n") == 1);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_observations(empty), ParseError);
}

TEST_CASE("missing files are I/O errors") {
  CHECK_THROWS_AS(read_observations_file("/nonexistent/dir/obs.csv"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/out.txt", "x"), IoError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/dir/x.json"), IoError);
}

TEST_CASE("matrix JSON in both layouts") {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  const Json rows = matrix_to_json(m);
  CHECK(rows.dump() == "[[1.0,2.0],[3.0,4.0]]");
  CHECK(matrix_from_json(rows) == m);
  CHECK(matrix_from_json(Json::parse("[1,2,3,4]")) == m);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[1,2,3]")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,2],[3]]")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,\"a\"],[3,4]]")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("{}")), ParseError);
}

TEST_CASE("result document fields") {
  const auto sim = simulate(SourceSpec{0.9, 1e4, 2},
                            CoderConfig{{TransformKind::Dct2, 4, 0},
                                        {sample_log_uniform_steps(4, 0.1, 10, 2)}},
                            12);
  const auto id = identify(sim.observations, {}, default_dictionary(4));
  const Json j = result_to_json(id);
  for (const char* key : {"dim", "num_observations", "determinant", "steps", "transform",
                          "orthogonal_decomposition_ok", "dictionary_match", "diagnostics"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["dim"] == 4);
  CHECK(j["num_observations"] == 12);
  CHECK(j["steps"].size() == 4);
  CHECK(j["transform"].size() == 4);
  CHECK(j["transform"][0].size() == 4);
  CHECK(j["dictionary_match"]["kind"] == "dct2");
  CHECK(j["dictionary_match"]["signed_permutation"].size() == 4);
  CHECK(j["diagnostics"].contains("swap_count"));
  CHECK(j["diagnostics"].contains("max_membership_residual"));

  const std::vector<Vector> hex = {Vector::Unit(2, 0), (Vector(2) << Real(0.5), sqrt(Real(3)) / 2).finished()};
  const Json f = result_to_json(identify(hex, {}, default_dictionary(2)));
  CHECK(f["steps"].is_null());
  CHECK(f["transform"].is_null());
  CHECK(f["dictionary_match"].is_null());
  CHECK(f["orthogonal_decomposition_ok"] == false);
}

TEST_CASE("rank-deficiency document") {
  const RankDeficiencyError e(3, 1, {{0, 1, 0}, {0, 0, 1}});
  const Json j = rank_deficiency_to_json(e);
  CHECK(j["error"] == "rank_deficiency");
  CHECK(j["unidentifiable_dimensions"] == 2);
  CHECK(j["unreached_directions"].size() == 2);
}

TEST_CASE("ground-truth sidecar round-trips") {
  GroundTruth t;
  t.transform = {TransformKind::RandomOrthonormal, 3, 99};
  t.transform_matrix = build_transform(t.transform);
  t.steps = sample_log_uniform_steps(3, 0.1, 10, 1);
  t.source = {0.8, 2.5, 17};
  t.count = 11;
  t.seed = 123;
  const GroundTruth back = truth_from_json(Json::parse(truth_to_json(t).dump()));
  CHECK(back.transform.kind == t.transform.kind);
  CHECK(back.transform.seed == 99);
  CHECK(back.transform.size == 3);
  CHECK((back.transform_matrix - t.transform_matrix).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(back.steps == t.steps);
  CHECK(back.source.correlation == 0.8);
  CHECK(back.source.seed == 17);
  CHECK(back.count == 11);
  CHECK(back.seed == 123);
  CHECK_THROWS_AS(truth_from_json(Json::parse("{\"dim\": 3}")), ParseError);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "tcid_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "obs.csv").string();
  std::vector<Vector> obs = {Vector::Constant(3, 1), Vector::Constant(3, 2)};
  write_observations_file(path, obs);
  const auto back = read_observations_file(path);
  CHECK(back.size() == 2);
  write_text_file((dir / "bad.json").string(), "{");
  CHECK_THROWS_AS(read_json_file((dir / "bad.json").string()), ParseError);
  std::filesystem::remove_all(dir);
}
