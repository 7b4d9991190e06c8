#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rsr/io.hpp"
#include "test_util.hpp"

using namespace rsr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rsr_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
    CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("subspace file round trip") {
  Rng rng(1);
  const Subspace s = random_subspace(7, 3, rng);
  const fs::path p = scratch("s.txt");
  io::write_subspace(p, s);
  CHECK(io::read_subspace(p).basis() == s.basis());

  write_text(p, "1,2\n");
  CHECK_THROWS_AS(io::read_subspace(p), IoError);
  write_text(p, "# subspace D=3 d=1\n1\n0\n");
  CHECK_THROWS_AS(io::read_subspace(p), IoError);
  CHECK_THROWS_AS(io::read_subspace(scratch("missing.txt")), IoError);
}

TEST_CASE("dataset round trip is exact") {
  Rng rng(2);
  const Dataset data = add_noise(haystack(HaystackParams{13, 9, 1.0, 1.0, 6, 2}, rng), 0.01, rng);
  const fs::path p = scratch("data.csv");
  const io::DatasetPaths paths = io::write_dataset(p, data);
  CHECK(paths.meta.filename() == "data.meta.json");
  const Dataset back = io::read_dataset(p);
  CHECK(back.inliers == data.inliers);
  CHECK(back.outliers == data.outliers);
  REQUIRE(back.l_star);
  CHECK(back.l_star->basis() == data.l_star->basis());
  CHECK(back.noise_epsilon == 0.01);
  CHECK(back.meta["model"] == "haystack");

  // Without the sidecar the dataset loads without ground truth.
  fs::remove(paths.meta);
  const Dataset bare = io::read_dataset(p);
  CHECK_FALSE(bare.l_star);
  CHECK(bare.inliers == data.inliers);
}

TEST_CASE("malformed dataset files") {
  const fs::path p = scratch("bad.csv");
  fs::remove(io::dataset_paths(p).meta);
  write_text(p, "x0,x1\n1,2\n");
  CHECK_THROWS_AS(io::read_dataset(p), IoError);
  write_text(p, "x0,x1,label\n1,2,maybe\n");
  CHECK_THROWS_AS(io::read_dataset(p), IoError);
  write_text(p, "x0,x1,label\n1,abc,in\n");
  CHECK_THROWS_AS(io::read_dataset(p), IoError);
  write_text(p, "x0,x1,label\n1,in\n");
  CHECK_THROWS_AS(io::read_dataset(p), IoError);
  write_text(p, "x0,x1,label\n1,2,in\n");
  write_text(io::dataset_paths(p).meta, "{not json");
  CHECK_THROWS_AS(io::read_dataset(p), IoError);
  fs::remove(io::dataset_paths(p).meta);
}

TEST_CASE("trace CSV layout") {
  GgdTrace trace;
  trace.records.push_back({1, 0.5, 3.0, 1.0, std::nullopt, 0.25});
  trace.records.push_back({2, 0.25, 2.0, 0.5, 0.125, std::nullopt});
  trace.stopped_reason = StopReason::Converged;
  const fs::path p = scratch("trace.csv");
  io::write_trace(p, trace);
  const io::CsvTable t = io::check_csv_schema(p, io::kTraceHeader);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][4].empty());
  CHECK(t.rows[0][6].empty());
  CHECK(t.rows[1][5].empty());
  CHECK(t.rows[1][6] == "converged");
  CHECK(std::stod(t.rows[1][4]) == 0.125);
}

TEST_CASE("CSV schema check") {
  const fs::path p = scratch("t.csv");
  io::write_csv(p, io::CsvTable{{"a", "b"}, {{"1", "2"}, {"3", "4"}}});
  CHECK(io::check_csv_schema(p, {"a", "b"}).rows.size() == 2);
  CHECK_THROWS_AS(io::check_csv_schema(p, {"a", "c"}), IoError);
  write_text(p, "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(io::check_csv_schema(p, {"a", "b"}), IoError);
  CHECK(io::split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("report formatting") {
  StabilityReport rep;
  rep.permeance = 2.0;
  rep.seed = 5;
  const std::string kv = io::to_key_value(rep);
  CHECK(kv.find("permeance=2\n") != std::string::npos);
  CHECK(kv.find("seed=5\n") != std::string::npos);
  CHECK(io::report_header().size() == io::report_row(rep).size());
  CHECK(io::to_key_value(NoisyStabilityReport{}).find("s_n=") != std::string::npos);
}
