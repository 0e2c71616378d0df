#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "ngas/error.hpp"
#include "ngas/io.hpp"

using namespace ngas;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "ngas_io_test";
  fs::create_directories(dir);
  return dir;
}

PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 100.0);
  std::vector<double> c(n * dim);
  for (double& x : c) x = g(rng);
  return PointCloud(dim, c);
}

}  // namespace

TEST_CASE("cloud round trip") {
  const auto dir = scratch_dir();
  for (auto fmt : {CloudFormat::Xyz, CloudFormat::Ply}) {
    for (std::size_t dim : {2, 3}) {
      const auto cloud = random_cloud(500, dim, dim);
      const auto path = dir / (fmt == CloudFormat::Xyz ? "rt.xyz" : "rt.ply");
      write_cloud(cloud, path, fmt, "test cloud");
      const auto back = read_cloud(path, dim);
      REQUIRE(back.dim() == dim);
      REQUIRE(back.size() == cloud.size());
      // 17 significant digits: exact.
      CHECK(back == cloud);
    }
  }
}

TEST_CASE("xyz parsing") {
  SUBCASE("comments and blank lines") {
    std::istringstream in("# header\n1 2 3\n\n4 5 6\n");
    const auto c = parse_xyz(in, "mem");
    CHECK(c == PointCloud(3, {1, 2, 3, 4, 5, 6}));
  }
  SUBCASE("ragged row reports its line") {
    std::istringstream in("1 2 3\n4 5 6\n7 8\n");
    try {
      parse_xyz(in, "mem");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("non-finite coordinates are rejected") {
    std::istringstream nan("1 2\nnan 3\n");
    CHECK_THROWS_AS(parse_xyz(nan, "mem"), ParseError);
    std::istringstream inf("1 inf\n");
    CHECK_THROWS_AS(parse_xyz(inf, "mem"), ParseError);
  }
  SUBCASE("garbage is rejected") {
    std::istringstream in("1 2\n3 x\n");
    CHECK_THROWS_AS(parse_xyz(in, "mem"), ParseError);
  }
  SUBCASE("dimension mismatch names both") {
    std::istringstream in("1 2\n");
    try {
      parse_xyz(in, "mem", 3);
      FAIL("expected error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find('3') != std::string::npos);
      CHECK(msg.find('2') != std::string::npos);
    }
  }
}

TEST_CASE("ply with faces") {
  std::istringstream in(
      "ply\nformat ascii 1.0\ncomment fixture\nelement vertex 3\n"
      "property float x\nproperty float y\nproperty float z\nproperty uchar red\n"
      "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
      "0 0 0 255\n1 0 0 255\n0 1 0.5 255\n3 0 1 2\n");
  const auto c = parse_ply(in, "mem");
  CHECK(c == PointCloud(3, {0, 0, 0, 1, 0, 0, 0, 1, 0.5}));

  std::istringstream binary("ply\nformat binary_little_endian 1.0\nelement vertex 1\nend_header\n");
  CHECK_THROWS_AS(parse_ply(binary, "mem"), ParseError);
}

TEST_CASE("writers") {
  CHECK_THROWS_AS(format_cloud(PointCloud(2), CloudFormat::Xyz), InvalidInput);

  const auto text = format_cloud(PointCloud(2, {0.5, -1.0, 2.0, 3.25}), CloudFormat::Xyz);
  std::istringstream lines(text);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++rows;
    std::istringstream fields(line);
    std::string f;
    int cols = 0;
    while (fields >> f) ++cols;
    CHECK(cols == 2);
  }
  CHECK(rows == 2);

  const auto cloud = random_cloud(100, 3, 9);
  CHECK(format_cloud(cloud, CloudFormat::Ply) == format_cloud(cloud, CloudFormat::Ply));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");

  CHECK_THROWS_AS(write_cloud(cloud, "/nonexistent_dir/x.xyz", CloudFormat::Xyz), IoError);
  CHECK_THROWS_AS(read_cloud("/nonexistent_dir/x.xyz"), IoError);
  CHECK(format_from_path("a/b.PLY") == CloudFormat::Ply);
  CHECK(format_from_path("a/b.txt") == CloudFormat::Xyz);
}

TEST_CASE("density table csv") {
  CHECK(density_table_header(2) == "unit_index,x,y,p_hat,rho_hat,log10_p,log10_rho");
  CHECK(density_table_header(3) == "unit_index,x,y,z,p_hat,rho_hat,log10_p,log10_rho");

  DensityTable t;
  t.dim = 2;
  for (std::size_t i = 0; i < 5; ++i)
    t.rows.push_back(DensityRow{i, Point{double(i), 1.0}, 0.1, 10.0, -1.0, 1.0});
  const auto csv = format_density_table(t);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == density_table_header(2));
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
  CHECK(csv == format_density_table(t));
}

TEST_CASE("report round trip") {
  RunReport r;
  r.config = {{"k", 64}, {"nested", {{"a", 1.5}}}};
  r.dataset_seed = 1;
  r.training_seed = 2;
  r.evaluation_seed = std::numeric_limits<std::uint64_t>::max();
  r.metrics.entropy = 4.1;
  r.metrics.alpha = 0.1 + 0.2;
  r.metrics.phase = "shell";
  r.trace.push_back(TracePoint{0, 0.1, 8.0, 0.25, std::nullopt});
  r.trace.push_back(TracePoint{100, 0.01, 0.05, 0.125, 0.5});
  r.files["codebook"] = "codebook.xyz";
  r.timings["train"] = 1.25;
  const auto path = scratch_dir() / "report.json";
  write_report(r, path);
  CHECK(read_report(path) == r);

  RunReport failed;
  failed.status = "failed";
  failed.failure_stage = "train";
  failed.failure_message = "boom";
  CHECK(report_from_json(to_json(failed)) == failed);
}
