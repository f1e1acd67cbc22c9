#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "see/dataset.hpp"

using namespace see;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "see_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  fs::path p = temp_dir() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

std::string cli_path() {
  if (const char* env = std::getenv("SEE_CLI")) return env;
  return "./see_cli";
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("parse_dataset reads numeric columns by name") {
  fs::path p = write_file("basic.csv",
                          "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  DatasetOptions opt;
  opt.response = "y";
  Sample s = parse_dataset(p.string(), opt);
  CHECK(s.x.rows() == 3);
  CHECK(s.x.cols() == 2);
  CHECK(s.y(1) == doctest::Approx(6.0));
  CHECK(s.x(2, 0) == doctest::Approx(7.0));

  DatasetOptions explicit_cols;
  explicit_cols.response = "y";
  explicit_cols.predictors = {"b"};
  Sample s2 = parse_dataset(p.string(), explicit_cols);
  CHECK(s2.x.cols() == 1);
  CHECK(s2.x(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("parse_dataset applies filters in order") {
  fs::path p = write_file(
      "filtered.csv",
      "sex,len,y\nM,1,10\nF,2,20\nI,3,30\nM,4,40\nM,5,50\n");
  DatasetOptions opt;
  opt.response = "y";
  opt.predictors = {"len"};
  opt.filters.push_back(DatasetFilter::equals("sex", "M"));
  opt.filters.push_back(DatasetFilter::drop_row(2));  // drops the len=4 row
  Sample s = parse_dataset(p.string(), opt);
  REQUIRE(s.y.size() == 2);
  CHECK(s.y(0) == doctest::Approx(10.0));
  CHECK(s.y(1) == doctest::Approx(50.0));
}

TEST_CASE("parse_dataset names the offending cell") {
  fs::path p = write_file("bad.csv", "a,y\n1,2\nxx,4\n");
  DatasetOptions opt;
  opt.response = "y";
  opt.predictors = {"a"};
  try {
    parse_dataset(p.string(), opt);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("xx") != std::string::npos);
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'a'") != std::string::npos);
  }

  fs::path p2 = write_file("missing.csv", "a,y\n1,\n");
  try {
    parse_dataset(p2.string(), opt);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }

  DatasetOptions bad_col;
  bad_col.response = "nope";
  CHECK_THROWS_AS(parse_dataset(p.string(), bad_col), ParseError);
  CHECK_THROWS_AS(parse_dataset("/nonexistent/file.csv", opt), ParseError);
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("estimate") == 2);  // missing required options
  CHECK(run_cli("estimate --input /nonexistent.csv --response y "
                "--functional mean --s 1") == 1);
}

TEST_CASE("cli simulate then estimate round trip") {
  fs::path dir = temp_dir();
  fs::path data = dir / "model1.csv";
  REQUIRE(run_cli("simulate --model I --n 150 --seed 4 --output " +
                  data.string()) == 0);
  REQUIRE(fs::exists(data));
  const std::string contents = slurp(data);
  CHECK(contents.find("x1") != std::string::npos);
  CHECK(contents.find(",y\n") != std::string::npos);

  fs::path prefix = dir / "fit";
  REQUIRE(run_cli("estimate --input " + data.string() +
                  " --response y --functional mean --s 1 --seed 9 "
                  "--output " + prefix.string()) == 0);
  CHECK(fs::exists(dir / "fit_basis.csv"));
  CHECK(fs::exists(dir / "fit_predictors.csv"));
  CHECK(fs::exists(dir / "fit_diagnostics.txt"));
  const std::string diag = slurp(dir / "fit_diagnostics.txt");
  CHECK(diag.find("seed") != std::string::npos);
}

TEST_CASE("cli benchmark writes both report forms") {
  fs::path dir = temp_dir();
  fs::path prefix = dir / "bench";
  REQUIRE(run_cli("benchmark --models I --functional mean --estimator rmave "
                  "--n 80 --reps 2 --seed 5 --output " +
                  prefix.string()) == 0);
  REQUIRE(fs::exists(dir / "bench.csv"));
  REQUIRE(fs::exists(dir / "bench.txt"));
  const std::string csv = slurp(dir / "bench.csv");
  CHECK(csv.find("# seed=5") != std::string::npos);
  CHECK(csv.find("rmave") != std::string::npos);
}
