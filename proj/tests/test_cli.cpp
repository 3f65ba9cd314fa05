#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rdmatch/att.hpp"
#include "rdmatch/cli.hpp"
#include "rdmatch/ite.hpp"
#include "rdmatch/simulate.hpp"

using namespace rdmatch;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json parsed() const { return json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rdmatch");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json without_timing(json j) {
  j["manifest"].erase("duration_seconds");
  return j;
}

const std::string kNull = RDMATCH_DATA_DIR "/null_fixture.csv";
const std::string kFew = RDMATCH_DATA_DIR "/few_controls.csv";

std::vector<std::string> null_args(const std::string& sub) {
  return {sub, "--data", kNull, "--y", "y", "--q", "q", "--x", "x1,x2,x3", "--z", "x1,x2,x3,x4", "--tau", "0"};
}

}  // namespace

TEST_CASE("estimate on the noiseless null fixture") {
  for (const bool cf : {false, true}) {
    auto args = null_args("estimate");
    if (cf) args.push_back("--crossfit");
    const auto r = run_cli(args);
    REQUIRE(r.code == 0);
    const auto j = r.parsed();
    CHECK(std::abs(j.at("theta_hat").get<double>()) <= 1e-8);
    CHECK(j.at("crossfit").get<bool>() == cf);
    CHECK(j.at("n").get<int>() == 90);
    CHECK(j.at("beta_hat").size() == 3);
    CHECK(j.at("manifest").at("input_digest").get<std::string>() == cli::file_digest(kNull));
    CHECK(j.at("manifest").at("input_digest").get<std::string>().size() == 64);
  }
}

TEST_CASE("identical invocations give identical output apart from timing") {
  auto args = null_args("bootstrap");
  for (const char* extra : {"--b", "40", "--seed", "17"}) args.push_back(extra);
  const auto a = run_cli(args);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const auto b = run_cli(args);
  const auto c = run_cli(threaded);
  REQUIRE(a.code == 0);
  CHECK(without_timing(a.parsed()) == without_timing(b.parsed()));
  auto jc = without_timing(c.parsed());
  auto ja = without_timing(a.parsed());
  CHECK(jc["sigma2_hat"] == ja["sigma2_hat"]);
  CHECK(jc["ci"] == ja["ci"]);
}

TEST_CASE("two bootstrap replicates are enough for a finite variance") {
  auto args = null_args("bootstrap");
  args.insert(args.end(), {"--b", "2", "--seed", "42"});
  const auto r = run_cli(args);
  REQUIRE(r.code == 0);
  const auto j = r.parsed();
  CHECK(std::isfinite(j.at("sigma2_hat").get<double>()));
  CHECK(j.at("b").get<int>() == 2);
  CHECK(j.at("b_failed").get<int>() == 0);
}

TEST_CASE("exit codes follow the error category") {
  SUBCASE("input") {
    auto args = null_args("estimate");
    args[4] = "missing_column";
    const auto r = run_cli(args);
    CHECK(r.code == cli::kInputError);
    CHECK(r.out.empty());
    CHECK(r.err.find("MissingColumn") != std::string::npos);
    CHECK(run_cli({"estimate", "--y", "y"}).code == cli::kInputError);
    CHECK(run_cli({"frobnicate"}).code == cli::kInputError);
  }
  SUBCASE("numeric") {
    // the same covariate twice makes the differenced design singular
    const auto r = run_cli({"estimate", "--data", kNull, "--y", "y", "--q", "q", "--x", "x1,x1", "--z", "x4", "--tau",
                            "0"});
    CHECK(r.code == cli::kNumericError);
    CHECK(r.err.find("RankDeficient") != std::string::npos);
  }
  SUBCASE("bootstrap") {
    const auto r = run_cli({"bootstrap", "--data", kFew, "--y", "y", "--q", "q", "--x", "x", "--z", "x", "--tau", "0",
                            "--no-shuffle", "--b", "50"});
    CHECK(r.code == cli::kBootstrapError);
    CHECK(r.err.find("TooManyFailures") != std::string::npos);
  }
}

TEST_CASE("simulate gen writes the documented columns and estimate reads them back") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto small = (dir / "rdmatch_cli_gen9.csv").string();
  REQUIRE(run_cli({"simulate", "--mode", "gen", "--n", "9", "--seed", "4", "--out", small}).code == 0);
  std::ifstream in(small);
  std::string header;
  std::getline(in, header);
  CHECK(header == "y,x1,x2,x3,x4,q");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 9);

  const auto path = (dir / "rdmatch_cli_gen.csv").string();
  REQUIRE(run_cli({"simulate", "--mode", "gen", "--n", "3000", "--seed", "8", "--out", path}).code == 0);
  const auto r = run_cli({"estimate", "--data", path, "--y", "y", "--q", "q", "--x", "x1,x2,x3", "--z", "x1,x2,x3,x4",
                          "--tau", "0", "--seed", "8", "--crossfit"});
  REQUIRE(r.code == 0);
  sim::DgpConfig cfg;
  cfg.n = 3000;
  cfg.seed = 8;
  const auto direct = estimate_att_crossfit(sim::generate(cfg), 8);
  CHECK(r.parsed().at("theta_hat").get<double>() == direct.theta_cf);
}

TEST_CASE("ite writes a model and predicts on a grid") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto data = (dir / "rdmatch_cli_ite.csv").string();
  REQUIRE(run_cli({"simulate", "--mode", "gen", "--n", "3000", "--seed", "2", "--out", data}).code == 0);
  const auto grid = (dir / "rdmatch_cli_grid.csv").string();
  {
    std::ofstream g(grid);
    g << "x1,x2,x3,eta_hat\n0,0,0,0\n1,0.5,-0.5,0.2\n";
  }
  const auto model = (dir / "rdmatch_cli_model.txt").string();
  const auto r = run_cli({"ite", "--data", data, "--y", "y", "--q", "q", "--x", "x1,x2,x3", "--z", "x1,x2,x3,x4",
                          "--tau", "0", "--seed", "2", "--include-eta", "true", "--model-out", model, "--predict-grid",
                          grid});
  REQUIRE(r.code == 0);
  const auto j = r.parsed();
  CHECK(j.at("predictions").size() == 2);
  CHECK(std::filesystem::exists(model));
  const auto loaded = load_model(model);
  const std::vector<double> x{1, 0.5, -0.5};
  CHECK(j.at("predictions")[1].get<double>() == predict_ite(loaded, x, 0.2));
  CHECK(j.at("basis_dimension").get<long>() == basis_dimension(4, j.at("chosen_df").get<int>(), true));

  CHECK(run_cli({"ite", "--data", data, "--y", "y", "--q", "q", "--x", "x1,x2,x3", "--z", "x1,x2,x3,x4", "--tau", "0",
                 "--model-out", model, "--predict-out", grid})
            .code == cli::kInputError);
}
