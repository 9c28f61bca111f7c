#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "changeforge/image.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
};

Run cli(const std::string& args, bool with_stderr = false) {
  std::string cmd = std::string(CHANGEFORGE_CLI_PATH) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / "changeforge_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: simulate then detect a seeded scenario") {
  auto dir = scratch();
  auto csv = (dir / "s2.csv").string();
  REQUIRE(cli("simulate --scenario 2 --seed 7 -o " + csv).code == 0);
  auto truth = json::parse(slurp(csv + ".truth.json"));
  CHECK(truth["changepoints"] == json::array({251, 501, 751}));

  auto r = cli("detect --method irfl --family mean_shift " + csv);
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  for (const char* key : {"method", "family", "params", "changepoints", "coefficients", "bic", "m_hat", "runtime_ms"})
    CHECK(j.contains(key));
  auto cps = j["changepoints"].get<std::vector<int>>();
  REQUIRE(cps.size() == 3);
  int expect[] = {251, 501, 751};
  for (int k = 0; k < 3; ++k) CHECK(std::abs(cps[k] - expect[k]) <= 10);
  CHECK(j["m_hat"] == 3);
}

TEST_CASE("cli: a dominant penalty gives no changepoints") {
  auto csv = (scratch() / "constant.csv").string();
  {
    std::ofstream os(csv);
    for (int i = 0; i < 30; ++i) os << (i % 3) * 0.1 << '\n';
  }
  auto r = cli("detect --method pelt --beta 1e12 " + csv);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["changepoints"] == json::array());
}

TEST_CASE("cli: output is deterministic apart from the runtime") {
  auto csv = (scratch() / "s1.csv").string();
  REQUIRE(cli("simulate --scenario 1 --n 150 --seed 3 -o " + csv).code == 0);
  auto a = json::parse(cli("detect --method wbs --seed 5 " + csv).out);
  auto b = json::parse(cli("detect --method wbs --seed 5 " + csv).out);
  a.erase("runtime_ms");
  b.erase("runtime_ms");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("cli: evaluation report shape") {
  auto out = (scratch() / "report.csv").string();
  REQUIRE(cli("evaluate --scenario 1 --methods irfl,wbs,pelt --reps 50 --n 120 --seed 1 -o " + out).code == 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "scenario,method,seed,m_hat,distance,bic,runtime_ms");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 150);
}

TEST_CASE("cli: errors map to exit codes") {
  auto csv = (scratch() / "s1.csv").string();
  REQUIRE(cli("simulate --scenario 1 --n 80 --seed 3 -o " + csv).code == 0);
  CHECK(cli("detect --method nosuch " + csv).code == 2);
  auto r = cli("detect --method bs --family trend_shift " + csv, true);
  CHECK(r.code == 2);
  CHECK(r.out.find("method cannot estimate this family") != std::string::npos);
  CHECK(cli("detect --frobnicate " + csv).code == 2);
  auto bad = (scratch() / "bad.csv").string();
  {
    std::ofstream os(bad);
    os << "1\n2\nthree\n";
  }
  CHECK(cli("detect --method op " + bad).code == 1);
}

TEST_CASE("cli: path dump and csv detection output") {
  auto csv = (scratch() / "step.csv").string();
  {
    std::ofstream os(csv);
    for (int i = 0; i < 10; ++i) os << (i < 5 ? 0.0 : 1.0) << '\n';
  }
  auto r = cli("path --family mean_shift " + csv);
  REQUIRE(r.code == 0);
  CHECK(r.out.find('\t') != std::string::npos);
  auto c = cli("detect --method op --beta 0.1 --format csv " + csv);
  REQUIRE(c.code == 0);
  CHECK(c.out.find("6") != std::string::npos);
}

TEST_CASE("cli: denoise writes iterates and an edge overlay") {
  auto dir = scratch();
  auto pgm = (dir / "blocks.pgm").string();
  changeforge::GridImage img{Eigen::MatrixXd::Zero(8, 8)};
  img.Y.rightCols(4).setOnes();
  changeforge::write_pgm(pgm, img);
  auto prefix = (dir / "den").string();
  auto r = cli("denoise " + pgm + " --lambda-grid 0.3 -o " + prefix);
  REQUIRE(r.code == 0);
  bool overlay = false;
  int pgms = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (name.rfind("den", 0) != 0) continue;
    overlay |= name.find("_edges.ppm") != std::string::npos;
    pgms += e.path().extension() == ".pgm";
  }
  CHECK(overlay);
  CHECK(pgms >= 1);
  fs::remove_all(dir);
}
