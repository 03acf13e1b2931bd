#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "parisi/cli.hpp"
#include "parisi/phases.hpp"

using namespace parisi;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "parisi-zero");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(row);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!row.empty() && row.back() == ',') out.push_back("");
  return out;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::current_path() / "cli_scratch";
  fs::create_directories(dir);
  return dir / name;
}

class TolGuard {
public:
  explicit TolGuard(const char* v) { setenv("PARISI_TOL", v, 1); }
  ~TolGuard() { unsetenv("PARISI_TOL"); }
};

}  // namespace

TEST_CASE("classify output and exit codes") {
  Run rs = run({"classify", "--p", "2", "--s", "5", "--lambda", "1.0"});
  CHECK(rs.code == 0);
  auto j = nlohmann::json::parse(rs.out);
  CHECK(j["phase"] == "RS");
  CHECK(j["report"]["pass"] == true);

  Run one = run({"classify", "--p", "4", "--s", "18", "--lambda", "0.5"});
  CHECK(one.code == 0);
  j = nlohmann::json::parse(one.out);
  CHECK(j["phase"] == "OneRSB");
  CHECK(j["report"]["pass"] == true);
  CHECK(j["params"]["z"].get<double>() > 0.0);
  CHECK(j["params"]["q"].is_null());

  CHECK(run({"classify", "--p", "4", "--s", "3", "--lambda", "0.5"}).code == 1);
  CHECK(run({"classify", "--p", "4", "--s", "18", "--lambda", "1.5"}).code == 1);
  CHECK(run({"classify", "--p", "4", "--s", "18"}).code == 1);
  CHECK(run({"classify", "--p", "x", "--s", "18", "--lambda", "0.5"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"classify", "--p", "2", "--s", "4", "--lambda", "0.5", "--format", "xml"}).code == 1);
  CHECK(run({"--help"}).code == 0);

  Run un = run({"classify", "--p", "2", "--s", "4", "--lambda", "0.923076923076923"});
  CHECK(un.code == 2);
  CHECK(un.err.find("unresolved") != std::string::npos);

  Run csv = run({"classify", "--p", "4", "--s", "38", "--lambda", "0.795", "--format", "csv"});
  CHECK(csv.code == 0);
  auto ls = lines(csv.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == kCsvVersionLine);
  CHECK(ls[1] == sweep_csv_header());
  auto cells = split(ls[2]);
  CHECK(cells.size() == split(ls[1]).size());
  CHECK(cells[3] == "TwoRSB");
  CHECK(cells[8] != "");
  CHECK(cells[7] == "");
  CHECK(cells.back() == "true");
}

TEST_CASE("boundaries output") {
  Run r = run({"boundaries", "--p", "2", "--s", "4"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& b : j["boundaries"])
    if (b["name"] == "lambda_1Fto1") {
      found = true;
      CHECK(std::abs(b["lambda"].get<double>() - 12.0 / 13.0) <= 1e-12);
    }
  CHECK(found);

  j = nlohmann::json::parse(run({"boundaries", "--p", "4", "--s", "38"}).out);
  REQUIRE(j["boundaries"].size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(j["boundaries"][i - 1]["lambda"] < j["boundaries"][i]["lambda"]);
  CHECK(j["regime"]["tag"] == "FourPhase");

  j = nlohmann::json::parse(run({"boundaries", "--p", "4", "--s", "18"}).out);
  CHECK(j["regime"]["tag"] == "AllOneRSB");
  CHECK(j["boundaries"].empty());

  Run csv = run({"boundaries", "--p", "4", "--s", "28", "--format", "csv"});
  auto ls = lines(csv.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == kCsvVersionLine);
  CHECK(ls[2] == "regime,TwoPhase");
  CHECK(ls[3].rfind("lambda_1to2,", 0) == 0);
  CHECK(ls[4].rfind("lambda_2to1,", 0) == 0);
}

TEST_CASE("classify then verify round trip") {
  for (auto [p, s, l] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"4", "38", "0.795"}, {"4", "38", "0.9843"}, {"4", "38", "0.9886"}, {"2", "4", "0.7419"},
           {"2", "8", "0.97"}, {"4", "18", "0.5"}}) {
    CAPTURE(l);
    fs::path mp = scratch("measure_" + p + "_" + s + "_" + l + ".json");
    Run c = run({"classify", "--p", p, "--s", s, "--lambda", l, "--measure-out", mp.string()});
    REQUIRE(c.code == 0);
    auto cj = nlohmann::json::parse(c.out);
    Run v = run({"verify", "--p", p, "--s", s, "--lambda", l, "--measure", mp.string()});
    CHECK(v.code == 0);
    auto vj = nlohmann::json::parse(v.out);
    CHECK(vj["pass"] == true);
    for (const char* key : {"normalization_error", "min_g", "support_residual"})
      CHECK(std::abs(vj[key].get<double>() - cj["report"][key].get<double>()) <= 1e-12);
    CHECK(vj["energy"].get<double>() == cj["energy"].get<double>());

    fs::path whole = scratch("classification.json");
    std::ofstream(whole) << c.out;
    CHECK(run({"verify", "--p", p, "--s", s, "--lambda", l, "--measure", whole.string()}).code == 0);

    auto m = nlohmann::json::parse(slurp(mp));
    m["atom"] = m["atom"].get<double>() * 1.1;
    fs::path bad = scratch("tampered.json");
    std::ofstream(bad) << m.dump();
    Run t = run({"verify", "--p", p, "--s", s, "--lambda", l, "--measure", bad.string()});
    CHECK(t.code == 2);
    auto tj = nlohmann::json::parse(t.out);
    CHECK(tj["pass"] == false);
    CHECK(tj["normalization_error"].get<double>() > 0.01);
  }
  fs::path junk = scratch("junk.json");
  std::ofstream(junk) << "{\"segments\": [";
  CHECK(run({"verify", "--p", "4", "--s", "18", "--lambda", "0.5", "--measure", junk.string()}).code == 1);
  std::ofstream(junk, std::ios::trunc) << R"({"segments":[{"lo":0,"hi":0.5,"kind":"Constant","value":1}],"atom":1})";
  CHECK(run({"verify", "--p", "4", "--s", "18", "--lambda", "0.5", "--measure", junk.string()}).code == 1);
  std::ofstream(junk, std::ios::trunc) << R"({"segments":[{"lo":0,"hi":1,"kind":"Constant","value":1}],"atom":-1})";
  CHECK(run({"verify", "--p", "4", "--s", "18", "--lambda", "0.5", "--measure", junk.string()}).code == 1);
  CHECK(run({"verify", "--p", "4", "--s", "18", "--lambda", "0.5", "--measure", scratch("missing.json").string()})
            .code == 1);
}

TEST_CASE("sweep rows, bands and determinism") {
  fs::path a = scratch("a.csv"), b = scratch("b.csv");
  Run r1 = run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0:1:0.005", "--out", a.string(), "--jobs", "1"});
  CHECK(r1.code == 0);
  std::string first = slurp(a), first_dat = slurp(scratch("a.dat"));
  Run r8 = run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0:1:0.005", "--out", b.string(), "--jobs", "8"});
  CHECK(r8.code == 0);
  CHECK(slurp(b) == first);
  CHECK(slurp(scratch("b.dat")) == first_dat);
  run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0:1:0.005", "--out", a.string(), "--jobs", "3"});
  CHECK(slurp(a) == first);

  auto ls = lines(first);
  REQUIRE(ls.size() == 203);
  CHECK(ls[0] == kCsvVersionLine);
  CHECK(ls[1] == sweep_csv_header());
  PhaseBoundaries bounds = boundaries(4, 38);
  std::vector<std::string> bands;
  double prev = -1.0;
  for (std::size_t i = 2; i < ls.size(); ++i) {
    auto cells = split(ls[i]);
    REQUIRE(cells.size() == 18);
    double l = std::stod(cells[2]);
    CHECK(l > prev);
    prev = l;
    CHECK(cells[3] == to_string(interval_phase(bounds, l)));
    CHECK(cells[6] == "true");
    CHECK(cells[17] == "true");
    if (bands.empty() || bands.back() != cells[3]) bands.push_back(cells[3]);
  }
  CHECK(std::stod(split(ls[2])[2]) == 0.0);
  CHECK(std::stod(split(ls.back())[2]) == 1.0);
  // The one-full band is narrower than the step, so no grid point lands in it.
  CHECK(bands == std::vector<std::string>{"OneRSB", "TwoRSB", "TwoFRSB", "OneRSB"});

  auto dl = lines(first_dat);
  CHECK(dl.size() == 202);
  CHECK(dl[0][0] == '#');
  std::istringstream row(dl[1]);
  double l, e;
  int idx;
  row >> l >> idx >> e;
  CHECK(l == 0.0);
  CHECK(idx == phase_index(Phase::OneRSB));

  Run fine = run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0.9872:0.9898:0.0002", "--out", a.string()});
  CHECK(fine.code == 0);
  bool saw = false;
  for (const auto& line : lines(slurp(a))) saw = saw || line.find(",OneFRSB,") != std::string::npos;
  CHECK(saw);

  Run p2 = run({"sweep", "--p", "2", "--s", "4", "--count", "101", "--out", a.string(), "--jobs", "4"});
  CHECK(p2.code == 0);
  bands.clear();
  auto p2lines = lines(slurp(a));
  CHECK(p2lines.size() == 103);
  for (std::size_t i = 2; i < p2lines.size(); ++i) {
    auto cells = split(p2lines[i]);
    if (bands.empty() || bands.back() != cells[3]) bands.push_back(cells[3]);
  }
  CHECK(bands == std::vector<std::string>{"OneRSB", "OneFRSB", "FRSB", "RS"});
}

TEST_CASE("sweep flags boundary rows and rejects empty grids") {
  fs::path a = scratch("flags.csv");
  Run r = run({"sweep", "--p", "2", "--s", "4", "--lambda-grid", "0.56065:0.56075:0.00005", "--out", a.string()});
  CHECK(r.code == 0);
  auto ls = lines(slurp(a));
  REQUIRE(ls.size() == 5);
  for (std::size_t i = 2; i < ls.size(); ++i) CHECK(split(ls[i])[5] == "near");

  CHECK(run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0.5:0.4:0.1", "--out", a.string()}).code == 1);
  CHECK(run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0:1:0", "--out", a.string()}).code == 1);
  CHECK(run({"sweep", "--p", "4", "--s", "38", "--lambda-grid", "0:1", "--out", a.string()}).code == 1);
  CHECK(run({"sweep", "--p", "4", "--s", "38", "--count", "0", "--out", a.string()}).code == 1);
  CHECK(run({"sweep", "--p", "4", "--s", "38", "--out", a.string()}).code == 1);
  CHECK(run({"sweep", "--p", "4", "--s", "38", "--count", "3", "--out", "/nonexistent/dir/x.csv"}).code == 1);
  Run un = run({"sweep", "--p", "2", "--s", "4", "--lambda-grid", "0.5:0.923076923076923:0.423076923076923", "--out",
                a.string()});
  CHECK(un.code == 2);
  auto ul = lines(slurp(a));
  REQUIRE(ul.size() == 4);
  CHECK(split(ul[2])[3] == "OneRSB");
  auto cells = split(ul[3]);
  CHECK(cells.size() == 18);
  CHECK(cells[3] == "Unresolved");
  CHECK(cells[5] == "near");
  CHECK(cells[17] == "false");

  CHECK(parse_lambda_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(parse_lambda_grid("0.3:0.3:0.1") == std::vector<double>{0.3});
  CHECK(parse_lambda_grid("0:1:0.3").back() == 1.0);
  CHECK(parse_lambda_grid("0:1:0.005").size() == 201);
  CHECK_THROWS_AS(parse_lambda_grid("a:b:c"), std::invalid_argument);
  CHECK(even_grid(0, 1, 5) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(even_grid(0, 1, 1) == std::vector<double>{0});
  CHECK_THROWS_AS(even_grid(0, 1, 0), std::invalid_argument);
}

TEST_CASE("tolerance override") {
  Mixture two(4, 38, 0.795);
  {
    TolGuard g("0.5");
    auto j = nlohmann::json::parse(run({"classify", "--p", "4", "--s", "18", "--lambda", "0.5"}).out);
    CHECK(j["report"]["tolerance"].get<double>() == 0.5);
    auto k = nlohmann::json::parse(run({"classify", "--p", "4", "--s", "18", "--lambda", "0.5", "--tol", "1e-8"}).out);
    CHECK(k["report"]["tolerance"].get<double>() == 1e-8);
  }
  {
    TolGuard g("bogus");
    CHECK(run({"classify", "--p", "4", "--s", "18", "--lambda", "0.5"}).code == 1);
  }
  {
    TolGuard g("");
    auto j = nlohmann::json::parse(run({"classify", "--p", "4", "--s", "18", "--lambda", "0.5"}).out);
    CHECK(j["report"]["tolerance"].get<double>() == kDefaultTolerance);
  }
  CHECK(run({"classify", "--p", "4", "--s", "18", "--lambda", "0.5", "--tol", "-1"}).code == 1);
}

TEST_CASE("oracle output") {
  Run a = run({"oracle", "--p", "4", "--s", "18", "--lambda", "0.5", "--kmax", "3", "--seed", "7"});
  CHECK(a.code == 0);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["tag"] == "saturates at k=1");
  CHECK(j["saturation"] == 1);
  CHECK(j["levels"].size() == 4);
  Run b = run({"oracle", "--p", "4", "--s", "18", "--lambda", "0.5", "--kmax", "3", "--seed", "7"});
  CHECK(a.out == b.out);
  CHECK(run({"oracle", "--p", "4", "--s", "18", "--lambda", "0.5", "--kmax", "9"}).code == 1);
  CHECK(run({"oracle", "--p", "4", "--s", "18", "--lambda", "0.5", "--restarts", "0"}).code == 1);
}

TEST_CASE("installed binary exit codes") {
  const char* bin = std::getenv("PARISI_ZERO_BIN");
  if (!bin || !*bin) return;
  auto status = [&](const std::string& args) {
    std::string cmd = std::string("\"") + bin + "\" " + args + " >/dev/null 2>&1";
    int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("classify --p 2 --s 5 --lambda 1.0") == 0);
  CHECK(status("classify --p 4 --s 3 --lambda 0.5") == 1);
  CHECK(status("classify --p 2 --s 4 --lambda 0.923076923076923") == 2);
  CHECK(status("boundaries --p 4 --s 38 --format csv") == 0);
  CHECK(status("") == 1);
}
