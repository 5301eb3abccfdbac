#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "mg1/generators.hpp"
#include "mg1/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = mg1::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("mg1_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_preset(const std::string& name) {
  const fs::path p = scratch() / (name + ".json");
  std::ofstream(p) << mg1::model_to_json(mg1::preset(name));
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("validate") {
  const auto ok = run({"validate", write_preset("SCALAR-1")});
  CHECK(ok.code == 0);
  const json report = json::parse(ok.out);
  CHECK(report["sigma"].get<double>() == doctest::Approx(-0.4));
  CHECK(report["ok"].get<bool>());

  const auto bad = run({"validate", write_preset("POSITIVE-DRIFT")});
  CHECK(bad.code == 1);
  bool found = false;
  const json bad_report = json::parse(bad.out);
  for (const auto& v : bad_report["violations"]) found = found || v["name"] == "positive drift";
  CHECK(found);

  const fs::path broken = scratch() / "broken.json";
  std::ofstream(broken) << "{\"m0\": 1, ";
  CHECK(run({"validate", broken.string()}).code == 2);
  CHECK(run({"validate", (scratch() / "missing.json").string()}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("solve") {
  const auto r = run({"solve", write_preset("SCALAR-1"), "--horizon", "2"});
  CHECK(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() >= 4);
  CHECK(l[0] == "k,phase,pi");
  CHECK(l[1].rfind("0,1,0.444444444444", 0) == 0);
  CHECK(l[2].rfind("1,1,0.370370370370", 0) == 0);
  CHECK(l[3].rfind("2,1,0.123456790123", 0) == 0);

  const auto t = run({"solve", write_preset("SCALAR-1"), "--horizon", "2", "--truncate", "1"});
  CHECK(t.out == r.out);

  const auto p = run({"solve", write_preset("PARETO-1"), "--horizon", "0"});
  CHECK(p.code == 0);
  const auto pl = lines(p.out);
  REQUIRE(pl.size() >= 2);
  const double pi0 = std::stod(pl[1].substr(pl[1].rfind(',') + 1));
  CHECK(pi0 > 0.0);
  CHECK(pl[1].rfind("0,1,", 0) == 0);

  CHECK(run({"solve", write_preset("POSITIVE-DRIFT")}).code == 3);
}

TEST_CASE("solve writes the csv file atomically and reproducibly") {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  const auto model = write_preset("PHASED-PARETO-3");
  CHECK(run({"solve", model, "--horizon", "30", "-o", a.string()}).code == 0);
  CHECK(run({"solve", model, "--horizon", "30", "-o", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(lines(slurp(a)).size() == 1 + 31 * 3 + 2);
  // 17 significant digits
  const auto row = lines(slurp(a))[1];
  const std::string value = row.substr(row.rfind(',') + 1);
  CHECK(std::stod(value) > 0.0);
  for (const auto& entry : fs::directory_iterator(scratch())) {
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
  }
}

TEST_CASE("sweep") {
  const auto scalar = run({"sweep", write_preset("SCALAR-1"), "--grid", "4,8", "--kmax", "1", "--nref", "256"});
  CHECK(scalar.code == 0);
  const auto sl = lines(scalar.out);
  REQUIRE(sl.size() == 5);
  CHECK(sl[0].find("ratio_F") != std::string::npos);

  const auto p = run({"sweep", write_preset("PARETO-1"), "--grid", "32,64", "--kmax", "2", "--ref", "pareto:2,1",
                      "--nref", "1024"});
  CHECK(p.code == 0);
  CHECK(lines(p.out).size() == 1 + 2 * 3);

  const fs::path out = scratch() / "mismatch.csv";
  const auto bad = run({"sweep", write_preset("PARETO-1"), "--ref", "pareto:3,1", "-o", out.string()});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("ReferenceMismatch") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("sweep output does not depend on the worker count") {
  const auto model = write_preset("PARETO-1");
  const std::vector<std::string> base{"sweep", model, "--grid", "16,32,64", "--kmax", "2", "--nref", "1024"};
  auto one = base;
  one.insert(one.end(), {"--workers", "1"});
  auto two = base;
  two.insert(two.end(), {"--workers", "2"});
  const auto a = run(one);
  const auto b = run(two);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  setenv("MG1_WORKERS", "2", 1);
  const auto c = run(base);
  unsetenv("MG1_WORKERS");
  CHECK(c.out == a.out);
}

TEST_CASE("verify") {
  const auto lemma_trivial = run({"verify", write_preset("SCALAR-1"), "--lemma41", "3", "1", "600"});
  CHECK(lemma_trivial.code == 0);
  CHECK(json::parse(lemma_trivial.out)["pass"].get<bool>());

  const auto lemma = run({"verify", write_preset("PARETO-1-CUT12"), "--lemma41", "6", "1", "600"});
  CHECK(lemma.code == 0);
  CHECK(json::parse(lemma.out)["residual"].get<double>() < 1e-6);

  const auto uk = run({"verify", write_preset("SCALAR-1"), "--uk", "4", "400"});
  CHECK(uk.code == 0);
  const json u = json::parse(uk.out);
  CHECK(u["u_closed"][0].get<double>() == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(u["abs_error"].get<double>() < 1e-6);

  const auto thm = run({"verify", write_preset("PARETO-1"), "--thm41", "--thm-grid", "8,16,32", "--thm-factor", "16"});
  CHECK(thm.code == 0);

  CHECK(run({"verify", write_preset("PARETO-1"), "--lemma41", "6", "1", "600"}).code == 3);
}

TEST_CASE("generate") {
  const auto r = run({"generate", "--preset", "PARETO-1"});
  CHECK(r.code == 0);
  CHECK(mg1::parse_model(r.out) == mg1::preset("PARETO-1"));

  const auto a = run({"generate", "--phased", "2", "3", "--seed", "4", "--tail", "weibull:1,0.5", "--drift", "-0.2"});
  const auto b = run({"generate", "--phased", "2", "3", "--seed", "4", "--tail", "weibull:1,0.5", "--drift", "-0.2"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto m = mg1::parse_model(a.out);
  CHECK(m.m0() == 2);
  CHECK(m.m1() == 3);
  CHECK(mg1::validate(m).sigma == doctest::Approx(-0.2).epsilon(1e-8));

  CHECK(run({"generate", "--preset", "NOPE"}).code == 2);
  CHECK(run({"generate", "--phased", "2", "2", "--tail", "cauchy:1"}).code == 2);
}

TEST_CASE("process exit codes of the installed binary") {
  auto status = [](const std::string& args) {
    const std::string cmd = std::string(MG1_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("validate " + write_preset("SCALAR-1")) == 0);
  CHECK(status("validate " + write_preset("POSITIVE-DRIFT")) == 1);
  CHECK(status("validate /nonexistent/model.json") == 2);
  CHECK(status("solve " + write_preset("POSITIVE-DRIFT")) == 3);
}
