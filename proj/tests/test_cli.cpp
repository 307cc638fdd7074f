#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string command = std::string(ILTM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer{};
  while (const auto n = std::fread(buffer.data(), 1, buffer.size(), pipe)) r.out.append(buffer.data(), n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("enumerate output") {
  const auto csv = run("enumerate --r 4 --format csv");
  CHECK(csv.status == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 6);

  const auto json = run("enumerate --r 3 --format json");
  REQUIRE(json.status == 0);
  const auto doc = nlohmann::json::parse(json.out);
  CHECK(doc.contains("meta"));
  CHECK(doc.contains("results"));
}

TEST_CASE("usage errors") {
  CHECK(run("").status == 2);
  CHECK(run("enumerate --r 9").status == 2);
  CHECK(run("integrals --class f9").status == 2);
  CHECK(run("integrals --method guess").status == 2);
  CHECK(run("moments --tol 1").status == 2);
  CHECK(run("moments --constants /nonexistent/file").status == 2);
  CHECK(run("bogus").status == 2);
}

TEST_CASE("bad constants file") {
  const auto path = std::filesystem::temp_directory_path() / "iltm_cli_bad.txt";
  std::ofstream(path) << "gamma_V9 1\n";
  CHECK(run("integrals --class f5 --constants " + path.string()).status == 2);
  std::filesystem::remove(path);
}

TEST_CASE("json reports are deterministic and thread independent") {
  const std::string args = "integrals --class f2 --method parametric --samples 20000 --seed 7 --format json";
  const auto a = run(args + " --threads 1");
  const auto b = run(args + " --threads 1");
  const auto c = run(args + " --threads 3");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["meta"]["seed"] == 7);
  CHECK(doc["meta"]["samples"] == 20000);
  // values survive a round trip
  CHECK(nlohmann::json::parse(doc.dump()) == doc);
  for (const auto& [name, entry] : doc["results"].items()) {
    CAPTURE(name);
    CHECK(entry["value"].get<double>() > 0);
    CHECK(doc["provenance"][name] == "parametric-mc");
  }
  const auto d = run("integrals --class f2 --method parametric --samples 20000 --seed 8 --format json");
  CHECK(d.out != a.out);
}

TEST_CASE("moments with a constants file") {
  const auto path = std::filesystem::temp_directory_path() / "iltm_cli_constants.txt";
  std::ofstream(path) << "gamma_V5 0.85659051\ngamma_V7 1.0189569061909\n"
                         "gamma_V8 1.1103912916056864446\nT_D 26.6030861530129\n";
  const auto r = run("moments --format json --constants " + path.string());
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(std::abs(doc["results"]["m4"]["value"].get<double>() - 0.010063) < 1e-6);
  CHECK(doc["provenance"]["gamma_V8"] == "external-constant");
  CHECK(doc.contains("error_budget"));
  std::filesystem::remove(path);
}
