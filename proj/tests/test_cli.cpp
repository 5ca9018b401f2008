#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dctk/io.hpp"
#include "dctk/model.hpp"
#include "helpers.hpp"

using namespace dctk;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "dctk_cli_fixtures";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& text) {
  fs::path p = work_dir() / name;
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
  const char* cli = std::getenv("DCTK_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "DCTK_CLI must point at the binary");
  fs::path cap = work_dir() / "capture.txt";
  std::string cmd =
      std::string(cli) + " " + args + " > " + cap.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = slurp(cap);
  return r;
}

std::string chain_file() {
  static std::string p =
      write_fixture("chain.json", serialize_doctrine(*chain3()));
  return p;
}

std::string s3_file() {
  static std::string p =
      write_fixture("s3.json", serialize_doctrine(*singletons3()));
  return p;
}

std::string mutated_file() {
  static std::string p = [] {
    auto m = copy_of(*chain3());
    m->ops["A"].top = "0";
    return write_fixture("mutated.json", serialize_doctrine(*m));
  }();
  return p;
}

std::string dead_file() {
  static std::string p = [] {
    auto dead = add_axiom(subsets_tiny(), "{}");
    return write_fixture("dead.json", serialize_doctrine(*dead.doctrine));
  }();
  return p;
}

std::string diagram_file() {
  static std::string p = [] {
    auto ax = add_axiom(chain3(), "half");
    FiniteDirectedDiagram d;
    d.index = {"0", "1"};
    d.leq = {{"0", "1"}};
    d.node["0"] = chain3();
    d.node["1"] = ax.doctrine;
    d.edge[{"0", "1"}] = ax.morphism;
    return write_fixture("diagram.json", serialize_diagram(d));
  }();
  return p;
}

}  // namespace

TEST_CASE("check passes on a lawful doctrine and fails on a corrupted one") {
  RunResult ok = run_cli("check " + chain_file());
  CHECK(ok.code == 0);
  CHECK(ok.output.find("status: pass") != std::string::npos);
  CHECK(ok.output.find("check heyting: pass") != std::string::npos);

  RunResult bad = run_cli("check " + mutated_file() + " --layers primary");
  CHECK(bad.code == 1);
  CHECK(bad.output.find("status: fail") != std::string::npos);
  CHECK(bad.output.find("top of A") != std::string::npos);
}

TEST_CASE("usage and parse problems exit with code 2") {
  CHECK(run_cli("check " + (work_dir() / "no_such.json").string()).code == 2);
  CHECK(run_cli("check " +
                write_fixture("bad.json", "{ not json"))
            .code == 2);
  CHECK(run_cli("check " + chain_file() + " --layers modal").code == 2);
  CHECK(run_cli("construct " + chain_file() + " frobnicate").code == 2);
  CHECK(run_cli("construct " + chain_file() + " add-constant Z").code == 2);
  CHECK(run_cli("").code == 2);  // a subcommand is required
}

TEST_CASE("structured reports are byte-identical across runs") {
  const std::string args =
      "check " + chain_file() + " --format structured";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output.front() == '{');
  CHECK(a.output.back() == '\n');
  CHECK(a.output.find("\"command\": \"check\"") != std::string::npos);
  CHECK(a.output.find("fnv1a:") != std::string::npos);
}

TEST_CASE("construct writes the result and reports the trivial-axiom iso") {
  fs::path out = work_dir() / "trivial.json";
  RunResult r = run_cli("construct " + chain_file() + " add-axiom 1 --out " +
                        out.string() + " --format structured");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"isomorphic_to_input\": true") != std::string::npos);
  // adding the top as an axiom reproduces the input document exactly
  CHECK(slurp(out) == slurp(chain_file()));
  auto parsed = parse_doctrine(slurp(out));
  CHECK(check_structure(*parsed).ok());
}

TEST_CASE("construct runs a witness step end to end") {
  fs::path out = work_dir() / "henkin.json";
  RunResult r = run_cli("construct " + s3_file() + " henkin {a} {a} --out " +
                        out.string() + " --format structured");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"witness_equality\": true") != std::string::npos);
  auto parsed = parse_doctrine(slurp(out));
  parsed->require_coherent();
}

TEST_CASE("saturate reports budget truncation") {
  RunResult r =
      run_cli("saturate " + s3_file() + " --budget 2 --format structured");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"truncated\": true") != std::string::npos);
  CHECK(r.output.find("\"skipped\": 4") != std::string::npos);

  RunResult full = run_cli("saturate " + s3_file() + " --format structured");
  CHECK(full.code == 0);
  CHECK(full.output.find("\"truncated\": false") != std::string::npos);
}

TEST_CASE("ultrafilter enumerates the chain filters") {
  RunResult r = run_cli("ultrafilter " + chain_file());
  CHECK(r.code == 0);
  CHECK(r.output.find("\"greedy_ultrafilter\":[\"1\",\"half\"]") !=
        std::string::npos);
  CHECK(r.output.find("check greedy_ultrafilter_is_ultra: pass") !=
        std::string::npos);
  // exactly three filters: {1}, {half,1}, improper
  CHECK(r.output.find("\"members\":[\"1\"]") != std::string::npos);
  CHECK(r.output.find("\"members\":[\"0\",\"1\",\"half\"]") !=
        std::string::npos);
}

TEST_CASE("quotient by generators reports the consistency status") {
  RunResult r = run_cli("quotient " + chain_file() +
                        " --filter half --format structured");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"consistency\": \"two_valued\"") != std::string::npos);
  CHECK(r.output.find("\"status\": \"pass\"") != std::string::npos);
}

TEST_CASE("model extraction over the greedy pipeline") {
  RunResult r = run_cli("model " + s3_file() + " --format structured");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"rich\": true") != std::string::npos);
  CHECK(r.output.find("\"initial_consistency\": \"two_valued\"") !=
        std::string::npos);
  CHECK(r.output.find("\"status\": \"pass\"") != std::string::npos);
}

TEST_CASE("model extraction aborts on an inconsistent theory") {
  RunResult r = run_cli("model " + dead_file());
  CHECK(r.code == 1);
  CHECK(r.output.find("no model exists") != std::string::npos);
}

TEST_CASE("elementary model extraction preserves the diagonal") {
  RunResult r = run_cli("model " + chain_file() +
                        " --filter half --elementary --format structured");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"diagonal_preserved\": true") != std::string::npos);
}

TEST_CASE("colimit verifies the maximum leg both ways") {
  fs::path out = work_dir() / "colimit.json";
  RunResult r =
      run_cli("colimit " + diagram_file() + " --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.output.find("check max_leg_bijective: pass") != std::string::npos);
  CHECK(r.output.find("check max_leg_inverse: pass") != std::string::npos);
  CHECK(r.output.find("check max_leg_morphism: pass") != std::string::npos);
  auto parsed = parse_doctrine(slurp(out));
  CHECK(check_structure(*parsed).ok());
}
