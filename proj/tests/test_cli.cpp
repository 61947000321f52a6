#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "delayvar/config.hpp"
#include "delayvar/report.hpp"
#include "helpers.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace delayvar;

namespace {

struct Sandbox {
  fs::path dir;

  Sandbox() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("delayvar_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }

  std::string read(const fs::path& p) const {
    std::ifstream in(p.is_absolute() ? p : dir / p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Runs the CLI with stderr captured to `stderr.txt`; returns the exit status.
  int run(const std::string& args) const {
    const std::string cmd = "DELAYVAR_LOG=quiet '" + std::string(DELAYVAR_CLI_PATH) + "' " + args + " 2> '" +
                            (dir / "stderr.txt").string() + "' > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string err() const { return read(dir / "stderr.txt"); }
};

const char* kClassical = R"(# unit classical case
problem.name = classical_quadratic
problem.n = 1
problem.r = 0.25
problem.T = 1
history.kind = constant
history.value = 0
endpoint.zeta = 1
solver.N = 32
output.dir = out
)";

const char* kDelayed = R"(problem.name = point_delay_quadratic
problem.kb = 1
problem.n = 1
problem.r = 0.5
problem.T = 1
history.value = 1
endpoint.zeta = 2
solver.N = 32
converge.levels = 16, 32, 64
identity.fubini_cases = 6
identity.pairing_cases = 50
identity.ibp_cases = 20
)";

// Value of `key` in a one-row key/value CSV.
std::string field(const std::string& csv, const std::string& key) {
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        out.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    out.push_back(cell);
    return out;
  };
  const auto keys = split(header);
  const auto values = split(row);
  for (std::size_t i = 0; i < keys.size() && i < values.size(); ++i) {
    if (keys[i] == key) return values[i];
  }
  return {};
}

}  // namespace

TEST_CASE("solve on the classical case") {
  Sandbox box;
  const auto cfg = box.write("classical.cfg", kClassical);
  REQUIRE(box.run("solve --config '" + cfg.string() + "'") == 0);
  for (const char* name : {"trajectory.csv", "el_report.csv", "summary.csv", "plot.svg"}) {
    CHECK(fs::exists(box.dir / "out" / name));
  }
  const std::string summary = box.read(box.dir / "out" / "summary.csv");
  CHECK(std::stod(field(summary, "J")) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(field(summary, "converged") == "true");
  CHECK(box.read(box.dir / "out" / "plot.svg").find("<polyline") != std::string::npos);

  CHECK(box.run("verify --config '" + cfg.string() + "' '" + (box.dir / "out" / "trajectory.csv").string() + "'") == 0);
}

TEST_CASE("configuration errors exit with 1") {
  Sandbox box;
  const auto long_delay = box.write("long.cfg", "problem.r = 1\nproblem.T = 1\nendpoint.zeta = 1\n");
  CHECK(box.run("solve --config '" + long_delay.string() + "'") == 1);
  CHECK(box.err().find("r < T") != std::string::npos);

  const auto odd = box.write("odd.cfg", "problem.r = 0.3\nproblem.T = 1\nsolver.N = 10\nendpoint.zeta = 1\n");
  CHECK(box.run("solve --config '" + odd.string() + "'") == 1);
  const std::string msg = box.err();
  CHECK(msg.find("r = 0.29999999999999999") != std::string::npos);
  CHECK(msg.find("N = 10") != std::string::npos);
  CHECK(msg.find("exactly") != std::string::npos);

  const auto typo = box.write("typo.cfg", "problem.r = 0.5\nsolver.NN = 10\nendpoint.zeta = 1\n");
  CHECK(box.run("solve --config '" + typo.string() + "'") == 1);
  CHECK(box.err().find("typo.cfg:2:") != std::string::npos);

  const auto garbage = box.write("garbage.cfg", "problem.r 0.5\n");
  CHECK(box.run("identity --config '" + garbage.string() + "'") == 1);
  CHECK(box.err().find("garbage.cfg:1:") != std::string::npos);

  CHECK(box.run("solve --config '" + (box.dir / "missing.cfg").string() + "'") == 1);
  CHECK(box.run("frobnicate") == 1);
}

TEST_CASE("non-convergence exits with 2") {
  Sandbox box;
  const auto cfg = box.write("capped.cfg", std::string(kDelayed) + "solver.max_iters = 1\nsolver.metric = l2\n");
  CHECK(box.run("solve --config '" + cfg.string() + "' --out '" + (box.dir / "capped").string() + "'") == 2);
  CHECK(field(box.read(box.dir / "capped" / "summary.csv"), "converged") == "false");
}

TEST_CASE("verify exit codes") {
  Sandbox box;
  const auto cfg = box.write("delayed.cfg", kDelayed);
  const auto rc = load_config(cfg);

  const auto guess = affine_initial_guess(make_history(rc), rc.zeta, rc.T, rc.solver.N);
  write_trajectory_csv(box.dir / "guess.csv", guess);
  CHECK(box.run("verify --config '" + cfg.string() + "' '" + (box.dir / "guess.csv").string() + "' --out '" +
                (box.dir / "v").string() + "'") == 3);
  CHECK(fs::exists(box.dir / "v" / "el_report.csv"));

  box.write("empty.csv", "");
  CHECK(box.run("verify --config '" + cfg.string() + "' '" + (box.dir / "empty.csv").string() + "'") == 1);

  // a trajectory on another grid
  const auto coarse = affine_initial_guess(make_history(rc), rc.zeta, rc.T, 16);
  write_trajectory_csv(box.dir / "coarse.csv", coarse);
  CHECK(box.run("verify --config '" + cfg.string() + "' '" + (box.dir / "coarse.csv").string() + "'") == 1);

  REQUIRE(box.run("solve --config '" + cfg.string() + "' --out '" + (box.dir / "s").string() + "'") == 0);
  const std::string traj = (box.dir / "s" / "trajectory.csv").string();
  CHECK(box.run("verify --config '" + cfg.string() + "' '" + traj + "' --out '" + (box.dir / "w").string() + "'") == 0);
  CHECK(box.run("verify --config '" + cfg.string() + "' '" + traj + "' --threshold 1e-12") == 3);
}

TEST_CASE("identity and converge") {
  Sandbox box;
  const auto cfg = box.write("delayed.cfg", kDelayed);
  CHECK(box.run("identity --config '" + cfg.string() + "' --out '" + (box.dir / "i").string() + "'") == 0);
  const std::string report = box.read(box.dir / "i" / "identity_report.csv");
  CHECK(report.rfind("check,cases,max_discrepancy,tolerance,pass", 0) == 0);
  CHECK(report.find("zero_measure,3,0,0,true") != std::string::npos);

  CHECK(box.run("converge --config '" + cfg.string() + "' --out '" + (box.dir / "c").string() + "'") == 0);
  const std::string levels = box.read(box.dir / "c" / "levels.csv");
  int rows = 0;
  std::istringstream in(levels);
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("repeated runs give identical bytes") {
  Sandbox box;
  const auto cfg = box.write("delayed.cfg", kDelayed);
  for (const char* sub : {"a", "b"}) {
    REQUIRE(box.run("solve --config '" + cfg.string() + "' --seed 7 --out '" + (box.dir / sub).string() + "'") == 0);
    REQUIRE(box.run("identity --config '" + cfg.string() + "' --seed 7 --out '" + (box.dir / sub).string() + "'") ==
            0);
  }
  for (const char* name : {"trajectory.csv", "el_report.csv", "summary.csv", "plot.svg", "identity_report.csv"}) {
    CHECK(box.read(box.dir / "a" / name) == box.read(box.dir / "b" / name));
  }
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "problem.name = distributed_delay_quadratic\nproblem.k1 = 2\nproblem.n = 2\nhistory.kind = linear\n"
      "history.offset = 1, 2\nhistory.slope = 0.5\nendpoint.zeta = 3 4\nsolver.metric = l2\nconverge.levels = 8,16\n");
  const auto rc = parse_config(in, "inline");
  CHECK(rc.problem == "distributed_delay_quadratic");
  CHECK(rc.coefficients.at("k1") == 2.0);
  CHECK(rc.n == 2);
  CHECK(rc.zeta == testing::vec({3.0, 4.0}));
  CHECK(rc.history.slope == testing::vec({0.5, 0.5}));
  CHECK(rc.solver.metric == Metric::L2);
  CHECK(rc.levels == std::vector<int>{8, 16});
  const auto psi = make_history(rc);
  CHECK(psi(-0.5) == testing::vec({0.75, 1.75}));

  std::istringstream dup("problem.n = 1\nproblem.n = 2\nendpoint.zeta = 1\n");
  CHECK_THROWS_AS(parse_config(dup, "dup"), ConfigError);
  std::istringstream no_zeta("problem.n = 1\n");
  CHECK_THROWS_AS(parse_config(no_zeta, "nz"), ConfigError);
  std::istringstream bad_coef("problem.name = classical_quadratic\nproblem.kb = 1\nendpoint.zeta = 1\n");
  CHECK_THROWS_AS(parse_config(bad_coef, "bc"), ConfigError);
}

TEST_CASE("sampled history files resolve next to the config") {
  Sandbox box;
  box.write("hist.txt", "0\n0.25\n0.5\n0.75\n1\n");
  const auto cfg = box.write("s.cfg",
                             "problem.r = 0.5\nhistory.kind = samples\nhistory.file = hist.txt\nendpoint.zeta = 2\n");
  const auto rc = load_config(cfg);
  const auto psi = make_history(rc);
  CHECK(psi(-0.25)[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(psi(0.0)[0] == 1.0);

  const auto missing = box.write("m.cfg", "problem.r = 0.5\nhistory.kind = samples\nhistory.file = nope.txt\n"
                                          "endpoint.zeta = 2\n");
  CHECK(box.run("solve --config '" + missing.string() + "'") == 1);
}
