#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gapbound/cli.hpp"
#include "gen.hpp"

using namespace gapbound;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gapbound");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// First number printed after `key` at the start of a line.
double value_after(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key, 0) != 0) continue;
    std::istringstream ls(line.substr(key.size()));
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() && *end == '\0') return v;
    }
  }
  FAIL("key not found: " << key);
  return NAN;
}

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / ("gapbound_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gap1d") {
    Run r = run({"gap1d", "--quadratic", "1,0", "--method", "both"});
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "thm41 ") == doctest::Approx(2.0));
    CHECK(value_after(r.out, "thm44_lower ") == doctest::Approx(1.0443).epsilon(1e-4));
    CHECK(value_after(r.out, "thm44_upper ") == doctest::Approx(8.354).epsilon(1e-4));
    CHECK(r.out.find("median") != std::string::npos);
    CHECK(r.out.find("delta_plus") != std::string::npos);
    CHECK(r.out.find("r_plus") != std::string::npos);

    Run q = run({"gap1d", "--quartic", "0,0", "--method", "thm41"});
    CHECK(q.code == 0);
    CHECK(value_after(q.out, "thm41 ") == doctest::Approx(2 * std::sqrt(2 / std::exp(1.0))).epsilon(1e-5));

    CHECK(run({"gap1d", "--quadratic", "0,1"}).code == 2);
    CHECK(run({"gap1d"}).code == 2);
    CHECK(run({"gap1d", "--quadratic", "1,0", "--quartic", "0,0"}).code == 2);
    CHECK(run({"gap1d", "--quadratic", "1"}).code == 2);
    CHECK(run({"gap1d", "--quadratic", "1,0", "--method", "other"}).code == 2);
  }

  TEST_CASE("gap1d CSV holds full-precision values") {
    fs::path csv = scratch_dir() / "gap.csv";
    CHECK(run({"gap1d", "--quartic=-1,0.5", "--csv", csv.string()}).code == 0);
    std::string text = slurp(csv);
    CHECK(text.rfind("method,key,value\n", 0) == 0);
    CHECK(text.find("thm41,lower,") != std::string::npos);
    CHECK(text.find("thm44_upper,upper,") != std::string::npos);
  }

  TEST_CASE("logsob") {
    Run a = run({"logsob", "--quartic", "0,0"});
    CHECK(a.code == 0);
    CHECK(value_after(a.out, "lemma51 ") == doctest::Approx(2 * std::sqrt(2 / std::exp(1.0))).epsilon(1e-5));
    Run b = run({"logsob", "--quadratic", "3,1"});
    CHECK(value_after(b.out, "lemma51 ") == doctest::Approx(6.0));
    Run c = run({"logsob", "--quartic", "2,0", "--prop14"});
    CHECK(c.code == 0);
    CHECK(value_after(c.out, "prop14 upper") ==
          doctest::Approx(4 * std::exp(14.0) * std::exp(-1 + 2 * std::log(3.0))).epsilon(1e-5));
    CHECK(value_after(c.out, "prop14 lower") > 0.0);
    CHECK(run({"logsob", "--quadratic", "1,0", "--prop14"}).code == 2);
    CHECK(run({"logsob", "--quartic", "-1,0", "--prop14"}).code == 2);
  }

  TEST_CASE("region") {
    fs::path dir = scratch_dir();
    Run r = run({"region", "--kind", "eq69", "--beta", "-2:4:0.05", "--r", "0:2:0.01", "--csv",
                 (dir / "r.csv").string(), "--svg", (dir / "r.svg").string()});
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "r*(0)") == doctest::Approx(0.85776).epsilon(1e-5));
    std::string csv = slurp(dir / "r.csv");
    CHECK(csv.rfind("beta,r,bound,positive\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 121 * 201);
    std::string svg = slurp(dir / "r.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);

    Run s = run({"region", "--kind", "eq610", "--beta", "-1:1:0.5", "--r", "0:1:0.25", "--csv", (dir / "s.csv").string()});
    CHECK(s.code == 0);
    CHECK(slurp(dir / "s.csv").rfind("beta,r,bound,positive\n", 0) == 0);

    CHECK(run({"region", "--r", "1:0:0.1"}).code == 2);
    CHECK(run({"region", "--r", "0:1:0"}).code == 2);
    CHECK(run({"region", "--r", "0:1"}).code == 2);
    CHECK(run({"region", "--kind", "eq611", "--beta", "-1:1:0.5"}).code == 2);
    CHECK(run({"region", "--csv", "/nonexistent-dir/x.csv"}).code == 4);
    CHECK(run({"region", "--svg", dir.string()}).code == 4);
  }

  TEST_CASE("verify") {
    CHECK(run({"verify", "--suite", "bogus"}).code == 2);
    Run f = run({"verify", "--suite", "fast", "--seed", "42"});
    CHECK(f.code == 0);
    CHECK(f.out.find("FAIL") == std::string::npos);
    CHECK(f.out.find("PASS  1 ") != std::string::npos);
  }

  TEST_CASE("matrix") {
    fs::path spec = scratch_dir() / "m.json";
    std::ofstream(spec) << R"({"eta": [1, 2, 3], "offdiag": [[0, 1, 0], [1, 0, 1], [0, 1, 0]], "sigma": [2, 2, 2]})";
    Run r = run({"matrix", "--spec", spec.string()});
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "tilde_hess ") == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-6));
    CHECK(value_after(r.out, "weighted ") == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-6));
    CHECK(r.out.find("thm12") != std::string::npos);
    CHECK(value_after(r.out, "logsob_matrix ") == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-6));
    CHECK(run({"matrix", "--spec", spec.string(), "--weights", "1,-1,1"}).code == 2);

    fs::path bad = scratch_dir() / "bad.json";
    std::ofstream(bad) << R"({"eta": [1, 2], "offdiag": [[0, 1], [2, 0]]})";
    CHECK(run({"matrix", "--spec", bad.string()}).code == 2);
    std::ofstream(bad) << "{not json";
    CHECK(run({"matrix", "--spec", bad.string()}).code == 2);
    CHECK(run({"matrix", "--spec", (scratch_dir() / "missing.json").string()}).code == 2);
  }

  TEST_CASE("spin") {
    Run r = run({"spin", "--site", "quartic", "--site-param", "0", "--J", "0.2", "--L", "3", "--hamiltonian", "bilinear"});
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "spin_quartic ") == doctest::Approx(0.9155).epsilon(1e-4));
    CHECK(r.out.find("remark64") != std::string::npos);
    Run g = run({"spin", "--site-param", "1.5", "--J", "0.7", "--d", "2", "--L", "3"});
    CHECK(value_after(g.out, "spin_gaussian ") == doctest::Approx(3.0));
    CHECK(run({"spin", "--boundary", "periodic", "--L", "1"}).code == 2);
    CHECK(run({"spin", "--site", "cubic"}).code == 2);
  }

  TEST_CASE("coupling") {
    Run r = run({"coupling", "--size", "1", "--beta", "0"});
    CHECK(r.code == 0);
    CHECK(value_after(r.out, "epsilon") == doctest::Approx(2.48886).epsilon(1e-5));
    fs::path csv = scratch_dir() / "decay.csv";
    Run s = run({"coupling", "--size", "1", "--beta", "0", "--paths", "50", "--horizon", "0.2", "--csv", csv.string()});
    CHECK(s.code == 0);
    CHECK(slurp(csv).rfind("t,mean_f_dist,stderr\n", 0) == 0);
    CHECK(run({"coupling", "--size", "1", "--beta", "0", "--simulate", "--step", "5"}).code == 2);
    CHECK(run({"coupling", "--size", "2", "--beta", "0", "--simulate", "--x0", "1"}).code == 2);
    CHECK(run({"coupling", "--beta", "0"}).code == 2);
  }

  TEST_CASE("oracle") {
    Run a = run({"oracle", "--quartic", "0,0"});
    CHECK(a.code == 0);
    CHECK(value_after(a.out, "gap") == doctest::Approx(2.73719).epsilon(1e-5));
    Run b = run({"oracle", "--kind", "halfline", "--quadratic", "1,0", "--side", "minus"});
    CHECK(value_after(b.out, "gap") == doctest::Approx(2.0).epsilon(1e-4));
    Run c = run({"oracle", "--kind", "nd", "--L", "2", "--J", "0.5", "--boundary", "free"});
    CHECK(value_after(c.out, "gap") == doctest::Approx(2.0).epsilon(2e-2));
    CHECK(run({"oracle", "--kind", "nd", "--d", "2", "--L", "3"}).code == 2);
  }

  TEST_CASE("run files") {
    fs::path cfg = scratch_dir() / "run.cfg";
    Run d = run({"--threads", "2", "gap1d", "--quartic=-1,0.5", "--method", "thm41", "--dump-config"});
    CHECK(d.code == 0);
    CHECK(d.out == "command = gap1d\nthreads = 2\nquartic = -1,0.5\nmethod = thm41\n");
    std::ofstream(cfg) << "# saved run\n" << d.out << "  \n";
    Run again = run({"--config", cfg.string(), "--dump-config"});
    CHECK(again.out == d.out);
    Run over = run({"--config", cfg.string(), "--method", "both", "--dump-config"});
    CHECK(over.out.find("method = both") != std::string::npos);
    Run exec = run({"--config", cfg.string()});
    CHECK(exec.code == 0);
    CHECK(exec.out.find("thm41") != std::string::npos);

    std::ofstream(cfg) << "command = logsob\nquartic = 2,0\nprop14 = true\n";
    CHECK(run({"--config", cfg.string()}).out.find("prop14 upper") != std::string::npos);
    std::ofstream(cfg) << "just a line\n";
    CHECK(run({"--config", cfg.string()}).code == 2);
    std::ofstream(cfg) << "command = logsob\nno-such-flag = 1\n";
    CHECK(run({"--config", cfg.string()}).code == 2);
  }

  TEST_CASE("run file parse and serialize round-trip") {
    const std::vector<std::string> keys = {"quartic", "method", "csv", "threads", "beta", "r", "seed"};
    gen::for_cases(71, 200, [&](gen::Rng& r, int) {
      std::string text;
      int lines = r.integer(0, 8);
      if (r.coin()) text += "command = " + std::string(r.coin() ? "gap1d" : "region") + "\n";
      for (int i = 0; i < lines; ++i) {
        switch (r.integer(0, 3)) {
          case 0:
            text += "\n";
            break;
          case 1:
            text += "  # note " + std::to_string(i) + "\n";
            break;
          default: {
            std::string pad(static_cast<size_t>(r.integer(0, 3)), ' ');
            text += pad + keys[static_cast<size_t>(r.integer(0, 6))] + pad + "=" + pad +
                    std::to_string(r.integer(-5, 5)) + "," + std::to_string(r.integer(0, 9)) + pad +
                    (r.coin() ? " # tail" : "") + "\n";
          }
        }
      }
      RunConfig c = RunConfig::parse(text);
      std::string norm = c.serialize();
      CHECK(RunConfig::parse(norm) == c);
      CHECK(RunConfig::parse(norm).serialize() == norm);
    });
  }

  TEST_CASE("help and the installed binary") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
    std::string cmd = std::string(GAPBOUND_CLI_PATH) + " verify --suite bogus > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
  }
}
