#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "nilheat/errors.hpp"
#include "nilheat/problem.hpp"
#include "test_util.hpp"

using namespace nilheat;

namespace {

const char* kGood = R"(# demo problem
dim = 2
k = 1

[fields]
f0 = 0, sin(x1^2)
f1 = 1, x1

[point]
x0 = 0, 0

[options]
seed = 7
paths = 1234
weight_cap = 5
rank_tol = 1e-9
)";

int run_cli(const std::string& args) {
  std::string cmd = std::string(CLI_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("well-formed problems parse with options applied") {
  auto spec = parse_problem(kGood, "mem");
  CHECK(spec.dim == 2);
  CHECK(spec.k == 1);
  CHECK(spec.seed == 7);
  CHECK(spec.paths == 1234);
  CHECK(spec.weight_cap == 5);
  CHECK(spec.taylor_degree == 10);  // 2 * weight_cap default
  CHECK(spec.rank_tol == 1e-9);
  REQUIRE(spec.fields.size() == 2);
  CHECK(spec.fields[1] == testutil::field("1, x1", 2));
  CHECK(spec.x0 == std::vector<Rational>{Rational(0), Rational(0)});
}

TEST_CASE("defaults resolve from the dimension") {
  auto spec = parse_problem("dim = 3\nk = 2\n[fields]\nf0 = 0, 0, 0\n"
                            "f1 = 1, 0, 0 - 1/2*x2\nf2 = 0, 1, 1/2*x1\n[point]\nx0 = 0, 0, 0\n",
                            "mem");
  CHECK(spec.weight_cap == 8);      // 2*dim + 2
  CHECK(spec.taylor_degree == 16);  // 2 * weight_cap
  CHECK(spec.seed == 1);
  CHECK(spec.paths == 100000);
  CHECK(spec.steps == 400);
  CHECK(spec.t_grid == std::vector<double>{0.05, 0.08, 0.125, 0.2, 0.32, 0.5});
}

TEST_CASE("decimal and fractional literals in the point are exact") {
  auto spec = parse_problem("dim = 2\nk = 1\n[fields]\nf0 = x1 - 1/2, 0\nf1 = 1, 0\n"
                            "[point]\nx0 = 0.5, -3/4\n",
                            "mem");
  CHECK(spec.x0[0] == Rational(1, 2));
  CHECK(spec.x0[1] == Rational(-3, 4));
}

TEST_CASE("errors carry the origin and line number") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_problem(text, "buf");
      FAIL_CHECK("expected a validation error for: " << needle);
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      CAPTURE(msg);
      CHECK(msg.find("buf:") == 0);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  expect_error("k = 1\n[fields]\nf0 = 0\nf1 = 1\n[point]\nx0 = 0\n", "dim");
  expect_error("dim = 1\n[fields]\nf0 = 0\nf1 = 1\n[point]\nx0 = 0\n", "k");
  expect_error("dim = 1\nk = 1\n[fields]\nf0 = 0\nf1 = 1\nf1 = 2\n[point]\nx0 = 0\n",
               "duplicate");
  expect_error("dim = 2\nk = 1\n[fields]\nf0 = 0\nf1 = 1, 0\n[point]\nx0 = 0, 0\n",
               "components");
  expect_error("dim = 1\nk = 1\n[fields]\nf0 = 0\nf1 = 1\n[point]\nx0 = 0\n"
               "[options]\nbogus_key = 3\n",
               "bogus_key");
  expect_error("dim = 1\nk = 1\n[fields]\nf0 = 0\nf1 = 1\n", "x0");
  expect_error("dim = 1\nk = 1\n[fields]\nf0 = x1 + 1\nf1 = 1\n[point]\nx0 = 0\n",
               "DriftNotStationary");
  expect_error("dim = 1\nk = 1\n[unknown]\nf0 = 0\n", "section");
  expect_error("dim = 0\nk = 1\n[fields]\n[point]\n", "dim");
}

TEST_CASE("overrides take effect before parsing") {
  ProblemOverrides ov;
  ov.seed = 99;
  ov.paths = 555;
  ov.taylor_degree = 4;
  auto spec = parse_problem(kGood, "mem", ov);
  CHECK(spec.seed == 99);
  CHECK(spec.paths == 555);
  CHECK(spec.taylor_degree == 4);
  // sin(x1^2) truncated at degree 4 keeps only the quadratic term
  CHECK(spec.fields[0].comp[1] == testutil::poly("x1^2", 2));
}

TEST_CASE("divergence adjustment happens before the stationarity gate") {
  // f1 = 1 + x1 has divergence 1, so the adjusted drift is
  // f0 + (1/2)(1 + x1); with f0 = -1/2 - 1/2 x1 the sum vanishes at 0.
  auto spec = parse_problem("dim = 1\nk = 1\n[fields]\nf0 = 0 - 1/2 - 1/2*x1\nf1 = 1 + x1\n"
                            "[point]\nx0 = 0\n[options]\nadjust_divergence = true\n",
                            "mem");
  CHECK(spec.adjust_divergence);
  CHECK(spec.fields[0].evaluate({Rational(0)})[0] == Rational(0));

  // without the adjustment the same drift is not stationary
  CHECK_THROWS_AS(parse_problem("dim = 1\nk = 1\n[fields]\nf0 = 0 - 1/2 - 1/2*x1\n"
                                "f1 = 1 + x1\n[point]\nx0 = 0\n",
                                "mem"),
                  ValidationError);
}

TEST_CASE("load_problem reads the fixture files") {
  auto spec = load_problem(testutil::fixture("heisenberg.prob"));
  CHECK(spec.dim == 3);
  CHECK(spec.k == 2);
  auto spec2 = load_problem(testutil::fixture("planar_sine_drift.prob"));
  CHECK(spec2.dim == 2);
  CHECK_THROWS_AS(load_problem(testutil::fixture("no_such_file.prob")), ValidationError);
}

TEST_CASE("cli exit codes: ok, usage, validation, undecided, quality") {
  CHECK(run_cli("analyze " + testutil::fixture("heisenberg.prob") +
                " --out /tmp/nilheat_cli_ok") == 0);
  CHECK(run_cli("analyze") == 2);              // missing file argument
  CHECK(run_cli("bogus-subcommand x") == 2);   // unknown subcommand
  CHECK(run_cli("analyze /tmp/nilheat_no_such_file.prob") == 2);

  // malformed problem file
  CHECK(std::system(("printf 'dim = 1\\n' > /tmp/nilheat_bad.prob && " + std::string(CLI_BIN) +
                     " analyze /tmp/nilheat_bad.prob >/dev/null 2>&1; exit $?")
                        .c_str()) != 0);
  CHECK(run_cli("analyze /tmp/nilheat_bad.prob") == 2);

  // rank-deficient system: undecided at the weight cap
  CHECK(std::system("printf 'dim = 2\\nk = 1\\n[fields]\\nf0 = 0, 0\\nf1 = 1, 0\\n"
                    "[point]\\nx0 = 0, 0\\n' > /tmp/nilheat_flat.prob") == 0);
  CHECK(run_cli("analyze /tmp/nilheat_flat.prob") == 3);

  // too few paths for any usable density estimate: the quality gate trips
  CHECK(run_cli("simulate " + testutil::fixture("brownian1d.prob") +
                " --paths 35 --out /tmp/nilheat_cli_q") == 4);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("analyze --help") == 0);
}

}  // TEST_SUITE
