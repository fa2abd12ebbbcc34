#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sievekit/cli.hpp"

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sievekit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("fn evaluates the examples") {
  const auto omega = run({"fn", "--which", "omega", "--at", "2.5"});
  CHECK(omega.code == 0);
  CHECK(omega.out.substr(0, 8) == "0.562186");
  const auto F = run({"fn", "--which", "F", "--at", "1.0"});
  CHECK(F.out.substr(0, 8) == "3.562144");
  const auto f = run({"fn", "--which", "f", "--at", "4.0"});
  CHECK(f.out.substr(0, 7) == "0.97835");
}

TEST_CASE("fn dump emits the csv header") {
  const auto r = run({"fn", "--dump", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("s,F,f,omega\n", 0) == 0);
}

TEST_CASE("support subcommand") {
  CHECK(run({"support", "--set", "plus", "--theta", "7/12", "--tuple",
             "1/12,1/12,1/12,1/12,1/12,1/12"})
            .out == "true\n");
  CHECK(run({"support", "--set", "plus", "--theta", "0.58", "--tuple", "0.3,0.2"}).out ==
        "false\n");
  CHECK(run({"support", "--set", "p4", "--eta", "1/204", "--tuple", "0.17,0.16,0.10,0.09"}).out ==
        "true\n");
  CHECK(run({"support", "--set", "star", "--eta", "1/204", "--tuple", ""}).out == "true\n");
}

TEST_CASE("factor prints a partition with nonnegative slacks") {
  const auto r = run({"factor", "--tuple", "0.19,0.1", "--eta", "1/300", "--delta", "0", "--A",
                      "0.2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("case case1") != std::string::npos);
  CHECK(r.out.find("slacks") != std::string::npos);
  CHECK(r.out.find("-") == std::string::npos);  // no negative slack
  const auto bad = run({"factor", "--tuple", "0.3,0.3", "--eta", "1/300", "--A", "0.2"});
  CHECK(bad.code == 2);
}

TEST_CASE("factor fuzz runs clean") {
  const auto r = run({"factor", "fuzz", "--samples", "2000", "--eta", "1/300", "--seed", "9",
                      "--brute", "20"});
  CHECK(r.code == 0);
  CHECK(r.out.find("successes 2000") != std::string::npos);
  CHECK(r.out.find("brute_disagreements 0") != std::string::npos);
}

TEST_CASE("weights and sift") {
  const auto w = run({"weights", "--D", "100", "--z", "10", "--variant", "plus", "--dump", "csv"});
  CHECK(w.out == "d,mu,weight\n1,1,1\n2,-1,-1\n3,-1,-1\n6,1,1\n");
  const auto star = run({"weights", "--x", "10000", "--z", "10", "--variant", "star", "--eta",
                         "1/204"});
  CHECK(star.code == 0);
  CHECK(star.out.find("level 225") != std::string::npos);
  const auto s = run({"sift", "--X", "1e5", "--z", "10", "--D", "100"});
  CHECK(s.code == 0);
  CHECK(s.out.find("exact") != std::string::npos);
  // exact <= upper
  std::istringstream is(s.out);
  std::string key;
  long long exact = 0, upper = 0;
  is >> key >> exact >> key >> upper;
  CHECK(exact <= upper);
}

TEST_CASE("bound json carries the constant and round-trips with csv") {
  const auto j = run({"bound", "--params", "default", "--wu", "--format", "json", "--tol",
                      "1e-6"});
  CHECK(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["constant"].get<double>() == doctest::Approx(3.2995).epsilon(1e-3));
  CHECK(parsed["G"].size() == 8);
  CHECK(parsed["I"].size() == 13);
  CHECK(parsed["used_wu"].get<bool>());

  const auto c = run({"bound", "--params", "default", "--wu", "--format", "csv", "--tol",
                      "1e-6"});
  // csv and json agree on the assembled constant
  std::istringstream is(c.out);
  std::string line;
  double csv_constant = 0;
  while (std::getline(is, line)) {
    if (line.rfind("constant,", 0) == 0) csv_constant = std::stod(line.substr(9));
  }
  CHECK(csv_constant == doctest::Approx(parsed["constant"].get<double>()).epsilon(1e-12));
}

TEST_CASE("bound jratio") {
  const auto r = run({"bound", "jratio", "--eta", "1/204"});
  CHECK(r.code == 0);
  CHECK(r.out.find("ratio 1.0000") != std::string::npos);
}

TEST_CASE("parameter files") {
  const std::string path = "cli_params_test.cfg";
  {
    std::ofstream f(path);
    f << "# tweaked parameters\nrho = 0.27\nrho_prime = 0.1232\n";
  }
  const auto r = run({"bound", "--params", path, "--format", "json", "--tol", "1e-5"});
  std::remove(path.c_str());
  CHECK(r.code == 0);
  const auto parsed = nlohmann::json::parse(r.out);
  CHECK(parsed["params"]["rho"].get<double>() == 0.27);
  CHECK(parsed["params"]["tau1"].get<double>() == 0.16288);  // default retained
  const auto missing = run({"bound", "--params", "no_such_file.cfg"});
  CHECK(missing.code == 2);
}

TEST_CASE("identical invocations give byte-identical output") {
  const std::vector<std::string> argv = {"factor", "fuzz", "--samples", "500",
                                         "--eta",  "1/300", "--seed",   "31"};
  const auto a = run(argv);
  const auto b = run(argv);
  CHECK(a.out == b.out);
  const auto f1 = run({"fn", "--which", "F", "--at", "4.7"});
  const auto f2 = run({"fn", "--which", "F", "--at", "4.7"});
  CHECK(f1.out == f2.out);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({"fn", "--bogus-flag"}).code == 1);
  CHECK(run({"no_such_command"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
}
