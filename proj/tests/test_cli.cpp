#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// run the installed binary with stdout and stderr captured
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::filesystem::path tmp =
      std::filesystem::temp_directory_path() / ("gl2lg_cli_" + std::to_string(++counter) + ".out");
  std::string cmd = std::string(GL2LG_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::filesystem::remove(tmp);
  return r;
}

}  // namespace

TEST_CASE("cli classify") {
  RunResult klein = run_cli("classify --ell 5 --gens 1:0:0:4,0:1:1:0 --target Nns");
  REQUIRE(klein.code == 0);
  REQUIRE(klein.out.find("KleinFour") != std::string::npos);
  REQUIRE(klein.out.find("congruence holds") != std::string::npos);

  RunResult machine =
      run_cli("classify --ell 5 --gens 1:0:0:4,0:1:1:0 --target Nns --format machine");
  REQUIRE(machine.code == 0);
  REQUIRE(machine.out.find("# columns: ell,target,order,pgl_type,case") != std::string::npos);
  REQUIRE(machine.out.find("5,Nns,8,Dihedral(4),KleinFour,1,") != std::string::npos);

  // a unipotent element fits no split Cartan conjugate
  RunResult local = run_cli("classify --ell 7 --gens 1:1:0:1 --target Csp");
  REQUIRE(local.code == 1);
  REQUIRE(local.out.find("fails the elementwise condition") != std::string::npos);

  RunResult global = run_cli("classify --ell 7 --gens 3:0:0:1 --target Csp");
  REQUIRE(global.code == 0);
  REQUIRE(global.out.find("case: Global") != std::string::npos);
  REQUIRE(global.out.find("witness frame") != std::string::npos);
}

TEST_CASE("cli verify") {
  RunResult ok = run_cli("verify --ell 5 --target Nns --format machine");
  REQUIRE(ok.code == 0);
  REQUIRE(ok.out.find("# gl2lg verification report v1") != std::string::npos);
  REQUIRE(ok.out.find("# ok=1") != std::string::npos);
  REQUIRE(ok.out.find("cover_klein=3") != std::string::npos);

  // byte-identical on repeat runs
  RunResult again = run_cli("verify --ell 5 --target Nns --format machine");
  REQUIRE(again.out == ok.out);

  RunResult filt = run_cli("verify --ell 7 --target Csp --require-surjective-det");
  REQUIRE(filt.code == 0);
  REQUIRE(filt.out.find("surjective determinant required") != std::string::npos);

  RunResult borel = run_cli("verify --ell 5 --target Borel");
  REQUIRE(borel.code == 2);
}

TEST_CASE("cli scan") {
  RunResult good = run_cli("scan --j 2268945/128 --ell 7 --target Csp --pmax 500");
  REQUIRE(good.code == 0);
  REQUIRE(good.out.find("consistent") != std::string::npos);

  RunResult bad = run_cli("scan --j 3 --ell 13 --target Nsp --pmax 100 --format machine");
  REQUIRE(bad.code == 1);
  REQUIRE(bad.out.find("# consistent=0") != std::string::npos);
  REQUIRE(bad.out.find("# columns: p,ap,good,compatible") != std::string::npos);

  RunResult junk = run_cli("scan --j 2**3 --ell 7 --target Csp --pmax 100");
  REQUIRE(junk.code == 2);
}

TEST_CASE("cli genus") {
  RunResult s4 = run_cli("genus --ell 13 --type S4 --format machine");
  REQUIRE(s4.code == 0);
  REQUIRE(s4.out.find("# columns: ell,type,mu,nu2,nu3,nu_inf,g") != std::string::npos);
  REQUIRE(s4.out.find("13,S4,") != std::string::npos);
  REQUIRE(s4.out.substr(s4.out.size() - 3) == ",3\n");

  RunResult text = run_cli("genus --ell 11 --type Nns");
  REQUIRE(text.code == 0);
  REQUIRE(text.out.find("genus: 1") != std::string::npos);

  // no projective A5 inside PGL2(F_7)
  RunResult none = run_cli("genus --ell 7 --type A5");
  REQUIRE(none.code == 2);
}

TEST_CASE("cli bound") {
  RunResult s4 = run_cli("bound --degree 1 --image S4 --target Nsp --format machine");
  REQUIRE(s4.code == 0);
  REQUIRE(s4.out.find("S4,1,13,Nsp,0,13") != std::string::npos);

  RunResult nns = run_cli("bound --degree 1 --image S4 --target Nns");
  REQUIRE(nns.code == 0);
  REQUIRE(nns.out.find("feasible at Nns: 11") != std::string::npos);

  RunResult plain = run_cli("bound --degree 2 --image A5");
  REQUIRE(plain.code == 0);
  REQUIRE(plain.out.find("ell <= 31") != std::string::npos);
}

TEST_CASE("cli flag validation") {
  REQUIRE(run_cli("").code == 2);
  REQUIRE(run_cli("explain").code == 2);
  REQUIRE(run_cli("verify --target Nsp").code == 2);           // missing --ell
  REQUIRE(run_cli("verify --ell 5 --target Xx").code == 2);    // unknown target
  REQUIRE(run_cli("verify --ell 4 --target Nsp").code == 2);   // not a prime
  REQUIRE(run_cli("genus --ell 13 --type S4 --format xml").code == 2);
  REQUIRE(run_cli("--help").code == 0);
  REQUIRE(run_cli("scan --help").code == 0);
}
