#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gl2lg/curves.hpp"
#include "gl2lg/genus.hpp"
#include "gl2lg/inertia.hpp"
#include "gl2lg/localglobal.hpp"

namespace {

using namespace gl2lg;

// exit codes: 0 success, 1 negative verdict, 2 bad invocation
constexpr int kOk = 0;
constexpr int kVerdict = 1;
constexpr int kUsage = 2;

StandardTarget target_or_throw(const std::string& s) {
  auto t = parse_target(s);
  if (!t) throw std::invalid_argument("unknown target: " + s + " (want Borel, Csp, Cns, Nsp or Nns)");
  return *t;
}

std::vector<Mat2> parse_generator_list(const PrimeField& F, const std::string& s) {
  std::vector<Mat2> gens;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto m = parse_generator(F, tok);
    if (!m) throw std::invalid_argument("bad generator '" + tok + "' (want a:b:c:d mod ell)");
    gens.push_back(*m);
  }
  if (gens.empty()) throw std::invalid_argument("no generators given");
  return gens;
}

int run_classify(uint64_t ell, const std::string& gens, const std::string& target,
                 const std::string& format) {
  PrimeField F(ell);
  StandardTarget t = target_or_throw(target);
  Subgroup S = subgroup_closure(F, parse_generator_list(F, gens));
  if (!satisfies_local(F, S, t)) {
    std::cout << "group of order " << S.order() << " fails the elementwise condition for "
              << target_name(t) << " at ell=" << ell << "\n";
    return kVerdict;
  }
  TheoremCase c = classify(F, S, t);
  if (format == "machine") {
    std::cout << "# gl2lg classification v1\n# columns: " << kCaseColumns << '\n'
              << case_record(ell, t, S, c, c.finer_local) << '\n';
  } else {
    std::cout << "group of order " << S.order() << " at ell=" << ell << ", target "
              << target_name(t) << '\n';
    std::cout << "  projective type: " << pgl_type_name(c.type) << '\n';
    std::cout << "  case: " << case_name(c.tag)
              << (c.tag == CaseTag::Global ? ""
                                           : c.congruence_ok ? " (congruence holds)"
                                                             : " (congruence FAILS)")
              << '\n';
    std::cout << "  determinant image: order " << c.det.image_order
              << (c.det.surjective ? ", surjective" : "")
              << (c.det.in_squares ? ", contained in squares" : "") << '\n';
    if (c.witness) std::cout << "  witness frame: " << frame_to_string(*c.witness) << '\n';
    if (c.finer_local) std::cout << "  also satisfies the bare Cartan condition\n";
  }
  return c.tag == CaseTag::Violation || !c.congruence_ok ? kVerdict : kOk;
}

int run_verify(uint64_t ell, const std::string& target, bool surjective, unsigned threads,
               const std::string& cache_dir, const std::string& format) {
  PrimeField F(ell);
  StandardTarget t = target_or_throw(target);
  if (t == StandardTarget::Borel)
    throw std::invalid_argument("verify covers Csp, Cns, Nsp and Nns");
  VerifyOptions opt;
  opt.require_surjective_det = surjective;
  opt.search.max_ell = ell;
  opt.search.threads = threads;
  if (!cache_dir.empty())
    opt.search.cache_file = cache_dir + "/candidates_" + target_name(t) + "_" +
                            std::to_string(ell) + ".txt";
  VerificationReport rep = verify_theorem(F, t, opt);
  std::cout << (format == "machine" ? report_to_machine(rep) : report_to_text(rep));
  return rep.ok ? kOk : kVerdict;
}

int run_scan(const std::string& jexpr, uint64_t ell, const std::string& target, uint64_t pmax,
             unsigned threads, const std::string& format) {
  PrimeField F(ell);
  StandardTarget t = target_or_throw(target);
  Curve e = curve_from_j(parse_j_expression(jexpr));
  ScanReport rep = local_scan(e, F, t, pmax, threads);
  std::cout << (format == "machine" ? scan_to_machine(rep) : scan_to_text(rep));
  return rep.consistent ? kOk : kVerdict;
}

int run_genus(uint64_t ell, const std::string& type, const std::string& format) {
  PrimeField F(ell);
  Subgroup H = genus_curve_group(F, type);
  GenusProfile p = genus_of_modular_curve(F, H);
  if (format == "machine") {
    std::cout << "# gl2lg genus v1\n# columns: " << genus_columns() << '\n'
              << genus_machine_row(type, p) << '\n';
  } else {
    std::cout << "modular curve at ell=" << ell << ", type " << type << '\n';
    std::cout << "  index mu: " << p.mu << '\n';
    std::cout << "  elliptic points: nu2=" << p.nu2 << ", nu3=" << p.nu3 << '\n';
    std::cout << "  cusps: " << p.nu_inf << '\n';
    std::cout << "  genus: " << p.g << '\n';
  }
  return kOk;
}

int run_bound(uint64_t degree, const std::string& image, const std::string& target,
              const std::string& format) {
  ExceptionalImage im = parse_exceptional_image(image);
  uint64_t bound = exceptional_bound(degree, im);
  bool with_target = !target.empty();
  StandardTarget t{};
  std::vector<uint64_t> primes;
  bool square = false;
  if (with_target) {
    t = target_or_throw(target);
    primes = feasible_exceptional_primes(degree, im, t);
    square = requires_square_determinants(im, t);
  }
  if (format == "machine") {
    std::cout << "# gl2lg bound v1\n# columns: image,degree,bound,target,square_det,primes\n";
    std::cout << exceptional_image_name(im) << ',' << degree << ',' << bound << ','
              << (with_target ? target_name(t) : "") << ',' << (with_target && square ? 1 : 0)
              << ',';
    for (size_t i = 0; i < primes.size(); ++i) std::cout << (i ? ";" : "") << primes[i];
    std::cout << '\n';
  } else {
    std::cout << "image " << exceptional_image_name(im) << " over a degree " << degree
              << " field: ell <= " << bound << '\n';
    if (with_target) {
      std::cout << "  feasible at " << target_name(t) << ":";
      if (primes.empty()) std::cout << " none";
      for (uint64_t p : primes) std::cout << ' ' << p;
      std::cout << '\n';
      std::cout << "  determinant constraint: "
                << (square ? "contained in squares" : "none (sign character)") << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local-global toolkit for subgroups of GL2(F_ell)"};
  app.require_subcommand(1);

  uint64_t ell = 0, pmax = 10000, degree = 1;
  std::string gens, target, jexpr, type, image, cache_dir;
  std::string format = "text";
  bool surjective = false;
  unsigned threads = 0;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();
  };

  CLI::App* classify_cmd = app.add_subcommand("classify", "judge one generated subgroup");
  classify_cmd->add_option("--ell", ell, "odd prime modulus")->required();
  classify_cmd->add_option("--gens", gens, "generators a:b:c:d, comma separated")->required();
  classify_cmd->add_option("--target", target, "Borel, Csp, Cns, Nsp or Nns")->required();
  add_format(classify_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "exhaustively check one modulus");
  verify_cmd->add_option("--ell", ell, "odd prime modulus")->required();
  verify_cmd->add_option("--target", target, "Csp, Cns, Nsp or Nns")->required();
  verify_cmd->add_flag("--require-surjective-det", surjective,
                       "drop candidates without surjective determinant");
  verify_cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
  verify_cmd->add_option("--cache", cache_dir, "directory for candidate caches");
  add_format(verify_cmd);

  CLI::App* scan_cmd = app.add_subcommand("scan", "Frobenius-trace scan of a curve");
  scan_cmd->add_option("--j", jexpr, "j-invariant, e.g. -2^12*5^3*11*13^4/3^13")->required();
  scan_cmd->add_option("--ell", ell, "odd prime modulus")->required();
  scan_cmd->add_option("--target", target, "Borel, Csp, Cns, Nsp or Nns")->required();
  scan_cmd->add_option("--pmax", pmax, "scan primes up to this bound")->capture_default_str();
  scan_cmd->add_option("--threads", threads, "worker threads, 0 = all cores");
  add_format(scan_cmd);

  CLI::App* genus_cmd = app.add_subcommand("genus", "genus of a named modular curve");
  genus_cmd->add_option("--ell", ell, "odd prime modulus")->required();
  genus_cmd->add_option("--type", type, "A4, S4, A5, Nsp or Nns")->required();
  add_format(genus_cmd);

  CLI::App* bound_cmd = app.add_subcommand("bound", "inertia bounds for exceptional images");
  bound_cmd->add_option("--degree", degree, "number field degree")->capture_default_str();
  bound_cmd->add_option("--image", image, "A4, S4, A5 or KleinFour")->required();
  bound_cmd->add_option("--target", target, "optionally intersect with a target congruence");
  add_format(bound_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (classify_cmd->parsed()) return run_classify(ell, gens, target, format);
    if (verify_cmd->parsed()) return run_verify(ell, target, surjective, threads, cache_dir, format);
    if (scan_cmd->parsed()) return run_scan(jexpr, ell, target, pmax, threads, format);
    if (genus_cmd->parsed()) return run_genus(ell, type, format);
    if (bound_cmd->parsed()) return run_bound(degree, image, target, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
