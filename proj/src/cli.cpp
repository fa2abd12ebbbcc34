#include "sievekit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "sievekit/bound_pipeline.hpp"
#include "sievekit/combinatorial_sieve.hpp"
#include "sievekit/factorization.hpp"
#include "sievekit/selfcheck.hpp"
#include "sievekit/sieve_functions.hpp"
#include "sievekit/support_sets.hpp"

namespace sievekit::cli {

namespace {

unsigned thread_cap() {
  if (const char* env = std::getenv("SIEVEKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;  // auto
}

std::vector<Rational> parse_tuple(const std::string& csv) {
  std::vector<Rational> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_rational(item));
  }
  return out;
}

TwinParams load_params(const std::string& spec) {
  if (spec == "default") return TwinParams::published();
  std::ifstream in(spec);
  if (!in) throw std::runtime_error("cannot open parameter file " + spec);
  TwinParams p = TwinParams::published();
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) continue;
    const double v = std::stod(value);
    if (key == "rho") p.rho = v;
    else if (key == "rho_prime") p.rho_prime = v;
    else if (key == "tau1") p.tau1 = v;
    else if (key == "tau2") p.tau2 = v;
    else if (key == "tau3") p.tau3 = v;
    else if (key == "epsilon") p.epsilon = v;
    else throw std::runtime_error("unknown parameter key '" + key + "'");
  }
  return p;
}

nlohmann::json report_json(const BoundReport& r) {
  nlohmann::json j;
  j["constant"] = r.constant;
  j["used_wu"] = r.used_wu;
  j["G"] = r.G;
  if (r.used_wu) j["G2_wu"] = r.G2_wu;
  j["I"] = r.I;
  j["G_fifth"] = r.G_fifth;
  j["sum_G"] = r.sum_G(false);
  j["sum_I"] = r.sum_I();
  j["error_budget"] = r.error_budget;
  j["params"] = {{"rho", r.params.rho},   {"rho_prime", r.params.rho_prime},
                 {"tau1", r.params.tau1}, {"tau2", r.params.tau2},
                 {"tau3", r.params.tau3}, {"epsilon", r.params.epsilon}};
  return j;
}

void report_table(const BoundReport& r, std::ostream& out) {
  out << std::fixed << std::setprecision(7);
  out << "n   G_n           n   I_n\n";
  for (int k = 0; k < 8; ++k) {
    out << 1 + k << "   " << std::setw(10) << r.G[static_cast<std::size_t>(k)];
    out << "     " << 9 + k << "  " << std::setw(12) << std::setprecision(9)
        << r.I[static_cast<std::size_t>(k)] << std::setprecision(7) << "\n";
  }
  for (int k = 8; k < 13; ++k)
    out << "               " << 9 + k << "  " << std::setw(12) << std::setprecision(9)
        << r.I[static_cast<std::size_t>(k)] << std::setprecision(7) << "\n";
  if (r.used_wu) out << "G2_wu         " << r.G2_wu << "\n";
  out << "G(1/5)        " << r.G_fifth << "\n";
  out << "sum G         " << r.sum_G(false) << "\n";
  out << "sum I         " << std::setprecision(9) << r.sum_I() << std::setprecision(7) << "\n";
  out << "error budget  " << std::scientific << r.error_budget << std::fixed << "\n";
  out << "constant      " << std::setprecision(6) << r.constant << "\n";
}

void report_csv(const BoundReport& r, std::ostream& out) {
  out << std::setprecision(12);
  out << "quantity,value\n";
  for (int k = 0; k < 8; ++k) out << "G" << 1 + k << "," << r.G[static_cast<std::size_t>(k)] << "\n";
  if (r.used_wu) out << "G2_wu," << r.G2_wu << "\n";
  for (int k = 0; k < 13; ++k) out << "I" << 9 + k << "," << r.I[static_cast<std::size_t>(k)] << "\n";
  out << "G_fifth," << r.G_fifth << "\n";
  out << "constant," << r.constant << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sievekit: modified linear sieve toolkit"};
  app.require_subcommand(1);

  // fn
  auto* fn = app.add_subcommand("fn", "evaluate F, f or the Buchstab function");
  std::string fn_which = "F";
  double fn_at = 2.0, fn_step = 1e-4;
  std::string fn_dump;
  fn->add_option("--which", fn_which, "F|f|omega")->check(CLI::IsMember({"F", "f", "omega"}));
  fn->add_option("--at", fn_at, "evaluation point");
  fn->add_option("--step", fn_step, "grid step");
  fn->add_option("--dump", fn_dump, "emit table of s,F,f,omega")->check(CLI::IsMember({"csv"}));

  // support
  auto* support = app.add_subcommand("support", "support-set membership");
  std::string sp_set = "plus", sp_theta = "7/12", sp_eta = "0", sp_tuple;
  support->add_option("--set", sp_set, "plus|minus|well|star|p4|p61|p62")
      ->check(CLI::IsMember({"plus", "minus", "well", "star", "p4", "p61", "p62"}));
  support->add_option("--theta", sp_theta, "level exponent (rational)");
  support->add_option("--eta", sp_eta, "eta (rational)");
  support->add_option("--tuple", sp_tuple, "comma-separated exponents");

  // factor
  auto* factor = app.add_subcommand("factor", "programmable factorization of a D* tuple");
  std::string fc_tuple, fc_eta = "1/204", fc_delta = "0", fc_A = "1/4";
  factor->add_option("--tuple", fc_tuple, "comma-separated exponents");
  factor->add_option("--eta", fc_eta, "eta (rational)");
  factor->add_option("--delta", fc_delta, "delta (rational)");
  factor->add_option("--A", fc_A, "A exponent (rational)");
  auto* fuzz = factor->add_subcommand("fuzz", "randomized soundness sweep");
  std::uint64_t fz_samples = 10000, fz_seed = 0x5eed;
  std::string fz_eta = "1/204", fz_delta = "0";
  std::uint64_t fz_brute = 100;
  fuzz->add_option("--samples", fz_samples, "number of sampled tuples");
  fuzz->add_option("--eta", fz_eta, "eta (rational)");
  fuzz->add_option("--delta", fz_delta, "delta (rational)");
  fuzz->add_option("--seed", fz_seed, "rng seed");
  fuzz->add_option("--brute", fz_brute, "brute-force subsample size");

  // weights
  auto* weights = app.add_subcommand("weights", "integer-scale sieve weight table");
  double w_D = 100, w_x = 0;
  std::int64_t w_z = 10;
  std::string w_variant = "plus", w_eta = "1/204";
  std::string w_dump;
  bool w_odd = false;
  weights->add_option("--D", w_D, "level (integer, scientific form accepted)");
  weights->add_option("--z", w_z, "sieving threshold");
  weights->add_option("--variant", w_variant, "plus|minus|star")
      ->check(CLI::IsMember({"plus", "minus", "star"}));
  weights->add_option("--x", w_x, "star scale x (sets D = floor(x^(7/12+eta)))");
  weights->add_option("--eta", w_eta, "star eta (rational)");
  weights->add_flag("--odd-only", w_odd, "sieve odd primes only");
  weights->add_option("--dump", w_dump, "emit table of d,mu,weight")->check(CLI::IsMember({"csv"}));

  // sift
  auto* sift = app.add_subcommand("sift", "toy twin sift");
  double s_X = 1000000, s_D = 10000;
  std::int64_t s_z = 31;
  std::string s_variant = "plus";
  sift->add_option("--X", s_X, "sift {p+2 : p <= X} (scientific form accepted)");
  sift->add_option("--z", s_z, "sieving threshold");
  sift->add_option("--D", s_D, "weight level (scientific form accepted)");
  sift->add_option("--variant", s_variant, "plus|minus")
      ->check(CLI::IsMember({"plus", "minus"}));

  // bound
  auto* bound = app.add_subcommand("bound", "evaluate the twin-prime bound pipeline");
  bound->fallthrough();  // --wu/--tol may follow the jratio/sweep subcommands
  std::string b_params = "default", b_format = "table";
  bool b_wu = false;
  double b_tol = 1e-7;
  bound->add_option("--params", b_params, "default or a key=value file");
  bound->add_option("--format", b_format, "table|json|csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  bound->add_flag("--wu", b_wu, "apply the H_(4/7) refinement to G2");
  bound->add_option("--tol", b_tol, "quadrature relative tolerance");
  auto* jratio = bound->add_subcommand("jratio", "exceptional-set J integrals and F*/F ratio");
  std::string j_eta = "1/204";
  jratio->add_option("--eta", j_eta, "eta (rational)");
  auto* sweep = bound->add_subcommand("sweep", "constant vs one parameter, plot-ready csv");
  std::string sw_param = "rho";
  double sw_from = 0.26, sw_to = 0.28;
  int sw_steps = 10;
  sweep->add_option("--param", sw_param, "rho|rho_prime|tau1|tau2|tau3|epsilon")
      ->check(CLI::IsMember({"rho", "rho_prime", "tau1", "tau2", "tau3", "epsilon"}));
  sweep->add_option("--from", sw_from, "first value");
  sweep->add_option("--to", sw_to, "last value");
  sweep->add_option("--steps", sw_steps, "number of samples");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "local search over the five parameters");
  int o_budget = 2000;
  std::uint64_t o_seed = 0;
  bool o_wu = true;
  std::string o_params = "default";
  optimize->add_option("--budget", o_budget, "bound evaluations");
  optimize->add_option("--seed", o_seed, "rng seed (unused by the simplex search)");
  optimize->add_option("--params", o_params, "starting point");
  optimize->add_flag("--wu,!--no-wu", o_wu, "optimize the Wu-refined constant");

  // selfcheck
  auto* selfcheck_cmd = app.add_subcommand("selfcheck", "replay all acceptance criteria");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  const unsigned threads = thread_cap();
  try {
    if (fn->parsed()) {
      const SieveFunctionGrid grid = solve_linear_sieve(10.0, fn_step);
      const BuchstabGrid bg = solve_buchstab(10.0, fn_step);
      if (!fn_dump.empty()) {
        out << "s,F,f,omega\n" << std::setprecision(10);
        for (double s = 1.0; s <= 6.0 + 1e-12; s += 0.01)
          out << s << "," << eval_F(grid, s) << "," << eval_f(grid, s) << ","
              << eval_omega(bg, std::max(1.0, s)) << "\n";
        return 0;
      }
      double v;
      if (fn_which == "F") v = eval_F(grid, fn_at);
      else if (fn_which == "f") v = eval_f(grid, fn_at);
      else v = eval_omega(bg, fn_at);
      out << std::setprecision(10) << v << "\n";
      return 0;
    }

    if (support->parsed()) {
      const ExponentTuple t(parse_tuple(sp_tuple));
      const Rational theta = parse_rational(sp_theta);
      const Rational eta = parse_rational(sp_eta);
      bool member;
      if (sp_set == "plus") member = in_D_plus(t, theta);
      else if (sp_set == "minus") member = in_D_minus(t, theta);
      else if (sp_set == "well") member = in_D_well(t, theta);
      else if (sp_set == "star") member = in_D_star(t, eta);
      else if (sp_set == "p4") member = in_P4(t, eta);
      else if (sp_set == "p61") member = in_P61(t, eta);
      else member = in_P62(t, eta);
      out << (member ? "true" : "false") << "\n";
      return 0;
    }

    if (factor->parsed()) {
      if (fuzz->parsed()) {
        const FuzzReport rep = run_factor_fuzz(fz_samples, parse_rational(fz_eta),
                                               parse_rational(fz_delta), fz_seed, fz_brute,
                                               threads);
        out << "samples " << rep.samples << "\nsuccesses " << rep.successes << "\nfailures "
            << rep.jm_failures + rep.factor_errors << "\nbrute_checked " << rep.brute_checked
            << "\nbrute_disagreements " << rep.brute_disagreements << "\n";
        if (!rep.first_counterexample.empty())
          out << "counterexample " << rep.first_counterexample << "\n";
        const bool clean = rep.successes == rep.samples && rep.brute_disagreements == 0;
        return clean ? 0 : 2;
      }
      const ExponentTuple t(parse_tuple(fc_tuple));
      const Rational eta = parse_rational(fc_eta);
      const Rational delta = parse_rational(fc_delta);
      LevelContext ctx{Rational(7, 12) + eta - 50 * delta, eta, delta, parse_rational(fc_A)};
      std::string label;
      const FactorTriple triple = factor_dstar(t, ctx, &label);
      auto print_part = [&](const char* name, const std::vector<std::size_t>& part,
                            const Rational& expsum) {
        out << name << " = {";
        for (std::size_t i = 0; i < part.size(); ++i) out << (i ? "," : "") << part[i];
        out << "} exponent " << to_string(expsum) << "\n";
      };
      out << "case " << label << "\n";
      print_part("I1", triple.I1, triple.a_exp);
      print_part("I2", triple.I2, triple.b_exp);
      print_part("I3", triple.I3, triple.c_exp);
      const auto slacks = jm_slacks(triple.a_exp, triple.b_exp, triple.c_exp, ctx.A_exp, delta);
      out << "slacks";
      for (const auto& s : slacks) out << " " << to_string(s);
      out << "\n";
      return 0;
    }

    if (weights->parsed()) {
      std::optional<StarScale> star;
      if (w_variant == "star") star = StarScale{static_cast<std::int64_t>(w_x), parse_rational(w_eta)};
      const WeightVariant variant = w_variant == "plus"    ? WeightVariant::Plus
                                    : w_variant == "minus" ? WeightVariant::Minus
                                                           : WeightVariant::Star;
      const WeightTable table =
          build_weights(static_cast<std::int64_t>(w_D), w_z, variant, !w_odd, star);
      if (!w_dump.empty()) {
        out << "d,mu,weight\n";
        for (const auto& [d, wt] : table.entries) out << d << "," << wt << "," << wt << "\n";
      } else {
        out << "level " << table.level_D << "\nsupport size " << table.entries.size() << "\n";
      }
      return 0;
    }

    if (sift->parsed()) {
      const WeightVariant variant =
          s_variant == "plus" ? WeightVariant::Plus : WeightVariant::Minus;
      const WeightTable table =
          build_weights(static_cast<std::int64_t>(s_D), s_z, variant, /*include_two=*/false);
      const SiftResult res = toy_sift(static_cast<std::int64_t>(s_X), table);
      out << "exact " << res.exact << "\nupper " << res.upper << "\n";
      return 0;
    }

    if (bound->parsed()) {
      if (jratio->parsed()) {
        const JRatio j = compute_J(to_double(parse_rational(j_eta)), 1e-7);
        out << std::setprecision(9) << "J4 " << j.J4 << "\nJ60 " << j.J60 << "\nJ61 " << j.J61
            << "\nJ62 " << j.J62 << "\nratio " << j.ratio << "\n";
        return 0;
      }
      if (sweep->parsed()) {
        if (sw_steps < 2) throw std::runtime_error("sweep needs at least 2 steps");
        const SieveEval ev;
        out << sw_param << ",constant\n" << std::setprecision(10);
        for (int k = 0; k < sw_steps; ++k) {
          const double v = sw_from + (sw_to - sw_from) * k / (sw_steps - 1);
          TwinParams p = load_params(b_params);
          if (sw_param == "rho") p.rho = v;
          else if (sw_param == "rho_prime") p.rho_prime = v;
          else if (sw_param == "tau1") p.tau1 = v;
          else if (sw_param == "tau2") p.tau2 = v;
          else if (sw_param == "tau3") p.tau3 = v;
          else p.epsilon = v;
          if (!p.valid()) {
            out << v << ",invalid\n";
            continue;
          }
          const BoundReport r = final_bound(p, b_wu, ev, b_tol, threads);
          out << v << "," << r.constant << "\n";
        }
        return 0;
      }
      const TwinParams p = load_params(b_params);
      const SieveEval ev;
      const BoundReport report = final_bound(p, b_wu, ev, b_tol, threads);
      if (b_format == "json") out << report_json(report).dump(2) << "\n";
      else if (b_format == "csv") report_csv(report, out);
      else report_table(report, out);
      return 0;
    }

    if (optimize->parsed()) {
      (void)o_seed;  // simplex search is deterministic; flag kept for interface stability
      const TwinParams p = load_params(o_params);
      const SieveEval ev;
      const OptimizeResult res = optimize_params(p, o_budget, ev, o_wu, 1e-6, threads);
      out << std::setprecision(10) << "constant " << res.report.constant << "\n"
          << "rho_prime " << res.params.rho_prime << "\ntau1 " << res.params.tau1 << "\ntau2 "
          << res.params.tau2 << "\ntau3 " << res.params.tau3 << "\nrho " << res.params.rho
          << "\nbudget_exhausted " << (res.budget_exhausted ? "true" : "false") << "\n";
      return 0;
    }

    if (selfcheck_cmd->parsed()) {
      return selfcheck::run_all(out, threads) ? 0 : 2;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace sievekit::cli
