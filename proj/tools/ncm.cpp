// ncm: command-line front end. Exit status 0 on success, 1 when a check
// fails or a computation does not converge, 2 on usage or input errors.

#include "ncm/binomial.hpp"
#include "ncm/corner_norms.hpp"
#include "ncm/distribution.hpp"
#include "ncm/errors.hpp"
#include "ncm/even_p.hpp"
#include "ncm/gadgets.hpp"
#include "ncm/io.hpp"
#include "ncm/random.hpp"
#include "ncm/reconstruction.hpp"
#include "ncm/suite.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Output {
  std::string format = "json";

  int emit(const json& doc, bool pass = true) const {
    std::cout << doc.dump(2) << '\n';
    return pass ? 0 : kExitFail;
  }
};

/// CSV of a flat JSON object or an array of flat objects.
std::string to_csv(const json& rows) {
  const json list = rows.is_array() ? rows : json::array({rows});
  if (list.empty()) return "";
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [key, _] : list.front().items()) {
    out << (first ? "" : ",") << key;
    first = false;
  }
  out << '\n';
  for (const auto& row : list) {
    first = true;
    for (const auto& [key, value] : row.items()) {
      out << (first ? "" : ",");
      if (value.is_string()) out << value.get<std::string>();
      else out << value.dump();
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

int emit(const Output& o, const json& doc, bool pass = true) {
  if (o.format == "csv") {
    std::cout << to_csv(doc);
    return pass ? 0 : kExitFail;
  }
  return o.emit(doc, pass);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw ncm::InputError("not a number: " + item);
    out.push_back(v);
  }
  return out;
}

json word_entry(const ncm::StarWord& w, ncm::Complex z) {
  return {{"word", ncm::to_string(w)}, {"re", z.real()}, {"im", z.imag()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noncommutative moments from p-norms"};
  app.require_subcommand(1);
  app.fallthrough();
  Output out;
  app.add_option("--format", out.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  std::function<int()> action;

  std::uint64_t seed = 0;
  try {
    seed = ncm::default_seed();
  } catch (const ncm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  // gadgets verify
  auto* gadgets = app.add_subcommand("gadgets", "Cyclic-trace gadget families");
  gadgets->require_subcommand(1);
  auto* gverify = gadgets->add_subcommand("verify", "Check the cyclic-trace property");
  int g_n = 4;
  std::string g_kind = "full";
  std::optional<std::size_t> g_samples;
  gverify->add_option("--n", g_n, "Family size")->required()->check(CLI::Range(1, 64));
  gverify->add_option("--kind", g_kind, "full or compact")->check(CLI::IsMember({"full", "compact"}));
  gverify->add_option("--samples", g_samples, "Sample this many permutations instead of all");
  gverify->callback([&] {
    action = [&] {
      const auto kind = ncm::parse_gadget_kind(g_kind);
      const auto family = kind == ncm::GadgetKind::FullCycle ? ncm::full_cycle_family(g_n) : ncm::compact_family(g_n);
      ncm::CyclicTraceOptions opt;
      opt.samples = g_samples;
      opt.seed = seed;
      const auto r = ncm::verify_cyclic_trace(family, opt);
      return emit(out,
                  {{"n", g_n},
                   {"dim", family.dim},
                   {"kind", g_kind},
                   {"max_deviation", r.max_deviation},
                   {"pass", r.pass},
                   {"exhaustive", r.exhaustive},
                   {"permutations_checked", r.permutations_checked}},
                  r.pass);
    };
  });

  // coeff table
  auto* coeff = app.add_subcommand("coeff", "Moment coefficients C(p, N, alpha)");
  coeff->require_subcommand(1);
  auto* ctable = coeff->add_subcommand("table", "Tabulate C(p, N, alpha) for N <= max-n");
  double c_p = 1.0;
  int c_max_n = 6;
  ctable->add_option("--p", c_p, "Exponent p > 0")->required()->check(CLI::PositiveNumber);
  ctable->add_option("--max-n", c_max_n, "Largest N")->check(CLI::Range(1, 64));
  ctable->callback([&] {
    action = [&] {
      json rows = json::array();
      for (int n = 1; n <= c_max_n; ++n)
        for (int alpha = 0; 2 * alpha <= n; ++alpha)
          rows.push_back({{"p", c_p},
                          {"N", n},
                          {"alpha", alpha},
                          {"coefficient", ncm::moment_coefficient(ncm::MomentCoefficientQuery::make(c_p, n, alpha))}});
      // CSV unless JSON was asked for explicitly.
      if (app.get_option("--format")->count() > 0 && out.format == "json") return out.emit(rows);
      std::cout << "p,N,alpha,coefficient\n";
      std::cout.precision(17);
      for (const auto& r : rows)
        std::cout << r["p"].get<double>() << ',' << r["N"] << ',' << r["alpha"] << ','
                  << r["coefficient"].get<double>() << '\n';
      return 0;
    };
  });

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "Recover one word trace from p-norms");
  std::string r_file, r_word, r_radii;
  double r_p = 3.0;
  std::optional<int> r_q;
  double r_tol = 1e-3;
  recon->add_option("--file", r_file, "Matrix family (JSON)")->required()->check(CLI::ExistingFile);
  recon->add_option("--word", r_word, "Word such as 1*,2,1")->required();
  recon->add_option("--p", r_p, "Exponent p > 0")->check(CLI::PositiveNumber);
  recon->add_option("--q", r_q, "Roots-of-unity order")->check(CLI::Range(3, 64));
  recon->add_option("--radii", r_radii, "Comma-separated decreasing radii");
  recon->add_option("--tolerance", r_tol, "Residual tolerance")->check(CLI::PositiveNumber);
  recon->callback([&] {
    action = [&] {
      const auto family = ncm::read_matrix_file(r_file);
      const auto word = ncm::parse_word(r_word);
      ncm::ReconstructOptions opt;
      opt.q = r_q;
      opt.tolerance = r_tol;
      if (!r_radii.empty()) opt.radii = parse_list(r_radii);
      const auto rec = ncm::reconstruct_word_trace(family, word, r_p, opt);
      const auto direct = ncm::word_trace(family, word);
      return emit(out, {{"word", r_word},
                        {"p", r_p},
                        {"estimate_re", rec.estimate.real()},
                        {"estimate_im", rec.estimate.imag()},
                        {"direct_trace_re", direct.real()},
                        {"direct_trace_im", direct.imag()},
                        {"abs_error", std::abs(rec.estimate - direct)},
                        {"residual", rec.residual}});
    };
  });

  // dist table | compare
  auto* dist = app.add_subcommand("dist", "*-moment tables");
  dist->require_subcommand(1);
  auto* dtable = dist->add_subcommand("table", "Moment table of a family");
  std::string d_file, d_file_b;
  int d_maxdeg = 2;
  std::optional<double> d_p;
  double d_tol = 1e-10;
  dtable->add_option("--file", d_file, "Matrix family (JSON)")->required()->check(CLI::ExistingFile);
  dtable->add_option("--maxdeg", d_maxdeg, "Largest word length")->check(CLI::Range(0, 12));
  dtable->add_option("--reconstruct-p", d_p, "Recover entries from p-norms at this p")->check(CLI::PositiveNumber);
  dtable->callback([&] {
    action = [&] {
      const auto family = ncm::read_matrix_file(d_file);
      ncm::MomentTable table;
      json doc{{"maxdeg", d_maxdeg}, {"family_size", family.size()}};
      if (d_p) {
        const auto rec = ncm::reconstructed_moments(family, d_maxdeg, *d_p);
        table = rec.table;
        doc["reconstructed_at_p"] = *d_p;
        doc["max_residual"] = rec.max_residual;
      } else {
        table = ncm::star_moments(family, d_maxdeg);
      }
      json entries = json::array();
      for (const auto& [w, z] : table.entries) entries.push_back(word_entry(w, z));
      if (out.format == "csv") {
        std::cout << to_csv(entries);
        return 0;
      }
      doc["entries"] = entries;
      return out.emit(doc);
    };
  });
  auto* dcompare = dist->add_subcommand("compare", "Compare the moment tables of two families");
  dcompare->add_option("--file-a", d_file, "First family (JSON)")->required()->check(CLI::ExistingFile);
  dcompare->add_option("--file-b", d_file_b, "Second family (JSON)")->required()->check(CLI::ExistingFile);
  dcompare->add_option("--maxdeg", d_maxdeg, "Largest word length")->check(CLI::Range(0, 12));
  dcompare->add_option("--tol", d_tol, "Largest accepted gap")->check(CLI::NonNegativeNumber);
  dcompare->callback([&] {
    action = [&] {
      const auto a = ncm::read_matrix_file(d_file);
      const auto b = ncm::read_matrix_file(d_file_b);
      const auto r = ncm::distributions_match(ncm::star_moments(a, d_maxdeg), ncm::star_moments(b, d_maxdeg), d_tol);
      return emit(out,
                  {{"pass", r.pass}, {"worst_word", ncm::to_string(r.worst_word)}, {"worst_gap", r.worst_gap},
                   {"tolerance", r.tolerance}, {"maxdeg", d_maxdeg}},
                  r.pass);
    };
  });

  // probe isometry
  auto* probe = app.add_subcommand("probe", "Randomized isometry probes");
  probe->require_subcommand(1);
  auto* piso = probe->add_subcommand("isometry", "Search for a level-n p-norm gap of a span map");
  std::string p_map;
  int p_level = 1, p_trials = 200;
  double p_p = 3.0;
  std::optional<double> p_tol;
  piso->add_option("--map", p_map, "Span map (JSON)")->required()->check(CLI::ExistingFile);
  piso->add_option("--level", p_level, "Matrix level")->check(CLI::Range(1, 16));
  piso->add_option("--p", p_p, "Exponent p > 0")->check(CLI::PositiveNumber);
  piso->add_option("--trials", p_trials, "Random trials")->check(CLI::Range(1, 10000000));
  piso->add_option("--seed", seed, "Seed (default from NCM_SEED)");
  piso->add_option("--tol", p_tol, "Fail when the gap exceeds this");
  piso->callback([&] {
    action = [&] {
      const auto u = ncm::read_span_map_file(p_map);
      const auto r = ncm::complete_isometry_probe(u, p_level, p_p, p_trials, seed);
      json coeffs = json::array();
      for (const auto& z : r.witness_coefficients) coeffs.push_back(ncm::complex_to_json(z));
      const bool pass = !p_tol || r.max_gap <= *p_tol;
      return emit(out,
                  {{"level", r.level}, {"p", r.p}, {"trials", r.trials}, {"seed", r.seed},
                   {"ascent_steps", r.ascent_steps}, {"sampled_gap", r.sampled_gap}, {"max_gap", r.max_gap},
                   {"witness_coefficients", coeffs}},
                  pass);
    };
  });

  // defect mult | adjoint
  auto* defect = app.add_subcommand("defect", "Defect functionals of a span map");
  defect->require_subcommand(1);
  std::string f_map;
  int f_a = 0, f_b = 0, f_x = 0;
  double f_p = 3.0;
  bool f_oracle = false;
  auto* fmult = defect->add_subcommand("mult", "||u(ab) - u(a)u(b)||_2^2 for basis elements a, b");
  fmult->add_option("--map", f_map, "Span map (JSON)")->required()->check(CLI::ExistingFile);
  fmult->add_option("--a", f_a, "Basis index of a (0-based)")->required();
  fmult->add_option("--b", f_b, "Basis index of b (0-based)")->required();
  fmult->add_option("--p", f_p, "Exponent for the oracle route")->check(CLI::PositiveNumber);
  fmult->add_flag("--oracle", f_oracle, "Recover the traces from p-norms");
  fmult->callback([&] {
    action = [&] {
      const auto u = ncm::read_span_map_file(f_map);
      const double d = ncm::multiplicativity_defect(u, f_a, f_b, f_p, f_oracle);
      return emit(out, {{"a", f_a}, {"b", f_b}, {"p", f_p}, {"oracle", f_oracle}, {"defect", d}});
    };
  });
  auto* fadj = defect->add_subcommand("adjoint", "||u(x*) - u(x)*||_2 for a basis element x");
  fadj->add_option("--map", f_map, "Span map (JSON)")->required()->check(CLI::ExistingFile);
  fadj->add_option("--x", f_x, "Basis index of x (0-based)")->required();
  fadj->callback([&] {
    action = [&] {
      const auto u = ncm::read_span_map_file(f_map);
      return emit(out, {{"x", f_x}, {"defect", ncm::adjoint_defect(u, f_x)}});
    };
  });

  // psi check
  auto* psi = app.add_subcommand("psi", "The psi function");
  psi->require_subcommand(1);
  auto* pcheck = psi->add_subcommand("check", "ODE, series and sign-rule checks at one p");
  double s_p = 3.0;
  int s_max_n = 4;
  pcheck->add_option("--p", s_p, "Exponent p > 0")->required()->check(CLI::PositiveNumber);
  pcheck->add_option("--max-n", s_max_n, "Largest truncation order for the sign rule")->check(CLI::Range(1, 40));
  pcheck->callback([&] {
    action = [&] {
      double ode = 0.0, series = 0.0, sign = 0.0;
      for (int i = 0; i < 200; ++i) {
        const double t = 1e-3 * std::pow(5e4, i / 199.0);
        ode = std::max(ode, std::abs(ncm::psi_ode_residual(t, s_p)) / (1.0 + ncm::psi_eval(t, s_p)));
      }
      for (int i = 0; i <= 70; ++i) {
        const double t = 0.05 * i;
        series = std::max(series, std::abs(ncm::psi_eval(t, s_p) - ncm::psi_series_adaptive(t, s_p).first));
      }
      for (int N = 1; N <= s_max_n; ++N)
        for (int i = 1; i <= 200; ++i) {
          const double r = ncm::psi_tail_sign(0.5 * i, s_p, N);
          sign = std::max(sign, ncm::psi_tail_nonnegative(s_p, N) ? -r : r);
        }
      sign = std::max(0.0, sign);
      const bool pass = ode <= 1e-7 && series <= 1e-10 && sign <= 1e-12;
      return emit(out,
                  {{"p", s_p}, {"ode_residual", ode}, {"series_gap", series}, {"sign_violation", sign},
                   {"pass", pass}},
                  pass);
    };
  });

  // fourterm
  auto* fourterm = app.add_subcommand("fourterm", "Minimum eigenvalue of |1+A|^p + |1-A|^p + |1+A*|^p + |1-A*|^p - 4");
  double t_p = 1.0;
  int t_dim = 2, t_trials = 100;
  fourterm->add_option("--p", t_p, "Exponent p > 0")->required()->check(CLI::PositiveNumber);
  fourterm->add_option("--dim", t_dim, "Matrix size")->check(CLI::Range(1, 64));
  fourterm->add_option("--trials", t_trials, "Random matrices")->check(CLI::Range(1, 10000000));
  fourterm->add_option("--seed", seed, "Seed (default from NCM_SEED)");
  fourterm->callback([&] {
    action = [&] {
      double worst = std::numeric_limits<double>::infinity();
      for (int t = 0; t < t_trials; ++t) {
        ncm::Rng rng = ncm::make_rng(seed, static_cast<std::uint64_t>(t));
        worst = std::min(worst, ncm::four_term_defect(ncm::random_gaussian(t_dim, rng), t_p));
      }
      const bool pass = t_p < 1.0 || worst >= -1e-10;
      return emit(out, {{"p", t_p}, {"dim", t_dim}, {"trials", t_trials}, {"seed", seed},
                        {"min_eigenvalue", worst}, {"pass", pass}},
                  pass);
    };
  });

  // evennorm
  auto* evennorm = app.add_subcommand("evennorm", "Recover ||a||_{2N}^{2N} from p-norms");
  std::string e_file;
  int e_N = 1;
  double e_p = 3.0;
  bool e_corner = false;
  evennorm->add_option("--file", e_file, "Matrix file; the first matrix is used")->required()->check(CLI::ExistingFile);
  evennorm->add_option("--N", e_N, "Order")->check(CLI::Range(1, 8));
  evennorm->add_option("--p", e_p, "Exponent p > 0")->required()->check(CLI::PositiveNumber);
  evennorm->add_flag("--corner", e_corner, "Embed x as [[0, x], [0, 0]] first");
  evennorm->callback([&] {
    action = [&] {
      const auto family = ncm::read_matrix_file(e_file);
      if (family.empty()) throw ncm::InputError("matrix file is empty");
      const ncm::ComplexMatrix a = e_corner ? ncm::corner_embed(family.front()) : family.front();
      if (ncm::operator_norm(a * a) > 1e-12 * std::max(1.0, ncm::operator_norm(a) * ncm::operator_norm(a)))
        throw ncm::InputError("a must be square-zero; pass --corner to embed it");
      const auto r = ncm::recover_even_norm(a, e_p, e_N);
      const double direct = ncm::schatten_p_power(a, 2.0 * e_N);
      return emit(out, {{"N", e_N}, {"p", e_p}, {"estimate", r.value}, {"direct", direct},
                        {"relative_error", direct > 0 ? std::abs(r.value - direct) / direct : std::abs(r.value)},
                        {"residual", r.residual}});
    };
  });

  // evenp check
  auto* evenp = app.add_subcommand("evenp", "Even-p expansion");
  evenp->require_subcommand(1);
  auto* echeck = evenp->add_subcommand("check", "Transfer check between two families at p = 2m");
  std::string v_x, v_y, v_levels = "1,2,3";
  int v_m = 2, v_trials = 10;
  bool v_semifinite = false;
  echeck->add_option("--x", v_x, "First family (JSON)")->required()->check(CLI::ExistingFile);
  echeck->add_option("--y", v_y, "Second family (JSON); defaults to a random unitary conjugate of x")
      ->check(CLI::ExistingFile);
  echeck->add_option("--m", v_m, "Half the exponent")->check(CLI::Range(1, 6));
  echeck->add_option("--levels", v_levels, "Comma-separated levels");
  echeck->add_option("--trials", v_trials, "Trials per level")->check(CLI::Range(1, 1000000));
  echeck->add_option("--seed", seed, "Seed (default from NCM_SEED)");
  echeck->add_flag("--semifinite", v_semifinite, "Use the identity-free variant");
  echeck->callback([&] {
    action = [&] {
      const auto x = ncm::read_matrix_file(v_x);
      std::vector<ncm::ComplexMatrix> y;
      if (!v_y.empty()) {
        y = ncm::read_matrix_file(v_y);
      } else {
        ncm::Rng rng = ncm::make_rng(seed);
        const auto u = ncm::random_unitary(static_cast<int>(x.front().rows()), rng);
        for (const auto& e : x) y.push_back(u * e * u.adjoint());
      }
      std::vector<int> levels;
      for (double v : parse_list(v_levels)) levels.push_back(static_cast<int>(v));
      try {
        const auto r = v_semifinite ? ncm::semifinite_transfer_check(x, y, v_m, levels, v_trials, seed)
                                    : ncm::even_p_transfer_check(x, y, v_m, levels, v_trials, seed);
        json lv = json::array();
        for (const auto& l : r.levels) lv.push_back({{"level", l.level}, {"max_gap", l.max_gap}});
        return emit(out,
                    {{"pass", r.pass}, {"formulation", r.formulation}, {"constrained_words", r.constrained_words},
                     {"moment_gap", r.moment_gap}, {"max_gap", r.max_gap}, {"levels", lv}, {"trials", r.trials},
                     {"seed", r.seed}},
                    r.pass);
      } catch (const ncm::PreconditionFailedError& e) {
        return emit(out, {{"pass", false}, {"precondition_failed", e.detail()}, {"message", e.what()},
                          {"seed", seed}},
                    false);
      }
    };
  });

  // suite run
  auto* suite = app.add_subcommand("suite", "Aggregated verification suite");
  suite->require_subcommand(1);
  auto* srun = suite->add_subcommand("run", "Run the selected checks");
  std::string u_config, u_output;
  std::optional<std::uint64_t> u_seed;
  std::vector<std::string> u_modules;
  srun->add_option("--config", u_config, "Suite config (JSON)")->check(CLI::ExistingFile);
  srun->add_option("--output", u_output, "Write the report here instead of standard output");
  srun->add_option("--seed", u_seed, "Override the seed");
  srun->add_option("--modules", u_modules, "Restrict to these modules")->delimiter(',');
  srun->callback([&] {
    action = [&] {
      ncm::SuiteConfig cfg;
      if (!u_config.empty()) {
        try {
          cfg = ncm::SuiteConfig::from_json(ncm::read_json_file(u_config));
        } catch (const ncm::InputError& e) {
          throw ncm::ConfigError(e.what());
        }
      } else {
        cfg.seed = seed;
      }
      if (u_seed) cfg.seed = *u_seed;
      if (!u_modules.empty()) cfg.modules = {u_modules.begin(), u_modules.end()};
      if (!u_output.empty()) cfg.output = u_output;
      if (app.get_option("--format")->count() > 0)
        cfg.format = out.format == "csv" ? ncm::ReportFormat::Csv : ncm::ReportFormat::Json;
      const auto doc = ncm::run_suite(cfg);
      const std::string text = cfg.format == ncm::ReportFormat::Csv ? doc.to_csv() : doc.to_json().dump(2) + "\n";
      if (cfg.output.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(cfg.output);
        if (!f) throw ncm::InputError("cannot write " + cfg.output);
        f << text;
      }
      for (const auto& r : doc.records)
        if (!r.pass) std::cerr << "FAILED " << r.name << " [" << r.anchor << "]: " << r.detail << '\n';
      std::cerr << doc.passed << "/" << doc.total << " checks passed\n";
      return doc.exit_status();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const ncm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ncm::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ncm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
