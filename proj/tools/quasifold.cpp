// quasifold: batch front end for atlases, convolution algebras, Morita
// bimodules and lifting experiments. Prints one schema-versioned report.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error,
// 3 only inconclusive results.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "quasifold/cli.hpp"

using namespace quasifold;
using cli::Config;
using cli::Report;

namespace {

std::vector<QAlpha> parse_list(const std::vector<std::string>& items) {
  std::vector<QAlpha> out;
  for (const auto& s : items) out.push_back(QAlpha::parse(s));
  return out;
}

QVector parse_vector(const std::string& s) {
  QVector v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(QAlpha::parse(item));
  if (v.empty()) throw Error("usage", "empty coordinate list");
  return v;
}

/// "label=re" or "label=re+imi" terms for `repr --term`.
std::pair<QAlpha, Complex> parse_term(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw Error("usage", "term '" + s + "' must be label=coefficient");
  std::string c = s.substr(eq + 1);
  auto number = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw Error("usage", "coefficient '" + c + "' must look like 1.5, 2i or 1-2i");
    return v;
  };
  if (c.empty() || c.back() != 'i') return {QAlpha::parse(s.substr(0, eq)), Complex(number(c.empty() ? "x" : c), 0)};
  std::string body = c.substr(0, c.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  double re = split == std::string::npos ? 0.0 : number(body.substr(0, split));
  double im = number(split == std::string::npos ? body : body.substr(split));
  return {QAlpha::parse(s.substr(0, eq)), Complex(re, im)};
}

/// Keys of a --config JSON file fill in options not given on the command
/// line or through QUASIFOLD_* variables.
void apply_config_file(const std::string& path, CLI::App& app, Config& cfg, std::string& format, std::string& alpha_value,
                       double& alpha_margin) {
  auto j = io::read_file(path);
  io::Node root(j, "$");
  auto unset = [&](const char* name) { return app.get_option(name)->count() == 0; };
  if (root.has("seed") && unset("--seed")) cfg.seed = static_cast<std::uint64_t>(root.at("seed").integer());
  if (root.has("format") && unset("--format")) format = root.at("format").str();
  if (root.has("bound") && unset("--bound")) cfg.bound = static_cast<int>(root.at("bound").integer());
  if (root.has("fiber_bound") && unset("--fiber-bound")) cfg.fiber_bound = static_cast<int>(root.at("fiber_bound").integer());
  if (root.has("timing") && unset("--timing")) cfg.timing = root.at("timing").raw().get<bool>();
  if (root.has("tolerances")) {
    auto t = root.at("tolerances");
    if (t.has("coefficient") && unset("--tol")) cfg.tol = t.at("coefficient").number();
    if (t.has("residual") && unset("--residual-tol")) cfg.residual_tol = t.at("residual").number();
    if (t.has("phase") && unset("--phase-tol")) cfg.phase_tol = t.at("phase").number();
  }
  if (root.has("alpha")) {
    auto a = root.at("alpha");
    if (a.has("value") && unset("--alpha-witness")) alpha_value = a.at("value").str();
    if (a.has("margin") && unset("--alpha-margin")) alpha_margin = a.at("margin").number();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact experiments on quasifold atlases, groupoids and their convolution algebras"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  std::string config_path, format = "json", alpha_value = AlphaWitness::golden_digits();
  double alpha_margin = 1e-40;
  app.add_option("--config", config_path, "JSON file with default settings")->envname("QUASIFOLD_CONFIG");
  app.add_option("--seed", cfg.seed, "Random seed")->envname("QUASIFOLD_SEED");
  app.add_option("--format", format, "json | table | csv")->envname("QUASIFOLD_FORMAT");
  app.add_option("--bound", cfg.bound, "Enumeration and word-length bound")->envname("QUASIFOLD_BOUND");
  app.add_option("--fiber-bound", cfg.fiber_bound, "Bound for orbit searches")->envname("QUASIFOLD_FIBER_BOUND");
  app.add_option("--tol", cfg.tol, "Coefficient tolerance")->envname("QUASIFOLD_TOL");
  app.add_option("--residual-tol", cfg.residual_tol, "Residual tolerance for piece detection and fits")
      ->envname("QUASIFOLD_RESIDUAL_TOL");
  app.add_option("--phase-tol", cfg.phase_tol, "Tolerance on the rotation phase")->envname("QUASIFOLD_PHASE_TOL");
  app.add_option("--alpha-witness", alpha_value, "Decimal digits of the numeric witness for alpha")
      ->envname("QUASIFOLD_ALPHA_WITNESS");
  app.add_option("--alpha-margin", alpha_margin, "Safety margin of the alpha witness")->envname("QUASIFOLD_ALPHA_MARGIN");
  app.add_flag("--timing", cfg.timing, "Include wall-clock timing (breaks byte-identical output)")
      ->envname("QUASIFOLD_TIMING");

  std::function<Report()> run;

  // groupoid
  auto* groupoid = app.add_subcommand("groupoid", "Isotropy and assembly report at a nebula point");
  std::string atlas_ref, point_text;
  groupoid->add_option("--atlas", atlas_ref, "Atlas JSON file or builtin:<torus|rq|reflection|duplicated|twoscale>")
      ->required();
  groupoid->add_option("--point", point_text, "Nebula point chart:coords, e.g. class:0")->required();
  groupoid->callback([&] {
    run = [&] { return cli::cmd_groupoid(cli::load_atlas(atlas_ref), io::point_from_text(point_text), cfg); };
  });

  // algebra check
  auto* algebra = app.add_subcommand("algebra", "Convolution algebra checks");
  algebra->require_subcommand(1);
  algebra->fallthrough();
  auto* algebra_check = algebra->add_subcommand("check", "Closed form vs general convolution and *-algebra axioms");
  std::vector<std::string> algebra_names;
  int trials = 200;
  double consistency_tol = 1e-12;
  algebra_check->add_option("--algebra", algebra_names, "R/Q, T_alpha, S_alpha, S_Q, R/{+-1} (default: all)");
  algebra_check->add_option("--trials", trials, "Random triples per algebra");
  algebra_check->add_option("--consistency-tol", consistency_tol, "Closed form vs general tolerance");
  algebra_check->callback([&] {
    run = [&] {
      return cli::cmd_algebra_check(algebra_names.empty() ? cli::all_algebras() : algebra_names, trials,
                                    consistency_tol, cfg);
    };
  });

  // rotation
  auto* rotation = app.add_subcommand("rotation", "Rotation relation V*U = lambda U*V");
  std::string angle = "default";
  int degree = 3;
  rotation->add_option("--alpha", angle, "Angle: 'default' (the irrational alpha) or a QAlpha such as 1/3");
  rotation->add_option("--degree", degree, "Largest power a, b in V^b U^a");
  rotation->callback([&] { run = [&] { return cli::cmd_rotation(cli::parse_angle(angle), degree, cfg); }; });

  // repr
  auto* repr = app.add_subcommand("repr", "Matrix representation of the S_Q algebra on U_p");
  std::vector<int> ps{1, 2, 3, 4, 6};
  int pairs = 50, z_count = 20;
  std::string z_text;
  std::vector<std::string> terms;
  repr->add_option("--p", ps, "Values of p");
  repr->add_option("--pairs", pairs, "Random pairs per p");
  repr->add_option("--z-count", z_count, "Sample points z = s/z_count");
  repr->add_option("--z", z_text, "Print M(f)(z) for the element given by --term");
  repr->add_option("--term", terms, "Element term label=coefficient, e.g. 1/2=1+2i");
  repr->callback([&] {
    run = [&] {
      if (!z_text.empty()) {
        if (terms.empty()) throw Error("usage", "--z needs at least one --term");
        if (ps.size() != 1) throw Error("usage", "--z needs exactly one --p");
        std::vector<std::pair<QAlpha, Complex>> parsed;
        for (const auto& t : terms) parsed.push_back(parse_term(t));
        return cli::cmd_repr_matrix(parsed, ps[0], QAlpha::parse(z_text), cfg);
      }
      return cli::cmd_repr(ps, pairs, z_count, cfg);
    };
  });

  // rq-algebra
  auto* rq = app.add_subcommand("rq-algebra", "R/Q and S_Q algebras: axioms and the U_p representations");
  int rq_trials = 200;
  rq->add_option("--trials", rq_trials, "Random triples per algebra");
  rq->callback([&] {
    run = [&] {
      Report a = cli::cmd_algebra_check({"R/Q", "S_Q"}, rq_trials, consistency_tol, cfg, "rq-algebra");
      Report b = cli::cmd_repr({1, 2, 3, 4, 6}, pairs, z_count, cfg);
      a.checks.insert(a.checks.end(), b.checks.begin(), b.checks.end());
      a.data["representation"] = b.data;
      return a;
    };
  });

  // morita
  auto* morita = app.add_subcommand("morita", "Bimodule axioms of a bi-atlas on bounded-word instances");
  std::string biatlas_ref;
  std::size_t samples_per_chart = 2;
  morita->add_option("--biatlas", biatlas_ref, "Bi-atlas JSON file or builtin:<duplicated|twoscale>")->required();
  morita->add_option("--samples", samples_per_chart, "Sample points per chart");
  morita->callback(
      [&] { run = [&] { return cli::cmd_morita(cli::load_biatlas(biatlas_ref), samples_per_chart, cfg); }; });

  // lift
  auto* lift = app.add_subcommand("lift", "Lifting experiments");
  lift->require_subcommand(1);
  lift->fallthrough();
  std::vector<std::string> gammas, cuts;
  std::string group_name = "Z+aZ", samples_file;
  int samples = 40;
  double noise = 0.0, min_coverage = 1.0, second_tol = 1e-6;
  bool numeric = false;
  auto add_sample_options = [&](CLI::App* sub) {
    sub->add_option("--input", samples_file, "Samples JSON file");
    sub->add_option("--gamma", gammas, "Translation of each stitched piece, e.g. 1 alpha");
    sub->add_option("--cut", cuts, "Cut points between pieces (default: evenly spaced in (-2, 2))");
    sub->add_option("--samples", samples, "Number of synthetic samples");
    sub->add_option("--noise", noise, "Gaussian noise on numeric samples");
    sub->add_flag("--numeric", numeric, "Numeric instead of exact synthetic samples");
  };
  auto load_samples = [&]() -> SampledMap {
    if (!samples_file.empty()) {
      auto j = io::read_file(samples_file);
      return cli::samples_from(io::Node(j, "$"), cfg.witness);
    }
    return cli::sample_synthetic(cli::make_synthetic(parse_list(gammas), parse_list(cuts), samples, noise, numeric),
                                 cfg.seed, cfg.witness);
  };

  auto* detect = lift->add_subcommand("detect", "Split a sampled map into pieces F = gamma on Delta_gamma");
  add_sample_options(detect);
  detect->add_option("--group", group_name, "Z+aZ, Q or +-1");
  detect->add_option("--min-coverage", min_coverage, "Required fraction of matched samples");
  detect->callback([&] {
    run = [&] { return cli::cmd_lift_detect(load_samples(), cli::group_by_name(group_name), min_coverage, cfg); };
  });

  auto* fit = lift->add_subcommand("fit", "Least-squares affine fits per detected piece");
  add_sample_options(fit);
  bool whole = false;
  fit->add_option("--group", group_name, "Group used to split the samples first");
  fit->add_flag("--whole", whole, "Fit the whole map without splitting");
  fit->add_option("--second-tol", second_tol, "Tolerance on the second-derivative test");
  fit->callback([&] {
    numeric = true;
    run = [&] {
      std::optional<GroupPresentation> g;
      if (!whole) g = cli::group_by_name(group_name);
      return cli::cmd_lift_fit(load_samples(), g, second_tol, cfg);
    };
  });

  auto* construct = lift->add_subcommand("construct", "Prescribed lift through a bi-atlas link");
  std::size_t link = 0;
  std::string r_text = "0", rp_text;
  int check_points = 100;
  construct->add_option("--biatlas", biatlas_ref, "Bi-atlas JSON file or builtin:<duplicated|twoscale>")->required();
  construct->add_option("--link", link, "Link index");
  construct->add_option("--r", r_text, "Source point r (comma-separated coordinates)");
  construct->add_option("--r-prime", rp_text, "Target point r'")->required();
  construct->add_option("--check-points", check_points, "Random exact points for the ev-compatibility check");
  construct->callback([&] {
    run = [&] {
      return cli::cmd_lift_construct(cli::load_biatlas(biatlas_ref), link, parse_vector(r_text), parse_vector(rp_text),
                                     check_points, cfg);
    };
  });

  auto* flip = lift->add_subcommand("flipdemo", "Parity table of the map with no equivariant lift");
  int n_max = 6, flip_samples = 100;
  double flip_tol = 1e-10;
  flip->add_option("--n-max", n_max, "Largest annulus index");
  flip->add_option("--samples", flip_samples, "Random (tau, z) per annulus");
  flip->add_option("--flip-tol", flip_tol, "Absolute and relative tolerance");
  flip->callback([&] { run = [&] { return cli::cmd_lift_flipdemo(n_max, flip_samples, flip_tol, cfg); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, app, cfg, format, alpha_value, alpha_margin);
    cfg.format = cli::parse_format(format);
    if (alpha_value != AlphaWitness::golden_digits() || alpha_margin != 1e-40)
      cfg.witness = AlphaWitness(alpha_value, alpha_margin);
    cfg.validate();
    auto start = std::chrono::steady_clock::now();
    Report report = run();
    report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::cout << cli::render(report, cfg);
    return report.exit_code();
  } catch (const Error& e) {
    std::cerr << "quasifold: " << e.what() << "\n";
    return cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "quasifold: " << e.what() << "\n";
    return 2;
  }
}
