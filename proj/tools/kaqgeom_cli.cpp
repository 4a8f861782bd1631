// Command-line front end for the kaqgeom library.
//
// Exit codes: 0 success, 2 invalid input, 3 a requested criticality or root
// check failed, 4 filesystem error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "kaqgeom/kaqgeom.hpp"

namespace {

using namespace kaqgeom;
using kaqcli::FileError;
using kaqcli::json;
using kaqcli::UsageError;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitFile = 4;

struct Options
{
  // global
  int workers = 1;
  std::string format = "json";
  bool quiet = false;

  // metric selection
  std::string family;
  double t = 0.0;
  double s = 0.0;
  std::string weights;

  // basis
  int n = 4;
  std::string flavor = "gellmann";

  // couplings
  double gamma = 0.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  double tol = kCriticalTol;
  bool require = false;
  double deg_tol = 1e-8;

  // scan and sweep
  double a = 1.0;
  double t_min = -3.0;
  double t_max = 3.0;
  int steps = 600;
  double slope_window = 0.05;
  std::string slice_out;
  double a_min = -4.0;
  double a_max = 4.0;
  double a_step = 0.02;

  // contour
  std::string t_range = "-3:3";
  std::string s_range = "-3:3";
  int grid = 200;
  std::string out;

  // sample
  int count = 1000;
  std::uint64_t seed = 0;
};

const char * kMetricHelp =
    "metric family: bp, ab, ukaq, pkaq (two-parameter, use --t/--s); ukaq_full, pkaq_full, fkaq_full, ab_full "
    "(use --weights); jensen_so4, jensen_sp2, kc";

MetricTransform resolve_metric(const Options & o)
{
  if (auto f = parse_family(o.family)) return build_family(*f, o.t, o.s);
  if (auto g = parse_general_family(o.family)) {
    try {
      return build_general_family(*g, kaqcli::parse_weights(o.weights));
    } catch (const std::invalid_argument & e) {
      throw UsageError(e.what());
    }
  }
  const std::string name = lower(o.family);
  if (name == "jensen_so4") return so4_jensen();
  if (name == "jensen_sp2") return sp2_jensen();
  if (name == "kc") return build_family(Family::BP, 0.0, 0.0);
  throw UsageError("unknown family '" + o.family + "'");
}

Family resolve_family(const Options & o)
{
  if (auto f = parse_family(o.family)) return *f;
  throw UsageError("unknown family '" + o.family + "' (expected bp, ab, ukaq or pkaq)");
}

void emit(const Options & o, const json & doc, const std::vector<std::pair<std::string, std::string>> & csv_rows = {})
{
  if (o.format == "csv" && !csv_rows.empty()) {
    std::cout << "key,value\n";
    for (const auto & [k, v] : csv_rows) std::cout << k << ',' << v << '\n';
    return;
  }
  std::cout << doc.dump(2) << '\n';
}

void note(const Options & o, const std::string & msg)
{
  if (!o.quiet) std::cerr << msg << '\n';
}

json metric_json(const MetricTransform & m)
{
  json params = json::object();
  for (const auto & [k, v] : m.params) params[k] = v;
  return {{"family", m.family_tag}, {"frame", m.frame->constants.frame_tag}, {"params", params}};
}

// ---------------------------------------------------------------------------

int run_basis(const Options & o)
{
  const std::string flavor = lower(o.flavor);
  OperatorBasis b;
  if (flavor == "gellmann") {
    if (o.n < 2) throw UsageError("--n must be >= 2");
    b = build_gell_mann(o.n);
  } else if (flavor == "pauli") {
    int d = 0;
    while ((1 << d) < o.n) ++d;
    if (o.n < 2 || (1 << d) != o.n) throw UsageError("--n must be a power of two for the pauli flavor");
    b = build_pauli_words(d);
  } else {
    throw UsageError("unknown flavor '" + o.flavor + "' (expected gellmann or pauli)");
  }

  if (o.format == "csv") {
    std::cout << "label";
    for (int i = 0; i < b.n_hilbert; ++i)
      for (int j = 0; j < b.n_hilbert; ++j) std::cout << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
    std::cout << '\n';
    for (int k = 0; k < b.size(); ++k) {
      std::cout << b.labels[static_cast<std::size_t>(k)];
      const CMatrix & m = b.elements[static_cast<std::size_t>(k)];
      for (int i = 0; i < b.n_hilbert; ++i)
        for (int j = 0; j < b.n_hilbert; ++j) std::cout << ',' << kaqcli::sci(m(i, j).real()) << ',' << kaqcli::sci(m(i, j).imag());
      std::cout << '\n';
    }
    return kExitOk;
  }

  json elements = json::array();
  for (int k = 0; k < b.size(); ++k) {
    const CMatrix & m = b.elements[static_cast<std::size_t>(k)];
    json entries = json::array();
    for (int i = 0; i < b.n_hilbert; ++i)
      for (int j = 0; j < b.n_hilbert; ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
    json e{{"label", b.labels[static_cast<std::size_t>(k)]}, {"matrix", entries}};
    if (b.flavor == BasisFlavor::PauliWord) {
      e["site_letters"] = b.site_letters[static_cast<std::size_t>(k)];
      e["word_length"] = word_length(b.site_letters[static_cast<std::size_t>(k)]);
    }
    elements.push_back(e);
  }
  emit(o, {{"n_hilbert", b.n_hilbert}, {"flavor", to_string(b.flavor)}, {"dimension", b.size()}, {"elements", elements}});
  return kExitOk;
}

int run_check_algebra(const Options & o)
{
  const std::string flavor = lower(o.flavor);
  OperatorBasis b;
  if (flavor == "pauli") {
    int d = 0;
    while ((1 << d) < o.n) ++d;
    if (o.n < 2 || (1 << d) != o.n) throw UsageError("--n must be a power of two for the pauli flavor");
    b = build_pauli_words(d);
  } else if (flavor == "gellmann") {
    if (o.n < 2) throw UsageError("--n must be >= 2");
    b = build_gell_mann(o.n);
  } else {
    throw UsageError("unknown flavor '" + o.flavor + "'");
  }
  const AlgebraReport r = check_algebra(b);
  json doc{{"n_hilbert", r.n_hilbert},
           {"dimension", r.dim},
           {"flavor", r.flavor},
           {"gram_defect", r.gram_defect},
           {"reconstruction_residual", r.reconstruction_residual},
           {"bracket_antisymmetry", r.bracket_antisymmetry},
           {"total_antisymmetry", r.total_antisymmetry},
           {"jacobi", r.jacobi},
           {"killing_defect", r.killing_defect},
           {"passed", r.passed}};
  emit(o, doc,
       {{"gram_defect", kaqcli::sci(r.gram_defect)},
        {"reconstruction_residual", kaqcli::sci(r.reconstruction_residual)},
        {"bracket_antisymmetry", kaqcli::sci(r.bracket_antisymmetry)},
        {"total_antisymmetry", kaqcli::sci(r.total_antisymmetry)},
        {"jacobi", kaqcli::sci(r.jacobi)},
        {"killing_defect", kaqcli::sci(r.killing_defect)},
        {"passed", r.passed ? "true" : "false"}});
  return r.passed ? kExitOk : kExitCheckFailed;
}

int run_curvature(const Options & o)
{
  const MetricTransform m = resolve_metric(o);
  validate(m);
  const CurvatureBundle b = compute_curvature(transform_structure_constants(m));
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.ricci, Eigen::EigenvaluesOnly);
  json doc{{"metric", metric_json(m)},
           {"R", b.scalar},
           {"R0", b.inv0},
           {"R2", b.inv2},
           {"R4", b.inv4},
           {"ricci_eigenvalues", kaqcli::vector_json(es.eigenvalues())}};
  emit(o, doc, {{"R", kaqcli::sci(b.scalar)}, {"R0", kaqcli::sci(b.inv0)}, {"R2", kaqcli::sci(b.inv2)}, {"R4", kaqcli::sci(b.inv4)}});
  return kExitOk;
}

int run_eom(const Options & o)
{
  const MetricTransform m = resolve_metric(o);
  validate(m);
  const Couplings k = (o.alpha || o.beta) ? Couplings{o.alpha.value_or(0.0), o.beta.value_or(0.0), o.gamma}
                                          : Couplings::gauss_bonnet(o.gamma);
  const Evaluation e = evaluate(m, k);
  const Criticality c = is_critical(e.stress, o.tol);
  json doc{{"metric", metric_json(m)},
           {"couplings", {{"alpha", k.alpha}, {"beta", k.beta}, {"gamma", k.gamma}}},
           {"loss", e.loss},
           {"lambda", c.lambda},
           {"residual", e.stress.residual},
           {"threshold", o.tol},
           {"critical", c.critical},
           {"diagonal", kaqcli::vector_json(e.stress.diagonal())}};
  emit(o, doc,
       {{"loss", kaqcli::sci(e.loss)},
        {"lambda", kaqcli::sci(c.lambda)},
        {"residual", kaqcli::sci(e.stress.residual)},
        {"critical", c.critical ? "true" : "false"}});
  return (o.require && !c.critical) ? kExitCheckFailed : kExitOk;
}

int run_kaq_verify(const Options & o)
{
  const MetricTransform m = resolve_metric(o);
  validate(m);
  const KAQCertificate cert = kaq_verify(m, o.deg_tol);
  json axes = json::array();
  for (const auto & ax : cert.decoded_basis)
    axes.push_back({{"word", ax.word},
                    {"eigenvalue", ax.eigenvalue},
                    {"cluster", ax.cluster},
                    {"frame_combination", ax.frame_combination},
                    {"dictionary_row", ax.dictionary_row}});
  json doc{{"metric", metric_json(m)},
           {"eigenvalues", cert.eigenvalues},
           {"degeneracy_partition", cert.degeneracy_partition},
           {"decoded_basis", axes},
           {"undecoded_clusters", cert.undecoded_clusters},
           {"translated_axes", cert.translated_axes},
           {"max_commutator_residual", std::isfinite(cert.max_commutator_residual) ? json(cert.max_commutator_residual) : json(nullptr)},
           {"is_kaq", cert.is_kaq}};
  if (m.frame->basis.n_hilbert == 4 && parse_general_family(o.family) == GeneralFamily::UKAQ_full)
    doc["many_body_automorphism"] = many_body_automorphism_check(m);
  emit(o, doc, {{"is_kaq", cert.is_kaq ? "true" : "false"}, {"translated_axes", std::to_string(cert.translated_axes)}});
  return (o.require && !cert.is_kaq) ? kExitCheckFailed : kExitOk;
}

SliceOptions slice_options(const Options & o)
{
  if (!(o.t_min < o.t_max)) throw UsageError("--t-min must be below --t-max");
  if (o.steps < 2) throw UsageError("--steps must be >= 2");
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  if (o.slope_window < 0.0) throw UsageError("--slope-window must be non-negative");
  SliceOptions so;
  so.t_min = o.t_min;
  so.t_max = o.t_max;
  so.steps = o.steps;
  so.tol = o.tol;
  so.slope_window = o.slope_window;
  so.workers = o.workers;
  return so;
}

int run_scan(const Options & o)
{
  const Family f = resolve_family(o);
  const SliceScan scan = scan_slice(f, o.a, o.gamma, slice_options(o));
  json records = json::array();
  for (const auto & r : scan.records) records.push_back(kaqcli::record_json(classify(r)));
  json doc{{"family", to_string(f)},
           {"a", o.a},
           {"gamma", o.gamma},
           {"representatives", scan.representatives},
           {"trivial", kaqcli::record_json(classify(scan.trivial))},
           {"records", records}};
  if (!o.slice_out.empty()) {
    json slice = json::array();
    for (const auto & smp : scan.samples) slice.push_back({{"t", smp.t}, {"s", smp.s}, {"diagonals", smp.diagonals}, {"residual", smp.residual}});
    kaqcli::write_text(o.slice_out, slice.dump(2) + "\n");
    note(o, "wrote slice samples to " + o.slice_out);
  }
  if (o.format == "csv") {
    std::cout << "a,t,s,lambda,residual,jensen\n";
    for (const auto & r : scan.records)
      std::cout << kaqcli::sci(r.a) << ',' << kaqcli::sci(r.t) << ',' << kaqcli::sci(r.s) << ',' << kaqcli::sci(r.lambda) << ','
                << kaqcli::sci(r.residual) << ',' << (r.jensen ? "true" : "false") << '\n';
  } else {
    emit(o, doc);
  }
  return (o.require && scan.records.empty()) ? kExitCheckFailed : kExitOk;
}

int run_sweep(const Options & o)
{
  const Family f = resolve_family(o);
  if (!(o.a_step > 0.0) || o.a_max < o.a_min) throw UsageError("invalid slope range");
  const auto probes = sweep_slopes(f, o.gamma, o.a_min, o.a_max, o.a_step, slice_options(o));
  json rows = json::array();
  for (const auto & p : probes)
    rows.push_back({{"a", p.a}, {"t", p.t}, {"residual", std::isfinite(p.residual) ? json(p.residual) : json(nullptr)}, {"verified", p.verified}});
  emit(o, {{"family", to_string(f)}, {"gamma", o.gamma}, {"probes", rows}});
  return kExitOk;
}

int run_contour(const Options & o)
{
  const Family f = resolve_family(o);
  if (o.out.empty()) throw UsageError("contour needs --out <path.csv>");
  if (o.grid < 16) throw UsageError("--grid must be >= 16");
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  ContourOptions co;
  std::tie(co.t_lo, co.t_hi) = kaqcli::parse_range(o.t_range);
  std::tie(co.s_lo, co.s_hi) = kaqcli::parse_range(o.s_range);
  co.grid = o.grid;
  co.tol = o.tol;
  co.workers = o.workers;
  const ContourGrid grid = contour_grid(f, o.gamma, co);

  std::string csv = "t,s,loss,residual,lambda\n";
  for (int i = 0; i < o.grid; ++i)
    for (int j = 0; j < o.grid; ++j) {
      csv += kaqcli::sci(grid.t_axis[static_cast<std::size_t>(i)]) + ',' + kaqcli::sci(grid.s_axis[static_cast<std::size_t>(j)]) + ',' +
             kaqcli::sci(grid.loss_values(i, j)) + ',' + kaqcli::sci(grid.residual(i, j)) + ',' + kaqcli::sci(grid.lambda(i, j)) + '\n';
    }
  kaqcli::write_text(o.out, csv);

  json markers = json::array();
  int n_critical = 0, n_stationary = 0;
  for (const auto & r : grid.critical_markers) {
    markers.push_back(kaqcli::record_json(classify(r)));
    (r.critical ? n_critical : n_stationary)++;
  }
  const std::string marker_path = o.out + ".critical.json";
  kaqcli::write_text(marker_path, markers.dump(2) + "\n");
  note(o, "wrote " + o.out + " and " + marker_path);
  emit(o, {{"family", to_string(f)},
           {"gamma", o.gamma},
           {"grid", o.grid},
           {"csv", o.out},
           {"markers", marker_path},
           {"critical", n_critical},
           {"parameterization_only", n_stationary}});
  return kExitOk;
}

int run_sample(const Options & o)
{
  const MetricTransform m = resolve_metric(o);
  validate(m);
  if (o.count < 1) throw UsageError("--count must be >= 1");
  const EnsembleSample smp = sample(m, o.count, o.seed, o.workers);
  const Matrix cov = sample_covariance(smp);
  const Matrix expected = 0.5 * m.omega * m.omega;
  if (!o.out.empty()) {
    std::string csv = "draw";
    for (const auto & l : m.frame->basis.labels) csv += ',' + l;
    csv += '\n';
    for (int k = 0; k < smp.count; ++k) {
      csv += std::to_string(k);
      for (int j = 0; j < m.dim(); ++j) csv += ',' + kaqcli::sci(smp.coefficients(k, j));
      csv += '\n';
    }
    kaqcli::write_text(o.out, csv);
    note(o, "wrote " + std::to_string(smp.count) + " draws to " + o.out);
  }
  emit(o, {{"metric", metric_json(m)},
           {"count", smp.count},
           {"seed", smp.seed},
           {"generator", "splitmix64-counter/box-muller"},
           {"max_covariance_error", (cov - expected).cwiseAbs().maxCoeff()},
           {"variances", kaqcli::vector_json(cov.diagonal())},
           {"expected_variances", kaqcli::vector_json(expected.diagonal())}});
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_metric_options(CLI::App * sub, Options & o, bool weights = true)
{
  sub->add_option("--family", o.family, kMetricHelp)->required();
  sub->add_option("--t", o.t, "first family parameter");
  sub->add_option("--s", o.s, "second family parameter");
  if (weights) sub->add_option("--weights", o.weights, "k=v,... weights for the general families");
}

std::vector<std::string> expand_config(int argc, char ** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> config;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (config) {
    const auto extra = kaqcli::config_arguments(*config, kept);
    kept.insert(kept.end(), extra.begin(), extra.end());
  }
  return kept;
}

}  // namespace

int main(int argc, char ** argv)
{
  Options o;
  CLI::App app{"Curvature functionals and critical metrics on SU(2^d)", "kaqgeom"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--workers", o.workers, "worker threads for grid and slice evaluation")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", o.quiet, "suppress progress messages on standard error");
  app.set_help_flag("--help,-h", "print help");
  // accepted for the help text; expanded before parsing
  std::string config_placeholder;
  app.add_option("--config", config_placeholder, "flat key=value file mirroring the flags; flags win");

  int (*handler)(const Options &) = nullptr;
  auto bind = [&](CLI::App * sub, int (*fn)(const Options &)) { sub->callback([&handler, fn] { handler = fn; }); };

  auto * basis = app.add_subcommand("basis", "dump an operator basis");
  basis->add_option("--n", o.n, "Hilbert space dimension N");
  basis->add_option("--flavor", o.flavor, "gellmann or pauli");
  bind(basis, run_basis);

  auto * algebra = app.add_subcommand("check-algebra", "run the Lie-algebra invariant suite");
  algebra->add_option("--n", o.n, "Hilbert space dimension N");
  algebra->add_option("--flavor", o.flavor, "gellmann or pauli");
  bind(algebra, run_check_algebra);

  auto * curvature = app.add_subcommand("curvature", "scalar, quadratic invariants and Ricci spectrum");
  add_metric_options(curvature, o);
  bind(curvature, run_curvature);

  auto * eom = app.add_subcommand("eom", "stress tensor and criticality");
  add_metric_options(eom, o);
  eom->add_option("--gamma", o.gamma, "Riemann-squared coupling (Gauss-Bonnet unless --alpha/--beta are given)");
  eom->add_option("--alpha", o.alpha, "scalar-squared coupling");
  eom->add_option("--beta", o.beta, "Ricci-squared coupling");
  eom->add_option("--tol", o.tol, "criticality tolerance")->check(CLI::PositiveNumber);
  eom->add_flag("--require-critical", o.require, "exit 3 unless the metric is critical");
  bind(eom, run_eom);

  auto * kaq = app.add_subcommand("kaq-verify", "principal-axis decoding certificate");
  add_metric_options(kaq, o);
  kaq->add_option("--deg-tol", o.deg_tol, "relative eigenvalue clustering tolerance")->check(CLI::PositiveNumber);
  kaq->add_flag("--require-kaq", o.require, "exit 3 unless the metric is KAQ");
  bind(kaq, run_kaq_verify);

  auto add_slice = [&](CLI::App * sub) {
    sub->add_option("--family", o.family, "bp, ab, ukaq or pkaq")->required();
    sub->add_option("--gamma", o.gamma, "Gauss-Bonnet coupling");
    sub->add_option("--t-min", o.t_min, "slice start");
    sub->add_option("--t-max", o.t_max, "slice end");
    sub->add_option("--steps", o.steps, "slice intervals");
    sub->add_option("--tol", o.tol, "criticality tolerance")->check(CLI::PositiveNumber);
  };

  auto * scan = app.add_subcommand("scan", "critical points along s = a t");
  add_slice(scan);
  scan->add_option("--a", o.a, "slice slope");
  scan->add_option("--slope-window", o.slope_window, "max slope change when polishing near misses (0 disables)");
  scan->add_option("--slice-out", o.slice_out, "write the sampled diagonals as JSON");
  scan->add_flag("--require-root", o.require, "exit 3 unless a non-trivial root is found");
  bind(scan, run_scan);

  auto * sweep = app.add_subcommand("sweep", "coarse slope search");
  add_slice(sweep);
  sweep->add_option("--a-min", o.a_min, "first slope");
  sweep->add_option("--a-max", o.a_max, "last slope");
  sweep->add_option("--a-step", o.a_step, "slope step");
  bind(sweep, run_sweep);

  auto * contour = app.add_subcommand("contour", "loss grid with critical markers");
  contour->add_option("--family", o.family, "bp, ab, ukaq or pkaq")->required();
  contour->add_option("--gamma", o.gamma, "Gauss-Bonnet coupling");
  contour->add_option("--t-range", o.t_range, "lo:hi");
  contour->add_option("--s-range", o.s_range, "lo:hi");
  contour->add_option("--grid", o.grid, "nodes per axis");
  contour->add_option("--tol", o.tol, "criticality tolerance")->check(CLI::PositiveNumber);
  contour->add_option("--out", o.out, "CSV output path")->required();
  bind(contour, run_contour);

  auto * smp = app.add_subcommand("sample", "metric-weighted Gaussian coefficient draws");
  add_metric_options(smp, o);
  smp->add_option("--count", o.count, "number of draws");
  smp->add_option("--seed", o.seed, "generator seed");
  smp->add_option("--out", o.out, "CSV output path");
  bind(smp, run_sample);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp &) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const UsageError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FileError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFile;
  }

  try {
    return handler(o);
  } catch (const UsageError & e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const FileError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFile;
  } catch (const std::invalid_argument & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const kaqgeom::Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
