// burgers-relax: command-line front end.
//
//   validate | relax | prony-export | certificate | respond | simulate | compare
//
// Failures print one line "burgers-relax: error[<kind>]: <message>" on stderr
// and exit nonzero (2 for usage and input errors, 1 otherwise).

#include "burgers/constitutive.hpp"
#include "burgers/error.hpp"
#include "burgers/fem.hpp"
#include "burgers/format.hpp"
#include "burgers/io.hpp"
#include "burgers/prony.hpp"
#include "burgers/relaxation.hpp"
#include "burgers/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

using namespace burgers;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string method = "exp";
  std::string tgrid;
  std::uint64_t seed = 1;
  bool voigt_input = false;
  std::string format = "text";
  std::string cache;
  bool tamper = false;
  std::string strain;
  std::string snapshots;
  int count = 30;
};

class ExitCode : public std::exception {
 public:
  explicit ExitCode(int code) : code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(const std::string& kind) {
  if (kind == "usage" || kind == "parse" || kind == "schema" || kind == "io") return 2;
  return 1;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

void emit(const Options& o, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
  } else {
    write_file(o.out, content);
  }
}

void print_report(const Options& o, const Report& r) {
  std::cout << (o.format == "json" ? r.to_json() : r.to_text());
}

ModelConfig load(const Options& o) {
  if (o.config.empty()) throw Error("usage", "--config is required");
  return load_config(o.config, o.voigt_input);
}

std::vector<double> grid_for(const Options& o, const ModelConfig& cfg) {
  return parse_tgrid(o.tgrid.empty() ? cfg.run.t_grid : o.tgrid).points();
}

RelaxationEvaluator evaluator_for(const Options& o, const BurgersMaterial& m) {
  if (o.cache.empty()) return RelaxationEvaluator(m);
  if (std::filesystem::exists(o.cache)) {
    try {
      return deserialize_evaluator(read_file(o.cache), m.hash());
    } catch (const Error& e) {
      if (e.kind() != "stale-cache") throw;
    }
  }
  RelaxationEvaluator ev(m);
  write_file(o.cache, serialize_evaluator(ev));
  return ev;
}

std::string kelvin_header(const std::string& prefix, int dim) {
  std::string h;
  const int kd = kelvin_size(dim);
  for (int i = 0; i < kd; ++i)
    for (int j = 0; j < kd; ++j) h += "," + prefix + std::to_string(i) + std::to_string(j);
  return h;
}

double relative_gap(const Matrix& a, const Matrix& b) {
  const double scale = b.norm();
  const double diff = (a - b).norm();
  return scale > 0.0 ? diff / scale : diff;
}

// validate -----------------------------------------------------------------------

int cmd_validate(const Options& o) {
  const ModelConfig cfg = load(o);
  Report r;
  r.command = "validate";

  ReportItem adm;
  adm.name = "admissibility";
  const ValidationReport v = validate_family(cfg.c, cfg.eta);
  adm.passed = v.passed && cfg.rho > 0.0;
  adm.worst = v.c_min;
  adm.details.emplace_back("eta_min", format_double(v.eta_min));
  adm.details.emplace_back("c_min", format_double(v.c_min));
  for (std::size_t i = 0; i < v.symmetry_residuals.size(); ++i)
    adm.details.emplace_back("symmetry_residual[" + std::to_string(i) + "]",
                             format_double(v.symmetry_residuals[i]));
  for (const auto& f : v.failures) adm.details.emplace_back("failure", f);
  if (!(cfg.rho > 0.0)) adm.details.emplace_back("failure", "density: rho must be positive");
  r.items.push_back(adm);

  if (adm.passed) {
    const BurgersMaterial m = cfg.material();
    ReportItem com;
    com.name = "commutativity";
    const CommuteCheck cc = commutativity(m);
    com.worst = cc.worst;
    com.location = "C" + std::to_string(cc.i) + ",C" + std::to_string(cc.j);
    const bool commuting = cc.worst <= cfg.run.commute_tol;
    com.details.emplace_back("commuting", commuting ? "yes" : "no (L-method unavailable)");
    r.items.push_back(com);  // informational: never fails validation

    ReportItem bnd;
    bnd.name = "spectral-bounds";
    try {
      const SpectralBounds b = spectral_bounds(m);
      bnd.worst = b.alpha2;
      bnd.details.emplace_back("alpha1", format_double(b.alpha1));
      bnd.details.emplace_back("alpha2", format_double(b.alpha2));
      bnd.details.emplace_back("beta1", format_double(b.beta1));
      bnd.details.emplace_back("beta2", format_double(b.beta2));
    } catch (const Error& e) {
      bnd.passed = false;
      bnd.details.emplace_back("failure", e.what());
    }
    r.items.push_back(bnd);
  }
  print_report(o, r);
  if (!r.passed()) {
    std::string msg;
    for (const auto& it : r.items)
      for (const auto& [k, val] : it.details)
        if (k == "failure") msg += (msg.empty() ? "" : "; ") + val;
    throw Error("validation-failed", msg);
  }
  return 0;
}

// relax -------------------------------------------------------------------------------

int cmd_relax(const Options& o) {
  const ModelConfig cfg = load(o);
  const BurgersMaterial m = cfg.material();
  if (o.method != "exp" && o.method != "prony" && o.method != "both")
    throw Error("usage", "--method must be exp, prony or both");
  const auto grid = grid_for(o, cfg);

  std::optional<RelaxationEvaluator> ev;
  std::optional<PronyForm> pf;
  if (o.method != "prony") ev.emplace(evaluator_for(o, m));
  if (o.method != "exp") pf.emplace(build_prony(m, cfg.run.commute_tol));

  CsvTable table;
  std::string header = "t" + kelvin_header("G", m.dim());
  if (o.method == "both") header += ",discrepancy";
  std::stringstream hs(header);
  for (std::string f; std::getline(hs, f, ',');) table.header.push_back(f);
  for (double t : grid) {
    std::vector<double> row{t};
    const Matrix g = ev ? ev->G(t).kelvin() : eval_G_prony(*pf, t).kelvin();
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) row.push_back(g(i, j));
    if (o.method == "both") row.push_back(relative_gap(eval_G_prony(*pf, t).kelvin(), g));
    table.rows.push_back(std::move(row));
  }
  emit(o, format_csv(table));
  return 0;
}

// prony-export --------------------------------------------------------------------------

int cmd_prony_export(const Options& o) {
  const ModelConfig cfg = load(o);
  const PronyForm pf = build_prony(cfg.material(), cfg.run.commute_tol);
  std::ostringstream os;
  write_prony_table(os, pf);
  emit(o, os.str());
  return 0;
}

// certificate -----------------------------------------------------------------------------

int cmd_certificate(const Options& o) {
  const ModelConfig cfg = load(o);
  const BurgersMaterial m = cfg.material();
  const RelaxationEvaluator ev = evaluator_for(o, m);
  const SpectralBounds& b = ev.bounds();

  Report r;
  r.command = "certificate";

  ReportItem est;
  est.name = "derivative-estimates";
  const auto log_grid = make_grid(1e-3, 10.0 / b.alpha2, 20, true);
  const EstimateReport er =
      verify_estimates(ev, log_grid, cfg.run.j_max, OddBoundForm::Proven, cfg.run.estimate_tol);
  est.passed = er.passed();
  est.worst = er.worst_margin;
  est.details.emplace_back("checks", std::to_string(er.checks));
  if (!er.violations.empty()) {
    const auto& v = er.violations.front();
    est.location = "t=" + format_double(v.t) + " k=" + std::to_string(v.order) + " " + v.side;
  }
  r.items.push_back(est);

  ReportItem cert_item;
  cert_item.name = "decay-certificate";
  const std::vector<double> grid =
      o.tgrid.empty() ? make_grid(0.0, 10.0 / b.alpha2, 201) : parse_tgrid(o.tgrid).points();
  KernelFn kernel = kernel_of(ev);
  if (o.tamper) {
    kernel = [base = kernel](double t, int k) {
      Matrix g = base(t, k);
      return k == 1 ? Matrix(-g) : g;
    };
  }
  std::optional<DecayCertificate> cert;
  std::string failure_kind;
  std::string failure;
  try {
    cert = certify_kernel(kernel, b, grid, cfg.run.certificate_tol);
    cert_item.worst = cert->worst_margin;
    cert_item.details.emplace_back("kappa1", format_double(cert->kappa1));
    cert_item.details.emplace_back("kappa2", format_double(cert->kappa2));
    cert_item.details.emplace_back("kappa3", format_double(cert->kappa3));
    cert_item.details.emplace_back("kappa4", format_double(cert->kappa4));
    cert_item.details.emplace_back("kappa4_tilde", format_double(cert->kappa4_tilde));
    cert_item.details.emplace_back("kappa5", format_double(cert->kappa5));
    cert_item.details.emplace_back("kappa6", format_double(cert->kappa6));
    cert_item.details.emplace_back("pure_exponential", cert->pure_exponential ? "yes" : "no");
    cert_item.details.emplace_back("ftc_residual", format_double(cert->ftc_residual));
  } catch (const CertificateError& e) {
    cert_item.passed = false;
    cert_item.location = e.item() + " t=" + format_double(e.t());
    failure_kind = e.kind();
    failure = e.what();
  }
  r.items.push_back(cert_item);
  print_report(o, r);

  if (cert && !o.out.empty()) write_file(o.out, certificate_json(*cert, b));
  if (!failure.empty()) throw Error(failure_kind, failure);
  if (!est.passed) throw Error("estimates-failed", "derivative estimate violated at " + est.location);
  return 0;
}

// respond ---------------------------------------------------------------------------------

int cmd_respond(const Options& o) {
  const ModelConfig cfg = load(o);
  if (o.strain.empty()) throw Error("usage", "--strain is required");
  const BurgersMaterial m = cfg.material();
  const StrainHistory h = history_from_csv(parse_csv(read_file(o.strain)), m.dim());
  const RelaxationEvaluator ev(m);
  std::vector<SymTensor2> stress;
  if (o.method == "conv") {
    stress = convolve(ev, h);
  } else if (o.method == "exp" || o.method == "ode") {
    stress = integrate_internal(m, ev, h).stress;
  } else {
    throw Error("usage", "--method for respond must be ode or conv");
  }
  emit(o, format_csv(stress_to_csv(h.times, stress)));
  return 0;
}

// simulate --------------------------------------------------------------------------------

int cmd_simulate(const Options& o) {
  const ModelConfig cfg = load(o);
  if (cfg.dim != 2) throw Error("schema", "field 'dim': simulate needs a two-dimensional model");
  const FemConfig fc = cfg.fem();

  std::string snaps;
  SnapshotFn snap;
  std::optional<MeshP1> mesh;
  if (!o.snapshots.empty()) {
    mesh.emplace(MeshP1::unit_square(fc.N));
    snaps = "t,node,x,y,u1,u2\n";
    snap = [&](double t, const Vector& u) {
      for (std::size_t i = 0; i < mesh->nodes.size(); ++i) {
        snaps += format_double(t) + ',' + std::to_string(i) + ',' +
                 format_double(mesh->nodes[i].x()) + ',' + format_double(mesh->nodes[i].y()) +
                 ',' + format_double(u(2 * i)) + ',' + format_double(u(2 * i + 1)) + '\n';
      }
    };
  }
  const DecayResult res = run_decay_experiment(fc, snap);

  CsvTable t;
  t.header = {"t", "kinetic", "elastic", "stored", "total"};
  const auto& tr = res.trace;
  for (std::size_t j = 0; j < tr.times.size(); ++j)
    t.rows.push_back({tr.times[j], tr.kinetic[j], tr.elastic[j], tr.stored[j], tr.total[j]});
  std::string csv = format_csv(t);
  csv += "# energy_ratio " + format_double(res.ratio) + "\n";
  csv += "# log_slope " + format_double(res.slope) + "\n";
  csv += "# max_energy_increase " + format_double(res.max_energy_increase) + "\n";
  csv += "# step " + format_double(res.h) + " steps " + std::to_string(res.steps) + "\n";
  emit(o, csv);
  if (!o.snapshots.empty()) write_file(o.snapshots, snaps);
  if (!o.out.empty()) {
    std::cout << "energy_ratio " << format_double(res.ratio) << "\nlog_slope "
              << format_double(res.slope) << '\n';
  }
  return 0;
}

// compare ---------------------------------------------------------------------------------

struct CompareRow {
  std::string label;
  int dim = 0;
  int n = 0;
  double discrepancy = 0.0;
  double imag_ratio = 0.0;
  bool passed = false;
  std::string error;
};

CompareRow compare_one(const std::string& label, const BurgersMaterial& m,
                       const std::vector<double>& grid, double commute_tol) {
  CompareRow row;
  row.label = label;
  row.dim = m.dim();
  row.n = m.n();
  try {
    const RelaxationEvaluator ev(m);
    const PronyForm pf = build_prony(m, commute_tol);
    for (double t : grid)
      row.discrepancy =
          std::max(row.discrepancy, relative_gap(eval_G_prony(pf, t).kelvin(), ev.G(t).kelvin()));
    for (const auto& ch : pf.channels) row.imag_ratio = std::max(row.imag_ratio, ch.max_imag_ratio);
    row.passed = row.discrepancy <= 1e-8 && row.imag_ratio <= 1e-9;
  } catch (const Error& e) {
    row.error = e.kind();
  }
  return row;
}

unsigned thread_cap() {
  const char* env = std::getenv("BURGERS_RELAX_THREADS");
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw Error("usage", "BURGERS_RELAX_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

int cmd_compare(const Options& o) {
  const unsigned threads = thread_cap();
  std::vector<std::pair<std::string, BurgersMaterial>> cases;
  double commute_tol = kDefaultCommuteTol;
  std::vector<double> grid;
  if (!o.config.empty()) {
    const ModelConfig cfg = load(o);
    commute_tol = cfg.run.commute_tol;
    grid = grid_for(o, cfg);
    cases.emplace_back("config", cfg.material());
  } else {
    grid = parse_tgrid(o.tgrid.empty() ? "0:20:81" : o.tgrid).points();
  }
  Rng rng(o.seed);
  for (int c = 0; c < o.count; ++c) {
    const int dim = 2 + c % 2;
    const int n = 1 + (c / 2) % 3;
    const auto kind = c % 4 < 2 ? CommutingKind::Isotropic : CommutingKind::SharedEigenbasis;
    cases.emplace_back("random" + std::to_string(c), random_commuting_material(dim, n, kind, rng));
  }

  std::vector<CompareRow> rows(cases.size());
  for (std::size_t start = 0; start < cases.size(); start += threads) {
    std::vector<std::future<CompareRow>> batch;
    const std::size_t stop = std::min(cases.size(), start + threads);
    for (std::size_t i = start; i < stop; ++i)
      batch.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                 compare_one, cases[i].first, std::cref(cases[i].second),
                                 std::cref(grid), commute_tol));
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }

  std::string csv = "case,dim,n,max_discrepancy,max_imag_ratio,passed,error\n";
  bool all = true;
  for (const auto& r : rows) {
    csv += r.label + ',' + std::to_string(r.dim) + ',' + std::to_string(r.n) + ',' +
           format_double(r.discrepancy) + ',' + format_double(r.imag_ratio) + ',' +
           (r.passed ? "1" : "0") + ',' + r.error + '\n';
    all = all && r.passed;
  }
  emit(o, csv);
  if (!all) throw Error("compare-failed", "method agreement failed for at least one material");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Relaxation tensor of the extended Burgers model"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* sc, bool needs_config) {
    auto* c = sc->add_option("--config", o.config, "model configuration (JSON)");
    if (needs_config) c->required();
    sc->add_option("--out", o.out, "output file (default: stdout)");
    sc->add_flag("--voigt-input", o.voigt_input, "accept engineering Voigt material matrices");
  };

  auto* validate = app.add_subcommand("validate", "check admissibility and commutativity");
  common(validate, true);
  validate->add_option("--format", o.format, "report format")->check(CLI::IsMember({"text", "json"}));

  auto* relax = app.add_subcommand("relax", "tabulate G(t)");
  common(relax, true);
  relax->add_option("--method", o.method, "exp, prony or both");
  relax->add_option("--tgrid", o.tgrid, "start:stop:count[:log]");
  relax->add_option("--cache", o.cache, "evaluator cache file");

  auto* prony = app.add_subcommand("prony-export", "write the partial-fraction table");
  common(prony, true);

  auto* certificate = app.add_subcommand("certificate", "verify decay constants");
  common(certificate, true);
  certificate->add_option("--tgrid", o.tgrid, "certificate grid, must start at 0");
  certificate->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"text", "json"}));
  certificate->add_option("--cache", o.cache, "evaluator cache file");
  certificate->add_flag("--tamper", o.tamper, "negative control: flip the sign of G'");

  auto* respond = app.add_subcommand("respond", "stress response to a strain history");
  common(respond, true);
  respond->add_option("--strain", o.strain, "strain CSV (t, Kelvin components)")->required();
  respond->add_option("--method", o.method, "ode or conv");
  o.method = "exp";

  auto* simulate = app.add_subcommand("simulate", "finite element decay experiment");
  common(simulate, true);
  simulate->add_option("--snapshots", o.snapshots, "displacement dump (CSV)");

  auto* compare = app.add_subcommand("compare", "exp vs Prony agreement on random materials");
  common(compare, false);
  compare->add_option("--tgrid", o.tgrid, "start:stop:count[:log]");
  compare->add_option("--seed", o.seed, "random seed");
  compare->add_option("--count", o.count, "number of random materials")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "burgers-relax: error[usage]: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*relax) return cmd_relax(o);
    if (*prony) return cmd_prony_export(o);
    if (*certificate) return cmd_certificate(o);
    if (*respond) return cmd_respond(o);
    if (*simulate) return cmd_simulate(o);
    if (*compare) return cmd_compare(o);
  } catch (const Error& e) {
    std::cerr << "burgers-relax: error[" << e.kind() << "]: " << one_line(e.what()) << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "burgers-relax: error[internal]: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}
