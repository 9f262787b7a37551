#pragma once

#include "burgers/constitutive.hpp"
#include "burgers/fem.hpp"
#include "burgers/relaxation.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace burgers {

/// Heterogeneous FEM region: elements whose centroid lies in the box
/// [x0, x1] x [y0, y1] use this material instead of the base one. Later
/// regions win.
struct RegionSpec {
  std::array<double, 4> box{};
  std::vector<ElasticTensor4> c;
  std::vector<double> eta;
};

struct RunParams {
  std::string t_grid = "0:10:101";
  int j_max = 2;
  int mesh_N = 9;
  double t_end = 40.0;
  double h = 0.0;
  bool lumped_mass = false;
  bool freeze_internal = false;
  double amplitude = 0.1;
  double estimate_tol = 1e-10;
  double certificate_tol = 1e-9;
  double commute_tol = 1e-10;
};

/// Parsed configuration. The tensors are kept raw so that `validate` can
/// report on inadmissible input instead of failing on construction.
struct ModelConfig {
  int dim = 3;
  int n = 1;
  double rho = 1.0;
  std::vector<ElasticTensor4> c;
  std::vector<double> eta;
  std::vector<RegionSpec> regions;
  RunParams run;

  BurgersMaterial material() const;
  /// Base material plus regions for the finite element solver.
  FemConfig fem() const;
};

/// Parse a JSON configuration. Errors are "parse" (with line and column) or
/// "schema" (with the offending field path). `voigt_input` permits material
/// entries of type "voigt" (engineering shear convention).
ModelConfig parse_config(const std::string& text, bool voigt_input = false);
ModelConfig load_config(const std::string& path, bool voigt_input = false);

/// "start:stop:count[:log]"
struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool log_spaced = false;
  std::vector<double> points() const;
};
TimeGrid parse_tgrid(const std::string& spec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// CSV with an optional header row; every data row has the same width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text);
/// Fixed formatting: 17 significant digits, ',' separator, '\n' endings.
std::string format_csv(const CsvTable& table);

StrainHistory history_from_csv(const CsvTable& table, int dim);
CsvTable stress_to_csv(const std::vector<double>& times, const std::vector<SymTensor2>& stress);

/// Structured pass/fail results with a JSON and a text rendering produced
/// from the same data.
struct ReportItem {
  std::string name;
  bool passed = true;
  double worst = 0.0;         // worst residual or margin
  std::string location;       // where the worst value occurred
  std::vector<std::pair<std::string, std::string>> details;
};

struct Report {
  std::string command;
  std::vector<ReportItem> items;

  bool passed() const;
  std::string to_json() const;
  std::string to_text() const;
};

/// Versioned evaluator cache ("burgers-relax-evaluator/1").
std::string serialize_evaluator(const RelaxationEvaluator& ev);
/// Throws "stale-cache" when `expected_hash` is given and differs.
RelaxationEvaluator deserialize_evaluator(const std::string& text,
                                          std::optional<std::uint64_t> expected_hash = {});

std::string certificate_json(const DecayCertificate& cert, const SpectralBounds& b);

}  // namespace burgers
