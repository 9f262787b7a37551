#include "burgers/io.hpp"

#include "burgers/error.hpp"
#include "burgers/format.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace burgers {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error("schema", "field '" + path + "': " + what);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double as_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  schema_error(path, "expected a number");
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, "expected true or false");
  return j.get<bool>();
}

Matrix as_square(const json& j, int size, const std::string& path) {
  Matrix m(size, size);
  if (!j.is_array()) schema_error(path, "expected an array");
  if (j.size() == static_cast<std::size_t>(size) && j[0].is_array()) {
    for (int r = 0; r < size; ++r) {
      const json& row = j[r];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(size))
        schema_error(index(path, r), "expected a row of " + std::to_string(size) + " numbers");
      for (int c = 0; c < size; ++c) m(r, c) = as_number(row[c], index(index(path, r), c));
    }
  } else if (j.size() == static_cast<std::size_t>(size * size)) {
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c)
        m(r, c) = as_number(j[r * size + c], index(path, r * size + c));
  } else {
    schema_error(path, "expected a " + std::to_string(size) + "x" + std::to_string(size) +
                           " matrix (nested rows or row-major flat)");
  }
  return m;
}

ElasticTensor4 parse_tensor(const json& j, int dim, bool voigt_input, const std::string& path) {
  const std::string type = [&] {
    const json& t = member(j, "type", path);
    if (!t.is_string()) schema_error(join(path, "type"), "expected a string");
    return t.get<std::string>();
  }();
  if (type == "isotropic") {
    const double lambda = as_number(member(j, "lambda", path), join(path, "lambda"));
    const double mu = as_number(member(j, "mu", path), join(path, "mu"));
    try {
      return isotropic(dim, lambda, mu);
    } catch (const Error& e) {
      schema_error(path, e.what());
    }
  }
  const int kd = kelvin_size(dim);
  if (type == "kelvin") {
    return ElasticTensor4(dim, as_square(member(j, "matrix", path), kd, join(path, "matrix")));
  }
  if (type == "voigt") {
    if (!voigt_input)
      schema_error(join(path, "type"), "engineering Voigt input requires --voigt-input");
    return ElasticTensor4::from_voigt(dim,
                                      as_square(member(j, "matrix", path), kd, join(path, "matrix")));
  }
  schema_error(join(path, "type"), "unknown material type '" + type + "'");
}

std::vector<ElasticTensor4> parse_tensors(const json& j, int dim, bool voigt_input,
                                          const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  std::vector<ElasticTensor4> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_tensor(j[i], dim, voigt_input, index(path, i)));
  return out;
}

std::vector<double> parse_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], index(path, i)));
  return out;
}

}  // namespace

// configuration -------------------------------------------------------------------

BurgersMaterial ModelConfig::material() const { return BurgersMaterial(dim, rho, c, eta); }

FemConfig ModelConfig::fem() const {
  FemConfig f;
  f.N = run.mesh_N;
  f.t_end = run.t_end;
  f.h = run.h;
  f.lumped_mass = run.lumped_mass;
  f.freeze_internal = run.freeze_internal;
  f.amplitude = run.amplitude;
  f.materials.push_back(material());
  for (const auto& r : regions) f.materials.emplace_back(dim, rho, r.c, r.eta);
  if (!regions.empty()) {
    const MeshP1 mesh = MeshP1::unit_square(f.N);
    f.region.assign(mesh.triangles.size(), 0);
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
      const auto p = mesh.centroid(static_cast<int>(e));
      for (std::size_t r = 0; r < regions.size(); ++r) {
        const auto& b = regions[r].box;
        if (p.x() >= b[0] && p.x() <= b[1] && p.y() >= b[2] && p.y() <= b[3])
          f.region[e] = static_cast<int>(r) + 1;
      }
    }
  }
  return f;
}

ModelConfig parse_config(const std::string& text, bool voigt_input) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(e.byte ? e.byte - 1 : 0, text.size()); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": invalid JSON";
    throw Error("parse", os.str());
  }

  ModelConfig cfg;
  cfg.dim = as_int(member(j, "dim", ""), "dim");
  if (cfg.dim != 2 && cfg.dim != 3) schema_error("dim", "must be 2 or 3");
  cfg.n = as_int(member(j, "n", ""), "n");
  if (cfg.n < 1) schema_error("n", "at least one Kelvin-Voigt element is required");
  if (j.contains("rho")) cfg.rho = as_number(j["rho"], "rho");
  cfg.c = parse_tensors(member(j, "materials", ""), cfg.dim, voigt_input, "materials");
  cfg.eta = parse_numbers(member(j, "viscosities", ""), "viscosities");
  if (cfg.c.size() != static_cast<std::size_t>(cfg.n + 1))
    schema_error("materials", "expected n+1 = " + std::to_string(cfg.n + 1) + " entries");
  if (cfg.eta.size() != static_cast<std::size_t>(cfg.n + 1))
    schema_error("viscosities", "expected n+1 = " + std::to_string(cfg.n + 1) + " entries");

  if (j.contains("regions")) {
    const json& regs = j["regions"];
    if (!regs.is_array()) schema_error("regions", "expected an array");
    for (std::size_t r = 0; r < regs.size(); ++r) {
      const std::string path = index("regions", r);
      RegionSpec spec;
      const auto box = parse_numbers(member(regs[r], "box", path), join(path, "box"));
      if (box.size() != 4) schema_error(join(path, "box"), "expected [x0, x1, y0, y1]");
      std::copy(box.begin(), box.end(), spec.box.begin());
      spec.c = parse_tensors(member(regs[r], "materials", path), cfg.dim, voigt_input,
                             join(path, "materials"));
      spec.eta = parse_numbers(member(regs[r], "viscosities", path), join(path, "viscosities"));
      if (spec.c.size() != cfg.c.size() || spec.eta.size() != cfg.eta.size())
        schema_error(path, "regions must have n+1 materials and viscosities");
      cfg.regions.push_back(std::move(spec));
    }
  }

  if (j.contains("run")) {
    const json& r = j["run"];
    if (!r.is_object()) schema_error("run", "expected an object");
    for (const auto& [key, value] : r.items()) {
      const std::string path = join("run", key);
      if (key == "t_grid") {
        if (!value.is_string()) schema_error(path, "expected \"start:stop:count[:log]\"");
        cfg.run.t_grid = value.get<std::string>();
        parse_tgrid(cfg.run.t_grid);
      } else if (key == "j_max") {
        cfg.run.j_max = as_int(value, path);
      } else if (key == "mesh_N") {
        cfg.run.mesh_N = as_int(value, path);
        if (cfg.run.mesh_N < 2) schema_error(path, "must be at least 2");
      } else if (key == "T") {
        cfg.run.t_end = as_number(value, path);
      } else if (key == "h") {
        cfg.run.h = as_number(value, path);
      } else if (key == "lumped_mass") {
        cfg.run.lumped_mass = as_bool(value, path);
      } else if (key == "freeze_internal") {
        cfg.run.freeze_internal = as_bool(value, path);
      } else if (key == "amplitude") {
        cfg.run.amplitude = as_number(value, path);
      } else if (key == "tolerances") {
        if (!value.is_object()) schema_error(path, "expected an object");
        for (const auto& [tk, tv] : value.items()) {
          const std::string tp = join(path, tk);
          if (tk == "estimates") {
            cfg.run.estimate_tol = as_number(tv, tp);
          } else if (tk == "certificate") {
            cfg.run.certificate_tol = as_number(tv, tp);
          } else if (tk == "commute") {
            cfg.run.commute_tol = as_number(tv, tp);
          } else {
            schema_error(tp, "unknown tolerance");
          }
        }
      } else {
        schema_error(path, "unknown run parameter");
      }
    }
  }
  return cfg;
}

ModelConfig load_config(const std::string& path, bool voigt_input) {
  return parse_config(read_file(path), voigt_input);
}

// time grid ---------------------------------------------------------------------------

TimeGrid parse_tgrid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3 && parts.size() != 4)
    throw Error("usage", "time grid must be start:stop:count[:log], got '" + spec + "'");
  TimeGrid g;
  try {
    std::size_t used = 0;
    g.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    g.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    g.count = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::exception&) {
    throw Error("usage", "time grid must be start:stop:count[:log], got '" + spec + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] != "log") throw Error("usage", "time grid suffix must be 'log'");
    g.log_spaced = true;
  }
  if (g.count < 1) throw Error("usage", "time grid count must be positive");
  if (g.count > 1 && !(g.stop > g.start))
    throw Error("usage", "time grid needs stop > start");
  if (g.log_spaced && !(g.start > 0.0)) throw Error("usage", "log-spaced grid needs start > 0");
  return g;
}

std::vector<double> TimeGrid::points() const { return make_grid(start, stop, count, log_spaced); }

// files and CSV --------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("io", "write to '" + path + "' failed");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& field : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
        if (used != field.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (t.header.empty() && t.rows.empty()) {
        t.header = fields;
        continue;
      }
      throw Error("parse", "line " + std::to_string(lineno) + ": non-numeric CSV field");
    }
    if (!t.rows.empty() && row.size() != t.rows.front().size())
      throw Error("parse", "line " + std::to_string(lineno) + ": inconsistent column count");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  if (!table.header.empty()) out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

StrainHistory history_from_csv(const CsvTable& table, int dim) {
  const std::size_t width = 1 + static_cast<std::size_t>(kelvin_size(dim));
  StrainHistory h;
  h.dim = dim;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != width)
      throw Error("schema", "strain CSV row " + std::to_string(r + 1) + " needs t and " +
                                std::to_string(width - 1) + " Kelvin components");
    h.times.push_back(row[0]);
    Vector v(width - 1);
    for (std::size_t i = 1; i < width; ++i) v(static_cast<Eigen::Index>(i - 1)) = row[i];
    h.values.emplace_back(dim, v);
  }
  h.validate();
  return h;
}

CsvTable stress_to_csv(const std::vector<double>& times, const std::vector<SymTensor2>& stress) {
  CsvTable t;
  t.header.push_back("t");
  const int kd = stress.empty() ? 0 : static_cast<int>(stress[0].kelvin().size());
  for (int i = 0; i < kd; ++i) t.header.push_back("s" + std::to_string(i));
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::vector<double> row{times[j]};
    for (int i = 0; i < kd; ++i) row.push_back(stress[j].kelvin()(i));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// report ---------------------------------------------------------------------------------

bool Report::passed() const {
  for (const auto& i : items)
    if (!i.passed) return false;
  return true;
}

std::string Report::to_json() const {
  json j;
  j["command"] = command;
  j["passed"] = passed();
  j["items"] = json::array();
  for (const auto& i : items) {
    json item;
    item["name"] = i.name;
    item["passed"] = i.passed;
    item["worst"] = format_double(i.worst);
    item["location"] = i.location;
    json details = json::object();
    for (const auto& [k, v] : i.details) details[k] = v;
    item["details"] = details;
    j["items"].push_back(item);
  }
  return j.dump(2) + "\n";
}

std::string Report::to_text() const {
  std::ostringstream os;
  os << command << ": " << (passed() ? "PASS" : "FAIL") << '\n';
  for (const auto& i : items) {
    os << "  [" << (i.passed ? "PASS" : "FAIL") << "] " << i.name << "  worst="
       << format_double(i.worst);
    if (!i.location.empty()) os << "  at " << i.location;
    os << '\n';
    for (const auto& [k, v] : i.details) os << "      " << k << ": " << v << '\n';
  }
  return os.str();
}

// evaluator cache ----------------------------------------------------------------------

namespace {

constexpr const char* kEvaluatorFormat = "burgers-relax-evaluator/1";

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a nonempty matrix");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) schema_error(index(path, r), "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], index(index(path, r), c));
  }
  return m;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace

std::string serialize_evaluator(const RelaxationEvaluator& ev) {
  json j;
  j["format"] = kEvaluatorFormat;
  j["material_hash"] = hash_hex(ev.material_hash());
  j["dim"] = ev.dim();
  j["n"] = ev.n();
  j["bounds"] = {{"alpha1", ev.bounds().alpha1},
                 {"alpha2", ev.bounds().alpha2},
                 {"beta1", ev.bounds().beta1},
                 {"beta2", ev.bounds().beta2}};
  std::vector<double> lam(ev.eigenvalues().data(), ev.eigenvalues().data() + ev.eigenvalues().size());
  j["eigenvalues"] = lam;
  j["eigenvectors"] = matrix_json(ev.eigenvectors());
  j["dbar"] = matrix_json(ev.dbar());
  return j.dump(1) + "\n";
}

RelaxationEvaluator deserialize_evaluator(const std::string& text,
                                          std::optional<std::uint64_t> expected_hash) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw Error("parse", "evaluator cache is not valid JSON");
  }
  const json& fmt = member(j, "format", "");
  if (!fmt.is_string() || fmt.get<std::string>() != kEvaluatorFormat)
    throw Error("schema", std::string("evaluator cache format must be ") + kEvaluatorFormat);
  const json& hj = member(j, "material_hash", "");
  if (!hj.is_string()) schema_error("material_hash", "expected a hex string");
  const std::uint64_t hash = std::stoull(hj.get<std::string>(), nullptr, 16);
  if (expected_hash && *expected_hash != hash)
    throw Error("stale-cache", "evaluator cache was built for a different material");
  const json& b = member(j, "bounds", "");
  SpectralBounds bounds{as_number(member(b, "alpha1", "bounds"), "bounds.alpha1"),
                        as_number(member(b, "alpha2", "bounds"), "bounds.alpha2"),
                        as_number(member(b, "beta1", "bounds"), "bounds.beta1"),
                        as_number(member(b, "beta2", "bounds"), "bounds.beta2")};
  const auto lam = parse_numbers(member(j, "eigenvalues", ""), "eigenvalues");
  Vector eig = Eigen::Map<const Vector>(lam.data(), static_cast<Eigen::Index>(lam.size()));
  return RelaxationEvaluator(as_int(member(j, "dim", ""), "dim"), as_int(member(j, "n", ""), "n"),
                             matrix_from_json(member(j, "dbar", ""), "dbar"),
                             matrix_from_json(member(j, "eigenvectors", ""), "eigenvectors"),
                             std::move(eig), bounds, hash);
}

std::string certificate_json(const DecayCertificate& c, const SpectralBounds& b) {
  json j;
  j["kappa1"] = c.kappa1;
  j["kappa2"] = c.kappa2;
  j["kappa3"] = c.kappa3;
  j["kappa4"] = c.kappa4;
  j["kappa4_tilde"] = c.kappa4_tilde;
  j["kappa5"] = c.kappa5;
  j["kappa6"] = c.kappa6;
  j["prefactor_lower"] = c.prefactor_lower;
  j["prefactor_upper"] = c.prefactor_upper;
  j["pure_exponential"] = c.pure_exponential;
  j["kappa5_fit"] = c.kappa5_fit;
  j["kappa6_fit"] = c.kappa6_fit;
  j["horizon"] = {c.t_min, c.t_max};
  j["samples"] = c.samples;
  j["ftc_residual"] = c.ftc_residual;
  j["worst_margin"] = c.worst_margin;
  j["bounds"] = {{"alpha1", b.alpha1}, {"alpha2", b.alpha2}, {"beta1", b.beta1}, {"beta2", b.beta2}};
  return j.dump(2) + "\n";
}

}  // namespace burgers
