#include "burgers/error.hpp"
#include "burgers/format.hpp"
#include "burgers/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <limits>

using namespace burgers;
using namespace burgers::testing;

namespace {

const char* kIsotropic = R"({
  "dim": 3, "n": 1, "rho": 2.0,
  "materials": [
    {"type": "isotropic", "lambda": 2.0, "mu": 1.0},
    {"type": "isotropic", "lambda": 1.0, "mu": 0.5}
  ],
  "viscosities": [2.0, 0.5],
  "run": {"t_grid": "0:5:11", "mesh_N": 5, "T": 3.0, "tolerances": {"commute": 1e-9}}
})";

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() + ": " + e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesIsotropicModel) {
  const auto cfg = parse_config(kIsotropic);
  EXPECT_EQ(cfg.dim, 3);
  EXPECT_EQ(cfg.n, 1);
  EXPECT_DOUBLE_EQ(cfg.rho, 2.0);
  EXPECT_EQ(cfg.run.t_grid, "0:5:11");
  EXPECT_EQ(cfg.run.mesh_N, 5);
  EXPECT_DOUBLE_EQ(cfg.run.t_end, 3.0);
  EXPECT_DOUBLE_EQ(cfg.run.commute_tol, 1e-9);
  EXPECT_LT(rel_err(cfg.c[0].kelvin(), isotropic(3, 2.0, 1.0).kelvin()), 1e-15);
  EXPECT_EQ(cfg.material().n(), 1);
}

TEST(Config, InfiniteViscosityAndKelvinMatrix) {
  const auto cfg = parse_config(R"({"dim": 2, "n": 1,
    "materials": [{"type": "kelvin", "matrix": [[2,0,0],[0,2,0],[0,0,1]]},
                  {"type": "kelvin", "matrix": [[1,0,0],[0,1,0],[0,0,1]]}],
    "viscosities": ["inf", 1]})");
  EXPECT_TRUE(std::isinf(cfg.eta[0]));
  EXPECT_DOUBLE_EQ(cfg.c[0].kelvin()(2, 2), 1.0);
}

TEST(Config, VoigtInputNeedsExplicitFlag) {
  const std::string text = R"({"dim": 2, "n": 1,
    "materials": [{"type": "voigt", "matrix": [[2,0,0],[0,2,0],[0,0,1]]},
                  {"type": "voigt", "matrix": [[1,0,0],[0,1,0],[0,0,1]]}],
    "viscosities": [1, 1]})";
  EXPECT_EQ(error_kind([&] { parse_config(text); }).rfind("schema: field 'materials[0].type'", 0), 0u);
  const auto cfg = parse_config(text, true);
  EXPECT_DOUBLE_EQ(cfg.c[0].kelvin()(2, 2), 2.0);  // engineering shear modulus doubled
}

TEST(Config, ErrorsNameLineOrField) {
  EXPECT_EQ(error_kind([] { parse_config("{\n  \"dim\": 3,\n  oops\n}"); }).rfind("parse: line 3", 0), 0u);
  EXPECT_EQ(error_kind([] { parse_config(R"({"n": 1})"); }), "schema: field 'dim': missing");
  EXPECT_EQ(error_kind([] { parse_config(R"({"dim": 4, "n": 1})"); }).rfind("schema: field 'dim'", 0), 0u);
  const std::string short_eta = R"({"dim": 2, "n": 1,
    "materials": [{"type": "isotropic", "lambda": 1, "mu": 1},
                  {"type": "isotropic", "lambda": 1, "mu": 1}],
    "viscosities": [1]})";
  EXPECT_EQ(error_kind([&] { parse_config(short_eta); }).rfind("schema: field 'viscosities'", 0), 0u);
  const std::string bad_matrix = R"({"dim": 2, "n": 1,
    "materials": [{"type": "kelvin", "matrix": [[1,0],[0,1]]},
                  {"type": "isotropic", "lambda": 1, "mu": 1}],
    "viscosities": [1, 1]})";
  EXPECT_EQ(error_kind([&] { parse_config(bad_matrix); }).rfind("schema: field 'materials[0].matrix'", 0),
            0u);
  EXPECT_EQ(error_kind([] { load_config("/nonexistent/config.json"); }).rfind("io:", 0), 0u);
}

TEST(Config, FemRegions) {
  const auto cfg = parse_config(R"({"dim": 2, "n": 1,
    "materials": [{"type": "isotropic", "lambda": 1, "mu": 1},
                  {"type": "isotropic", "lambda": 1, "mu": 1}],
    "viscosities": [1, 1],
    "regions": [{"box": [0.5, 1, 0, 1],
                 "materials": [{"type": "isotropic", "lambda": 2, "mu": 2},
                               {"type": "isotropic", "lambda": 1, "mu": 1}],
                 "viscosities": [0.5, 2]}],
    "run": {"mesh_N": 5}})");
  const auto fem = cfg.fem();
  EXPECT_EQ(fem.N, 5);
  ASSERT_EQ(fem.materials.size(), 2u);
  const auto mesh = MeshP1::unit_square(5);
  ASSERT_EQ(fem.region.size(), mesh.triangles.size());
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e)
    EXPECT_EQ(fem.region[e], mesh.centroid(static_cast<int>(e)).x() > 0.5 ? 1 : 0);
}

TEST(TimeGridSpec, ParsesAndRejects) {
  const auto g = parse_tgrid("0:2:5");
  EXPECT_EQ(g.points(), (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  const auto l = parse_tgrid("0.01:100:5:log");
  EXPECT_TRUE(l.log_spaced);
  EXPECT_NEAR(l.points()[2], 1.0, 1e-15);
  EXPECT_EQ(parse_tgrid("-1:1:3").points()[0], -1.0);
  for (const char* bad : {"0:1", "0:1:x", "1:0:5", "0:1:0", "0:1:5:lin", "0:10:5:log"})
    EXPECT_EQ(error_kind([&] { parse_tgrid(bad); }).rfind("usage:", 0), 0u) << bad;
}

TEST(Format, SeventeenDigitsLocaleFree) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.33333333333333331");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  for (double v : {0.24142772397831023, -3.5e17, 6.02214076e23})
    EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Csv, RoundTrip) {
  CsvTable t;
  t.header = {"t", "a"};
  t.rows = {{0.0, 1.5}, {0.1, -2.0}};
  const std::string text = format_csv(t);
  EXPECT_EQ(text, "t,a\n0,1.5\n0.10000000000000001,-2\n");
  const auto back = parse_csv("# comment\n" + text);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(parse_csv("1,2\n3,4\n").rows.size(), 2u);
  EXPECT_THROW(parse_csv("t,a\n1,2\n3\n"), Error);
}

TEST(Csv, StrainHistoryColumns) {
  const auto h = history_from_csv(parse_csv("t,e0,e1,e2\n0,0,0,0\n1,1,0,0.5\n"), 2);
  EXPECT_EQ(h.size(), 2u);
  EXPECT_DOUBLE_EQ(h.values[1].kelvin()(2), 0.5);
  EXPECT_THROW(history_from_csv(parse_csv("t,e0\n0,0\n"), 2), Error);
}

TEST(Report, RenderingsAgree) {
  Report r;
  r.command = "demo";
  r.items.push_back({"first", true, 1e-14, "", {{"k", "v"}}});
  r.items.push_back({"second", false, -0.25, "t=3", {}});
  EXPECT_FALSE(r.passed());
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["command"], "demo");
  EXPECT_EQ(j["passed"], false);
  ASSERT_EQ(j["items"].size(), 2u);
  const std::string text = r.to_text();
  for (const auto& item : j["items"]) {
    const std::string line = std::string("[") + (item["passed"] ? "PASS" : "FAIL") + "] " +
                             item["name"].get<std::string>() + "  worst=" +
                             item["worst"].get<std::string>();
    EXPECT_NE(text.find(line), std::string::npos) << line;
  }
  EXPECT_EQ(text.rfind("demo: FAIL\n", 0), 0u);
}

TEST(EvaluatorCache, RoundTripAndStaleness) {
  Rng rng(90);
  const auto m = random_material(3, 2, rng);
  const RelaxationEvaluator ev(m);
  const auto back = deserialize_evaluator(serialize_evaluator(ev), m.hash());
  for (double t : {0.0, 0.7, 3.0})
    EXPECT_EQ(back.G(t).kelvin(), ev.G(t).kelvin());
  EXPECT_EQ(back.bounds().alpha2, ev.bounds().alpha2);
  EXPECT_EQ(error_kind([&] { deserialize_evaluator(serialize_evaluator(ev), m.hash() + 1); })
                .rfind("stale-cache:", 0),
            0u);
  EXPECT_THROW(deserialize_evaluator("{\"format\": \"other/2\"}"), Error);
}

TEST(CertificateFile, ContainsConstantsAndBounds) {
  const RelaxationEvaluator ev(unit_scalar());
  const auto cert = decay_certificate(ev, make_grid(0.0, 10.0 / ev.bounds().alpha2, 101));
  const auto j = nlohmann::json::parse(certificate_json(cert, ev.bounds()));
  EXPECT_DOUBLE_EQ(j["kappa2"].get<double>(), cert.kappa2);
  EXPECT_DOUBLE_EQ(j["bounds"]["alpha1"].get<double>(), ev.bounds().alpha1);
}
