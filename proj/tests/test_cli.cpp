#include <json.hpp>

#include "doctest.h"
#include "lcsgeom/run.hpp"
#include "support.hpp"

using namespace testing;

namespace {

std::string data(const char* name) { return std::string(LCSGEOM_DATA_DIR) + "/" + name; }

const char* kPlane = R"({
  "coordinates": ["x", "y"],
  "metric": [["1", "0"], ["0", "1"]],
  "xi": ["0", "1"]
})";

}  // namespace

TEST_CASE("shipped example document loads") {
  auto doc = load_definition_file(data("paper_example.json"));
  REQUIRE(doc.chart->dim() == 5);
  CHECK(doc.metric.negatives() == 1);
  REQUIRE(doc.immersion.has_value());
  CHECK(doc.immersion->dim() == 3);
  auto frame = example_frame(doc.chart);
  for (const auto& p : points_for(*doc.chart, 20)) {
    auto g = frame_components(doc.metric.tensor(), frame, p);
    for (std::size_t a = 0; a < 5; ++a) {
      for (std::size_t b = 0; b < 5; ++b) {
        const double want = a != b ? 0.0 : (a == 2 ? -1.0 : 1.0);
        CHECK(std::abs(g[a * 5 + b] - want) < 1e-12);
      }
    }
  }
  CHECK(canonical_json(doc) == canonical_json(paper_example_document()));
}

TEST_CASE("load errors name the offending field") {
  auto message = [](const std::string& text) {
    try {
      load_definition(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  auto doc = nlohmann::json::parse(kPlane);
  CHECK_NOTHROW(load_definition(kPlane));
  CHECK(message("{\"coordinates\": [").find("malformed JSON") != std::string::npos);

  auto missing = doc;
  missing.erase("xi");
  CHECK(message(missing.dump()).find("\"xi\"") != std::string::npos);

  auto bad_expr = doc;
  bad_expr["metric"][1][1] = "1 + q";
  CHECK(message(bad_expr.dump()).find("metric[1][1]") != std::string::npos);

  auto short_xi = doc;
  short_xi["xi"] = {"0"};
  CHECK(message(short_xi.dump()).find("xi") != std::string::npos);

  auto asym = doc;
  asym["metric"][0][1] = "x";
  CHECK(message(asym.dump()).find("differ") != std::string::npos);

  auto same_value = doc;
  same_value["metric"][0][1] = "x - x";
  CHECK_NOTHROW(load_definition(same_value.dump()));

  auto bad_box = doc;
  bad_box["box"] = {{1, 0}, {0, 1}};
  CHECK(message(bad_box.dump()).find("box[0]") != std::string::npos);

  auto bad_map = doc;
  bad_map["immersion"] = {{"coordinates", {"s"}}, {"map", {"s", "y"}}};
  CHECK(message(bad_map.dump()).find("immersion.map[1]") != std::string::npos);
}

TEST_CASE("immersion box defaults to the target interval of the same name") {
  auto doc = nlohmann::json::parse(kPlane);
  doc["box"] = {{0.5, 2.0}, {-3, 3}};
  doc["immersion"] = {{"coordinates", {"x"}}, {"map", {"x", "0"}}};
  auto d = load_definition(doc.dump());
  CHECK(d.immersion->source()->box()[0].lo == 0.5);
  CHECK(d.immersion->source()->box()[0].hi == 2.0);
  doc["immersion"] = {{"coordinates", {"t"}}, {"map", {"t", "0"}}};
  d = load_definition(doc.dump());
  CHECK(d.immersion->source()->box()[0].lo == -1.0);
}

TEST_CASE("sampling overrides") {
  auto doc = nlohmann::json::parse(kPlane);
  doc["sampling"] = {{"points", 12}, {"seed", 5}, {"atol", 1e-7}};
  auto d = load_definition(doc.dump());
  CHECK(d.sampling.points == 12);
  CHECK(d.sampling.seed == 5);
  CHECK(d.sampling.tol.atol == 1e-7);
  CHECK(d.sampling.tol.rtol == 1e-9);
  doc["sampling"]["points"] = 1;
  CHECK_THROWS_AS(load_definition(doc.dump()), InputError);
}

TEST_CASE("full run on the example passes and reports deterministically") {
  auto doc = paper_example_document();
  auto report = run(doc, Selection::all);
  CHECK(report.exit_code() == 0);
  std::vector<std::string> suites;
  for (const auto& s : report.suites) suites.push_back(s.suite);
  CHECK(suites == std::vector<std::string>{"structure", "qsmc", "lc_submanifold", "qsmc_submanifold", "invariance",
                                           "invariant", "parallelism", "theorem5"});
  const std::string text = format_report(report, "text");
  CHECK(text.find("EQ(4.11)  qsmc_curvature_xi ") != std::string::npos);
  for (const auto& s : report.suites) {
    for (const auto& c : s.checks) CHECK(c.verdict != Verdict::fail);
  }
  const std::string a = format_report(report, "json");
  const std::string b = format_report(run(doc, Selection::all), "json");
  CHECK(a == b);
  CHECK(nlohmann::json::parse(a).dump(2) + "\n" == a);
  CHECK_THROWS_AS(format_report(report, "xml"), InputError);
}

TEST_CASE("selections") {
  auto doc = load_definition(kPlane);
  CHECK_THROWS_AS(run(doc, Selection::submanifold), InputError);
  // flat plane with a parallel xi: alpha = 0, gate fails
  auto report = run(doc, Selection::validate);
  CHECK(report.exit_code() == 1);
  REQUIRE(report.suites.size() == 1);
  CHECK(report.suites[0].suite == "structure_gate");
}

TEST_CASE("negative control documents exit with 1") {
  auto perturbed = run(load_definition_file(data("perturbed_metric.json")), Selection::all);
  CHECK(perturbed.exit_code() == 1);
  CHECK(perturbed.suites.back().find("lcs_concircular")->verdict == Verdict::fail);

  auto plane = run(load_definition_file(data("noninvariant_plane.json")), Selection::all);
  CHECK(plane.exit_code() == 1);
  CHECK(plane.suites.back().suite == "invariance");

  auto corrupted = run(load_definition_file(data("corrupted_connection.json")), Selection::validate);
  CHECK(corrupted.exit_code() == 1);
  CHECK(corrupted.suites.front().find("connection_metric_compatible")->verdict == Verdict::fail);

  auto clean = run(load_definition_file(data("levi_civita_connection.json")), Selection::validate);
  CHECK(clean.exit_code() == 0);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
