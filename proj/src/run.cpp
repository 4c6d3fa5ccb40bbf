#include "lcsgeom/run.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "lcsgeom/lcs.hpp"

namespace lcsgeom {

using nlohmann::json;

CheckReport connection_suite(const Connection& c, const Metric& g, const CheckRunner& runner) {
  const std::size_t n = g.dim();
  CheckReport report;
  report.suite = "connection";
  TensorField dg = metric_derivative(c, g);
  report.checks.push_back(runner.run(indexed_check("DEF", "connection_metric_compatible", {n, n, n}, [&](auto s) {
    return std::pair<Expr, Expr>{dg.at(s), Expr()};
  })));
  TensorField t = torsion(c);
  Check tor = indexed_check("EQ(1.2)", "connection_torsion", {n, n, n},
                            [&](auto s) { return std::pair<Expr, Expr>{t.at(s), Expr()}; });
  tor.measured = true;
  report.checks.push_back(runner.run(tor));
  Connection lc = levi_civita(g);
  Check diff = indexed_check("DEF", "connection_levi_civita_difference", {n, n, n}, [&](auto s) {
    return std::pair<Expr, Expr>{c.coefficients().at(s), lc.coefficients().at(s)};
  });
  diff.measured = true;
  report.checks.push_back(runner.run(diff));
  return report;
}

namespace {

CheckResult gate_error(const std::string& what) {
  CheckResult r;
  r.tag = "EQ(3.3)";
  r.name = "lcs_structure_derivable";
  r.verdict = Verdict::fail;
  r.max_residual = 1.0;
  r.note = what;
  return r;
}

void add_suite(RunReport& report, CheckReport suite) {
  report.passed = report.passed && suite.passed();
  report.suites.push_back(std::move(suite));
}

void run_immersion(RunReport& report, const DefinitionDocument& doc, const AmbientGeometry& ambient) {
  const auto& s = doc.sampling;
  SubmanifoldContext ctx = immerse(*doc.immersion, ambient, s.points, s.seed, s.tol);
  add_suite(report, submanifold_suite(ctx.lc, ctx.runner, "lc"));
  add_suite(report, submanifold_suite(ctx.qs, ctx.runner, "qsmc"));
  CheckReport inv = invariance_check(ctx);
  const bool invariant = inv.passed();
  add_suite(report, std::move(inv));
  if (!invariant) {
    report.notes.push_back("immersion is not invariant; invariant, parallelism and theorem5 suites skipped");
    return;
  }
  add_suite(report, invariant_identity_suite(ctx));
  add_suite(report, parallelism_residuals(ctx));
  try {
    add_suite(report, theorem5_suite(ctx));
  } catch (const ImmersionError&) {
    throw;
  } catch (const Error& e) {
    report.notes.push_back(std::string("theorem5 suite skipped: ") + e.what());
  }
}

}  // namespace

RunReport run(const DefinitionDocument& doc, Selection selection) {
  if (selection == Selection::submanifold && !doc.immersion) {
    throw InputError("the submanifold suites need an \"immersion\" block");
  }
  RunReport report;
  report.version = kToolVersion;
  report.input_digest = "fnv1a64:" + fnv1a_hex(canonical_json(doc));
  report.sampling = doc.sampling;
  const auto& s = doc.sampling;
  CheckRunner runner(sample_points(*doc.chart, s.points, s.seed), s.tol, doc.metric.determinant());

  if (doc.connection) add_suite(report, connection_suite(*doc.connection, doc.metric, runner));

  std::optional<LcsStructure> structure;
  try {
    structure = build_structure(doc.metric, doc.xi, runner);
  } catch (const StructureError& e) {
    add_suite(report, e.report());
    report.notes.push_back(e.what());
    return report;
  } catch (const Error& e) {
    CheckReport gate;
    gate.suite = "structure_gate";
    gate.checks.push_back(gate_error(e.what()));
    add_suite(report, std::move(gate));
    report.notes.push_back(e.what());
    return report;
  }
  AmbientGeometry ambient = make_ambient(std::move(*structure));
  add_suite(report, validate_structure(ambient, runner));
  if (selection == Selection::identities || selection == Selection::all) {
    add_suite(report, qsmc_identity_suite(ambient, runner));
  }
  if ((selection == Selection::submanifold || selection == Selection::all) && doc.immersion) {
    run_immersion(report, doc, ambient);
  }
  return report;
}

namespace {

json to_json(const CheckResult& c) {
  return {{"tag", c.tag},         {"name", c.name},       {"max_residual", c.max_residual},
          {"scale", c.scale},     {"points", c.points},   {"skipped", c.skipped},
          {"verdict", verdict_name(c.verdict)}, {"vacuous", c.vacuous}, {"note", c.note}};
}

}  // namespace

std::string format_report(const RunReport& report, std::string_view format) {
  if (format == "json") {
    json suites = json::array();
    for (const auto& s : report.suites) {
      json checks = json::array();
      for (const auto& c : s.checks) checks.push_back(to_json(c));
      suites.push_back({{"suite", s.suite}, {"passed", s.passed()}, {"checks", checks}});
    }
    json out = {{"tool", "lcsgeom"},
                {"version", report.version},
                {"input_digest", report.input_digest},
                {"sampling",
                 {{"points", report.sampling.points},
                  {"seed", report.sampling.seed},
                  {"atol", report.sampling.tol.atol},
                  {"rtol", report.sampling.tol.rtol}}},
                {"suites", suites},
                {"notes", report.notes},
                {"passed", report.passed},
                {"exit_code", report.exit_code()}};
    return out.dump(2) + "\n";
  }
  if (format == "text") {
    std::string out;
    for (const auto& s : report.suites) {
      for (const auto& c : s.checks) {
        out += fmt::format("{:<9} {:<40} {:>8.1e}  {:>4}  {}\n", c.tag, c.name, c.max_residual, c.points,
                           verdict_name(c.verdict));
      }
    }
    return out;
  }
  throw InputError(fmt::format("unknown format \"{}\" (expected text or json)", format));
}

}  // namespace lcsgeom
