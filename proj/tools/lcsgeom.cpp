#include <iostream>

#include <CLI11.hpp>

#include "lcsgeom/run.hpp"

using namespace lcsgeom;

namespace {

struct Options {
  std::string format = "text";
  std::optional<int> points;
  std::optional<std::uint64_t> seed;
  std::optional<double> atol;
  std::optional<double> rtol;
  std::string file;
};

void apply(const Options& o, DefinitionDocument& doc) {
  if (o.points) doc.sampling.points = *o.points;
  if (o.seed) doc.sampling.seed = *o.seed;
  if (o.atol) doc.sampling.tol.atol = *o.atol;
  if (o.rtol) doc.sampling.tol.rtol = *o.rtol;
}

int execute(const Options& o, Selection selection, bool builtin) {
  if (o.format != "text" && o.format != "json") {
    std::cerr << "error: unknown format \"" << o.format << "\" (expected text or json)\n";
    return 2;
  }
  try {
    DefinitionDocument doc = builtin ? paper_example_document() : load_definition_file(o.file);
    apply(o, doc);
    RunReport report = run(doc, selection);
    std::cout << format_report(report, o.format);
    for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
    int checks = 0, failed = 0;
    for (const auto& s : report.suites) {
      for (const auto& c : s.checks) {
        ++checks;
        failed += c.verdict == Verdict::fail ? 1 : 0;
      }
    }
    std::cerr << (report.passed ? "PASS" : "FAIL") << ": " << checks << " checks, " << failed << " failed\n";
    return report.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification engine for LCS manifolds and their invariant submanifolds"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "text or json")->capture_default_str();
  app.add_option("--points", o.points, "number of sample points")->check(CLI::Range(2, 1000000));
  app.add_option("--seed", o.seed, "seed for the pseudorandom half of the sample");
  app.add_option("--atol", o.atol, "absolute tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--rtol", o.rtol, "relative tolerance")->check(CLI::NonNegativeNumber);
  app.fallthrough();

  struct Command {
    const char* name;
    const char* help;
    Selection selection;
  };
  const Command commands[] = {
      {"validate", "structure checks", Selection::validate},
      {"identities", "structure and quarter-symmetric connection identities", Selection::identities},
      {"submanifold", "structure and immersion suites", Selection::submanifold},
      {"run", "every suite the document supports", Selection::all},
  };
  int code = 0;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("file", o.file, "definition document (JSON)")->required();
    sub->callback([&, sel = c.selection] { code = execute(o, sel, false); });
  }
  app.add_subcommand("paper-example", "all suites on the built-in five-dimensional example")->callback([&] {
    code = execute(o, Selection::all, true);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }
  return code;
}
