#include "lcsgeom/definition.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lcsgeom/lcs.hpp"

namespace lcsgeom {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(fmt::format("{}: missing field \"{}\"", path, key));
  return *it;
}

const json& array_of(const json& v, std::size_t size, const std::string& path) {
  if (!v.is_array()) throw InputError(path + ": expected an array");
  if (size != 0 && v.size() != size) {
    throw InputError(fmt::format("{}: expected {} entries, got {}", path, size, v.size()));
  }
  return v;
}

std::vector<std::string> names(const json& v, const std::string& path) {
  array_of(v, 0, path);
  if (v.empty()) throw InputError(path + ": no coordinates");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw InputError(fmt::format("{}[{}]: expected a string", path, i));
    std::string s = v[i].get<std::string>();
    for (const auto& prev : out) {
      if (prev == s) throw InputError(fmt::format("{}: duplicate coordinate \"{}\"", path, s));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Interval> box(const json& v, std::size_t n, const std::string& path) {
  array_of(v, n, path);
  std::vector<Interval> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string at = fmt::format("{}[{}]", path, i);
    array_of(v[i], 2, at);
    if (!v[i][0].is_number() || !v[i][1].is_number()) throw InputError(at + ": expected [lo, hi] numbers");
    Interval iv{v[i][0].get<double>(), v[i][1].get<double>()};
    if (!(iv.lo < iv.hi)) throw InputError(at + ": need lo < hi");
    out.push_back(iv);
  }
  return out;
}

Expr expression(const json& v, const std::vector<std::string>& coordinates, const std::string& path) {
  if (!v.is_string() && !v.is_number()) throw InputError(path + ": expected an expression string");
  try {
    return parse(v.is_string() ? v.get<std::string>() : v.dump(), coordinates);
  } catch (const ParseError& e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

// Entries written differently must still agree numerically.
void require_symmetric(const TensorField& g, const json& text, const Chart& chart) {
  auto pts = sample_points(chart, 8, 1);
  pts.push_back(chart.center());
  const std::size_t n = chart.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (text[i][j] == text[j][i]) continue;
      for (const auto& p : pts) {
        double a = 0, b = 0;
        try {
          a = eval(g({i, j}), p);
          b = eval(g({j, i}), p);
        } catch (const DomainError&) {
          continue;
        }
        if (std::abs(a - b) > 1e-12 * (1 + std::abs(a))) {
          throw InputError(fmt::format("metric[{}][{}] and metric[{}][{}] differ ({} vs {})", i, j, j, i, a, b));
        }
      }
    }
  }
}

int count_negatives(const TensorField& g) {
  const Chart& chart = *g.chart();
  auto pts = sample_points(chart, 8, 1);
  pts.insert(pts.begin(), chart.center());
  for (const auto& p : pts) {
    try {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(evaluate_matrix(g, p));
      return static_cast<int>((es.eigenvalues().array() < 0).count());
    } catch (const DomainError&) {
    }
  }
  throw InputError("metric cannot be evaluated anywhere in the box");
}

json expressions(std::span<const Expr> es) {
  json out = json::array();
  for (const auto& e : es) out.push_back(to_string(e));
  return out;
}

json intervals(const std::vector<Interval>& box) {
  json out = json::array();
  for (const auto& iv : box) out.push_back({iv.lo, iv.hi});
  return out;
}

}  // namespace

DefinitionDocument load_definition(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("document: expected a JSON object");

  const auto coords = names(field(doc, "coordinates", "document"), "coordinates");
  const std::size_t n = coords.size();
  std::vector<Interval> b(n);
  if (doc.contains("box")) b = box(doc["box"], n, "box");
  auto chart = make_chart(coords, b);

  const json& mt = array_of(field(doc, "metric", "document"), n, "metric");
  TensorField g(chart, 0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    array_of(mt[i], n, fmt::format("metric[{}]", i));
    for (std::size_t j = 0; j < n; ++j) g({i, j}) = expression(mt[i][j], coords, fmt::format("metric[{}][{}]", i, j));
  }
  require_symmetric(g, mt, *chart);

  const json& xt = array_of(field(doc, "xi", "document"), n, "xi");
  TensorField xi(chart, 1, 0);
  for (std::size_t i = 0; i < n; ++i) xi[i] = expression(xt[i], coords, fmt::format("xi[{}]", i));

  DefinitionDocument out{chart, Metric(g, count_negatives(g)), xi, std::nullopt, std::nullopt, Sampling{}};

  if (doc.contains("connection")) {
    const json& ct = array_of(doc["connection"], n, "connection");
    TensorField gamma(chart, 1, 2);
    for (std::size_t k = 0; k < n; ++k) {
      array_of(ct[k], n, fmt::format("connection[{}]", k));
      for (std::size_t i = 0; i < n; ++i) {
        array_of(ct[k][i], n, fmt::format("connection[{}][{}]", k, i));
        for (std::size_t j = 0; j < n; ++j) {
          gamma({k, i, j}) = expression(ct[k][i][j], coords, fmt::format("connection[{}][{}][{}]", k, i, j));
        }
      }
    }
    bool symmetric = true;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) symmetric = symmetric && ct[k][i][j] == ct[k][j][i];
      }
    }
    out.connection.emplace(gamma, symmetric);
  }

  if (doc.contains("immersion")) {
    const json& im = doc["immersion"];
    if (!im.is_object()) throw InputError("immersion: expected an object");
    const auto src = names(field(im, "coordinates", "immersion"), "immersion.coordinates");
    std::vector<Interval> sb;
    if (im.contains("box")) {
      sb = box(im["box"], src.size(), "immersion.box");
    } else {
      for (const auto& s : src) {
        auto k = chart->index_of(s);
        sb.push_back(k ? chart->box()[*k] : Interval{});
      }
    }
    auto source = make_chart(src, sb);
    const json& mp = array_of(field(im, "map", "immersion"), n, "immersion.map");
    std::vector<Expr> map;
    for (std::size_t a = 0; a < n; ++a) map.push_back(expression(mp[a], src, fmt::format("immersion.map[{}]", a)));
    try {
      out.immersion.emplace(source, chart, std::move(map));
    } catch (const Error& e) {
      throw InputError(std::string("immersion: ") + e.what());
    }
  }

  if (doc.contains("sampling")) {
    const json& s = doc["sampling"];
    if (!s.is_object()) throw InputError("sampling: expected an object");
    if (s.contains("points")) {
      if (!s["points"].is_number_integer() || s["points"].get<long long>() < 2) {
        throw InputError("sampling.points: expected an integer >= 2");
      }
      out.sampling.points = s["points"].get<int>();
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw InputError("sampling.seed: expected a non-negative integer");
      out.sampling.seed = s["seed"].get<std::uint64_t>();
    }
    for (const char* key : {"atol", "rtol"}) {
      if (!s.contains(key)) continue;
      if (!s[key].is_number() || s[key].get<double>() < 0) {
        throw InputError(fmt::format("sampling.{}: expected a non-negative number", key));
      }
      (std::string(key) == "atol" ? out.sampling.tol.atol : out.sampling.tol.rtol) = s[key].get<double>();
    }
  }
  return out;
}

DefinitionDocument load_definition_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_definition(ss.str());
}

DefinitionDocument paper_example_document() {
  auto chart = paper_example_chart();
  DefinitionDocument doc{chart, paper_example_metric(chart), paper_example_xi(chart), std::nullopt, std::nullopt,
                         Sampling{}};
  doc.immersion.emplace(paper_example_immersion(chart));
  return doc;
}

std::string canonical_json(const DefinitionDocument& doc) {
  const std::size_t n = doc.chart->dim();
  json out;
  out["coordinates"] = doc.chart->coordinates();
  out["box"] = intervals(doc.chart->box());
  json metric = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    metric.push_back(expressions(std::span(doc.metric.tensor().components()).subspan(i * n, n)));
  }
  out["metric"] = metric;
  out["xi"] = expressions(doc.xi.components());
  if (doc.connection) {
    json c = json::array();
    const auto& comps = doc.connection->coefficients().components();
    for (std::size_t k = 0; k < n; ++k) {
      json row = json::array();
      for (std::size_t i = 0; i < n; ++i) row.push_back(expressions(std::span(comps).subspan((k * n + i) * n, n)));
      c.push_back(row);
    }
    out["connection"] = c;
  }
  if (doc.immersion) {
    const auto& f = *doc.immersion;
    out["immersion"] = {{"coordinates", f.source()->coordinates()},
                        {"box", intervals(f.source()->box())},
                        {"map", expressions(f.map())}};
  }
  out["sampling"] = {{"points", doc.sampling.points},
                     {"seed", doc.sampling.seed},
                     {"atol", doc.sampling.tol.atol},
                     {"rtol", doc.sampling.tol.rtol}};
  return out.dump();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace lcsgeom
