#include "ctrace/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace ctrace {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw FormatError(path.string() + ": write failed");
}

void expect_kind(const json& j, const char* kind) {
  if (!j.is_object() || !j.contains("kind") || j.at("kind") != kind) {
    throw FormatError(std::string("model is not tagged \"kind\": \"") + kind + "\"");
  }
}

// Reads rows for variable v; `Entry` is double or Interval.
template <typename Entry, typename Parse>
std::vector<Entry> read_rows(const json& rows, const Dag& g, int v, Parse parse) {
  const auto k = static_cast<std::size_t>(g.cardinality(v));
  if (!rows.is_array() || rows.size() != g.num_parent_configurations(v)) {
    throw FormatError("variable " + std::to_string(v) + ": expected " +
                      std::to_string(g.num_parent_configurations(v)) + " rows");
  }
  std::vector<Entry> table;
  table.reserve(rows.size() * k);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != k) {
      throw FormatError("variable " + std::to_string(v) + ": row width differs from cardinality");
    }
    for (const auto& e : row) table.push_back(parse(e));
  }
  return table;
}

}  // namespace

json dag_to_json(const Dag& g) {
  json variables = json::array();
  for (const auto& v : g.variables()) {
    variables.push_back({{"id", v.id}, {"cardinality", v.cardinality}});
  }
  json edges = json::array();
  for (const auto& [p, c] : g.edges()) edges.push_back({p, c});
  return {{"variables", variables}, {"edges", edges}, {"topo_order", g.topo_order()}};
}

Dag dag_from_json(const json& j) {
  try {
    std::vector<VariableSpec> variables;
    for (const auto& v : j.at("variables")) {
      variables.push_back({v.at("id").get<int>(), v.at("cardinality").get<int>()});
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a [parent, child] pair");
      edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    if (j.contains("topo_order")) {
      return Dag(std::move(variables), std::move(edges), j.at("topo_order").get<std::vector<int>>());
    }
    return Dag(std::move(variables), std::move(edges));
  } catch (const json::exception& e) {
    throw FormatError(std::string("dag: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json to_json(const BayesNet& bn) {
  json cpts = json::array();
  for (const auto& cpt : bn.cpts()) {
    json rows = json::array();
    for (std::size_t j = 0; j < cpt.num_rows(); ++j) {
      const auto r = cpt.row(j);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    cpts.push_back({{"variable", cpt.variable}, {"rows", rows}});
  }
  return {{"kind", "bn"}, {"dag", dag_to_json(bn.dag())}, {"cpts", cpts}};
}

json to_json(const CredalNet& cn) {
  json icpts = json::array();
  for (const auto& icpt : cn.icpts()) {
    json rows = json::array();
    for (std::size_t j = 0; j < icpt.num_rows(); ++j) {
      json row = json::array();
      for (const auto& iv : icpt.row(j)) row.push_back({iv.lower, iv.upper});
      rows.push_back(row);
    }
    icpts.push_back({{"variable", icpt.variable}, {"rows", rows}});
  }
  return {{"kind", "cn"}, {"dag", dag_to_json(cn.dag())}, {"icpts", icpts}};
}

BayesNet bayesnet_from_json(const json& j) {
  expect_kind(j, "bn");
  auto g = std::make_shared<const Dag>(dag_from_json(j.at("dag")));
  try {
    const auto& items = j.at("cpts");
    if (!items.is_array() || items.size() != g->size()) {
      throw FormatError("expected one CPT per variable");
    }
    std::vector<Cpt> cpts;
    for (std::size_t v = 0; v < items.size(); ++v) {
      const int var = items[v].at("variable").get<int>();
      if (var != static_cast<int>(v)) throw FormatError("CPTs must be listed in variable order");
      cpts.push_back({var, g->cardinality(var),
                      read_rows<double>(items[v].at("rows"), *g, var,
                                        [](const json& e) { return e.get<double>(); })});
    }
    return BayesNet(g, std::move(cpts));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bn: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

CredalNet credalnet_from_json(const json& j) {
  expect_kind(j, "cn");
  auto g = std::make_shared<const Dag>(dag_from_json(j.at("dag")));
  try {
    const auto& items = j.at("icpts");
    if (!items.is_array() || items.size() != g->size()) {
      throw FormatError("expected one interval CPT per variable");
    }
    std::vector<IntervalCpt> icpts;
    for (std::size_t v = 0; v < items.size(); ++v) {
      const int var = items[v].at("variable").get<int>();
      if (var != static_cast<int>(v)) throw FormatError("interval CPTs must be listed in variable order");
      icpts.push_back({var, g->cardinality(var),
                       read_rows<Interval>(items[v].at("rows"), *g, var, [](const json& e) {
                         if (!e.is_array() || e.size() != 2) {
                           throw FormatError("interval must be a [lower, upper] pair");
                         }
                         return Interval{e[0].get<double>(), e[1].get<double>()};
                       })});
    }
    return CredalNet(g, std::move(icpts));
  } catch (const json::exception& e) {
    throw FormatError(std::string("cn: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Model read_model(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    if (j.is_object() && j.value("kind", "") == "bn") return bayesnet_from_json(j);
    if (j.is_object() && j.value("kind", "") == "cn") return credalnet_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  throw FormatError(path.string() + ": missing or unknown \"kind\" tag (expected bn or cn)");
}

Dag read_dag(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    if (j.is_object() && j.contains("dag")) return dag_from_json(j.at("dag"));
    return dag_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_model(const std::filesystem::path& path, const BayesNet& bn) {
  write_text(path, to_json(bn).dump(1) + "\n");
}

void write_model(const std::filesystem::path& path, const CredalNet& cn) {
  write_text(path, to_json(cn).dump(1) + "\n");
}

Population read_population(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  std::size_t columns = 0;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      int id = -1;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), id);
      if (ec != std::errc() || id != static_cast<int>(columns)) {
        throw FormatError(path.string() + ": header must list variable ids 0..n-1 in order");
      }
      ++columns;
    }
  }
  if (columns == 0) throw FormatError(path.string() + ": empty header");
  std::vector<int> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    for (std::size_t c = 0; c < columns; ++c) {
      int state = 0;
      const auto [ptr, ec] = std::from_chars(p, end, state);
      if (ec != std::errc()) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected an integer");
      }
      data.push_back(state);
      p = ptr;
      if (c + 1 < columns) {
        if (p == end || *p != ',') {
          throw FormatError(path.string() + ":" + std::to_string(line_no) + ": too few columns");
        }
        ++p;
      }
    }
    if (p != end) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": too many columns");
  }
  return Population(columns, std::move(data));
}

void write_population(const std::filesystem::path& path, const Population& p) {
  std::string text;
  text.reserve(p.data().size() * 2 + 64);
  for (std::size_t v = 0; v < p.num_variables(); ++v) {
    if (v) text += ',';
    text += std::to_string(v);
  }
  text += '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto r = p.row(i);
    for (std::size_t v = 0; v < r.size(); ++v) {
      if (v) text += ',';
      text += std::to_string(r[v]);
    }
    text += '\n';
  }
  write_text(path, text);
}

}  // namespace ctrace
