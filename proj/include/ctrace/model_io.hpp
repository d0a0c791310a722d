#pragma once

#include <filesystem>
#include <variant>

#include <json.hpp>

#include "ctrace/bayesnet.hpp"
#include "ctrace/credalnet.hpp"
#include "ctrace/graph.hpp"

namespace ctrace {

// Malformed or unreadable input files. Messages carry the path.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model files are JSON objects tagged with "kind": "bn" or "cn":
//
//   { "kind": "bn",
//     "dag":  { "variables": [{"id": 0, "cardinality": 2}, ...],
//               "edges": [[parent, child], ...],
//               "topo_order": [...] },
//     "cpts": [{"variable": 0, "rows": [[p0, p1], ...]}, ...] }
//
//   { "kind": "cn", "dag": {...},
//     "icpts": [{"variable": 0, "rows": [[[l0, u0], [l1, u1]], ...]}, ...] }
//
// Rows follow parent_configurations order. CN files record nothing about how
// the intervals were produced (no s, eps, sample size or counts).
nlohmann::json dag_to_json(const Dag& g);
Dag dag_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BayesNet& bn);
nlohmann::json to_json(const CredalNet& cn);
BayesNet bayesnet_from_json(const nlohmann::json& j);
CredalNet credalnet_from_json(const nlohmann::json& j);

using Model = std::variant<BayesNet, CredalNet>;

Model read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const BayesNet& bn);
void write_model(const std::filesystem::path& path, const CredalNet& cn);
// The Dag of any model file (either kind).
Dag read_dag(const std::filesystem::path& path);

// CSV with a header of variable ids and one row of integer states per
// individual.
Population read_population(const std::filesystem::path& path);
void write_population(const std::filesystem::path& path, const Population& p);

}  // namespace ctrace
