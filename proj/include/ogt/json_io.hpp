#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "ogt/marked_graph.hpp"

namespace ogt {

// Graph file schema:
// {"basis": r, "vertices": [...], "edges": [{"id","from","to","len":"p/q"}],
//  "marking": {"a": ["e1+","e2-"]}, "comarking": {"e1": "ab"}}
// Lengths parse exactly; the validator rejects non-core graphs and non-unit
// volume unless `normalize` is set.
nlohmann::ordered_json marked_graph_to_json(const MarkedGraph& g);
MarkedGraph marked_graph_from_json(const nlohmann::ordered_json& j, bool normalize = false);

std::string write_marked_graph(const MarkedGraph& g);
MarkedGraph read_marked_graph(const std::string& text, bool normalize = false);
MarkedGraph load_marked_graph(const std::string& path, bool normalize = false);
void save_marked_graph(const MarkedGraph& g, const std::string& path);

} // namespace ogt
