#include "ogt/json_io.hpp"

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

namespace ogt {

using nlohmann::ordered_json;

ordered_json marked_graph_to_json(const MarkedGraph& g) {
    ordered_json j;
    j["basis"] = g.basis.rank;
    j["vertices"] = g.vertex_names;
    ordered_json edges = ordered_json::array();
    for (size_t e = 0; e < g.graph.edges.size(); ++e) {
        ordered_json je;
        je["id"] = g.edge_names[e];
        je["from"] = g.vertex_names[g.graph.edges[e].from];
        je["to"] = g.vertex_names[g.graph.edges[e].to];
        je["len"] = rational_to_string(g.graph.edges[e].len);
        edges.push_back(je);
    }
    j["edges"] = edges;
    j["base"] = g.vertex_names[g.base_vertex];
    ordered_json marking;
    for (int i = 0; i < g.basis.rank; ++i) {
        ordered_json path = ordered_json::array();
        for (int oe : g.marking[i])
            path.push_back(g.edge_names[oe >> 1] + ((oe & 1) ? "-" : "+"));
        marking[std::string(1, g.basis.letter_char(i + 1))] = path;
    }
    j["marking"] = marking;
    ordered_json comarking;
    for (size_t e = 0; e < g.graph.edges.size(); ++e) {
        Word w = g.comarking[e];
        comarking[g.edge_names[e]] = w.empty() ? "1" : word_to_string(g.basis, w);
    }
    j["comarking"] = comarking;
    return j;
}

MarkedGraph marked_graph_from_json(const ordered_json& j, bool normalize) {
    if (!j.contains("basis") || !j.contains("edges") || !j.contains("marking"))
        fail(ErrorCode::BadInput, "graph json needs basis, edges, marking");
    Basis basis(j.at("basis").get<int>());

    std::vector<std::string> vertex_names;
    if (j.contains("vertices"))
        for (const auto& v : j.at("vertices")) vertex_names.push_back(v.get<std::string>());
    std::map<std::string, int> vid;
    auto vertex = [&](const std::string& name) {
        auto it = vid.find(name);
        if (it != vid.end()) return it->second;
        int id = static_cast<int>(vid.size());
        vid[name] = id;
        if (std::find(vertex_names.begin(), vertex_names.end(), name) == vertex_names.end())
            vertex_names.push_back(name);
        return id;
    };
    for (const auto& name : vertex_names) vertex(name);

    MetricGraph graph;
    std::map<std::string, int> eid;
    std::vector<std::string> edge_names;
    for (const auto& je : j.at("edges")) {
        std::string id = je.at("id").get<std::string>();
        if (eid.count(id)) fail(ErrorCode::BadInput, "duplicate edge id " + id);
        eid[id] = static_cast<int>(graph.edges.size());
        edge_names.push_back(id);
        graph.edges.push_back({vertex(je.at("from").get<std::string>()),
                               vertex(je.at("to").get<std::string>()),
                               parse_rational(je.at("len").get<std::string>())});
    }
    graph.num_vertices = static_cast<int>(vid.size());

    int base = 0;
    if (j.contains("base")) base = vertex(j.at("base").get<std::string>());

    std::vector<std::vector<int>> marking(basis.rank);
    for (int i = 0; i < basis.rank; ++i) {
        std::string key(1, basis.letter_char(i + 1));
        if (!j.at("marking").contains(key))
            fail(ErrorCode::BadInput, "marking missing generator " + key);
        for (const auto& step : j.at("marking").at(key)) {
            std::string s = step.get<std::string>();
            if (s.size() < 2 || (s.back() != '+' && s.back() != '-'))
                fail(ErrorCode::BadInput, "marking step needs an orientation sign: " + s);
            std::string id = s.substr(0, s.size() - 1);
            if (!eid.count(id)) fail(ErrorCode::BadInput, "marking references unknown edge " + id);
            marking[i].push_back(2 * eid[id] + (s.back() == '-' ? 1 : 0));
        }
    }

    std::vector<Word> comarking(graph.edges.size());
    if (j.contains("comarking")) {
        for (auto& [id, word] : j.at("comarking").items()) {
            if (!eid.count(id))
                fail(ErrorCode::BadInput, "comarking references unknown edge " + id);
            comarking[eid[id]] = parse_word(basis, word.get<std::string>());
        }
    } else {
        fail(ErrorCode::BadInput, "graph json needs a comarking");
    }

    MarkedGraph out(basis, std::move(graph), base, std::move(marking), std::move(comarking),
                    normalize);
    out.vertex_names = vertex_names;
    out.edge_names = edge_names;
    return out;
}

std::string write_marked_graph(const MarkedGraph& g) { return marked_graph_to_json(g).dump(2); }

MarkedGraph read_marked_graph(const std::string& text, bool normalize) {
    ordered_json j = ordered_json::parse(text, nullptr, true, true);
    return marked_graph_from_json(j, normalize);
}

MarkedGraph load_marked_graph(const std::string& path, bool normalize) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::BadInput, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return read_marked_graph(ss.str(), normalize);
}

void save_marked_graph(const MarkedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::BadInput, "cannot write " + path);
    out << write_marked_graph(g) << "\n";
}

} // namespace ogt
