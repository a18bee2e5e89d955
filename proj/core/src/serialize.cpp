#include "finitemix/serialize.hpp"

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "finitemix/error.hpp"
#include "finitemix/text.hpp"

namespace finitemix {

namespace {

using ordered_json = nlohmann::ordered_json;

int require_int(const ordered_json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        raise("BadFormat", std::string("missing integer field '") + key + "'");
    return j[key].get<int>();
}

}  // namespace

std::string to_json(const GraphSequence& seq) {
    ordered_json root;
    root["n"] = seq.n;
    root["k"] = seq.k;
    root["builder"] = seq.builder_tag;
    ordered_json graphs = ordered_json::array();
    for (const EdgeList& g : seq.graphs) {
        ordered_json jg;
        jg["directed"] = g.directed;
        ordered_json edges = ordered_json::array();
        for (const Edge& e : g.edges) edges.push_back({e.u, e.v, to_string(e.weight)});
        jg["edges"] = std::move(edges);
        graphs.push_back(std::move(jg));
    }
    root["graphs"] = std::move(graphs);
    return root.dump();
}

GraphSequence sequence_from_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& err) {
        raise("BadJson", err.what());
    }
    if (!root.is_object()) raise("BadFormat", "top level is not an object");

    GraphSequence seq;
    seq.n = require_int(root, "n");
    seq.k = require_int(root, "k");
    if (!root.contains("builder") || !root["builder"].is_string())
        raise("BadFormat", "missing string field 'builder'");
    seq.builder_tag = root["builder"].get<std::string>();
    if (!root.contains("graphs") || !root["graphs"].is_array())
        raise("BadFormat", "missing array field 'graphs'");

    for (const ordered_json& jg : root["graphs"]) {
        if (!jg.is_object() || !jg.contains("directed") || !jg["directed"].is_boolean() ||
            !jg.contains("edges") || !jg["edges"].is_array())
            raise("BadFormat", "graph entry must hold 'directed' and 'edges'");
        EdgeList g;
        g.n = seq.n;
        g.directed = jg["directed"].get<bool>();
        for (const ordered_json& je : jg["edges"]) {
            if (!je.is_array() || je.size() != 3 || !je[0].is_number_integer() ||
                !je[1].is_number_integer() || !je[2].is_string())
                raise("BadFormat", "edge must be [u, v, \"num/den\"]");
            Edge e;
            e.u = je[0].get<int>();
            e.v = je[1].get<int>();
            e.weight = parse_rational(je[2].get<std::string>());
            g.edges.push_back(e);
        }
        seq.graphs.push_back(std::move(g));
    }
    return seq;
}

void save_sequence(const std::string& path, const GraphSequence& seq) {
    write_file_atomic(path, to_json(seq) + "\n");
}

GraphSequence load_sequence(const std::string& path) {
    return sequence_from_json(read_file(path));
}

std::vector<std::string> to_dot(const GraphSequence& seq) {
    std::vector<std::string> docs;
    docs.reserve(seq.graphs.size());
    for (std::size_t gi = 0; gi < seq.graphs.size(); ++gi) {
        const EdgeList& g = seq.graphs[gi];
        std::string doc;
        doc += g.directed ? "digraph " : "graph ";
        doc += "round_" + std::to_string(gi + 1) + " {\n";
        for (int node = 1; node <= g.n; ++node) doc += "  " + std::to_string(node) + ";\n";
        const char* arrow = g.directed ? " -> " : " -- ";
        for (const Edge& e : g.edges)
            doc += "  " + std::to_string(e.u) + arrow + std::to_string(e.v) + " [label=\"" +
                   to_string(e.weight) + "\"];\n";
        doc += "}\n";
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<std::string> write_dot_files(const GraphSequence& seq, const std::string& directory) {
    std::filesystem::create_directories(directory);
    const auto docs = to_dot(seq);
    std::vector<std::string> paths;
    paths.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "graph_%03zu.dot", i + 1);
        const std::string path = (std::filesystem::path(directory) / name).string();
        write_file_atomic(path, docs[i]);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace finitemix
