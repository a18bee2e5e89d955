#pragma once

#include <string>
#include <vector>

#include "finitemix/graph.hpp"

namespace finitemix {

// Canonical JSON, one line, keys in schema order:
//   {"n":..,"k":..,"builder":..,"graphs":[{"directed":..,"edges":[[u,v,"num/den"],..]},..]}
// Weights stay exact fraction strings; self-loops are never serialized and
// are recomputed when the sequence is turned into mixing matrices. Identical
// sequences serialize to identical bytes.
std::string to_json(const GraphSequence& seq);

// Parses the schema above. Throws BadJson for malformed JSON and BadFormat
// for well-formed JSON that does not match the schema. Loading does not
// validate graph invariants; run validate_sequence for that.
GraphSequence sequence_from_json(const std::string& text);

void save_sequence(const std::string& path, const GraphSequence& seq);
GraphSequence load_sequence(const std::string& path);

// Graphviz rendition, one document per round. Every node is declared so
// isolated nodes stay visible; edges carry their weight as a label.
std::vector<std::string> to_dot(const GraphSequence& seq);

// Writes graph_001.dot, graph_002.dot, ... into directory and returns the
// paths written.
std::vector<std::string> write_dot_files(const GraphSequence& seq, const std::string& directory);

}  // namespace finitemix
