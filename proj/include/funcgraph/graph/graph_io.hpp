#pragma once

#include "funcgraph/graph/scene_graph.hpp"

#include <string>
#include <string_view>

namespace funcgraph {

inline constexpr int kGraphFormatVersion = 1;

// Canonical JSON text of the graph (docs/scene_graph.schema.json). Identical
// graphs produce identical bytes; doubles are written in shortest round-trip
// form so parsing restores them exactly.
std::string serialize(const SceneGraph& graph);

// Throws ParseError with the byte offset (syntax) or JSON pointer (structure)
// of the first problem found.
SceneGraph deserialize(std::string_view text);

}  // namespace funcgraph
