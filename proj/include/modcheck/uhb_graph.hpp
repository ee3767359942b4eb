#pragma once

#include <map>
#include <string>
#include <vector>

#include "modcheck/solver.hpp"

namespace modcheck {

struct UhbNode {
    int node_id;
    int op_uid;
    std::string owner_path;
    std::string event;
    int event_index;
    long timestamp;  // dense rank
};

struct UhbEdge {
    int src, dst;  // node ids
    std::string label;
    bool merged = false;  // merged-node linkage rather than a strict ordering
};

struct UhbGraph {
    std::vector<UhbNode> nodes;                  // existing nodes only
    std::vector<UhbEdge> edges;
    std::vector<std::vector<int>> merge_classes;  // classes of size >= 2
    std::map<int, std::string> op_labels;         // uid -> display label
};

// Rebuilds the witness graph from a satisfying assignment: existing nodes,
// provenance-tracked strict edges, and SameNode merge classes. Timestamps
// are normalized to dense ranks.
UhbGraph extract_graph(const SolverVarMap& model, const GPtr& grounded, const NodeTable& nodes,
                       const std::map<int, std::string>& op_labels);

// Deterministic DOT text: one cluster per operation, rows ordered by event
// index, merged nodes drawn once with a doubled border.
std::string to_dot(const UhbGraph& g);

}  // namespace modcheck
