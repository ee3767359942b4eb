#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modcheck/formula.hpp"

namespace modcheck {

enum class SolveStatus { Sat, Unsat, Unknown };

using PredKey = std::pair<std::string, std::vector<int>>;

// A complete assignment: per-node existence and timestamp, plus the free
// predicate, null and attribute variables.
struct SolverVarMap {
    std::vector<char> node_exists;  // by node index
    std::vector<long> timestamps;   // dense ranks among existing nodes, -1 otherwise
    std::map<PredKey, bool> predvars;
    std::map<int, bool> notnull;                       // symbolic uid -> non-null
    std::map<std::pair<int, int>, long> attrs;         // (uid, field) -> value code

    ModelView view() const;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    std::optional<SolverVarMap> model;
    std::string reason;
    long conflicts = 0;
    long decisions = 0;
};

struct SymOpRef {
    int uid;
    std::string module_name;  // kind-domain lookup
};

struct SolveLimits {
    long max_conflicts = -1;   // < 0: unlimited
    double timeout_sec = -1;   // < 0: none
};

// Decides a quantifier-free ground formula. Boolean search over existence,
// predicate, attribute and edge variables; an assignment is theory-consistent
// iff no SCC of the strict+weak edge graph over existing nodes contains a
// strict edge.
SolveResult solve_native(const GPtr& formula, const NodeTable& nodes, const Domains& domains,
                         const std::vector<SymOpRef>& sym_ops, const SolveLimits& limits = {});

}  // namespace modcheck
