#pragma once

#include <string>
#include <vector>

#include "modcheck/solver.hpp"

namespace modcheck {

// QF_LIA rendering of a ground formula: one Bool + one Int per node, Bools
// for free predicates and null flags, bounded Ints for attributes. Edge
// atoms inline as (and e_s e_d (< ts_s ts_d)).
std::string emit_smtlib(const GPtr& formula, const NodeTable& nodes, const Domains& domains,
                        const std::vector<SymOpRef>& sym_ops);

// Runs `solver_command` with the SMT-LIB2 text on stdin and parses the
// verdict plus a get-model block. Process failure, timeout or an
// unparseable model yield Unknown with the captured stderr.
SolveResult run_external(const std::string& smt_text, const std::string& solver_command,
                         const NodeTable& nodes, const Domains& domains,
                         const std::vector<SymOpRef>& sym_ops, double timeout_sec = -1);

}  // namespace modcheck
