#pragma once

#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "modcheck/ast.hpp"

namespace modcheck {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
};

// Parses a module definition file (.mdef). Trailing input is an error.
ModuleDef parse_module_definition(const std::string& text);

// Parses an implementation (.uax) or interface (.iface) axiom file.
// Returns (module type, events, axioms) in declaration order.
std::tuple<std::string, std::vector<EventDecl>, std::vector<AxiomAst>> parse_axiom_file(
    const std::string& text);

// Shared expression grammar entry point; parses exactly one formula.
FormulaPtr parse_litmus_expression(const std::string& text);

// Pretty-printers. print(parse(t)) reparses to a structurally equal AST.
std::string pretty_print(const FormulaPtr& f);
std::string pretty_print(const ModuleDef& def);
std::string pretty_print_axiom_file(const std::string& module_type,
                                    const std::vector<EventDecl>& events,
                                    const std::vector<AxiomAst>& axioms);

}  // namespace modcheck
