#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace modcheck {

// A reference to a uhb node inside a formula: (operation variable, event name).
struct NodeRef {
    std::string op_var;
    std::string event;

    bool operator==(const NodeRef&) const = default;
};

// One edge argument of AddEdge/AddEdges/EdgeExists. The label is kept for
// graph output only; it carries no logical meaning.
struct EdgeSpec {
    NodeRef src;
    NodeRef dst;
    std::string label;

    bool operator==(const EdgeSpec&) const = default;
};

enum class FKind {
    Forall,
    Exists,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Pred,        // predicate application: name + variable args
    AddEdge,     // one or more asserted edges (AddEdges keeps its list form)
    EdgeExists,  // single edge observation
    NodeExists,  // one or more node-existence atoms (NodesExist keeps list form)
    SameNode,    // node merge
    ParamEq,     // instance-parameter comparison: Param "c" = 0
    ConstTrue,   // only produced by tests/generators, printable
    ConstFalse,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree. One tagged struct rather than a class hierarchy;
// only the fields relevant to `kind` are meaningful.
struct Formula {
    FKind kind;

    // Forall / Exists
    std::string quant_type;           // microop, transaction, ...
    std::string var;                  // bound variable name
    std::vector<std::string> domain;  // submodule names or "this"; empty = own ops
    bool has_domain = false;

    // And/Or: n-ary children; Not: children[0]; Implies/Iff: children[0,1];
    // quantifiers: body at children[0].
    std::vector<FormulaPtr> children;

    // Pred
    std::string pred;
    std::vector<std::string> args;

    // AddEdge / EdgeExists
    std::vector<EdgeSpec> edges;
    bool list_form = false;  // AddEdges [...] / NodesExist [...] surface syntax

    // NodeExists
    std::vector<NodeRef> nodes;

    // SameNode
    NodeRef sn_a, sn_b;

    // ParamEq
    std::string param_name;
    long param_value = 0;

    static FormulaPtr mk(FKind k) {
        auto f = std::make_shared<Formula>();
        f->kind = k;
        return f;
    }
};

bool formula_equal(const Formula& a, const Formula& b);
inline bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    return formula_equal(*a, *b);
}

struct AxiomAst {
    std::string name;
    FormulaPtr body;
};

struct EventDecl {
    int index = 0;
    std::string name;
    bool external = false;

    bool operator==(const EventDecl&) const = default;
};

struct ParamBinding {
    std::string name;
    long value = 0;

    bool operator==(const ParamBinding&) const = default;
};

struct SubmoduleInst {
    std::string type;      // module type name
    std::string instance;  // instance name, unique within the module
    std::vector<ParamBinding> params;
};

// A module definition. Fields from the .mdef file plus, once the matching
// axiom file has been attached, the event declarations and axioms.
struct ModuleDef {
    std::string name;
    std::string operation_type;  // identifier or "none"
    bool is_interface = false;
    std::vector<std::pair<std::string, std::string>> properties;
    std::vector<SubmoduleInst> submodules;
    std::vector<AxiomAst> connection_axioms;
    std::vector<EventDecl> events;
    std::vector<AxiomAst> axioms;  // implementation or interface axioms

    bool is_core() const {
        for (auto& [k, v] : properties)
            if (k == "IsCore") return v == "yes";
        return false;
    }
    const EventDecl* find_event(const std::string& ev) const {
        for (auto& e : events)
            if (e.name == ev) return &e;
        return nullptr;
    }
};

}  // namespace modcheck
