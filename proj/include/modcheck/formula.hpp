#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "modcheck/elaborate.hpp"

namespace modcheck {

struct GroundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NodeInfo {
    int op_uid;
    std::string owner_path;
    std::string event;
    int event_index;
};

// Interns (operation, event) pairs as dense node ids.
class NodeTable {
  public:
    int intern(int op_uid, const std::string& owner_path, const std::string& event,
               int event_index);
    const NodeInfo& info(int idx) const { return infos_[idx]; }
    size_t size() const { return infos_.size(); }

  private:
    std::vector<NodeInfo> infos_;
    std::map<std::tuple<int, std::string>, int> index_;  // (uid, event key)
};

enum class AttrField { Kind, Addr, Data, Order };
enum class AttrRel { EqVarConst, InSet, EqVarVar, LtVarVar };

// A constraint over the finite-domain attribute variables of symbolic ops.
struct AttrAtom {
    AttrRel rel = AttrRel::EqVarConst;
    int op_a = -1;
    AttrField field_a = AttrField::Kind;
    int op_b = -1;
    AttrField field_b = AttrField::Kind;
    long value = 0;               // EqVarConst
    std::vector<int> set_values;  // InSet

    auto key() const {
        return std::make_tuple((int)rel, op_a, (int)field_a, op_b, (int)field_b, value,
                               set_values);
    }
    bool operator==(const AttrAtom& o) const { return key() == o.key(); }
    bool operator<(const AttrAtom& o) const { return key() < o.key(); }
};

enum class GKind { And, Or, Not, Lit };
enum class LKind { Const, NodeExists, StrictBefore, PredVar, NotNull, Attr, SameNodeRaw };

struct GNode;
using GPtr = std::shared_ptr<const GNode>;

struct GNode {
    GKind kind = GKind::Lit;
    std::vector<GPtr> kids;

    LKind lit = LKind::Const;
    bool bval = false;          // Const
    int node_a = -1;            // NodeExists / StrictBefore src / SameNodeRaw a
    int node_b = -1;            // StrictBefore dst / SameNodeRaw b
    std::string label;          // StrictBefore render label
    bool asserted_edge = false; // lowered from AddEdge (drawn in witness graphs)
    std::string pred;           // PredVar name
    std::vector<int> pred_uids; // PredVar op arguments
    AttrAtom attr;
    int nn_uid = -1;  // NotNull

    static GPtr mk_const(bool b);
    static GPtr mk_and(std::vector<GPtr> kids);
    static GPtr mk_or(std::vector<GPtr> kids);
    static GPtr mk_not(GPtr kid);
    static GPtr mk_node_exists(int node);
    static GPtr mk_strict_before(int a, int b, std::string label, bool asserted);
    static GPtr mk_attr(AttrAtom a);
};

struct GroundCtx {
    NodeTable nodes;
    const Domains* domains = nullptr;

    // Interface verification renames interface events into the implementation
    // node space; mappings may point at a child instance's events.
    struct EventTarget {
        std::string owner_path;
        std::string event;
        int event_index;
    };
    std::map<std::string, EventTarget> event_map;
    bool use_event_map = false;

    std::vector<std::pair<int, int>> merge_pairs;  // from resolve_node_terms
};

// Pipeline step 3: quantifier elimination over `scope`'s operations (or the
// instances named by connection-axiom domains), with concrete predicates
// evaluated in place.
GPtr ground(const AxiomAst& axiom, const ModuleInstance& scope, GroundCtx& ctx);

// Exposed for tests: grounds one predicate application.
GPtr predicate_ground(const std::string& pred, const std::vector<const Operation*>& args,
                      GroundCtx& ctx);

// Lowers SameNode literals to existence biconditional + two weak edges.
GPtr resolve_node_terms(const GPtr& f, GroundCtx& ctx);

// Negation-normal form; flattens nested conjunctions/disjunctions and, when
// `fold` is set, eliminates constants.
GPtr normalize(const GPtr& f, bool fold = true);

// Model access for evaluation; strict_before must follow the timestamp
// definition (both exist and ts(a) < ts(b)).
struct ModelView {
    std::function<bool(int)> node_exists;
    std::function<bool(int, int)> strict_before;
    std::function<bool(const std::string&, const std::vector<int>&)> predvar;
    std::function<bool(int)> notnull;
    std::function<long(int, AttrField)> attr_value;  // domain value codes

    bool eval_attr(const AttrAtom& a) const;
    bool eval_lit(const GNode& lit) const;
};

bool eval_ground(const GPtr& f, const ModelView& m);

struct WitnessEdge {
    int src, dst;
    std::string label;
};

// Walks only satisfied branches of the grounded (pre-lowering) tree and
// collects AddEdge assertions and SameNode merges that hold in the model.
void collect_witness(const GPtr& f, const ModelView& m, std::vector<WitnessEdge>& edges,
                     std::vector<std::pair<int, int>>& merges);

}  // namespace modcheck
