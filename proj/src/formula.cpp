#include "modcheck/formula.hpp"

#include <algorithm>
#include <set>

namespace modcheck {

int NodeTable::intern(int op_uid, const std::string& owner_path, const std::string& event,
                      int event_index) {
    auto key = std::make_tuple(op_uid, owner_path + "\x1f" + event);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int idx = (int)infos_.size();
    infos_.push_back({op_uid, owner_path, event, event_index});
    index_.emplace(key, idx);
    return idx;
}

GPtr GNode::mk_const(bool b) {
    auto n = std::make_shared<GNode>();
    n->kind = GKind::Lit;
    n->lit = LKind::Const;
    n->bval = b;
    return n;
}

GPtr GNode::mk_and(std::vector<GPtr> kids) {
    if (kids.size() == 1) return kids[0];
    auto n = std::make_shared<GNode>();
    n->kind = GKind::And;
    n->kids = std::move(kids);
    return n;
}

GPtr GNode::mk_or(std::vector<GPtr> kids) {
    if (kids.size() == 1) return kids[0];
    auto n = std::make_shared<GNode>();
    n->kind = GKind::Or;
    n->kids = std::move(kids);
    return n;
}

GPtr GNode::mk_not(GPtr kid) {
    auto n = std::make_shared<GNode>();
    n->kind = GKind::Not;
    n->kids = {std::move(kid)};
    return n;
}

GPtr GNode::mk_node_exists(int node) {
    auto n = std::make_shared<GNode>();
    n->kind = GKind::Lit;
    n->lit = LKind::NodeExists;
    n->node_a = node;
    return n;
}

GPtr GNode::mk_strict_before(int a, int b, std::string label, bool asserted) {
    auto n = std::make_shared<GNode>();
    n->kind = GKind::Lit;
    n->lit = LKind::StrictBefore;
    n->node_a = a;
    n->node_b = b;
    n->label = std::move(label);
    n->asserted_edge = asserted;
    return n;
}

GPtr GNode::mk_attr(AttrAtom a) {
    auto n = std::make_shared<GNode>();
    n->kind = GKind::Lit;
    n->lit = LKind::Attr;
    n->attr = std::move(a);
    return n;
}

namespace {

struct Grounder {
    GroundCtx& ctx;
    const ModuleInstance& scope;
    std::map<std::string, const Operation*> env;

    GPtr run(const Formula& f) {
        switch (f.kind) {
            case FKind::Forall:
            case FKind::Exists: {
                auto ops = domain_ops(f);
                std::vector<GPtr> parts;
                for (const Operation* op : ops) {
                    env[f.var] = op;
                    GPtr body = run(*f.children[0]);
                    GPtr nn = ground_pred("IsNotNull", {op});
                    if (f.kind == FKind::Forall)
                        parts.push_back(GNode::mk_or({GNode::mk_not(nn), body}));
                    else
                        parts.push_back(GNode::mk_and({nn, body}));
                    env.erase(f.var);
                }
                if (parts.empty()) return GNode::mk_const(f.kind == FKind::Forall);
                return f.kind == FKind::Forall ? GNode::mk_and(std::move(parts))
                                               : GNode::mk_or(std::move(parts));
            }
            case FKind::And: {
                std::vector<GPtr> kids;
                for (auto& c : f.children) kids.push_back(run(*c));
                return GNode::mk_and(std::move(kids));
            }
            case FKind::Or: {
                std::vector<GPtr> kids;
                for (auto& c : f.children) kids.push_back(run(*c));
                return GNode::mk_or(std::move(kids));
            }
            case FKind::Not:
                return GNode::mk_not(run(*f.children[0]));
            case FKind::Implies:
                return GNode::mk_or({GNode::mk_not(run(*f.children[0])), run(*f.children[1])});
            case FKind::Iff: {
                GPtr a = run(*f.children[0]);
                GPtr b = run(*f.children[1]);
                return GNode::mk_and({GNode::mk_or({GNode::mk_not(a), b}),
                                      GNode::mk_or({GNode::mk_not(b), a})});
            }
            case FKind::Pred: {
                std::vector<const Operation*> args;
                for (auto& a : f.args) args.push_back(lookup(a));
                return ground_pred(f.pred, args);
            }
            case FKind::AddEdge:
            case FKind::EdgeExists: {
                std::vector<GPtr> kids;
                for (auto& e : f.edges) {
                    int s = resolve(e.src);
                    int d = resolve(e.dst);
                    kids.push_back(GNode::mk_node_exists(s));
                    kids.push_back(GNode::mk_node_exists(d));
                    kids.push_back(
                        GNode::mk_strict_before(s, d, e.label, f.kind == FKind::AddEdge));
                }
                return GNode::mk_and(std::move(kids));
            }
            case FKind::NodeExists: {
                std::vector<GPtr> kids;
                for (auto& nr : f.nodes) kids.push_back(GNode::mk_node_exists(resolve(nr)));
                return GNode::mk_and(std::move(kids));
            }
            case FKind::SameNode: {
                auto n = std::make_shared<GNode>();
                n->kind = GKind::Lit;
                n->lit = LKind::SameNodeRaw;
                n->node_a = resolve(f.sn_a);
                n->node_b = resolve(f.sn_b);
                return n;
            }
            case FKind::ParamEq: {
                auto it = scope.params.find(f.param_name);
                if (it == scope.params.end())
                    throw GroundError("instance '" + scope.path + "' has no parameter '" +
                                      f.param_name + "'");
                return GNode::mk_const(it->second == f.param_value);
            }
            case FKind::ConstTrue:
                return GNode::mk_const(true);
            case FKind::ConstFalse:
                return GNode::mk_const(false);
        }
        throw GroundError("unreachable formula kind");
    }

    std::vector<const Operation*> domain_ops(const Formula& f) {
        std::vector<const ModuleInstance*> insts;
        if (!f.has_domain) {
            insts.push_back(&scope);
        } else {
            for (auto& d : f.domain) {
                const ModuleInstance* m = d == "this" ? &scope : scope.find_child(d);
                if (!m) throw GroundError("unknown quantifier domain '" + d + "'");
                insts.push_back(m);
            }
        }
        std::vector<const Operation*> ops;
        for (auto* m : insts)
            for (auto& op : m->operations) ops.push_back(&op);
        return ops;
    }

    const Operation* lookup(const std::string& var) const {
        auto it = env.find(var);
        if (it == env.end()) throw GroundError("unbound variable '" + var + "'");
        return it->second;
    }

    int resolve(const NodeRef& nr) {
        const Operation* op = lookup(nr.op_var);
        if (ctx.use_event_map) {
            auto it = ctx.event_map.find(nr.event);
            if (it == ctx.event_map.end())
                throw GroundError("interface event '" + nr.event + "' has no node mapping");
            return ctx.nodes.intern(op->uid, it->second.owner_path, it->second.event,
                                    it->second.event_index);
        }
        const EventDecl* ev = op->owner->def->find_event(nr.event);
        if (!ev)
            throw GroundError("event '" + nr.event + "' is not declared in module '" +
                              op->owner->def->name + "'");
        return ctx.nodes.intern(op->uid, op->owner->path, ev->name, ev->index);
    }

    GPtr ground_pred(const std::string& pred, const std::vector<const Operation*>& args) {
        auto arity = [&](size_t n) {
            if (args.size() != n)
                throw GroundError("predicate '" + pred + "' applied to " +
                                  std::to_string(args.size()) + " arguments");
        };
        auto kind_test = [&](const Operation& op, auto&& concrete_test,
                             std::vector<int> sym_codes) -> GPtr {
            if (!op.symbolic()) return GNode::mk_const(concrete_test(*op.concrete));
            auto& dom_kinds = ctx.domains->kinds_of(op.owner->def->name);
            std::vector<int> present;
            for (int c : sym_codes)
                if (std::find(dom_kinds.begin(), dom_kinds.end(), c) != dom_kinds.end())
                    present.push_back(c);
            if (present.empty()) return GNode::mk_const(false);
            AttrAtom a;
            a.op_a = op.uid;
            a.field_a = AttrField::Kind;
            if (present.size() == 1) {
                a.rel = AttrRel::EqVarConst;
                a.value = present[0];
            } else {
                a.rel = AttrRel::InSet;
                a.set_values = present;
            }
            return GNode::mk_attr(a);
        };

        if (pred == "IsAnyRead") {
            arity(1);
            return kind_test(*args[0],
                             [](const LitmusInstruction& i) { return i.kind == OpKind::Read; },
                             {kind_code(OpKind::Read)});
        }
        if (pred == "IsAnyWrite") {
            arity(1);
            return kind_test(*args[0],
                             [](const LitmusInstruction& i) { return i.kind == OpKind::Write; },
                             {kind_code(OpKind::Write)});
        }
        if (pred == "IsAnyFence" || pred.rfind("FenceOrders", 0) == 0) {
            arity(1);
            bool pr = false, pw = false, sr = false, sw = false;
            if (pred == "FenceOrdersRR") pr = sr = true;
            if (pred == "FenceOrdersRW") pr = sw = true;
            if (pred == "FenceOrdersWR") pw = sr = true;
            if (pred == "FenceOrdersWW") pw = sw = true;
            auto matches = [&](const FenceFlavor& f) {
                if (pred == "IsAnyFence") return true;
                return (!pr || f.pred_r) && (!pw || f.pred_w) && (!sr || f.succ_r) &&
                       (!sw || f.succ_w);
            };
            std::vector<int> codes;
            for (size_t i = 0; i < fence_flavors().size(); i++)
                if (matches(fence_flavors()[i])) codes.push_back(2 + (int)i);
            return kind_test(*args[0],
                             [&](const LitmusInstruction& i) {
                                 return i.kind == OpKind::Fence && matches(i.flavor);
                             },
                             codes);
        }
        if (pred == "SameAddress" || pred == "SameData") {
            arity(2);
            bool addr = pred == "SameAddress";
            const Operation& x = *args[0];
            const Operation& y = *args[1];
            auto has = [&](const Operation& o) {
                return o.symbolic() || o.concrete->kind != OpKind::Fence;
            };
            if (!has(x) || !has(y)) return GNode::mk_const(false);
            auto const_val = [&](const Operation& o) -> long {
                if (addr) return ctx.domains->addr_id(o.concrete->address);
                return ctx.domains->data_id(o.concrete->data);
            };
            AttrField field = addr ? AttrField::Addr : AttrField::Data;
            if (!x.symbolic() && !y.symbolic()) return GNode::mk_const(const_val(x) == const_val(y));
            AttrAtom a;
            if (x.symbolic() && y.symbolic()) {
                a.rel = AttrRel::EqVarVar;
                a.op_a = std::min(x.uid, y.uid);
                a.op_b = std::max(x.uid, y.uid);
                a.field_a = a.field_b = field;
                if (a.op_a == a.op_b) return GNode::mk_const(true);
            } else {
                const Operation& sym = x.symbolic() ? x : y;
                const Operation& conc = x.symbolic() ? y : x;
                long v = const_val(conc);
                if (v < 0) return GNode::mk_const(false);
                a.rel = AttrRel::EqVarConst;
                a.op_a = sym.uid;
                a.field_a = field;
                a.value = v;
            }
            return GNode::mk_attr(a);
        }
        if (pred == "ProgramOrder") {
            arity(2);
            const Operation& x = *args[0];
            const Operation& y = *args[1];
            if (x.owner != y.owner) return GNode::mk_const(false);
            if (x.uid == y.uid) return GNode::mk_const(false);
            if (!x.symbolic() && !y.symbolic())
                return GNode::mk_const(x.concrete->po_index < y.concrete->po_index);
            if (x.symbolic() != y.symbolic())
                throw GroundError("mixed concrete/symbolic operations in one instance");
            AttrAtom a;
            a.rel = AttrRel::LtVarVar;
            a.op_a = x.uid;
            a.field_a = AttrField::Order;
            a.op_b = y.uid;
            a.field_b = AttrField::Order;
            return GNode::mk_attr(a);
        }
        if (pred == "DataFromInitialState") {
            arity(1);
            const Operation& x = *args[0];
            if (!x.symbolic())
                return GNode::mk_const(x.concrete->kind != OpKind::Fence && x.concrete->data == 0);
            AttrAtom a;
            a.rel = AttrRel::EqVarConst;
            a.op_a = x.uid;
            a.field_a = AttrField::Data;
            a.value = ctx.domains->data_id(0);
            return GNode::mk_attr(a);
        }
        if (pred == "IsNotNull") {
            arity(1);
            if (!args[0]->symbolic()) return GNode::mk_const(true);
            auto n = std::make_shared<GNode>();
            n->kind = GKind::Lit;
            n->lit = LKind::NotNull;
            n->nn_uid = args[0]->uid;
            return n;
        }
        if (pred == "Mapped") {
            arity(2);
            auto n = std::make_shared<GNode>();
            n->kind = GKind::Lit;
            n->lit = LKind::PredVar;
            n->pred = pred;
            n->pred_uids = {args[0]->uid, args[1]->uid};
            return n;
        }
        throw GroundError("unknown predicate '" + pred + "'");
    }
};

}  // namespace

GPtr ground(const AxiomAst& axiom, const ModuleInstance& scope, GroundCtx& ctx) {
    Grounder g{ctx, scope};
    return g.run(*axiom.body);
}

GPtr predicate_ground(const std::string& pred, const std::vector<const Operation*>& args,
                      GroundCtx& ctx) {
    static const ModuleInstance dummy;
    Grounder g{ctx, dummy};
    return g.ground_pred(pred, args);
}

GPtr resolve_node_terms(const GPtr& f, GroundCtx& ctx) {
    if (f->kind == GKind::Lit) {
        if (f->lit != LKind::SameNodeRaw) return f;
        int a = f->node_a, b = f->node_b;
        if (a == b) return GNode::mk_const(true);
        std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        if (std::find(ctx.merge_pairs.begin(), ctx.merge_pairs.end(), key) ==
            ctx.merge_pairs.end())
            ctx.merge_pairs.push_back(key);
        GPtr ne_a = GNode::mk_node_exists(a);
        GPtr ne_b = GNode::mk_node_exists(b);
        return GNode::mk_and({GNode::mk_or({GNode::mk_not(ne_a), ne_b}),
                              GNode::mk_or({GNode::mk_not(ne_b), ne_a}),
                              GNode::mk_not(GNode::mk_strict_before(b, a, "", false)),
                              GNode::mk_not(GNode::mk_strict_before(a, b, "", false))});
    }
    std::vector<GPtr> kids;
    bool changed = false;
    for (auto& k : f->kids) {
        GPtr nk = resolve_node_terms(k, ctx);
        changed |= nk != k;
        kids.push_back(std::move(nk));
    }
    if (!changed) return f;
    auto n = std::make_shared<GNode>(*f);
    n->kids = std::move(kids);
    return n;
}

namespace {

GPtr normalize_rec(const GPtr& f, bool neg, bool fold) {
    if (f->kind == GKind::Not) return normalize_rec(f->kids[0], !neg, fold);
    if (f->kind == GKind::Lit) {
        if (f->lit == LKind::Const && fold) return GNode::mk_const(f->bval != neg);
        if (f->lit == LKind::Const) {
            if (!neg) return f;
            return GNode::mk_const(!f->bval);
        }
        return neg ? GNode::mk_not(f) : f;
    }
    bool is_and = (f->kind == GKind::And) != neg;  // De Morgan
    std::vector<GPtr> kids;
    for (auto& k : f->kids) {
        GPtr nk = normalize_rec(k, neg, fold);
        if (nk->kind == GKind::Lit && nk->lit == LKind::Const && fold) {
            if (nk->bval == is_and) continue;     // neutral element
            return GNode::mk_const(!is_and);      // absorbing element
        }
        // flatten nested same-polarity nodes
        if ((nk->kind == GKind::And && is_and) || (nk->kind == GKind::Or && !is_and)) {
            for (auto& g : nk->kids) kids.push_back(g);
        } else {
            kids.push_back(std::move(nk));
        }
    }
    if (kids.empty()) return GNode::mk_const(is_and);
    if (kids.size() == 1) return kids[0];
    return is_and ? GNode::mk_and(std::move(kids)) : GNode::mk_or(std::move(kids));
}

}  // namespace

GPtr normalize(const GPtr& f, bool fold) { return normalize_rec(f, false, fold); }

bool ModelView::eval_attr(const AttrAtom& a) const {
    switch (a.rel) {
        case AttrRel::EqVarConst:
            return attr_value(a.op_a, a.field_a) == a.value;
        case AttrRel::InSet: {
            long v = attr_value(a.op_a, a.field_a);
            return std::find(a.set_values.begin(), a.set_values.end(), (int)v) !=
                   a.set_values.end();
        }
        case AttrRel::EqVarVar:
            return attr_value(a.op_a, a.field_a) == attr_value(a.op_b, a.field_b);
        case AttrRel::LtVarVar:
            return attr_value(a.op_a, a.field_a) < attr_value(a.op_b, a.field_b);
    }
    return false;
}

bool ModelView::eval_lit(const GNode& l) const {
    switch (l.lit) {
        case LKind::Const:
            return l.bval;
        case LKind::NodeExists:
            return node_exists(l.node_a);
        case LKind::StrictBefore:
            return strict_before(l.node_a, l.node_b);
        case LKind::PredVar:
            return predvar(l.pred, l.pred_uids);
        case LKind::NotNull:
            return notnull(l.nn_uid);
        case LKind::Attr:
            return eval_attr(l.attr);
        case LKind::SameNodeRaw:
            return node_exists(l.node_a) == node_exists(l.node_b) &&
                   !strict_before(l.node_a, l.node_b) && !strict_before(l.node_b, l.node_a);
    }
    return false;
}

bool eval_ground(const GPtr& f, const ModelView& m) {
    switch (f->kind) {
        case GKind::Lit:
            return m.eval_lit(*f);
        case GKind::Not:
            return !eval_ground(f->kids[0], m);
        case GKind::And:
            for (auto& k : f->kids)
                if (!eval_ground(k, m)) return false;
            return true;
        case GKind::Or:
            for (auto& k : f->kids)
                if (eval_ground(k, m)) return true;
            return false;
    }
    return false;
}

namespace {

void walk_witness(const GPtr& f, const ModelView& m, bool pos, std::vector<WitnessEdge>& edges,
                  std::vector<std::pair<int, int>>& merges) {
    switch (f->kind) {
        case GKind::Lit:
            if (!pos) return;
            if (f->lit == LKind::StrictBefore && f->asserted_edge && m.eval_lit(*f))
                edges.push_back({f->node_a, f->node_b, f->label});
            if (f->lit == LKind::SameNodeRaw && m.eval_lit(*f) && m.node_exists(f->node_a) &&
                f->node_a != f->node_b)
                merges.push_back({std::min(f->node_a, f->node_b), std::max(f->node_a, f->node_b)});
            return;
        case GKind::Not:
            walk_witness(f->kids[0], m, !pos, edges, merges);
            return;
        case GKind::And:
            if (pos) {
                for (auto& k : f->kids) walk_witness(k, m, pos, edges, merges);
            } else {
                // ~(a /\ b): descend the children that are actually false
                for (auto& k : f->kids)
                    if (!eval_ground(k, m)) walk_witness(k, m, pos, edges, merges);
            }
            return;
        case GKind::Or:
            if (pos) {
                for (auto& k : f->kids)
                    if (eval_ground(k, m)) walk_witness(k, m, pos, edges, merges);
            } else {
                for (auto& k : f->kids) walk_witness(k, m, pos, edges, merges);
            }
            return;
    }
}

}  // namespace

void collect_witness(const GPtr& f, const ModelView& m, std::vector<WitnessEdge>& edges,
                     std::vector<std::pair<int, int>>& merges) {
    walk_witness(f, m, true, edges, merges);
}

}  // namespace modcheck
