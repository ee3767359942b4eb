#include "modcheck/elaborate.hpp"

#include <algorithm>
#include <set>

namespace modcheck {

void ModuleRegistry::add(ModuleDef def) {
    if (defs_.count(def.name)) throw ElabError("duplicate module definition '" + def.name + "'");
    defs_.emplace(def.name, std::move(def));
}

const ModuleDef* ModuleRegistry::find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

ModuleDef* ModuleRegistry::find_mutable(const std::string& name) {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

std::vector<std::string> ModuleRegistry::names() const {
    std::vector<std::string> out;
    for (auto& [k, v] : defs_) out.push_back(k);
    return out;
}

const std::vector<FenceFlavor>& fence_flavors() {
    static const std::vector<FenceFlavor> flavors = [] {
        std::vector<FenceFlavor> out;
        for (int p = 1; p < 4; p++)
            for (int s = 1; s < 4; s++)
                out.push_back(FenceFlavor{(p & 1) != 0, (p & 2) != 0, (s & 1) != 0, (s & 2) != 0});
        return out;
    }();
    return flavors;
}

int kind_code(OpKind k, const FenceFlavor& f) {
    if (k == OpKind::Read) return 0;
    if (k == OpKind::Write) return 1;
    auto& flavors = fence_flavors();
    for (size_t i = 0; i < flavors.size(); i++)
        if (flavors[i] == f) return 2 + (int)i;
    throw ElabError("unknown fence flavor");
}

const ModuleInstance* ModuleInstance::find_child(const std::string& inst_name) const {
    for (auto& c : children)
        if (c->name == inst_name) return c.get();
    return nullptr;
}

const ModuleInstance* ModuleInstance::find_path(const std::string& rel_path) const {
    if (rel_path.empty() || rel_path == name || rel_path == path) return this;
    const ModuleInstance* cur = this;
    size_t start = 0;
    // accept either root-relative ("c0") or full ("SimpleProc/c0") paths
    std::string p = rel_path;
    if (p.rfind(name + "/", 0) == 0) p = p.substr(name.size() + 1);
    while (start < p.size()) {
        size_t slash = p.find('/', start);
        std::string part = p.substr(start, slash == std::string::npos ? std::string::npos
                                                                      : slash - start);
        cur = cur->find_child(part);
        if (!cur) return nullptr;
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return cur;
}

void ModuleInstance::walk(const std::function<void(const ModuleInstance&)>& fn) const {
    fn(*this);
    for (auto& c : children) c->walk(fn);
}

namespace {

std::unique_ptr<ModuleInstance> instantiate(const std::string& type, const std::string& inst_name,
                                            const std::string& parent_path,
                                            const std::vector<ParamBinding>& params,
                                            const ModuleRegistry& reg,
                                            std::vector<std::string>& type_stack) {
    const ModuleDef* def = reg.find(type);
    if (!def) throw ElabError("unknown module type '" + type + "'");
    if (std::find(type_stack.begin(), type_stack.end(), type) != type_stack.end())
        throw ElabError("recursive instantiation of module type '" + type + "'");
    auto inst = std::make_unique<ModuleInstance>();
    inst->name = inst_name;
    inst->path = parent_path.empty() ? inst_name : parent_path + "/" + inst_name;
    inst->def = def;
    for (auto& p : params) inst->params[p.name] = p.value;
    type_stack.push_back(type);
    for (auto& sm : def->submodules)
        inst->children.push_back(
            instantiate(sm.type, sm.instance, inst->path, sm.params, reg, type_stack));
    type_stack.pop_back();
    return inst;
}

// All instantiations of one module type must bind the same parameter names.
void check_param_arity(const ModuleRegistry& reg) {
    std::map<std::string, std::set<std::string>> seen;
    for (auto& name : reg.names()) {
        const ModuleDef* def = reg.find(name);
        for (auto& sm : def->submodules) {
            std::set<std::string> keys;
            for (auto& p : sm.params) keys.insert(p.name);
            auto it = seen.find(sm.type);
            if (it == seen.end()) {
                seen.emplace(sm.type, std::move(keys));
            } else if (it->second != keys) {
                throw ElabError("parameter arity mismatch for instances of '" + sm.type + "'");
            }
        }
    }
}

const char* const kFencePreds[] = {"IsAnyFence", "FenceOrdersRR", "FenceOrdersRW",
                                   "FenceOrdersWR", "FenceOrdersWW"};

bool mentions_fence_pred(const Formula& f) {
    if (f.kind == FKind::Pred)
        for (auto* p : kFencePreds)
            if (f.pred == p) return true;
    for (auto& c : f.children)
        if (mentions_fence_pred(*c)) return true;
    return false;
}

bool module_mentions_fences(const ModuleDef& def) {
    for (auto& ax : def.axioms)
        if (mentions_fence_pred(*ax.body)) return true;
    for (auto& ax : def.connection_axioms)
        if (mentions_fence_pred(*ax.body)) return true;
    return false;
}

}  // namespace

std::unique_ptr<ModuleInstance> build_tree(const std::string& root_type,
                                           const ModuleRegistry& registry) {
    check_param_arity(registry);
    std::vector<std::string> stack;
    const ModuleDef* root = registry.find(root_type);
    if (!root) throw ElabError("unknown module type '" + root_type + "'");
    return instantiate(root_type, root->name, "", {}, registry, stack);
}

int Domains::addr_id(const std::string& a) const {
    for (size_t i = 0; i < addrs.size(); i++)
        if (addrs[i] == a) return (int)i;
    return -1;
}

int Domains::data_id(long v) const {
    for (size_t i = 0; i < data.size(); i++)
        if (data[i] == v) return (int)i;
    return -1;
}

const std::vector<int>& Domains::kinds_of(const std::string& module_name) const {
    auto it = kinds_by_module.find(module_name);
    if (it == kinds_by_module.end()) throw ElabError("no kind domain for '" + module_name + "'");
    return it->second;
}

Domains assign_operations(ModuleInstance& root, const AssignMode& mode) {
    if (mode.bound < 1) throw ElabError("bound must be at least 1");
    if (mode.kind == AssignMode::Litmus && !mode.test)
        throw ElabError("litmus mode requires a test");

    // Core instances are matched to test core indices sorted by the integer
    // parameter `c` when every core instance has one, else in tree order.
    std::vector<ModuleInstance*> cores;
    std::function<void(ModuleInstance&)> collect = [&](ModuleInstance& m) {
        if (m.def->is_core()) cores.push_back(&m);
        for (auto& c : m.children) collect(*c);
    };
    collect(root);
    bool all_have_c = !cores.empty();
    for (auto* c : cores)
        if (!c->params.count("c")) all_have_c = false;
    if (all_have_c)
        std::stable_sort(cores.begin(), cores.end(), [](auto* a, auto* b) {
            return a->params.at("c") < b->params.at("c");
        });

    if (mode.kind == AssignMode::Litmus) {
        int needed = mode.test->core_count();
        if (needed > (int)cores.size())
            throw ElabError("test uses " + std::to_string(needed) +
                            " cores but the design has only " + std::to_string(cores.size()) +
                            " IsCore instances");
    }

    int next_uid = 0;
    std::function<void(ModuleInstance&)> assign = [&](ModuleInstance& m) {
        m.operations.clear();
        bool is_core = m.def->is_core();
        bool none_type = m.def->operation_type == "none";
        if (!none_type) {
            if (mode.kind == AssignMode::Litmus && is_core) {
                auto it = std::find(cores.begin(), cores.end(), &m);
                int core_idx = (int)(it - cores.begin());
                for (auto* instr : mode.test->core(core_idx)) {
                    Operation op;
                    op.uid = next_uid++;
                    op.owner = &m;
                    op.op_type = m.def->operation_type;
                    op.concrete = *instr;
                    m.operations.push_back(std::move(op));
                }
            } else {
                for (int i = 0; i < mode.bound; i++) {
                    Operation op;
                    op.uid = next_uid++;
                    op.owner = &m;
                    op.op_type = m.def->operation_type;
                    op.sym_index = i;
                    m.operations.push_back(std::move(op));
                }
            }
        }
        for (auto& c : m.children) assign(*c);
    };
    assign(root);

    Domains dom;
    dom.bound = mode.bound;
    if (mode.kind == AssignMode::Litmus) {
        dom.addrs = mode.test->addresses();
        if (dom.addrs.empty()) dom.addrs.push_back("a0");
        dom.data = mode.test->data_values();
        dom.data.push_back(dom.data.back() + 1);  // one fresh value
    } else {
        for (int i = 0; i < mode.interface_addr_count; i++)
            dom.addrs.push_back("a" + std::to_string(i));
        for (long v = 0; v <= mode.interface_data_max; v++) dom.data.push_back(v);
    }
    root.walk([&](const ModuleInstance& m) {
        if (dom.kinds_by_module.count(m.def->name)) return;
        std::vector<int> kinds{kind_code(OpKind::Read), kind_code(OpKind::Write)};
        if (module_mentions_fences(*m.def))
            for (size_t i = 0; i < fence_flavors().size(); i++) kinds.push_back(2 + (int)i);
        dom.kinds_by_module.emplace(m.def->name, std::move(kinds));
    });
    return dom;
}

std::string Diagnostic::to_string() const {
    std::string out = module;
    if (!axiom.empty()) out += "/" + axiom;
    return out + ": " + message;
}

namespace {

struct PredSig {
    int arity;
};

const std::map<std::string, PredSig>& predicate_vocabulary() {
    static const std::map<std::string, PredSig> vocab = {
        {"IsAnyRead", {1}},       {"IsAnyWrite", {1}},
        {"IsAnyFence", {1}},      {"FenceOrdersRR", {1}},
        {"FenceOrdersRW", {1}},   {"FenceOrdersWR", {1}},
        {"FenceOrdersWW", {1}},   {"SameAddress", {2}},
        {"SameData", {2}},        {"ProgramOrder", {2}},
        {"DataFromInitialState", {1}}, {"IsNotNull", {1}},
        {"Mapped", {2}},
    };
    return vocab;
}

struct ScopeChecker {
    const ModuleDef& def;
    const ModuleInstance& inst;  // representative instance (for child defs)
    std::vector<Diagnostic>& out;
    const std::string* axiom_name = nullptr;

    // variable -> module defs its domain ranges over
    std::map<std::string, std::vector<const ModuleDef*>> bound;

    void report(const std::string& msg) {
        out.push_back({def.name, axiom_name ? *axiom_name : "", msg});
    }

    void check_axiom(const AxiomAst& ax, bool connection) {
        axiom_name = &ax.name;
        bound.clear();
        visit(*ax.body, connection);
    }

    void check_node_ref(const NodeRef& nr, bool connection) {
        auto it = bound.find(nr.op_var);
        if (it == bound.end()) {
            report("unbound operation variable '" + nr.op_var + "'");
            return;
        }
        for (const ModuleDef* target : it->second) {
            const EventDecl* ev = target->find_event(nr.event);
            if (!ev) {
                report("event '" + nr.event + "' is not declared in module '" + target->name +
                       "'");
            } else if (connection && target != &def && !ev->external) {
                report("event '" + nr.event + "' of submodule type '" + target->name +
                       "' is internal and not visible to connection axioms");
            }
        }
    }

    void visit(const Formula& f, bool connection) {
        switch (f.kind) {
            case FKind::Forall:
            case FKind::Exists: {
                if (bound.count(f.var))
                    report("quantifier rebinds variable '" + f.var + "'");
                std::vector<const ModuleDef*> targets;
                if (!connection) {
                    if (f.has_domain) {
                        report("implementation axioms quantify over their own operations; "
                               "no domain list is allowed");
                    }
                    if (def.operation_type == "none")
                        report("module with operation type 'none' cannot quantify over "
                               "operations");
                    else if (f.quant_type != def.operation_type)
                        report("quantifier type '" + f.quant_type + "' does not match module "
                               "operation type '" + def.operation_type + "'");
                    targets.push_back(&def);
                } else {
                    if (!f.has_domain) {
                        report("connection axiom quantifier must name its domain "
                               "(submodule instances or 'this')");
                        targets.push_back(&def);
                    } else {
                        for (auto& d : f.domain) {
                            const ModuleDef* target = nullptr;
                            if (d == "this") {
                                target = &def;
                            } else if (const ModuleInstance* c = inst.find_child(d)) {
                                target = c->def;
                            } else {
                                report("quantifier domain '" + d +
                                       "' is neither 'this' nor a submodule instance");
                                continue;
                            }
                            if (target->operation_type == "none")
                                report("quantifier domain '" + d +
                                       "' has operation type 'none'");
                            else if (target->operation_type != f.quant_type)
                                report("quantifier type '" + f.quant_type + "' does not match "
                                       "operation type '" + target->operation_type + "' of "
                                       "domain '" + d + "'");
                            targets.push_back(target);
                        }
                    }
                }
                bound[f.var] = targets;
                visit(*f.children[0], connection);
                bound.erase(f.var);
                break;
            }
            case FKind::Pred: {
                auto& vocab = predicate_vocabulary();
                auto it = vocab.find(f.pred);
                if (it == vocab.end()) {
                    report("unknown predicate '" + f.pred + "'");
                } else if ((int)f.args.size() != it->second.arity) {
                    report("predicate '" + f.pred + "' expects " +
                           std::to_string(it->second.arity) + " arguments");
                }
                for (auto& a : f.args)
                    if (!bound.count(a)) report("unbound operation variable '" + a + "'");
                break;
            }
            case FKind::AddEdge:
            case FKind::EdgeExists:
                for (auto& e : f.edges) {
                    check_node_ref(e.src, connection);
                    check_node_ref(e.dst, connection);
                }
                break;
            case FKind::NodeExists:
                for (auto& n : f.nodes) check_node_ref(n, connection);
                break;
            case FKind::SameNode:
                check_node_ref(f.sn_a, connection);
                check_node_ref(f.sn_b, connection);
                break;
            case FKind::ParamEq:
                break;
            default:
                for (auto& c : f.children) visit(*c, connection);
                break;
        }
    }
};

}  // namespace

std::vector<Diagnostic> check_scopes(const ModuleInstance& root) {
    std::vector<Diagnostic> out;
    std::set<std::string> checked;
    root.walk([&](const ModuleInstance& m) {
        if (!checked.insert(m.def->name).second) return;
        ScopeChecker checker{*m.def, m, out};
        for (auto& ax : m.def->axioms) checker.check_axiom(ax, false);
        for (auto& ax : m.def->connection_axioms) checker.check_axiom(ax, true);
    });
    return out;
}

}  // namespace modcheck
