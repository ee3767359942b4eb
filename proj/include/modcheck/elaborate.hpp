#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modcheck/litmus.hpp"

namespace modcheck {

struct ElabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ModuleRegistry {
  public:
    void add(ModuleDef def);
    const ModuleDef* find(const std::string& name) const;
    ModuleDef* find_mutable(const std::string& name);
    std::vector<std::string> names() const;

  private:
    std::map<std::string, ModuleDef> defs_;
};

struct ModuleInstance;

// Operation kind codes shared with the formula layer:
// 0 = Read, 1 = Write, 2+i = fence_flavors()[i].
const std::vector<FenceFlavor>& fence_flavors();
int kind_code(OpKind k, const FenceFlavor& f = {});

struct Operation {
    int uid = -1;
    const ModuleInstance* owner = nullptr;
    std::string op_type;
    std::optional<LitmusInstruction> concrete;
    int sym_index = -1;  // order of this symbolic op within its instance

    bool symbolic() const { return !concrete.has_value(); }
};

struct ModuleInstance {
    std::string path;  // slash-separated from root, e.g. "SimpleProc/c0"
    std::string name;  // instance name ("c0"); root uses the module name
    const ModuleDef* def = nullptr;
    std::map<std::string, long> params;
    std::vector<std::unique_ptr<ModuleInstance>> children;
    std::vector<Operation> operations;

    const ModuleInstance* find_child(const std::string& inst_name) const;
    const ModuleInstance* find_path(const std::string& rel_path) const;
    void walk(const std::function<void(const ModuleInstance&)>& fn) const;
};

std::unique_ptr<ModuleInstance> build_tree(const std::string& root_type,
                                           const ModuleRegistry& registry);

// Finite attribute domains for symbolic operations, shared by one query.
struct Domains {
    std::vector<std::string> addrs;
    std::vector<long> data;
    int bound = 0;
    std::map<std::string, std::vector<int>> kinds_by_module;  // def name -> kind codes

    int addr_id(const std::string& a) const;
    int data_id(long v) const;
    const std::vector<int>& kinds_of(const std::string& module_name) const;
};

struct AssignMode {
    enum Kind { Litmus, Interface } kind = Litmus;
    const LitmusTest* test = nullptr;  // Litmus mode
    int bound = 0;
    int interface_addr_count = 2;  // Interface mode domain sizes
    int interface_data_max = 2;
};

// Pipeline step 2: assigns concrete instructions to cores (litmus mode) and
// `bound` symbolic operations to every other non-`none` instance. Returns the
// attribute domains derived from the inputs.
Domains assign_operations(ModuleInstance& root, const AssignMode& mode);

struct Diagnostic {
    std::string module;  // module definition name
    std::string axiom;   // axiom name, empty for module-level problems
    std::string message;

    std::string to_string() const;
};

// Visibility and typing rules for every module definition reachable from
// the tree. Empty result means the design is well-scoped.
std::vector<Diagnostic> check_scopes(const ModuleInstance& root);

}  // namespace modcheck
