#include "modcheck/design.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "modcheck/parser.hpp"

namespace fs = std::filesystem;

namespace modcheck {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ElabError("cannot open file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

std::string find_in_dirs(const std::vector<std::string>& dirs, const std::string& filename) {
    for (auto& d : dirs) {
        fs::path p = fs::path(d) / filename;
        if (fs::exists(p)) return p.string();
    }
    return "";
}

void attach_axiom_file(ModuleDef& def, const std::string& path) {
    auto [module_type, events, axioms] = parse_axiom_file(read_file(path));
    if (module_type != def.name)
        throw ElabError("axiom file '" + path + "' declares ModuleID '" + module_type +
                        "' but was loaded for module '" + def.name + "'");
    def.events = std::move(events);
    def.axioms = std::move(axioms);
}

}  // namespace

Design load_design(const std::string& root_mdef_path, std::vector<std::string> include_dirs) {
    Design design;
    fs::path root_path(root_mdef_path);
    std::vector<std::string> dirs = include_dirs;
    dirs.push_back(root_path.has_parent_path() ? root_path.parent_path().string() : ".");

    ModuleDef root = parse_module_definition(read_file(root_mdef_path));
    design.root = root.name;
    std::string root_uax = find_in_dirs(dirs, root.name + ".uax");
    if (!root_uax.empty()) attach_axiom_file(root, root_uax);

    std::vector<std::string> pending;
    for (auto& sm : root.submodules) pending.push_back(sm.type);
    design.registry.add(std::move(root));

    std::set<std::string> done{design.root};
    while (!pending.empty()) {
        std::string type = pending.back();
        pending.pop_back();
        if (!done.insert(type).second) continue;
        std::string mdef_path = find_in_dirs(dirs, type + ".mdef");
        if (mdef_path.empty())
            throw ElabError("module type '" + type + "' not found (looked for '" + type +
                            ".mdef' in the include path)");
        ModuleDef def = parse_module_definition(read_file(mdef_path));
        if (def.name != type)
            throw ElabError("file '" + mdef_path + "' defines module '" + def.name +
                            "', expected '" + type + "'");
        std::string uax = find_in_dirs(dirs, type + ".uax");
        std::string iface = find_in_dirs(dirs, type + ".iface");
        if (def.is_interface) {
            if (!uax.empty())
                throw ElabError("interface '" + type + "' has an implementation axiom file '" +
                                uax + "'; interfaces use .iface files");
            if (!iface.empty()) attach_axiom_file(def, iface);
        } else {
            if (!iface.empty() && uax.empty())
                throw ElabError("module '" + type + "' has an interface axiom file '" + iface +
                                "' but is not declared as an Interface");
            if (!uax.empty()) attach_axiom_file(def, uax);
        }
        for (auto& sm : def.submodules) pending.push_back(sm.type);
        design.registry.add(std::move(def));
    }
    return design;
}

InterfacePair parse_pair_file(const std::string& text) {
    InterfacePair pair;
    // statements: Implementation "path". Interface "Name". MapNode "ev" "ref".
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto strings_of = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        bool in_str = false;
        for (char c : s) {
            if (c == '"') {
                if (in_str) out.push_back(cur);
                cur.clear();
                in_str = !in_str;
            } else if (in_str) {
                cur += c;
            }
        }
        return out;
    };
    while (std::getline(is, line)) {
        lineno++;
        auto pct = line.find('%');
        if (pct != std::string::npos) line = line.substr(0, pct);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto args = strings_of(line);
        if (kw == "Implementation") {
            if (args.size() != 1) throw ParseError("Implementation takes one string", lineno, 1);
            pair.impl_path = args[0];
        } else if (kw == "Interface") {
            if (args.size() != 1) throw ParseError("Interface takes one string", lineno, 1);
            pair.interface_name = args[0];
        } else if (kw == "MapNode") {
            if (args.size() != 2) throw ParseError("MapNode takes two strings", lineno, 1);
            pair.node_mappings.emplace_back(args[0], args[1]);
        } else {
            throw ParseError("unknown pair-file statement '" + kw + "'", lineno, 1);
        }
    }
    if (pair.impl_path.empty() || pair.interface_name.empty())
        throw ParseError("pair file must name an Implementation and an Interface", lineno, 1);
    return pair;
}

}  // namespace modcheck
