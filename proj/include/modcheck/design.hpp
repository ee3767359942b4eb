#pragma once

#include <string>
#include <vector>

#include "modcheck/elaborate.hpp"

namespace modcheck {

// A loaded design bundle: the root module plus every transitively referenced
// module type, resolved by filename convention <TypeName>.{mdef,uax,iface}.
struct Design {
    ModuleRegistry registry;
    std::string root;  // root module name
};

Design load_design(const std::string& root_mdef_path,
                   std::vector<std::string> include_dirs = {});

struct InterfacePair {
    std::string impl_path;       // instance path, root-relative
    std::string interface_name;  // interface module type
    // interface event -> implementation event reference ("Event" or "child.Event")
    std::vector<std::pair<std::string, std::string>> node_mappings;
};

InterfacePair parse_pair_file(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace modcheck
