#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modcheck/parser.hpp"

namespace modcheck {

enum class OpKind { Read, Write, Fence };

// Fence ordering bits: which earlier accesses are ordered against which
// later accesses. "rw.rw" orders everything (x86 mfence maps to it).
struct FenceFlavor {
    bool pred_r = false, pred_w = false;
    bool succ_r = false, succ_w = false;

    bool operator==(const FenceFlavor&) const = default;
    std::string to_string() const;
    static std::optional<FenceFlavor> parse(const std::string& s);
};

struct LitmusInstruction {
    std::string id;    // label, e.g. i1
    int core = 0;      // core index
    int po_index = 0;  // position within its core
    OpKind kind = OpKind::Read;
    std::string address;  // empty for fences
    long data = 0;        // stored value (W) / required value (R)
    FenceFlavor flavor;   // fences only
};

enum class Mcm { SC, TSO, RVWMO };
enum class Expectation { Forbidden, Permitted };

struct LitmusTest {
    std::string name;
    Mcm mcm = Mcm::SC;
    Expectation expected = Expectation::Forbidden;
    std::vector<LitmusInstruction> instructions;

    int core_count() const;
    std::vector<std::string> addresses() const;       // in first-use order
    std::vector<long> data_values() const;            // sorted unique, always contains 0
    std::vector<const LitmusInstruction*> core(int c) const;
};

struct ReadFact {
    std::string id;
    bool from_initial = false;
    long data = 0;
};

LitmusTest parse_litmus(const std::string& text);
std::string print_litmus(const LitmusTest& test);

// Grounding source for DataFromInitialState: from_initial iff data == 0.
std::vector<ReadFact> derived_read_facts(const LitmusTest& test);

std::string to_string(Mcm m);
std::string to_string(Expectation e);

}  // namespace modcheck
