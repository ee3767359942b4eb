#include "modcheck/litmus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace modcheck {

std::string FenceFlavor::to_string() const {
    std::string p, s;
    if (pred_r) p += "r";
    if (pred_w) p += "w";
    if (succ_r) s += "r";
    if (succ_w) s += "w";
    if (p == "rw") p = "rw";
    return p + "." + s;
}

std::optional<FenceFlavor> FenceFlavor::parse(const std::string& s) {
    if (s == "mfence") return FenceFlavor{true, true, true, true};
    auto dot = s.find('.');
    if (dot == std::string::npos) return std::nullopt;
    auto part = [](const std::string& t, bool& r, bool& w) {
        if (t == "r")
            r = true;
        else if (t == "w")
            w = true;
        else if (t == "rw")
            r = w = true;
        else
            return false;
        return true;
    };
    FenceFlavor f;
    if (!part(s.substr(0, dot), f.pred_r, f.pred_w)) return std::nullopt;
    if (!part(s.substr(dot + 1), f.succ_r, f.succ_w)) return std::nullopt;
    return f;
}

int LitmusTest::core_count() const {
    int n = 0;
    for (auto& i : instructions) n = std::max(n, i.core + 1);
    return n;
}

std::vector<std::string> LitmusTest::addresses() const {
    std::vector<std::string> out;
    for (auto& i : instructions)
        if (!i.address.empty() && std::find(out.begin(), out.end(), i.address) == out.end())
            out.push_back(i.address);
    return out;
}

std::vector<long> LitmusTest::data_values() const {
    std::set<long> vals{0};
    for (auto& i : instructions)
        if (i.kind != OpKind::Fence) vals.insert(i.data);
    return {vals.begin(), vals.end()};
}

std::vector<const LitmusInstruction*> LitmusTest::core(int c) const {
    std::vector<const LitmusInstruction*> out;
    for (auto& i : instructions)
        if (i.core == c) out.push_back(&i);
    return out;
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("litmus: " + msg, line, 1);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

}  // namespace

LitmusTest parse_litmus(const std::string& text) {
    LitmusTest test;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::map<int, int> next_po;
    std::set<std::string> ids;
    while (std::getline(is, line)) {
        lineno++;
        auto pct = line.find('%');
        if (pct != std::string::npos) line = line.substr(0, pct);
        auto words = split_ws(line);
        if (words.empty()) continue;
        if (!have_header) {
            if (words.size() != 6 || words[0] != "test" || words[2] != "mcm" ||
                words[4] != "expect")
                fail(lineno, "expected 'test <name> mcm <SC|TSO|RVWMO> expect "
                             "<forbidden|permitted>'");
            test.name = words[1];
            if (words[3] == "SC")
                test.mcm = Mcm::SC;
            else if (words[3] == "TSO")
                test.mcm = Mcm::TSO;
            else if (words[3] == "RVWMO")
                test.mcm = Mcm::RVWMO;
            else
                fail(lineno, "unknown MCM '" + words[3] + "'");
            if (words[5] == "forbidden")
                test.expected = Expectation::Forbidden;
            else if (words[5] == "permitted")
                test.expected = Expectation::Permitted;
            else
                fail(lineno, "unknown expectation '" + words[5] + "'");
            have_header = true;
            continue;
        }
        LitmusInstruction in;
        if (words[0].empty() || words[0].back() != ':')
            fail(lineno, "expected '<id>:' to start an instruction");
        in.id = words[0].substr(0, words[0].size() - 1);
        if (in.id.empty() || !ids.insert(in.id).second)
            fail(lineno, "duplicate or empty instruction id '" + in.id + "'");
        if (words.size() < 3) fail(lineno, "truncated instruction");
        try {
            in.core = std::stoi(words[1]);
        } catch (...) {
            fail(lineno, "bad core index '" + words[1] + "'");
        }
        if (in.core < 0) fail(lineno, "negative core index");
        const std::string& op = words[2];
        if (op == "R" || op == "W") {
            in.kind = op == "R" ? OpKind::Read : OpKind::Write;
            if (words.size() != 5) fail(lineno, "expected '<id>: <core> " + op + " <addr> <val>'");
            in.address = words[3];
            try {
                in.data = std::stol(words[4]);
            } catch (...) {
                fail(lineno, "bad data value '" + words[4] + "'");
            }
        } else if (op.size() >= 1 && op[0] == 'F') {
            in.kind = OpKind::Fence;
            std::string flavor = op.size() > 2 && op[1] == '.' ? op.substr(2) : "";
            if (op == "F") flavor = "rw.rw";
            auto f = FenceFlavor::parse(flavor);
            if (!f) fail(lineno, "unknown fence flavor '" + flavor + "'");
            in.flavor = *f;
            if (words.size() != 3) fail(lineno, "fences take no address or value");
        } else {
            fail(lineno, "unknown instruction kind '" + op + "'");
        }
        in.po_index = next_po[in.core]++;
        test.instructions.push_back(std::move(in));
    }
    if (!have_header) fail(lineno, "missing test header");
    // every read must be satisfiable by some same-address write or the initial 0
    for (auto& r : test.instructions) {
        if (r.kind != OpKind::Read || r.data == 0) continue;
        bool ok = false;
        for (auto& w : test.instructions)
            if (w.kind == OpKind::Write && w.address == r.address && w.data == r.data) ok = true;
        if (!ok)
            fail(0, "read '" + r.id + "' expects value " + std::to_string(r.data) +
                        " which no write to '" + r.address + "' produces");
    }
    return test;
}

std::string print_litmus(const LitmusTest& test) {
    std::ostringstream os;
    os << "test " << test.name << " mcm " << to_string(test.mcm) << " expect "
       << (test.expected == Expectation::Forbidden ? "forbidden" : "permitted") << "\n";
    for (auto& i : test.instructions) {
        os << i.id << ": " << i.core << " ";
        switch (i.kind) {
            case OpKind::Read:
                os << "R " << i.address << " " << i.data;
                break;
            case OpKind::Write:
                os << "W " << i.address << " " << i.data;
                break;
            case OpKind::Fence:
                os << "F." << i.flavor.to_string();
                break;
        }
        os << "\n";
    }
    return os.str();
}

std::vector<ReadFact> derived_read_facts(const LitmusTest& test) {
    std::vector<ReadFact> out;
    for (auto& i : test.instructions)
        if (i.kind == OpKind::Read) out.push_back({i.id, i.data == 0, i.data});
    return out;
}

std::string to_string(Mcm m) {
    switch (m) {
        case Mcm::SC: return "SC";
        case Mcm::TSO: return "TSO";
        case Mcm::RVWMO: return "RVWMO";
    }
    return "?";
}

std::string to_string(Expectation e) {
    return e == Expectation::Forbidden ? "forbidden" : "permitted";
}

}  // namespace modcheck
