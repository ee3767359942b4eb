#include "modcheck/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>
#include <map>
#include <sstream>

namespace modcheck {

namespace {

std::string field_tag(AttrField f) {
    switch (f) {
        case AttrField::Kind: return "k";
        case AttrField::Addr: return "a";
        case AttrField::Data: return "d";
        case AttrField::Order: return "o";
    }
    return "?";
}

std::string attr_name(int uid, AttrField f) {
    return "at_" + std::to_string(uid) + "_" + field_tag(f);
}

std::string pred_name(const std::string& pred, const std::vector<int>& uids) {
    std::string n = "p_" + pred;
    for (int u : uids) n += "_" + std::to_string(u);
    return n;
}

void emit_formula(std::ostream& os, const GPtr& f) {
    switch (f->kind) {
        case GKind::And:
        case GKind::Or: {
            os << (f->kind == GKind::And ? "(and" : "(or");
            for (auto& k : f->kids) {
                os << " ";
                emit_formula(os, k);
            }
            os << ")";
            return;
        }
        case GKind::Not:
            os << "(not ";
            emit_formula(os, f->kids[0]);
            os << ")";
            return;
        case GKind::Lit:
            break;
    }
    switch (f->lit) {
        case LKind::Const:
            os << (f->bval ? "true" : "false");
            return;
        case LKind::NodeExists:
            os << "e_" << f->node_a;
            return;
        case LKind::StrictBefore:
            os << "(and e_" << f->node_a << " e_" << f->node_b << " (< ts_" << f->node_a
               << " ts_" << f->node_b << "))";
            return;
        case LKind::PredVar:
            os << pred_name(f->pred, f->pred_uids);
            return;
        case LKind::NotNull:
            os << "nn_" << f->nn_uid;
            return;
        case LKind::SameNodeRaw:
            os << "(and (= e_" << f->node_a << " e_" << f->node_b << ") (=> (and e_" << f->node_a
               << " e_" << f->node_b << ") (= ts_" << f->node_a << " ts_" << f->node_b << ")))";
            return;
        case LKind::Attr: {
            const AttrAtom& a = f->attr;
            switch (a.rel) {
                case AttrRel::EqVarConst:
                    os << "(= " << attr_name(a.op_a, a.field_a) << " " << a.value << ")";
                    return;
                case AttrRel::InSet: {
                    os << "(or";
                    for (int v : a.set_values)
                        os << " (= " << attr_name(a.op_a, a.field_a) << " " << v << ")";
                    os << ")";
                    return;
                }
                case AttrRel::EqVarVar:
                    os << "(= " << attr_name(a.op_a, a.field_a) << " "
                       << attr_name(a.op_b, a.field_b) << ")";
                    return;
                case AttrRel::LtVarVar:
                    os << "(< " << attr_name(a.op_a, a.field_a) << " "
                       << attr_name(a.op_b, a.field_b) << ")";
                    return;
            }
        }
    }
}

}  // namespace

std::string emit_smtlib(const GPtr& formula, const NodeTable& nodes, const Domains& domains,
                        const std::vector<SymOpRef>& sym_ops) {
    std::ostringstream os;
    os << "(set-logic QF_LIA)\n";
    for (size_t i = 0; i < nodes.size(); i++) {
        const NodeInfo& n = nodes.info((int)i);
        os << "; node " << i << " = op" << n.op_uid << " " << n.owner_path << ":" << n.event
           << "\n";
        os << "(declare-const e_" << i << " Bool)\n";
        os << "(declare-const ts_" << i << " Int)\n";
    }
    for (auto& s : sym_ops) {
        os << "(declare-const nn_" << s.uid << " Bool)\n";
        for (AttrField f :
             {AttrField::Kind, AttrField::Addr, AttrField::Data, AttrField::Order}) {
            std::string v = attr_name(s.uid, f);
            os << "(declare-const " << v << " Int)\n";
            if (f == AttrField::Kind) {
                os << "(assert (or";
                for (int c : domains.kinds_of(s.module_name)) os << " (= " << v << " " << c << ")";
                os << "))\n";
            } else {
                long hi = f == AttrField::Addr   ? (long)domains.addrs.size()
                          : f == AttrField::Data ? (long)domains.data.size()
                                                 : domains.bound;
                os << "(assert (and (<= 0 " << v << ") (< " << v << " " << hi << ")))\n";
            }
        }
    }
    // free predicate variables
    std::map<std::string, bool> preds;
    std::function<void(const GPtr&)> scan = [&](const GPtr& f) {
        if (f->kind == GKind::Lit) {
            if (f->lit == LKind::PredVar) preds[pred_name(f->pred, f->pred_uids)] = true;
            return;
        }
        for (auto& k : f->kids) scan(k);
    };
    scan(formula);
    for (auto& [name, _] : preds) os << "(declare-const " << name << " Bool)\n";
    // null operations have no nodes
    std::map<int, bool> is_sym;
    for (auto& s : sym_ops) is_sym[s.uid] = true;
    for (size_t i = 0; i < nodes.size(); i++) {
        int uid = nodes.info((int)i).op_uid;
        if (is_sym.count(uid))
            os << "(assert (=> (not nn_" << uid << ") (not e_" << i << ")))\n";
    }
    os << "(assert ";
    emit_formula(os, formula);
    os << ")\n(check-sat)\n(get-model)\n";
    return os.str();
}

namespace {

std::vector<std::string> tokenize_sexpr(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (char c : text) {
        if (c == '(' || c == ')') {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
            toks.push_back(std::string(1, c));
        } else if (std::isspace((unsigned char)c)) {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

struct ChildResult {
    int exit_code = -1;
    int signal = 0;
    bool timed_out = false;
    std::string out, err;
};

ChildResult run_child(const std::vector<std::string>& argv, const std::string& input,
                      double timeout_sec) {
    ChildResult res;
    char tmpl[] = "/tmp/modcheck_smt_XXXXXX";
    int in_fd = mkstemp(tmpl);
    if (in_fd < 0) throw std::runtime_error("mkstemp failed");
    std::string tmp_path = tmpl;
    if (write(in_fd, input.data(), input.size()) != (ssize_t)input.size()) {
        close(in_fd);
        unlink(tmp_path.c_str());
        throw std::runtime_error("failed to write solver input");
    }
    lseek(in_fd, 0, SEEK_SET);

    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) throw std::runtime_error("pipe failed");
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        dup2(in_fd, 0);
        dup2(out_pipe[1], 1);
        dup2(err_pipe[1], 2);
        close(out_pipe[0]);
        close(err_pipe[0]);
        std::vector<char*> args;
        for (auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(in_fd);
    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::milliseconds((long)(timeout_sec > 0 ? timeout_sec * 1000 : 0));
    bool out_open = true, err_open = true;
    char buf[4096];
    while (out_open || err_open) {
        struct pollfd fds[2];
        int nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
        int wait_ms = -1;
        if (timeout_sec > 0) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
            if (left <= 0) {
                res.timed_out = true;
                kill(pid, SIGKILL);
                break;
            }
            wait_ms = (int)left;
        }
        int rv = poll(fds, nfds, wait_ms);
        if (rv == 0) continue;  // re-check deadline
        for (int i = 0; i < nfds; i++) {
            if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
            ssize_t n = read(fds[i].fd, buf, sizeof buf);
            bool is_out = fds[i].fd == out_pipe[0];
            if (n > 0) {
                (is_out ? res.out : res.err).append(buf, n);
            } else if (n == 0 || (n < 0 && errno != EAGAIN)) {
                if (is_out)
                    out_open = false;
                else
                    err_open = false;
            }
        }
    }
    close(out_pipe[0]);
    close(err_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    unlink(tmp_path.c_str());
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) res.signal = WTERMSIG(status);
    return res;
}

}  // namespace

SolveResult run_external(const std::string& smt_text, const std::string& solver_command,
                         const NodeTable& nodes, const Domains& domains,
                         const std::vector<SymOpRef>& sym_ops, double timeout_sec) {
    SolveResult result;
    std::vector<std::string> argv;
    std::istringstream cs(solver_command);
    std::string w;
    while (cs >> w) argv.push_back(w);
    if (argv.empty()) {
        result.reason = "empty solver command";
        return result;
    }
    ChildResult child;
    try {
        child = run_child(argv, smt_text, timeout_sec);
    } catch (const std::exception& e) {
        result.reason = e.what();
        return result;
    }
    if (child.timed_out) {
        result.reason = "timeout";
        return result;
    }
    if (child.signal != 0) {
        result.reason = "solver killed by signal " + std::to_string(child.signal);
        return result;
    }
    std::istringstream out(child.out);
    std::string verdict;
    std::getline(out, verdict);
    while (!verdict.empty() && std::isspace((unsigned char)verdict.back())) verdict.pop_back();
    if (verdict == "unsat") {
        result.status = SolveStatus::Unsat;
        return result;
    }
    if (verdict != "sat") {
        result.reason = verdict.empty() ? ("solver produced no verdict; stderr: " + child.err)
                                        : ("solver said '" + verdict + "'");
        return result;
    }
    // parse (define-fun <name> () <Type> <value>) entries
    std::string rest((std::istreambuf_iterator<char>(out)), std::istreambuf_iterator<char>());
    auto toks = tokenize_sexpr(rest);
    std::map<std::string, std::string> values;
    for (size_t i = 0; i < toks.size(); i++) {
        if (toks[i] != "define-fun" || i + 4 >= toks.size()) continue;
        std::string name = toks[i + 1];
        size_t j = i + 2;
        if (toks[j] == "(" && j + 1 < toks.size() && toks[j + 1] == ")") j += 2;
        j++;  // skip the sort
        if (j >= toks.size()) continue;
        std::string val = toks[j];
        if (val == "(") {  // (- 3)
            std::string s;
            j++;
            while (j < toks.size() && toks[j] != ")") s += toks[j++];
            val = s;
        }
        values[name] = val;
    }
    SolverVarMap m;
    m.node_exists.assign(nodes.size(), 0);
    m.timestamps.assign(nodes.size(), 0);
    auto get = [&](const std::string& name, const std::string& dflt) {
        auto it = values.find(name);
        return it == values.end() ? dflt : it->second;
    };
    try {
        for (size_t i = 0; i < nodes.size(); i++) {
            m.node_exists[i] = get("e_" + std::to_string(i), "false") == "true";
            m.timestamps[i] = std::stol(get("ts_" + std::to_string(i), "0"));
        }
        for (auto& s : sym_ops) {
            m.notnull[s.uid] = get("nn_" + std::to_string(s.uid), "false") == "true";
            for (AttrField f :
                 {AttrField::Kind, AttrField::Addr, AttrField::Data, AttrField::Order}) {
                std::string dflt = f == AttrField::Kind
                                       ? std::to_string(domains.kinds_of(s.module_name)[0])
                                       : "0";
                m.attrs[{s.uid, (int)f}] = std::stol(get(attr_name(s.uid, f), dflt));
            }
        }
        for (auto& [name, val] : values) {
            if (name.rfind("p_", 0) != 0) continue;
            // p_<pred>_<uid>_<uid>...
            std::vector<std::string> parts;
            std::string cur;
            for (char c : name.substr(2)) {
                if (c == '_') {
                    parts.push_back(cur);
                    cur.clear();
                } else
                    cur += c;
            }
            parts.push_back(cur);
            std::vector<int> uids;
            std::string pred = parts[0];
            for (size_t i = 1; i < parts.size(); i++) uids.push_back(std::stoi(parts[i]));
            m.predvars[{pred, uids}] = val == "true";
        }
    } catch (const std::exception&) {
        result.reason = "unparseable model";
        return result;
    }
    result.status = SolveStatus::Sat;
    result.model = std::move(m);
    return result;
}

}  // namespace modcheck
