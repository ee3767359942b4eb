#include "modcheck/solver.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <deque>
#include <set>

namespace modcheck {

ModelView SolverVarMap::view() const {
    ModelView v;
    auto exists = [this](int n) {
        return n >= 0 && n < (int)node_exists.size() && node_exists[n] != 0;
    };
    v.node_exists = exists;
    v.strict_before = [this, exists](int a, int b) {
        return exists(a) && exists(b) && timestamps[a] < timestamps[b];
    };
    v.predvar = [this](const std::string& name, const std::vector<int>& uids) {
        auto it = predvars.find({name, uids});
        return it != predvars.end() && it->second;
    };
    v.notnull = [this](int uid) {
        auto it = notnull.find(uid);
        return it == notnull.end() ? true : it->second;  // concrete ops are non-null
    };
    v.attr_value = [this](int uid, AttrField f) -> long {
        auto it = attrs.find({uid, (int)f});
        return it == attrs.end() ? -1 : it->second;
    };
    return v;
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kNoReason = -1;

inline int mk_lit(int var, bool neg) { return var * 2 + (neg ? 1 : 0); }
inline int lit_var(int lit) { return lit >> 1; }
inline bool lit_neg(int lit) { return lit & 1; }
inline int lit_not(int lit) { return lit ^ 1; }

struct Clause {
    std::vector<int> lits;
    bool learnt = false;
};

struct TEdge {
    int from, to;
    bool strict;  // strict: true atom (a->b); weak: false atom (b->a)
    int atom;
    bool active = false;
};

struct SbAtom {
    int var;
    int a, b;  // StrictBefore(a, b)
    int strict_edge, weak_edge;
};

// conflict budget growth follows the Luby sequence (x is 0-indexed)
long luby(long x) {
    long size = 1, seq = 0;
    while (size < x + 1) {
        seq++;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        seq--;
        x = x % size;
    }
    return 1L << seq;
}

class Cdcl {
  public:
    Cdcl(const NodeTable& nodes, const Domains& domains, const std::vector<SymOpRef>& sym_ops)
        : nodes_(nodes), domains_(domains), sym_ops_(sym_ops) {}

    void build(const GPtr& formula);
    SolveResult solve(const SolveLimits& limits);

  private:
    // ---- variables ----
    int new_var() {
        int v = nvars_++;
        assign_.push_back(0);
        level_.push_back(-1);
        reason_.push_back(kNoReason);
        activity_.push_back(0.0);
        phase_.push_back(false);
        watches_.emplace_back();
        watches_.emplace_back();
        heap_insert(v);
        return v;
    }

    bool value_true(int lit) const { return assign_[lit_var(lit)] == (lit_neg(lit) ? -1 : 1); }
    bool value_false(int lit) const { return assign_[lit_var(lit)] == (lit_neg(lit) ? 1 : -1); }
    bool value_undef(int lit) const { return assign_[lit_var(lit)] == 0; }

    // ---- clauses ----
    bool add_clause(std::vector<int> lits) {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (size_t i = 0; i + 1 < lits.size(); i++)
            if (lit_var(lits[i]) == lit_var(lits[i + 1])) return true;  // tautology
        std::vector<int> out;
        for (int l : lits) {
            if (value_true(l)) return true;  // only level-0 assignments exist during build
            if (value_false(l)) continue;
            out.push_back(l);
        }
        if (out.empty()) return false;
        if (out.size() == 1) {
            enqueue(out[0], kNoReason);
            return propagate() == kNoReason;
        }
        attach(std::move(out), false);
        return true;
    }

    int attach(std::vector<int> lits, bool learnt) {
        int ci = (int)clauses_.size();
        clauses_.push_back({std::move(lits), learnt});
        watches_[lit_not(clauses_[ci].lits[0])].push_back(ci);
        watches_[lit_not(clauses_[ci].lits[1])].push_back(ci);
        return ci;
    }

    void ok(bool clause_ok) {
        if (!clause_ok) unsat_root_ = true;
    }

    // ---- search ----
    int decision_level() const { return (int)trail_lim_.size(); }

    void enqueue(int lit, int why) {
        int v = lit_var(lit);
        assign_[v] = lit_neg(lit) ? -1 : 1;
        level_[v] = decision_level();
        reason_[v] = why;
        phase_[v] = !lit_neg(lit);
        trail_.push_back(lit);
    }

    int propagate() {
        while (qhead_ < (int)trail_.size()) {
            int p = trail_[qhead_++];
            auto& ws = watches_[p];
            size_t keep = 0;
            for (size_t i = 0; i < ws.size(); i++) {
                int ci = ws[i];
                Clause& c = clauses_[ci];
                int fl = lit_not(p);
                if (c.lits[0] == fl) std::swap(c.lits[0], c.lits[1]);
                if (value_true(c.lits[0])) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (size_t k = 2; k < c.lits.size(); k++) {
                    if (!value_false(c.lits[k])) {
                        std::swap(c.lits[1], c.lits[k]);
                        watches_[lit_not(c.lits[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[keep++] = ci;
                if (value_false(c.lits[0])) {
                    for (size_t j = i + 1; j < ws.size(); j++) ws[keep++] = ws[j];
                    ws.resize(keep);
                    qhead_ = (int)trail_.size();
                    return ci;
                }
                enqueue(c.lits[0], ci);
            }
            ws.resize(keep);
        }
        return kNoReason;
    }

    int propagate_and_theory() {
        for (;;) {
            int confl = propagate();
            if (confl != kNoReason) return confl;
            confl = theory_advance();
            if (confl != kNoReason) return confl;
            if (qhead_ >= (int)trail_.size()) return kNoReason;
        }
    }

    int analyze(int confl, std::vector<int>& learnt) {
        learnt.assign(1, 0);
        seen_.assign(nvars_, 0);
        int counter = 0;
        int p = -1;
        int idx = (int)trail_.size() - 1;
        for (;;) {
            const Clause& c = clauses_[confl];
            for (size_t j = (p == -1 ? 0 : 1); j < c.lits.size(); j++) {
                int q = c.lits[j];
                int v = lit_var(q);
                if (!seen_[v] && level_[v] > 0) {
                    seen_[v] = 1;
                    bump(v);
                    if (level_[v] >= decision_level())
                        counter++;
                    else
                        learnt.push_back(q);
                }
            }
            while (!seen_[lit_var(trail_[idx])]) idx--;
            p = trail_[idx];
            seen_[lit_var(p)] = 0;
            counter--;
            if (counter == 0) break;
            confl = reason_[lit_var(p)];
            idx--;
        }
        learnt[0] = lit_not(p);
        int bt = 0;
        if (learnt.size() > 1) {
            size_t max_i = 1;
            for (size_t i = 2; i < learnt.size(); i++)
                if (level_[lit_var(learnt[i])] > level_[lit_var(learnt[max_i])]) max_i = i;
            std::swap(learnt[1], learnt[max_i]);
            bt = level_[lit_var(learnt[1])];
        }
        return bt;
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        int keep_edges = theory_lim_[lvl];
        while ((int)active_stack_.size() > keep_edges) {
            int e = active_stack_.back();
            active_stack_.pop_back();
            edges_[e].active = false;
            out_[edges_[e].from].pop_back();
        }
        theory_lim_.resize(lvl);
        int keep = trail_lim_[lvl];
        for (int i = (int)trail_.size() - 1; i >= keep; i--) {
            int v = lit_var(trail_[i]);
            assign_[v] = 0;
            reason_[v] = kNoReason;
            heap_insert(v);
        }
        trail_.resize(keep);
        trail_lim_.resize(lvl);
        qhead_ = keep;
        theory_qhead_ = std::min(theory_qhead_, keep);
    }

    // ---- VSIDS ----
    void bump(int v) {
        activity_[v] += var_inc_;
        if (activity_[v] > 1e100) {
            for (auto& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
    }
    void decay_activity() { var_inc_ /= 0.95; }

    bool heap_less(int a, int b) const {
        if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
        return a < b;
    }
    void heap_insert(int v) {
        if ((int)heap_pos_.size() <= v) heap_pos_.resize(v + 1, -1);
        if (heap_pos_[v] >= 0) return;
        heap_.push_back(v);
        heap_pos_[v] = (int)heap_.size() - 1;
        heap_up((int)heap_.size() - 1);
    }
    void heap_up(int i) {
        int v = heap_[i];
        while (i > 0) {
            int parent = (i - 1) / 2;
            if (!heap_less(v, heap_[parent])) break;
            heap_[i] = heap_[parent];
            heap_pos_[heap_[i]] = i;
            i = parent;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }
    void heap_down(int i) {
        int v = heap_[i];
        int n = (int)heap_.size();
        for (;;) {
            int l = 2 * i + 1, r = 2 * i + 2, best = -1;
            int bv = v;
            if (l < n && heap_less(heap_[l], bv)) {
                best = l;
                bv = heap_[l];
            }
            if (r < n && heap_less(heap_[r], bv)) {
                best = r;
                bv = heap_[r];
            }
            if (best < 0) break;
            heap_[i] = heap_[best];
            heap_pos_[heap_[i]] = i;
            i = best;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }
    int heap_pop() {
        int v = heap_[0];
        heap_pos_[v] = -1;
        heap_[0] = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_pos_[heap_[0]] = 0;
            heap_down(0);
        }
        return v;
    }
    int pick_branch() {
        while (!heap_.empty()) {
            int v = heap_pop();
            if (assign_[v] == 0) return v;
        }
        return -1;
    }

    // ---- atoms & encoding ----
    void scan_atoms(const GPtr& f) {
        if (!f || scanned_.count(f.get())) return;
        scanned_.insert(f.get());
        if (f->kind == GKind::Lit) {
            switch (f->lit) {
                case LKind::StrictBefore:
                    intern_sb(f->node_a, f->node_b);
                    break;
                case LKind::PredVar: {
                    PredKey key{f->pred, f->pred_uids};
                    if (!pred_var_.count(key)) pred_var_[key] = new_var();
                    break;
                }
                case LKind::Attr:
                    if (!attr_var_.count(f->attr)) attr_var_[f->attr] = new_var();
                    break;
                case LKind::SameNodeRaw:
                    throw GroundError("solver input contains unresolved SameNode");
                default:
                    break;
            }
            return;
        }
        for (auto& k : f->kids) scan_atoms(k);
    }

    int intern_sb(int a, int b) {
        auto it = sb_index_.find({a, b});
        if (it != sb_index_.end()) return it->second;
        int idx = (int)sb_atoms_.size();
        SbAtom atom;
        atom.var = new_var();
        atom.a = a;
        atom.b = b;
        atom.strict_edge = (int)edges_.size();
        edges_.push_back({a, b, true, idx, false});
        atom.weak_edge = (int)edges_.size();
        edges_.push_back({b, a, false, idx, false});
        sb_atoms_.push_back(atom);
        sb_index_[{a, b}] = idx;
        sb_of_var_[atom.var] = idx;
        return idx;
    }

    void alloc_field(int uid, AttrField field, int dsize) {
        if (dsize <= 0) dsize = 1;
        std::vector<int> vars;
        for (int i = 0; i < dsize; i++) vars.push_back(new_var());
        std::vector<int> alo;
        for (int v : vars) alo.push_back(mk_lit(v, false));
        ok(add_clause(alo));
        for (int i = 0; i < dsize; i++)
            for (int j = i + 1; j < dsize; j++)
                ok(add_clause({mk_lit(vars[i], true), mk_lit(vars[j], true)}));
        onehot_[{uid, (int)field}] = std::move(vars);
    }

    const std::string& module_of(int uid) const {
        for (auto& s : sym_ops_)
            if (s.uid == uid) return s.module_name;
        throw GroundError("attribute atom refers to a non-symbolic operation");
    }

    int value_pos(int uid, AttrField field, long value) const {
        if (field == AttrField::Kind) {
            auto& kinds = domains_.kinds_of(module_of(uid));
            for (size_t i = 0; i < kinds.size(); i++)
                if (kinds[i] == value) return (int)i;
            return -1;
        }
        int dsize = field == AttrField::Addr   ? (int)domains_.addrs.size()
                    : field == AttrField::Data ? (int)domains_.data.size()
                                               : domains_.bound;
        return value >= 0 && value < dsize ? (int)value : -1;
    }

    long value_at(int uid, AttrField field, int pos) const {
        if (field != AttrField::Kind) return pos;
        return domains_.kinds_of(module_of(uid))[pos];
    }

    void define_attr_atoms() {
        for (auto& [atom, tvar] : attr_var_) {
            int t_pos = mk_lit(tvar, false), t_neg = mk_lit(tvar, true);
            switch (atom.rel) {
                case AttrRel::EqVarConst: {
                    auto& xs = onehot_.at({atom.op_a, (int)atom.field_a});
                    int pos = value_pos(atom.op_a, atom.field_a, atom.value);
                    if (pos < 0) {
                        ok(add_clause({t_neg}));
                        break;
                    }
                    ok(add_clause({t_neg, mk_lit(xs[pos], false)}));
                    ok(add_clause({mk_lit(xs[pos], true), t_pos}));
                    break;
                }
                case AttrRel::InSet: {
                    auto& xs = onehot_.at({atom.op_a, (int)atom.field_a});
                    std::vector<int> any{t_neg};
                    for (int v : atom.set_values) {
                        int pos = value_pos(atom.op_a, atom.field_a, v);
                        if (pos < 0) continue;
                        any.push_back(mk_lit(xs[pos], false));
                        ok(add_clause({mk_lit(xs[pos], true), t_pos}));
                    }
                    ok(add_clause(any));
                    break;
                }
                case AttrRel::EqVarVar: {
                    auto& xs = onehot_.at({atom.op_a, (int)atom.field_a});
                    auto& ys = onehot_.at({atom.op_b, (int)atom.field_b});
                    std::vector<int> any{t_neg};
                    for (size_t i = 0; i < xs.size(); i++) {
                        long val = value_at(atom.op_a, atom.field_a, (int)i);
                        int jpos = value_pos(atom.op_b, atom.field_b, val);
                        if (jpos < 0) continue;
                        int aux = new_var();
                        ok(add_clause({mk_lit(aux, true), mk_lit(xs[i], false)}));
                        ok(add_clause({mk_lit(aux, true), mk_lit(ys[jpos], false)}));
                        ok(add_clause(
                            {mk_lit(xs[i], true), mk_lit(ys[jpos], true), mk_lit(aux, false)}));
                        ok(add_clause({mk_lit(aux, true), t_pos}));
                        any.push_back(mk_lit(aux, false));
                    }
                    ok(add_clause(any));
                    break;
                }
                case AttrRel::LtVarVar: {
                    auto& xs = onehot_.at({atom.op_a, (int)atom.field_a});
                    auto& ys = onehot_.at({atom.op_b, (int)atom.field_b});
                    int d = (int)ys.size();
                    // ge[k] <-> (y >= k)
                    std::vector<int> ge(d + 1, -1);
                    for (int k = d - 1; k >= 1; k--) {
                        int g = new_var();
                        ge[k] = g;
                        std::vector<int> any{mk_lit(g, true), mk_lit(ys[k], false)};
                        ok(add_clause({mk_lit(ys[k], true), mk_lit(g, false)}));
                        if (ge[k + 1] >= 0) {
                            any.push_back(mk_lit(ge[k + 1], false));
                            ok(add_clause({mk_lit(ge[k + 1], true), mk_lit(g, false)}));
                        }
                        ok(add_clause(any));
                    }
                    std::vector<int> any{t_neg};
                    for (int v = 0; v < (int)xs.size() && v + 1 < d; v++) {
                        if (ge[v + 1] < 0) continue;
                        int aux = new_var();
                        ok(add_clause({mk_lit(aux, true), mk_lit(xs[v], false)}));
                        ok(add_clause({mk_lit(aux, true), mk_lit(ge[v + 1], false)}));
                        ok(add_clause(
                            {mk_lit(xs[v], true), mk_lit(ge[v + 1], true), mk_lit(aux, false)}));
                        ok(add_clause({mk_lit(aux, true), t_pos}));
                        any.push_back(mk_lit(aux, false));
                    }
                    ok(add_clause(any));
                    break;
                }
            }
        }
    }

    // Plaisted-Greenbaum on the NNF tree. Returns a literal, INT_MAX for
    // constant true, INT_MIN for constant false.
    int tseitin(const GPtr& f) {
        auto it = tseitin_cache_.find(f.get());
        if (it != tseitin_cache_.end()) return it->second;
        int result;
        if (f->kind == GKind::Lit) {
            result = lit_of_atom(*f, false);
        } else if (f->kind == GKind::Not) {
            result = lit_of_atom(*f->kids[0], true);
        } else {
            bool is_and = f->kind == GKind::And;
            std::vector<int> kids;
            bool short_circuit = false;
            for (auto& k : f->kids) {
                int kl = tseitin(k);
                if (kl == (is_and ? INT_MAX : INT_MIN)) continue;
                if (kl == (is_and ? INT_MIN : INT_MAX)) {
                    short_circuit = true;
                    break;
                }
                kids.push_back(kl);
            }
            if (short_circuit) {
                result = is_and ? INT_MIN : INT_MAX;
            } else if (kids.empty()) {
                result = is_and ? INT_MAX : INT_MIN;
            } else if (kids.size() == 1) {
                result = kids[0];
            } else {
                int v = new_var();
                if (is_and) {
                    for (int kl : kids) ok(add_clause({mk_lit(v, true), kl}));
                } else {
                    std::vector<int> cl{mk_lit(v, true)};
                    for (int kl : kids) cl.push_back(kl);
                    ok(add_clause(cl));
                }
                result = mk_lit(v, false);
            }
        }
        tseitin_cache_[f.get()] = result;
        return result;
    }

    int lit_of_atom(const GNode& l, bool negated) {
        switch (l.lit) {
            case LKind::Const:
                return (l.bval != negated) ? INT_MAX : INT_MIN;
            case LKind::NodeExists:
                return mk_lit(ne_var_[l.node_a], negated);
            case LKind::StrictBefore:
                return mk_lit(sb_atoms_[intern_sb(l.node_a, l.node_b)].var, negated);
            case LKind::PredVar:
                return mk_lit(pred_var_.at({l.pred, l.pred_uids}), negated);
            case LKind::NotNull:
                return mk_lit(nn_var_.at(l.nn_uid), negated);
            case LKind::Attr:
                return mk_lit(attr_var_.at(l.attr), negated);
            case LKind::SameNodeRaw:
                throw GroundError("solver input contains unresolved SameNode");
        }
        return INT_MIN;
    }

    // ---- acyclicity theory ----
    bool ne_true(int node) const { return assign_[node] == 1; }  // ne var id == node id

    int theory_advance() {
        while (theory_qhead_ < (int)trail_.size()) {
            int lit = trail_[theory_qhead_++];
            int v = lit_var(lit);
            auto sb_it = sb_of_var_.find(v);
            if (sb_it != sb_of_var_.end()) {
                const SbAtom& atom = sb_atoms_[sb_it->second];
                int c = kNoReason;
                if (!lit_neg(lit))
                    c = activate(atom.strict_edge);
                else if (ne_true(atom.a) && ne_true(atom.b))
                    c = activate(atom.weak_edge);
                if (c != kNoReason) return c;
                continue;
            }
            if (v < (int)nodes_.size() && !lit_neg(lit)) {
                for (int ai : touching_[v]) {
                    const SbAtom& atom = sb_atoms_[ai];
                    if (assign_[atom.var] == -1 && ne_true(atom.a) && ne_true(atom.b)) {
                        int c = activate(atom.weak_edge);
                        if (c != kNoReason) return c;
                    }
                }
            }
        }
        return kNoReason;
    }

    int activate(int eid) {
        TEdge& e = edges_[eid];
        if (e.active) return kNoReason;
        e.active = true;
        out_[e.from].push_back(eid);
        active_stack_.push_back(eid);
        return check_cycle(eid);
    }

    // BFS from e.to towards e.from over active edges; states record whether a
    // strict edge has been traversed. A cycle is a conflict iff it contains a
    // strict edge.
    int check_cycle(int eid) {
        const TEdge& e = edges_[eid];
        int n = (int)nodes_.size();
        bfs_par_.assign(n * 2, -2);  // -2 unvisited, -1 start, else edge id
        bfs_prev_full_.assign(n * 2, -1);
        std::deque<int> q;
        int start = e.to * 2 + (e.strict ? 1 : 0);
        bfs_par_[start] = -1;
        q.push_back(start);
        int goal = -1;
        while (!q.empty() && goal < 0) {
            int cur = q.front();
            q.pop_front();
            int node = cur / 2, s = cur & 1;
            if (node == e.from && (s || e.strict)) {
                goal = cur;
                break;
            }
            for (int oe : out_[node]) {
                const TEdge& t = edges_[oe];
                int ns = (s || t.strict) ? 1 : 0;
                int nxt = t.to * 2 + ns;
                if (bfs_par_[nxt] != -2) continue;
                bfs_par_[nxt] = oe;
                bfs_prev_full_[nxt] = cur;
                q.push_back(nxt);
            }
        }
        if (goal < 0) return kNoReason;
        std::set<int> lits;
        auto add_edge_lits = [&](int ce) {
            const TEdge& t = edges_[ce];
            const SbAtom& atom = sb_atoms_[t.atom];
            if (t.strict) {
                lits.insert(mk_lit(atom.var, true));
            } else {
                lits.insert(mk_lit(atom.var, false));
                lits.insert(mk_lit(ne_var_[atom.a], true));
                lits.insert(mk_lit(ne_var_[atom.b], true));
            }
        };
        add_edge_lits(eid);
        int cur = goal;
        while (bfs_par_[cur] != -1) {
            int via = bfs_par_[cur];
            add_edge_lits(via);
            cur = bfs_prev_full_[cur];
        }
        return make_conflict_clause({lits.begin(), lits.end()});
    }

    int make_conflict_clause(std::vector<int> lits) {
        // order the two highest-level literals first so the watch invariant
        // holds after backjumping
        std::sort(lits.begin(), lits.end(), [&](int a, int b) {
            return level_[lit_var(a)] > level_[lit_var(b)];
        });
        int ci = (int)clauses_.size();
        clauses_.push_back({std::move(lits), true});
        if (clauses_[ci].lits.size() >= 2) {
            watches_[lit_not(clauses_[ci].lits[0])].push_back(ci);
            watches_[lit_not(clauses_[ci].lits[1])].push_back(ci);
        }
        return ci;
    }

    // ---- model extraction ----
    SolverVarMap extract_model() {
        SolverVarMap m;
        size_t n = nodes_.size();
        m.node_exists.resize(n, 0);
        for (size_t i = 0; i < n; i++) m.node_exists[i] = assign_[ne_var_[i]] == 1;
        m.timestamps.assign(n, -1);
        compute_ranks(m);
        for (auto& [key, var] : pred_var_) m.predvars[key] = assign_[var] == 1;
        for (auto& [uid, var] : nn_var_) m.notnull[uid] = assign_[var] == 1;
        for (auto& [key, vars] : onehot_) {
            for (size_t i = 0; i < vars.size(); i++)
                if (assign_[vars[i]] == 1)
                    m.attrs[key] = value_at(key.first, (AttrField)key.second, (int)i);
        }
        return m;
    }

    void compute_ranks(SolverVarMap& m) {
        size_t n = nodes_.size();
        std::vector<std::vector<int>> adj(n);
        for (auto& e : edges_)
            if (e.active && m.node_exists[e.from] && m.node_exists[e.to])
                adj[e.from].push_back(e.to);
        std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stk;
        std::vector<char> on(n, 0);
        int counter = 0, ncomp = 0;
        struct Frame {
            int v;
            size_t i;
        };
        for (size_t s = 0; s < n; s++) {
            if (!m.node_exists[s] || num[s] != -1) continue;
            std::vector<Frame> frames{{(int)s, 0}};
            num[s] = low[s] = counter++;
            stk.push_back((int)s);
            on[s] = 1;
            while (!frames.empty()) {
                Frame& fr = frames.back();
                if (fr.i < adj[fr.v].size()) {
                    int w = adj[fr.v][fr.i++];
                    if (num[w] == -1) {
                        num[w] = low[w] = counter++;
                        stk.push_back(w);
                        on[w] = 1;
                        frames.push_back({w, 0});
                    } else if (on[w]) {
                        low[fr.v] = std::min(low[fr.v], num[w]);
                    }
                } else {
                    if (low[fr.v] == num[fr.v]) {
                        for (;;) {
                            int w = stk.back();
                            stk.pop_back();
                            on[w] = 0;
                            comp[w] = ncomp;
                            if (w == fr.v) break;
                        }
                        ncomp++;
                    }
                    int v = fr.v;
                    frames.pop_back();
                    if (!frames.empty())
                        low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                }
            }
        }
        for (size_t i = 0; i < n; i++)
            if (m.node_exists[i]) m.timestamps[i] = ncomp - 1 - comp[i];
    }

    const NodeTable& nodes_;
    const Domains& domains_;
    const std::vector<SymOpRef>& sym_ops_;

    int nvars_ = 0;
    std::vector<signed char> assign_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_;
    std::vector<int> trail_, trail_lim_;
    int qhead_ = 0;
    bool unsat_root_ = false;
    std::vector<char> seen_;

    std::vector<double> activity_;
    double var_inc_ = 1.0;
    std::vector<bool> phase_;
    std::vector<int> heap_, heap_pos_;

    std::vector<int> ne_var_;
    std::map<int, int> nn_var_;
    std::vector<SbAtom> sb_atoms_;
    std::map<std::pair<int, int>, int> sb_index_;
    std::map<int, int> sb_of_var_;
    std::map<PredKey, int> pred_var_;
    std::map<AttrAtom, int> attr_var_;
    std::map<std::pair<int, int>, std::vector<int>> onehot_;
    std::set<const GNode*> scanned_;
    std::map<const GNode*, int> tseitin_cache_;

    std::vector<TEdge> edges_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> touching_;
    std::vector<int> active_stack_, theory_lim_;
    int theory_qhead_ = 0;
    std::vector<int> bfs_par_, bfs_prev_full_;
};

void Cdcl::build(const GPtr& formula) {
    ne_var_.resize(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); i++) ne_var_[i] = new_var();
    for (auto& s : sym_ops_)
        if (!nn_var_.count(s.uid)) nn_var_[s.uid] = new_var();

    scan_atoms(formula);

    for (auto& s : sym_ops_) {
        auto& kinds = domains_.kinds_of(s.module_name);
        alloc_field(s.uid, AttrField::Kind, (int)kinds.size());
        alloc_field(s.uid, AttrField::Addr, (int)domains_.addrs.size());
        alloc_field(s.uid, AttrField::Data, (int)domains_.data.size());
        alloc_field(s.uid, AttrField::Order, domains_.bound);
    }
    if (unsat_root_) return;

    // null operations have no nodes
    for (size_t n = 0; n < nodes_.size(); n++) {
        auto it = nn_var_.find(nodes_.info((int)n).op_uid);
        if (it != nn_var_.end())
            ok(add_clause({mk_lit(it->second, false), mk_lit(ne_var_[n], true)}));
    }
    define_attr_atoms();
    if (unsat_root_) return;
    int root = tseitin(formula);
    if (root == INT_MIN) {
        unsat_root_ = true;
        return;
    }
    if (root != INT_MAX) ok(add_clause({root}));
    // a strict-before atom forces both endpoints to exist (added after the
    // scan so late-interned atoms from tseitin are covered too)
    for (auto& sb : sb_atoms_) {
        ok(add_clause({mk_lit(sb.var, true), mk_lit(ne_var_[sb.a], false)}));
        ok(add_clause({mk_lit(sb.var, true), mk_lit(ne_var_[sb.b], false)}));
    }
    out_.assign(nodes_.size(), {});
    touching_.assign(nodes_.size(), {});
    for (size_t i = 0; i < sb_atoms_.size(); i++) {
        touching_[sb_atoms_[i].a].push_back((int)i);
        touching_[sb_atoms_[i].b].push_back((int)i);
    }
}

SolveResult Cdcl::solve(const SolveLimits& limits) {
    SolveResult res;
    if (unsat_root_) {
        res.status = SolveStatus::Unsat;
        return res;
    }
    auto start = Clock::now();
    long restarts = 0;
    long conflicts_since_restart = 0;
    long restart_budget = 100 * luby(restarts);
    for (;;) {
        int confl = propagate_and_theory();
        if (confl != kNoReason) {
            res.conflicts++;
            conflicts_since_restart++;
            if (decision_level() == 0) {
                res.status = SolveStatus::Unsat;
                return res;
            }
            std::vector<int> learnt;
            int bt = analyze(confl, learnt);
            cancel_until(bt);
            if (learnt.size() == 1) {
                enqueue(learnt[0], kNoReason);
            } else {
                int ci = attach(std::move(learnt), true);
                enqueue(clauses_[ci].lits[0], ci);
            }
            decay_activity();
            if (limits.max_conflicts >= 0 && res.conflicts > limits.max_conflicts) {
                res.status = SolveStatus::Unknown;
                res.reason = "conflict limit reached";
                return res;
            }
            if ((res.conflicts & 63) == 0 && limits.timeout_sec >= 0) {
                double el = std::chrono::duration<double>(Clock::now() - start).count();
                if (el > limits.timeout_sec) {
                    res.status = SolveStatus::Unknown;
                    res.reason = "timeout";
                    return res;
                }
            }
            if (conflicts_since_restart >= restart_budget) {
                restarts++;
                conflicts_since_restart = 0;
                restart_budget = 100 * luby(restarts);
                cancel_until(0);
            }
            continue;
        }
        int next = pick_branch();
        if (next < 0) {
            res.status = SolveStatus::Sat;
            res.model = extract_model();
            return res;
        }
        res.decisions++;
        trail_lim_.push_back((int)trail_.size());
        theory_lim_.push_back((int)active_stack_.size());
        enqueue(mk_lit(next, !phase_[next]), kNoReason);
    }
}

}  // namespace

SolveResult solve_native(const GPtr& formula, const NodeTable& nodes, const Domains& domains,
                         const std::vector<SymOpRef>& sym_ops, const SolveLimits& limits) {
    Cdcl solver(nodes, domains, sym_ops);
    solver.build(formula);
    return solver.solve(limits);
}

}  // namespace modcheck
