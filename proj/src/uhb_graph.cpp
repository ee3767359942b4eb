#include "modcheck/uhb_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace modcheck {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; i++) parent[i] = (int)i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

UhbGraph extract_graph(const SolverVarMap& model, const GPtr& grounded, const NodeTable& nodes,
                       const std::map<int, std::string>& op_labels) {
    UhbGraph g;
    g.op_labels = op_labels;
    ModelView view = model.view();

    std::vector<WitnessEdge> edges;
    std::vector<std::pair<int, int>> merges;
    collect_witness(grounded, view, edges, merges);

    // dense timestamp ranks over existing nodes
    std::set<long> stamps;
    for (size_t i = 0; i < nodes.size(); i++)
        if (model.node_exists[i]) stamps.insert(model.timestamps[i]);
    std::map<long, long> rank;
    long r = 0;
    for (long s : stamps) rank[s] = r++;

    for (size_t i = 0; i < nodes.size(); i++) {
        if (!model.node_exists[i]) continue;
        const NodeInfo& info = nodes.info((int)i);
        g.nodes.push_back({(int)i, info.op_uid, info.owner_path, info.event, info.event_index,
                           rank.at(model.timestamps[i])});
    }

    std::set<std::tuple<int, int, std::string>> seen;
    for (auto& e : edges) {
        if (!seen.insert({e.src, e.dst, e.label}).second) continue;
        g.edges.push_back({e.src, e.dst, e.label, false});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const UhbEdge& a, const UhbEdge& b) {
        return std::tie(a.src, a.dst, a.label) < std::tie(b.src, b.dst, b.label);
    });

    UnionFind uf(nodes.size());
    std::set<std::pair<int, int>> merge_set;
    for (auto& [a, b] : merges) {
        if (!model.node_exists[a]) continue;
        if (!merge_set.insert({a, b}).second) continue;
        uf.join(a, b);
        g.edges.push_back({a, b, "", true});
    }
    std::map<int, std::vector<int>> classes;
    for (auto& n : g.nodes) classes[uf.find(n.node_id)].push_back(n.node_id);
    for (auto& [root, members] : classes)
        if (members.size() >= 2) g.merge_classes.push_back(members);
    return g;
}

std::string to_dot(const UhbGraph& g) {
    std::ostringstream os;
    // merged nodes collapse onto their class representative
    std::map<int, int> rep;
    std::map<int, std::vector<int>> cls_of;
    for (auto& cls : g.merge_classes) {
        int r = *std::min_element(cls.begin(), cls.end());
        for (int n : cls) rep[n] = r;
        cls_of[r] = cls;
    }
    auto canon = [&](int n) {
        auto it = rep.find(n);
        return it == rep.end() ? n : it->second;
    };
    std::map<int, const UhbNode*> by_id;
    for (auto& n : g.nodes) by_id[n.node_id] = &n;

    os << "digraph uhb {\n";
    os << "  rankdir=TB;\n";
    os << "  node [shape=ellipse, fontsize=10];\n";

    // one cluster (column) per operation, rows ordered by event index
    std::map<int, std::vector<const UhbNode*>> by_op;
    for (auto& n : g.nodes) {
        if (canon(n.node_id) != n.node_id) continue;  // drawn once
        by_op[n.op_uid].push_back(&n);
    }
    for (auto& [uid, members] : by_op) {
        std::sort(members.begin(), members.end(), [](const UhbNode* a, const UhbNode* b) {
            return std::tie(a->event_index, a->node_id) < std::tie(b->event_index, b->node_id);
        });
        os << "  subgraph cluster_op" << uid << " {\n";
        auto lbl = g.op_labels.find(uid);
        os << "    label=\"" << (lbl == g.op_labels.end() ? ("op" + std::to_string(uid))
                                                          : lbl->second)
           << "\";\n";
        for (auto* n : members) {
            os << "    n" << n->node_id << " [label=\"" << n->event << " @" << n->timestamp
               << "\"";
            auto cit = cls_of.find(n->node_id);
            if (cit != cls_of.end()) {
                os << ", peripheries=2, tooltip=\"merged:";
                for (int m : cit->second) {
                    const UhbNode* mn = by_id.at(m);
                    os << " " << mn->owner_path << ":" << mn->event;
                }
                os << "\"";
            }
            os << "];\n";
        }
        // invisible spine keeps rows in event order
        for (size_t i = 0; i + 1 < members.size(); i++)
            os << "    n" << members[i]->node_id << " -> n" << members[i + 1]->node_id
               << " [style=invis];\n";
        os << "  }\n";
    }
    std::set<std::tuple<int, int, std::string>> emitted;
    for (auto& e : g.edges) {
        if (e.merged) continue;
        int s = canon(e.src), d = canon(e.dst);
        if (s == d) continue;
        if (!emitted.insert({s, d, e.label}).second) continue;
        os << "  n" << s << " -> n" << d;
        if (!e.label.empty()) os << " [label=\"" << e.label << "\"]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace modcheck
