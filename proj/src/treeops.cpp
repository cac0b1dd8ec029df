#include "tsce/treeops.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <tuple>

namespace tsce {

ExplanationTree path_channel(const ExplanationTree& tree, const TimedVar& target, int w) {
    if (w < 0) throw Error(ErrorCode::invalid_argument, "path width must be >= 0");
    std::vector<int> hits, inner;
    for (const ExplanationNode& n : tree.nodes) {
        if (n.var == target.var && n.t == target.t) {
            hits.push_back(n.id);
            if (!n.leaf()) inner.push_back(n.id);
        }
    }
    int node = -1;
    if (hits.size() == 1) node = hits[0];
    else if (inner.size() == 1) node = inner[0];
    if (hits.empty()) throw Error(ErrorCode::invalid_tree, to_string(target) + " is not in the tree");
    if (node < 0) throw Error(ErrorCode::invalid_tree, "path to " + to_string(target) + " is not unique");

    std::vector<int> path;
    for (int id = node; id >= 0; id = tree.nodes[id].parent) path.push_back(id);
    std::vector<bool> keep(tree.nodes.size(), false);
    for (int p : path) {
        keep[p] = true;
        std::deque<std::pair<int, int>> queue{{p, 0}};
        while (!queue.empty()) {
            auto [id, d] = queue.front();
            queue.pop_front();
            keep[id] = true;
            if (d == w) continue;
            for (int c : tree.nodes[id].children) queue.emplace_back(c, d + 1);
        }
    }
    std::vector<int> ids;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) ids.push_back(static_cast<int>(i));
    }
    return renumber_bfs(tree, ids);
}

TemporalCausalGraph mask_graph(const TemporalCausalGraph& graph, const std::set<std::string>& masked,
                               std::size_t max_paths) {
    for (const std::string& m : masked) graph.index_of(m);
    if (masked.empty()) return graph;

    using Key = std::tuple<std::string, std::string, int>;
    std::map<Key, double> sums;
    std::vector<Key> order;
    auto add = [&](const std::string& src, const std::string& dst, int lag, double w) {
        Key key{src, dst, lag};
        auto [it, inserted] = sums.emplace(key, 0.0);
        if (inserted) order.push_back(key);
        it->second += w;
    };
    for (const Edge& e : graph.edges()) {
        if (!masked.count(e.src) && !masked.count(e.dst)) add(e.src, e.dst, e.lag, e.weight);
    }

    std::size_t paths = 0;
    std::set<std::string> on_path;
    std::function<void(const std::string&, const std::string&, double, int)> walk =
        [&](const std::string& src, const std::string& at, double weight, int lag) {
            for (const Edge& e : graph.outgoing(at)) {
                double w = weight * e.weight;
                int l = lag + e.lag;
                if (!masked.count(e.dst)) {
                    if (++paths > max_paths) {
                        throw Error(ErrorCode::invalid_argument,
                                    "masking creates more than " + std::to_string(max_paths) + " bridging paths");
                    }
                    add(src, e.dst, l, w);
                    continue;
                }
                if (on_path.count(e.dst)) continue;
                on_path.insert(e.dst);
                walk(src, e.dst, w, l);
                on_path.erase(e.dst);
            }
        };
    for (const Variable& v : graph.variables()) {
        if (masked.count(v.name)) continue;
        for (const Edge& e : graph.outgoing(v.name)) {
            if (!masked.count(e.dst)) continue;
            on_path = {e.dst};
            walk(v.name, e.dst, e.weight, e.lag);
        }
    }

    std::vector<Variable> vars;
    for (const Variable& v : graph.variables()) {
        if (!masked.count(v.name)) vars.push_back(v);
    }
    std::vector<Edge> edges;
    for (const Key& key : order) {
        double w = sums[key];
        if (w == 0.0) continue;
        edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
    }
    return TemporalCausalGraph(std::move(vars), std::move(edges));
}

namespace {

void reevaluate(ExplanationTree& tree, int child_id) {
    ExplanationNode& child = tree.nodes[child_id];
    const ExplanationNode& parent = tree.nodes[child.parent];
    bool retro = tree.mode == ExplainMode::retrospective;
    const ExplanationNode& cause = retro ? child : parent;
    const ExplanationNode& effect = retro ? parent : child;
    child.er = evaluate_edge(*child.alpha, cause.kind, cause.value, cause.phi, effect.kind, effect.value,
                             effect.phi, false);
}

}  // namespace

ExplanationTree mask_tree(const ExplanationTree& tree, const std::set<std::string>& masked) {
    if (masked.empty()) return tree;
    for (const std::string& m : masked) {
        if (m == tree.root().var) throw Error(ErrorCode::invalid_tree, "cannot mask the root variable '" + m + "'");
        bool inner = std::any_of(tree.nodes.begin(), tree.nodes.end(),
                                 [&](const ExplanationNode& n) { return n.var == m && !n.leaf(); });
        if (!inner) {
            throw Error(ErrorCode::invalid_tree, "'" + m + "' never occurs as an intermediate node");
        }
    }

    ExplanationTree work = tree;
    std::vector<bool> alive(work.nodes.size(), true);
    std::set<int> touched;
    std::set<int> rewired;
    std::function<void(int)> kill = [&](int id) {
        alive[id] = false;
        for (int c : work.nodes[id].children) kill(c);
    };

    // Parents are visited before children, so nested masked nodes splice in turn.
    for (std::size_t i = 1; i < work.nodes.size(); ++i) {
        if (!alive[i] || !masked.count(work.nodes[i].var)) continue;
        ExplanationNode& node = work.nodes[i];
        ExplanationNode& parent = work.nodes[node.parent];
        auto pos = std::find(parent.children.begin(), parent.children.end(), static_cast<int>(i));
        std::size_t at = static_cast<std::size_t>(pos - parent.children.begin());
        parent.children.erase(pos);
        alive[i] = false;
        touched.insert(node.parent);
        if (!node.alpha) throw Error(ErrorCode::invalid_tree, "masked node " + std::to_string(i) + " has no weight");

        std::vector<int> spliced;
        for (int c : node.children) {
            ExplanationNode& child = work.nodes[c];
            if (!child.alpha) throw Error(ErrorCode::invalid_tree, "node " + std::to_string(c) + " has no weight");
            child.alpha = *child.alpha * *node.alpha;
            child.parent = parent.id;
            rewired.insert(c);
            auto same = std::find_if(parent.children.begin(), parent.children.end(), [&](int s) {
                return work.nodes[s].var == child.var && work.nodes[s].t == child.t;
            });
            if (same == parent.children.end()) {
                spliced.push_back(c);
                continue;
            }
            ExplanationNode& sibling = work.nodes[*same];
            // Keep the occurrence that carries a subtree; the other one is absorbed.
            ExplanationNode& kept = sibling.leaf() && !child.leaf() ? child : sibling;
            ExplanationNode& gone = &kept == &child ? sibling : child;
            kept.alpha = *kept.alpha + *gone.alpha;
            rewired.insert(kept.id);
            for (int g : gone.children) {
                work.nodes[g].parent = kept.id;
                kept.children.push_back(g);
            }
            gone.children.clear();
            alive[gone.id] = false;
            if (&kept == &child) {
                *same = child.id;
            }
        }
        parent.children.insert(parent.children.begin() + static_cast<std::ptrdiff_t>(at), spliced.begin(),
                               spliced.end());
        node.children.clear();
    }

    for (int p : touched) {
        ExplanationNode& parent = work.nodes[p];
        std::vector<int> live;
        for (int c : parent.children) {
            if (!alive[c]) continue;
            if (*work.nodes[c].alpha == 0.0) {
                kill(c);
                continue;
            }
            live.push_back(c);
        }
        parent.children = live;
        for (int c : live) {
            if (rewired.count(c)) reevaluate(work, c);
        }
        apply_er3(work, p);
    }

    std::vector<int> keep;
    for (std::size_t i = 0; i < alive.size(); ++i) {
        if (alive[i]) keep.push_back(static_cast<int>(i));
    }
    ExplanationTree out = renumber_bfs(work, keep);
    assign_sequences(out);
    return out;
}

ExplanationTree leave_n_out(const ExplanationTree& tree, int max_gap, bool rewrite) {
    if (max_gap < 1) throw Error(ErrorCode::invalid_argument, "leave-n-out gap must be >= 1");
    ExplanationTree out = tree;

    struct Segment {
        std::vector<int> nodes;
        int seq;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::string, std::vector<int>> chains;
        for (const ExplanationNode& n : out.nodes) {
            if (!n.leaf() && n.seq) chains[n.var].push_back(n.id);
        }
        for (auto& [var, ids] : chains) {
            std::sort(ids.begin(), ids.end(), [&](int a, int b) { return out.nodes[a].t > out.nodes[b].t; });
            std::vector<Segment> segs;
            for (int id : ids) {
                const ExplanationNode& n = out.nodes[id];
                if (!segs.empty() && segs.back().seq == *n.seq &&
                    out.nodes[segs.back().nodes.back()].t - n.t == 1) {
                    segs.back().nodes.push_back(id);
                } else {
                    segs.push_back({{id}, *n.seq});
                }
            }
            for (std::size_t a = 0; a + 2 < segs.size() && !changed; ++a) {
                auto sig = child_signature(out, segs[a].nodes.front());
                std::size_t gap = 0;
                for (std::size_t b = a + 1; b < segs.size(); ++b) {
                    int prev_t = out.nodes[segs[b - 1].nodes.back()].t;
                    if (prev_t - out.nodes[segs[b].nodes.front()].t != 1) break;
                    if (b > a + 1 && segs[b].seq != segs[a].seq &&
                        child_signature(out, segs[b].nodes.front()) == sig) {
                        for (std::size_t m = a + 1; m <= b; ++m) {
                            for (int id : segs[m].nodes) {
                                out.nodes[id].seq = segs[a].seq;
                                if (!rewrite || m == b) continue;
                                for (int c : out.nodes[id].children) {
                                    ExplanationNode& child = out.nodes[c];
                                    for (const ChildSignature& s : sig) {
                                        if (s.var == child.var && s.offset == child.t - out.nodes[id].t) {
                                            child.er = s.er;
                                        }
                                    }
                                }
                            }
                        }
                        changed = true;
                        break;
                    }
                    gap += segs[b].nodes.size();
                    if (gap > static_cast<std::size_t>(max_gap)) break;
                }
            }
            if (changed) break;
        }
    }

    // Re-densify ids in order of each sequence's first node.
    std::map<int, int> remap;
    for (ExplanationNode& n : out.nodes) {
        if (!n.seq) continue;
        auto it = remap.find(*n.seq);
        if (it == remap.end()) it = remap.emplace(*n.seq, static_cast<int>(remap.size())).first;
        n.seq = it->second;
    }
    return out;
}

}  // namespace tsce
