#include "tsce/engine.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace tsce {

std::vector<ChildSignature> child_signature(const ExplanationTree& tree, int node_id) {
    const ExplanationNode& node = tree.nodes.at(node_id);
    std::vector<ChildSignature> sig;
    for (int c : node.children) {
        const ExplanationNode& child = tree.nodes[c];
        sig.push_back({child.var, child.t - node.t, child.er});
    }
    std::sort(sig.begin(), sig.end());
    return sig;
}

void assign_sequences(ExplanationTree& tree) {
    std::map<std::string, std::vector<int>> chains;
    for (ExplanationNode& n : tree.nodes) {
        n.seq.reset();
        if (!n.leaf()) chains[n.var].push_back(n.id);
    }
    std::vector<std::vector<int>> groups;
    for (auto& [var, ids] : chains) {
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            if (tree.nodes[a].t != tree.nodes[b].t) return tree.nodes[a].t > tree.nodes[b].t;
            return a < b;
        });
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (k > 0) {
                const ExplanationNode& prev = tree.nodes[groups.back().back()];
                const ExplanationNode& cur = tree.nodes[ids[k]];
                if (prev.t - cur.t == 1 && child_signature(tree, prev.id) == child_signature(tree, cur.id)) {
                    groups.back().push_back(ids[k]);
                    continue;
                }
            }
            groups.push_back({ids[k]});
        }
    }
    std::sort(groups.begin(), groups.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int id : groups[g]) tree.nodes[id].seq = static_cast<int>(g);
    }
}

ExplanationTree renumber_bfs(const ExplanationTree& tree, const std::vector<int>& keep) {
    std::vector<bool> kept(tree.nodes.size(), false);
    for (int id : keep) kept.at(id) = true;
    if (tree.nodes.empty() || !kept[0]) throw Error(ErrorCode::invalid_tree, "renumbering must keep the root");

    ExplanationTree out;
    out.mode = tree.mode;
    out.selection = tree.selection;
    std::vector<int> new_id(tree.nodes.size(), -1);
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int old = queue.front();
        queue.pop_front();
        ExplanationNode n = tree.nodes[old];
        n.id = static_cast<int>(out.nodes.size());
        new_id[old] = n.id;
        n.parent = n.parent < 0 ? -1 : new_id[n.parent];
        n.depth = n.parent < 0 ? 0 : out.nodes[n.parent].depth + 1;
        n.children.clear();
        if (n.parent >= 0) out.nodes[n.parent].children.push_back(n.id);
        out.nodes.push_back(std::move(n));
        for (int c : tree.nodes[old].children) {
            if (kept[c]) queue.push_back(c);
        }
    }
    return out;
}

}  // namespace tsce
