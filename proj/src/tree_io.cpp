#include "tsce/engine.hpp"

#include "tsce/error.hpp"

#include <json.hpp>

namespace tsce {

using json = nlohmann::ordered_json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

void fail(const std::string& msg) { throw Error(ErrorCode::invalid_tree, msg); }

}  // namespace

std::string tree_to_json(const ExplanationTree& tree) {
    json nodes = json::array();
    for (const ExplanationNode& n : tree.nodes) {
        json node;
        node["id"] = n.id;
        node["var"] = n.var;
        node["kind"] = std::string(to_string(n.kind));
        node["t"] = n.t;
        node["context"] = n.context;
        node["value"] = optional_number(n.value);
        node["phi"] = optional_number(n.phi);
        node["alpha"] = optional_number(n.alpha);
        node["er"] = {n.er.er1, n.er.er2, n.er.er3};
        node["seq"] = n.seq ? json(*n.seq) : json(nullptr);
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (auto [p, c] : tree.edges()) edges.push_back({p, c});
    json j;
    j["version"] = 1;
    j["mode"] = std::string(to_string(tree.mode));
    j["K"] = tree.selection.K;
    j["selection"] = tree.selection.to_string();
    j["nodes"] = std::move(nodes);
    j["edges"] = std::move(edges);
    return j.dump(2) + "\n";
}

ExplanationTree tree_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::parse_error, std::string("malformed tree JSON: ") + ex.what());
    }
    ExplanationTree tree;
    try {
        tree.mode = explain_mode_from_string(j.at("mode").get<std::string>());
        tree.selection = SelectionConfig::parse(j.value("selection", std::string("all")), j.at("K").get<int>());
        for (const json& jn : j.at("nodes")) {
            ExplanationNode n;
            n.id = jn.at("id").get<int>();
            n.var = jn.at("var").get<std::string>();
            n.kind = var_kind_from_string(jn.value("kind", std::string("continuous")));
            n.t = jn.at("t").get<int>();
            n.context = jn.value("context", std::string());
            n.value = read_optional(jn, "value");
            n.phi = read_optional(jn, "phi");
            n.alpha = read_optional(jn, "alpha");
            const json& er = jn.at("er");
            if (!er.is_array() || er.size() != 3) fail("node " + std::to_string(n.id) + ": er must have 3 entries");
            n.er = {er[0].get<int>(), er[1].get<int>(), er[2].get<int>()};
            if (jn.contains("seq") && !jn.at("seq").is_null()) n.seq = jn.at("seq").get<int>();
            if (n.id != static_cast<int>(tree.nodes.size())) fail("node ids must be 0..n-1 in order");
            tree.nodes.push_back(std::move(n));
        }
        if (tree.nodes.empty()) fail("tree has no nodes");
        for (const json& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) fail("edges must be [parent, child] pairs");
            int p = e[0].get<int>(), c = e[1].get<int>();
            int size = static_cast<int>(tree.nodes.size());
            if (p < 0 || c < 0 || p >= size || c >= size) fail("edge references unknown node");
            if (p >= c) fail("edge " + std::to_string(p) + "->" + std::to_string(c) + " breaks breadth-first ids");
            if (tree.nodes[c].parent >= 0) fail("node " + std::to_string(c) + " has two parents");
            tree.nodes[c].parent = p;
            tree.nodes[p].children.push_back(c);
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::parse_error, std::string("tree JSON: ") + ex.what());
    }
    for (ExplanationNode& n : tree.nodes) {
        const ERTriple& er = n.er;
        auto unit = [](int v) { return v >= -1 && v <= 1; };
        if (!unit(er.er1) || !unit(er.er2) || er.er3 < 0 || er.er3 > 1 || (er.er1 != 0 && er.er2 != 0)) {
            fail("node " + std::to_string(n.id) + ": malformed indicators");
        }
        if (n.id == 0) continue;
        if (n.parent < 0) fail("node " + std::to_string(n.id) + " is disconnected from the root");
        const ExplanationNode& parent = tree.nodes[n.parent];
        n.depth = parent.depth + 1;
        bool ordered = tree.mode == ExplainMode::retrospective ? n.t <= parent.t : n.t >= parent.t;
        if (!ordered) fail("node " + std::to_string(n.id) + " runs against the tree's time direction");
    }
    return tree;
}

}  // namespace tsce
