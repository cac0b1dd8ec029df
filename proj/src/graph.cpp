#include "tsce/graph.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace tsce {

std::string_view to_string(VarKind kind) {
    return kind == VarKind::binary ? "binary" : "continuous";
}

VarKind var_kind_from_string(std::string_view text) {
    if (text == "binary") return VarKind::binary;
    if (text == "continuous") return VarKind::continuous;
    throw Error(ErrorCode::parse_error, "unknown variable kind '" + std::string(text) + "'");
}

std::string to_string(const TimedVar& node) {
    return node.var + "@" + std::to_string(node.t);
}

TemporalCausalGraph::TemporalCausalGraph(std::vector<Variable> variables, std::vector<Edge> edges)
    : variables_(std::move(variables)), edges_(std::move(edges)) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name.empty()) {
            throw Error(ErrorCode::invalid_graph, "variable with empty name");
        }
        if (!index.emplace(variables_[i].name, i).second) {
            throw Error(ErrorCode::invalid_graph, "duplicate variable '" + variables_[i].name + "'");
        }
    }

    in_.assign(variables_.size(), {});
    out_.assign(variables_.size(), {});
    std::set<std::tuple<std::size_t, std::size_t, int>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        auto s = index.find(edge.src);
        auto d = index.find(edge.dst);
        if (s == index.end() || d == index.end()) {
            throw Error(ErrorCode::invalid_graph,
                        "edge " + edge.src + "->" + edge.dst + " references an undeclared variable");
        }
        if (edge.weight == 0.0) {
            throw Error(ErrorCode::invalid_graph, "edge " + edge.src + "->" + edge.dst + " has zero weight");
        }
        if (edge.lag < 0) {
            throw Error(ErrorCode::invalid_graph, "edge " + edge.src + "->" + edge.dst + " has negative lag");
        }
        if (edge.lag == 0 && s->second == d->second) {
            throw Error(ErrorCode::invalid_graph, "zero-lag self-edge on '" + edge.src + "'");
        }
        if (!seen.emplace(s->second, d->second, edge.lag).second) {
            throw Error(ErrorCode::invalid_graph,
                        "duplicate edge " + edge.src + "->" + edge.dst + " lag " + std::to_string(edge.lag));
        }
        out_[s->second].push_back(e);
        in_[d->second].push_back(e);
    }

    // Kahn's algorithm over the zero-lag sub-graph.
    std::vector<int> indegree(variables_.size(), 0);
    for (const Edge& edge : edges_) {
        if (edge.lag == 0) ++indegree[index.at(edge.dst)];
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < indegree.size(); ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::size_t v = ready.front();
        ready.pop_front();
        ++visited;
        for (std::size_t e : out_[v]) {
            if (edges_[e].lag != 0) continue;
            std::size_t w = index.at(edges_[e].dst);
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
    if (visited != variables_.size()) {
        throw Error(ErrorCode::invalid_graph, "zero-lag sub-graph contains a cycle");
    }
}

bool TemporalCausalGraph::has_variable(std::string_view name) const {
    return std::any_of(variables_.begin(), variables_.end(),
                       [&](const Variable& v) { return v.name == name; });
}

std::size_t TemporalCausalGraph::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name == name) return i;
    }
    throw Error(ErrorCode::variable_not_found, "variable '" + std::string(name) + "' not in graph");
}

const Variable& TemporalCausalGraph::variable(std::string_view name) const {
    return variables_[index_of(name)];
}

std::vector<Edge> TemporalCausalGraph::incoming(std::string_view name) const {
    std::vector<Edge> result;
    for (std::size_t e : in_[index_of(name)]) result.push_back(edges_[e]);
    return result;
}

std::vector<Edge> TemporalCausalGraph::outgoing(std::string_view name) const {
    std::vector<Edge> result;
    for (std::size_t e : out_[index_of(name)]) result.push_back(edges_[e]);
    return result;
}

std::optional<double> TemporalCausalGraph::weight(std::string_view src, std::string_view dst,
                                                  int lag) const {
    for (std::size_t e : out_[index_of(src)]) {
        if (edges_[e].dst == dst && edges_[e].lag == lag) return edges_[e].weight;
    }
    return std::nullopt;
}

void TemporalCausalGraph::check_time(int t) const {
    if (t < 0) throw Error(ErrorCode::invalid_argument, "negative time index " + std::to_string(t));
}

std::vector<TimedVar> TemporalCausalGraph::parents(std::string_view name, int t) const {
    check_time(t);
    std::vector<TimedVar> result;
    for (std::size_t e : in_[index_of(name)]) {
        int s = t - edges_[e].lag;
        if (s >= 0) result.push_back({edges_[e].src, s});
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<TimedVar> TemporalCausalGraph::children(std::string_view name, int t) const {
    check_time(t);
    std::vector<TimedVar> result;
    for (std::size_t e : out_[index_of(name)]) result.push_back({edges_[e].dst, t + edges_[e].lag});
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<TimedVar> TemporalCausalGraph::ancestors(std::string_view name, int t) const {
    check_time(t);
    std::set<TimedVar> found;
    std::deque<TimedVar> frontier{{std::string(name), t}};
    while (!frontier.empty()) {
        TimedVar node = std::move(frontier.front());
        frontier.pop_front();
        for (TimedVar& p : parents(node.var, node.t)) {
            if (found.insert(p).second) frontier.push_back(std::move(p));
        }
    }
    return {found.begin(), found.end()};
}

std::vector<TimedVar> TemporalCausalGraph::descendants(std::string_view name, int t, int horizon) const {
    check_time(t);
    if (horizon < t) {
        throw Error(ErrorCode::invalid_argument, "descendant horizon " + std::to_string(horizon) +
                                                     " lies before t=" + std::to_string(t));
    }
    std::set<TimedVar> found;
    std::deque<TimedVar> frontier{{std::string(name), t}};
    while (!frontier.empty()) {
        TimedVar node = std::move(frontier.front());
        frontier.pop_front();
        for (TimedVar& c : children(node.var, node.t)) {
            if (c.t > horizon) continue;
            if (found.insert(c).second) frontier.push_back(std::move(c));
        }
    }
    return {found.begin(), found.end()};
}

int TemporalCausalGraph::max_lag() const {
    int lag = 0;
    for (const Edge& e : edges_) lag = std::max(lag, e.lag);
    return lag;
}

}  // namespace tsce
