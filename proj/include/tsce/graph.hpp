#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsce {

enum class VarKind { continuous, binary };

std::string_view to_string(VarKind kind);
VarKind var_kind_from_string(std::string_view text);

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// A weighted causal edge. `lag` counts time steps from src to dst, so a lag-1
/// edge links src at t-1 to dst at t.
struct Edge {
    std::string src;
    std::string dst;
    int lag = 0;
    double weight = 0.0;
};

/// A variable pinned to a time index; the node type of the unrolled graph.
struct TimedVar {
    std::string var;
    int t = 0;

    friend auto operator<=>(const TimedVar&, const TimedVar&) = default;
};

std::string to_string(const TimedVar& node);

/// Weighted temporal causal graph for a single context. Immutable after
/// construction; every query is a pure function of the stored edges.
///
/// Validation on construction: unique variable names, declared endpoints,
/// non-zero weights, non-negative lags, no zero-lag self-edge, no duplicate
/// (src, dst, lag) triple and an acyclic zero-lag sub-graph.
class TemporalCausalGraph {
public:
    TemporalCausalGraph() = default;
    TemporalCausalGraph(std::vector<Variable> variables, std::vector<Edge> edges);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_variable(std::string_view name) const;
    const Variable& variable(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;

    /// Edges ending in / starting from `name`, in declaration order.
    std::vector<Edge> incoming(std::string_view name) const;
    std::vector<Edge> outgoing(std::string_view name) const;

    std::optional<double> weight(std::string_view src, std::string_view dst, int lag) const;

    /// Pa of (v, t): sources of incoming edges shifted back by their lag,
    /// dropping anything before t = 0. Sorted by name, then time.
    std::vector<TimedVar> parents(std::string_view name, int t) const;
    /// Mirror of parents over outgoing edges; no upper time bound.
    std::vector<TimedVar> children(std::string_view name, int t) const;

    /// Transitive closure of parents. The start node is not included.
    std::vector<TimedVar> ancestors(std::string_view name, int t) const;
    /// Transitive closure of children restricted to times <= horizon.
    std::vector<TimedVar> descendants(std::string_view name, int t, int horizon) const;

    int max_lag() const;

private:
    void check_time(int t) const;

    std::vector<Variable> variables_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::vector<std::size_t>> out_;
};

}  // namespace tsce
