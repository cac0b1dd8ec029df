#pragma once

#include "tsce/graph.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tsce {

/// One observation of every variable at a single time step.
using Row = std::map<std::string, double, std::less<>>;

/// Boolean expression over a row; grammar in docs/predicates.md.
///
///   expr       := and_expr { "or" and_expr }
///   and_expr   := unary { "and" unary }
///   unary      := "not" unary | primary
///   primary    := "(" expr ")" | "true" | "false" | IDENT "==" ("0" | "1")
class Predicate {
public:
    static Predicate parse(std::string_view source);
    static Predicate always();

    /// Throws variable_not_found when the row lacks a referenced variable.
    bool evaluate(const Row& row) const;

    const std::string& source() const { return source_; }
    std::vector<std::string> variables() const;

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

struct Context {
    std::string name;
    Predicate predicate;
    TemporalCausalGraph graph;
};

/// Counts from checking context predicates against every row of a dataset.
struct ExclusivityReport {
    std::size_t rows = 0;
    std::size_t unmatched = 0;
    std::size_t overlapping = 0;
    std::map<std::string, std::size_t> matches;  ///< first-match counts per context

    bool exclusive() const { return unmatched == 0 && overlapping == 0; }
};

/// Ordered set of named contexts. The first context whose predicate holds
/// for a row governs that row.
class ContextSet {
public:
    ContextSet() = default;
    explicit ContextSet(std::vector<Context> contexts);

    const std::vector<Context>& contexts() const { return contexts_; }
    std::size_t size() const { return contexts_.size(); }

    /// First matching context; throws no_context when none matches.
    const Context& select(const Row& row) const;
    const Context& by_name(std::string_view name) const;

    ExclusivityReport check(const std::vector<Row>& rows) const;

private:
    std::vector<Context> contexts_;
};

// JSON serialization (formats documented in README).
TemporalCausalGraph graph_from_json(std::string_view text);
std::string graph_to_json(const TemporalCausalGraph& graph);
/// When `require_graphs` is false, contexts without a "graph" member get an
/// empty graph; discovery inputs only need names and predicates.
ContextSet context_set_from_json(std::string_view text, bool require_graphs = true);
std::string context_set_to_json(const ContextSet& contexts);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace tsce
