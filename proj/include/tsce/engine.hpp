#pragma once

#include "tsce/context.hpp"
#include "tsce/data.hpp"
#include "tsce/graph.hpp"
#include "tsce/rules.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsce {

enum class Relation { less, greater };

/// Continuous form: "<var> <|> <mean|p<k>> @ t=<int> ind=<int>".
/// Behaviour form: "<var> @ t=<int> rollout=<id>" (no relation/statistic).
struct WhyQuestion {
    std::string var;
    int t = 0;
    std::size_t unit = 0;  ///< individual index or rollout id
    std::optional<Relation> relation;
    std::optional<PopulationStatistic> statistic;

    bool behaviour() const { return !relation.has_value(); }
    static WhyQuestion parse(std::string_view text);
    std::string to_string() const;
};

/// One individual's (or one rollout's) time series as the engine sees it.
class Trajectory {
public:
    virtual ~Trajectory() = default;

    /// Number of recorded steps; valid times are [0, horizon()).
    virtual int horizon() const = 0;
    virtual const std::vector<Variable>& variables() const = 0;
    virtual double value(std::string_view var, int t) const = 0;
    /// Population statistic of (var, t); empty in behaviour mode.
    virtual std::optional<double> phi(std::string_view var, int t) const = 0;
    virtual Row row(int t) const = 0;

    VarKind kind(std::string_view var) const;
    bool has_variable(std::string_view var) const;
};

/// Individual `i` of a panel, with phi taken from a precomputed table.
class PanelTrajectory : public Trajectory {
public:
    PanelTrajectory(const PanelDataset& data, std::size_t individual, const StatisticTable* phi);

    int horizon() const override { return static_cast<int>(data_->horizon()); }
    const std::vector<Variable>& variables() const override { return data_->variables(); }
    double value(std::string_view var, int t) const override;
    std::optional<double> phi(std::string_view var, int t) const override;
    Row row(int t) const override;

private:
    const PanelDataset* data_;
    std::size_t individual_;
    const StatisticTable* phi_;
};

enum class SelectionMode { all, threshold, topn, threshold_or_topn };

struct SelectionConfig {
    SelectionMode mode = SelectionMode::all;
    double theta = 0.0;
    int n = 1;
    int K = 2;

    /// "all", "topn:<n>", "theta:<x>" or "theta:<x>|topn:<n>"; K is set separately.
    static SelectionConfig parse(std::string_view text, int K);
    std::string to_string() const;
};

enum class ExplainMode { retrospective, anticipative };

std::string_view to_string(ExplainMode mode);
ExplainMode explain_mode_from_string(std::string_view text);

struct Candidate {
    TimedVar node;
    double alpha = 0.0;
};

/// Parents (retrospective) or children (anticipative) of (var, t) filtered by
/// the selection config, ordered by |alpha| descending, then name, then later
/// time first.
std::vector<Candidate> select_explainers(const TemporalCausalGraph& graph, std::string_view var, int t,
                                         const SelectionConfig& config, ExplainMode mode);

struct ValidatedQuestion {
    WhyQuestion question;
    std::string context;
    double value = 0.0;
    std::optional<double> phi;
};

/// Throws invalid_question stating the failed condition, no_context when no
/// context matches the question's row.
ValidatedQuestion validate_question(const WhyQuestion& question, const Trajectory& data,
                                    const ContextSet& contexts);

struct ExplanationNode {
    int id = 0;
    std::string var;
    VarKind kind = VarKind::continuous;
    int t = 0;
    std::string context;
    std::optional<double> value;  ///< empty beyond the recorded horizon
    std::optional<double> phi;
    std::optional<double> alpha;  ///< weight of the edge to the tree parent
    ERTriple er;
    std::optional<int> seq;
    int parent = -1;
    int depth = 0;
    std::vector<int> children;

    bool leaf() const { return children.empty(); }
};

/// Nodes are stored in breadth-first order; nodes[0] is the root and every
/// node's id is its index.
struct ExplanationTree {
    ExplainMode mode = ExplainMode::retrospective;
    SelectionConfig selection;
    std::vector<ExplanationNode> nodes;

    const ExplanationNode& root() const { return nodes.front(); }
    std::vector<std::pair<int, int>> edges() const;
};

struct ExplainOptions {
    ExplainMode mode = ExplainMode::retrospective;
    SelectionConfig selection;
    /// Use sign-only indicators for every child (anticipation at the live frontier).
    bool sign_only = false;
};

/// Breadth-first construction of the explanation tree, followed by
/// assign_sequences. A candidate is always attached; it is expanded only when
/// its depth is below K, no earlier node has the same (var, t), it lies
/// outside the root's descendant (retrospective) or ancestor (anticipative)
/// closure, and its time is within the recorded horizon.
ExplanationTree explain(const ValidatedQuestion& question, const ContextSet& contexts, const Trajectory& data,
                        const ExplainOptions& options);

/// Indicator of one edge, oriented cause -> effect. `cause_phi`/`effect_phi`
/// present selects the continuous rule.
ERTriple evaluate_edge(double alpha, VarKind cause_kind, std::optional<double> cause,
                       std::optional<double> cause_phi, VarKind effect_kind, std::optional<double> effect,
                       std::optional<double> effect_phi, bool sign_only);

/// Recomputes ER3 across the children of `parent_id` in place.
void apply_er3(ExplanationTree& tree, int parent_id);

/// Groups adjacent-in-time non-leaf nodes of one variable whose children
/// carry identical (variable, time offset, indicator) multisets. Leaves get
/// no id. Ids are dense from 0 in order of each group's first node.
void assign_sequences(ExplanationTree& tree);

/// Child signature used by the sequence rules.
struct ChildSignature {
    std::string var;
    int offset = 0;
    ERTriple er;
    friend auto operator<=>(const ChildSignature&, const ChildSignature&) = default;
};
std::vector<ChildSignature> child_signature(const ExplanationTree& tree, int node_id);

/// Re-derives ids from BFS order of a tree given as parent links, keeping
/// per-node payloads. Used by the tree operations after structural edits.
ExplanationTree renumber_bfs(const ExplanationTree& tree, const std::vector<int>& keep);

std::string tree_to_json(const ExplanationTree& tree);
ExplanationTree tree_from_json(std::string_view text);

}  // namespace tsce
