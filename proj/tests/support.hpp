#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. None of these call into the library code they are compared with.

#include "tsce/coinrunner.hpp"
#include "tsce/context.hpp"
#include "tsce/data.hpp"
#include "tsce/engine.hpp"
#include "tsce/graph.hpp"
#include "tsce/rules.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using tsce::ERTriple;

/// delta_1 / delta_2 enumerated over both bindings R1 != R2 of {<, >}.
ERTriple literal_continuous(double alpha, double x, double y, double phi_x, double phi_y);
/// (s(a) < 0 and x xor y) or (s(a) > 0 and x == y), evaluated as written.
ERTriple literal_binary(double alpha, int x, int y);

struct Sibling {
    std::string var;
    int t = 0;
    int er1 = 0;
    double score = 0.0;
};
/// Index of the sibling that should carry ER3, or -1.
int er3_winner(const std::vector<Sibling>& siblings);

/// Random zero-lag DAG plus lag-1 edges over variables V0..V{n-1}.
tsce::TemporalCausalGraph random_graph(std::mt19937_64& rng, int vars, double lag_edge_p = 0.4,
                                       double edge_p = 0.5);

struct NaiveNode {
    std::string var;
    int t = 0;
    std::string context;
    std::optional<double> value;
    std::optional<double> phi;
    std::optional<double> alpha;
    ERTriple er;
    int parent = -1;
};

struct NaiveSetup {
    std::vector<tsce::TemporalCausalGraph> graphs;  ///< context k governs rows with regime == k
    tsce::PanelDataset data;                        ///< graph variables plus "regime"
    std::size_t individual = 0;
    std::string root_var;
    int root_t = 0;
    bool retro = true;
    tsce::SelectionMode mode = tsce::SelectionMode::all;
    double theta = 0.0;
    int n = 1;
    int K = 0;
};

/// Full recursion of the explanation definition without any bookkeeping,
/// followed by a breadth-first pass that turns repeated (var, t) pairs into
/// leaves. Returned in breadth-first order.
std::vector<NaiveNode> naive_explain(const NaiveSetup& setup);

/// Random small graphs, panel and question for comparing explain with
/// naive_explain.
NaiveSetup random_setup(std::mt19937_64& rng);
/// Appends a "regime" column (all zeros unless given) to a panel.
tsce::PanelDataset with_regime(const tsce::PanelDataset& data);
/// The library's explain on the same inputs as naive_explain.
tsce::ExplanationTree run_engine(const NaiveSetup& setup);
/// Empty string when equal, otherwise a description of the first difference.
std::string compare(const std::vector<NaiveNode>& expected, const tsce::ExplanationTree& actual);

/// Flattened static explanation of a single-step sample: every (cause, effect,
/// triple) reached by recursing over all parents without a depth limit.
struct StaticEntry {
    std::string cause;
    std::string effect;
    ERTriple er;
    friend auto operator<=>(const StaticEntry&, const StaticEntry&) = default;
};
std::vector<StaticEntry> static_explanation(const tsce::TemporalCausalGraph& graph, const std::map<std::string, double>& x,
                                            const std::map<std::string, double>& phi, const std::string& root);

/// Sum over every path from src to dst whose interior lies wholly in `masked`,
/// found by trying every ordered subset of the masked variables. Keyed by the
/// path's total lag.
std::map<int, double> masked_path_sums(const tsce::TemporalCausalGraph& graph, const std::vector<std::string>& masked,
                                       const std::string& src, const std::string& dst);

/// X_t = A X_{t-1} + e with e ~ N(0, sigma^2), burn-in discarded.
Eigen::MatrixXd simulate_var(const Eigen::MatrixXd& A, int T, double sigma, std::mt19937_64& rng);

/// The score bookkeeping identity of a finished CoinRunner game.
bool score_identity_holds(const tsce::Rollout& rollout);

}  // namespace oracle
