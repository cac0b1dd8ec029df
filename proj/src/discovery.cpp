#include "tsce/discovery.hpp"

#include "tsce/error.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <tuple>

namespace tsce {

using json = nlohmann::ordered_json;

std::size_t TimeSeriesSet::lag_pairs() const {
    std::size_t n = 0;
    for (const Eigen::MatrixXd& s : segments) n += s.rows() > 1 ? static_cast<std::size_t>(s.rows() - 1) : 0;
    return n;
}

std::string_view to_string(DiscoveryMethod method) {
    return method == DiscoveryMethod::granger_var ? "granger" : "lasso";
}

DiscoveryMethod discovery_method_from_string(std::string_view text) {
    if (text == "granger" || text == "granger_var") return DiscoveryMethod::granger_var;
    if (text == "lasso") return DiscoveryMethod::lasso;
    throw Error(ErrorCode::invalid_argument, "method must be granger or lasso, got '" + std::string(text) + "'");
}

std::string_view to_string(LambdaRule rule) { return rule == LambdaRule::min_mse ? "min" : "1se"; }

LambdaRule lambda_rule_from_string(std::string_view text) {
    if (text == "min") return LambdaRule::min_mse;
    if (text == "1se") return LambdaRule::one_se;
    throw Error(ErrorCode::invalid_argument, "lambda rule must be min or 1se, got '" + std::string(text) + "'");
}

namespace {

struct LagDesign {
    std::vector<std::size_t> columns;  ///< active column indices into the series
    Eigen::MatrixXd lagged;            ///< N x k, active columns at t-1
    Eigen::MatrixXd current;           ///< N x k, active columns at t
};

std::vector<bool> non_constant(const TimeSeriesSet& series) {
    std::size_t d = series.variables.size();
    std::vector<bool> active(d, false);
    for (std::size_t j = 0; j < d; ++j) {
        bool first = true;
        double v0 = 0.0;
        for (const Eigen::MatrixXd& s : series.segments) {
            for (Eigen::Index r = 0; r < s.rows() && !active[j]; ++r) {
                if (first) {
                    v0 = s(r, static_cast<Eigen::Index>(j));
                    first = false;
                } else if (s(r, static_cast<Eigen::Index>(j)) != v0) {
                    active[j] = true;
                }
            }
        }
    }
    return active;
}

LagDesign lag_design(const TimeSeriesSet& series, const std::vector<bool>& active) {
    LagDesign design;
    for (std::size_t j = 0; j < active.size(); ++j) {
        if (active[j]) design.columns.push_back(j);
    }
    auto k = static_cast<Eigen::Index>(design.columns.size());
    auto n = static_cast<Eigen::Index>(series.lag_pairs());
    design.lagged.resize(n, k);
    design.current.resize(n, k);
    Eigen::Index row = 0;
    for (const Eigen::MatrixXd& s : series.segments) {
        for (Eigen::Index r = 1; r < s.rows(); ++r, ++row) {
            for (Eigen::Index c = 0; c < k; ++c) {
                auto col = static_cast<Eigen::Index>(design.columns[c]);
                design.lagged(row, c) = s(r - 1, col);
                design.current(row, c) = s(r, col);
            }
        }
    }
    return design;
}

void check_series(const TimeSeriesSet& series) {
    for (const Eigen::MatrixXd& s : series.segments) {
        if (static_cast<std::size_t>(s.cols()) != series.variables.size()) {
            throw Error(ErrorCode::invalid_argument, "segment width does not match the variable list");
        }
        if (!s.allFinite()) throw Error(ErrorCode::fit_error, "series contains non-finite values");
    }
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& lagged) {
    Eigen::MatrixXd X(lagged.rows(), lagged.cols() + 1);
    X.col(0).setOnes();
    X.rightCols(lagged.cols()) = lagged;
    return X;
}

}  // namespace

Var1Fit fit_var1(const TimeSeriesSet& series) {
    check_series(series);
    Var1Fit fit;
    std::size_t d = series.variables.size();
    for (const Variable& v : series.variables) fit.names.push_back(v.name);
    fit.active = non_constant(series);
    for (std::size_t j = 0; j < d; ++j) {
        if (!fit.active[j]) fit.warnings.push_back("dropped constant column '" + fit.names[j] + "'");
    }
    LagDesign design = lag_design(series, fit.active);
    auto k = static_cast<Eigen::Index>(design.columns.size());
    auto n = design.lagged.rows();
    fit.samples = static_cast<std::size_t>(n);
    if (k == 0) throw Error(ErrorCode::fit_error, "every column is constant");
    if (n <= k + 2) {
        throw Error(ErrorCode::fit_error, "need more than " + std::to_string(k + 2) + " lag pairs for " +
                                              std::to_string(k) + " variables, got " + std::to_string(n));
    }

    Eigen::MatrixXd X = with_intercept(design.lagged);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) {
        std::vector<std::string> colliding;
        for (Eigen::Index c = 1; c <= k; ++c) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> partial(X.leftCols(c + 1));
            if (partial.rank() < c + 1) colliding.push_back(fit.names[design.columns[c - 1]]);
        }
        std::string list;
        for (const std::string& s : colliding) list += (list.empty() ? "" : ", ") + s;
        throw Error(ErrorCode::fit_error, "rank-deficient lag design: " + list +
                                              " collinear with earlier columns or the intercept");
    }
    Eigen::MatrixXd B = qr.solve(design.current);
    Eigen::MatrixXd resid = design.current - X * B;
    Eigen::MatrixXd inv = (X.transpose() * X).inverse();

    fit.C = Eigen::MatrixXd::Zero(d, d);
    fit.stderr_ = Eigen::MatrixXd::Zero(d, d);
    fit.intercept = Eigen::VectorXd::Zero(d);
    fit.residual_variance = Eigen::VectorXd::Zero(d);
    for (Eigen::Index a = 0; a < k; ++a) {
        auto dst = static_cast<Eigen::Index>(design.columns[a]);
        double var = resid.col(a).squaredNorm() / static_cast<double>(n - k - 1);
        fit.residual_variance(dst) = var;
        fit.intercept(dst) = B(0, a);
        for (Eigen::Index b = 0; b < k; ++b) {
            auto src = static_cast<Eigen::Index>(design.columns[b]);
            fit.C(dst, src) = B(b + 1, a);
            fit.stderr_(dst, src) = std::sqrt(var * inv(b + 1, b + 1));
        }
    }
    return fit;
}

GrangerResult granger_filter(const TimeSeriesSet& series, const Var1Fit& fit, const DiscoveryConfig& config) {
    if (!(config.alpha_level > 0.0 && config.alpha_level < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "alpha_level must lie in (0, 1)");
    }
    std::size_t d = series.variables.size();
    LagDesign design = lag_design(series, fit.active);
    auto k = static_cast<Eigen::Index>(design.columns.size());
    auto n = design.lagged.rows();
    Eigen::MatrixXd X = with_intercept(design.lagged);
    double df2 = static_cast<double>(n - k - 1);
    boost::math::fisher_f_distribution<double> dist(1.0, df2);

    GrangerResult result;
    result.fit = fit;
    result.p_values = Eigen::MatrixXd::Constant(d, d, std::numeric_limits<double>::quiet_NaN());

    Eigen::MatrixXd B = X.colPivHouseholderQr().solve(design.current);
    Eigen::VectorXd rss_full = (design.current - X * B).colwise().squaredNorm();
    std::vector<Edge> edges;
    for (Eigen::Index b = 0; b < k; ++b) {
        Eigen::MatrixXd Xr(n, k);
        Xr.leftCols(b + 1) = X.leftCols(b + 1);
        Xr.rightCols(k - b - 1) = X.rightCols(k - b - 1);
        Eigen::MatrixXd Br = Xr.colPivHouseholderQr().solve(design.current);
        Eigen::VectorXd rss_restricted = (design.current - Xr * Br).colwise().squaredNorm();
        auto src = static_cast<Eigen::Index>(design.columns[b]);
        for (Eigen::Index a = 0; a < k; ++a) {
            auto dst = static_cast<Eigen::Index>(design.columns[a]);
            double gain = rss_restricted(a) - rss_full(a);
            double scale = std::max(1.0, rss_restricted(a));
            double p = 1.0;
            if (rss_full(a) <= 1e-14 * scale) {
                p = gain > 1e-12 * scale ? 0.0 : 1.0;
            } else if (gain > 0.0) {
                double F = gain / (rss_full(a) / df2);
                p = boost::math::cdf(boost::math::complement(dist, F));
            }
            result.p_values(dst, src) = p;
        }
    }
    for (std::size_t dst = 0; dst < d; ++dst) {
        for (std::size_t src = 0; src < d; ++src) {
            double p = result.p_values(dst, src);
            double w = fit.C(dst, src);
            if (!std::isnan(p) && p < config.alpha_level && w != 0.0) {
                edges.push_back({series.variables[src].name, series.variables[dst].name, 1, w});
            }
        }
    }
    result.graph = TemporalCausalGraph(series.variables, std::move(edges));
    return result;
}

std::vector<double> default_lambda_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    double n = static_cast<double>(X.rows());
    double lmax = (X.transpose() * y).cwiseAbs().maxCoeff() / n;
    if (!(lmax > 0.0)) return {0.0};
    std::vector<double> grid(100);
    for (int i = 0; i < 100; ++i) grid[i] = lmax * std::pow(10.0, -3.0 * i / 99.0);
    return grid;
}

std::vector<Eigen::VectorXd> lasso_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const std::vector<double>& lambdas) {
    const double n = static_cast<double>(X.rows());
    const Eigen::Index k = X.cols();
    Eigen::VectorXd colsq = X.colwise().squaredNorm().transpose() / n;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd r = y;
    const double tol = 1e-13 * std::max(1.0, std::sqrt(y.squaredNorm() / n));
    std::vector<Eigen::VectorXd> path;
    for (double lambda : lambdas) {
        for (int iter = 0; iter < 200000; ++iter) {
            double max_step = 0.0;
            for (Eigen::Index j = 0; j < k; ++j) {
                if (colsq(j) == 0.0) continue;
                double rho = X.col(j).dot(r) / n + colsq(j) * b(j);
                double shrunk = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / colsq(j);
                double delta = shrunk - b(j);
                if (delta != 0.0) {
                    r.noalias() -= delta * X.col(j);
                    b(j) = shrunk;
                    max_step = std::max(max_step, std::abs(delta) * std::sqrt(colsq(j)));
                }
            }
            if (max_step < tol) break;
        }
        path.push_back(b);
    }
    return path;
}

namespace {

struct Centered {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::RowVectorXd x_mean;
    double y_mean = 0.0;
};

Centered center(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Centered c;
    c.x_mean = X.colwise().mean();
    c.y_mean = y.mean();
    c.X = X.rowwise() - c.x_mean;
    c.y = y.array() - c.y_mean;
    return c;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& M, Eigen::Index skip_begin, Eigen::Index skip_end) {
    Eigen::MatrixXd out(M.rows() - (skip_end - skip_begin), M.cols());
    out.topRows(skip_begin) = M.topRows(skip_begin);
    out.bottomRows(M.rows() - skip_end) = M.bottomRows(M.rows() - skip_end);
    return out;
}

}  // namespace

LassoResult fit_lasso(const TimeSeriesSet& series, const DiscoveryConfig& config) {
    check_series(series);
    if (config.lambdas) {
        if (config.lambdas->empty()) throw Error(ErrorCode::invalid_argument, "empty lambda grid");
        for (double l : *config.lambdas) {
            if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorCode::invalid_argument, "lambda must be >= 0");
        }
    }
    if (config.folds < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 folds");
    std::size_t d = series.variables.size();
    std::vector<bool> active = non_constant(series);
    LagDesign design = lag_design(series, active);
    auto k = static_cast<Eigen::Index>(design.columns.size());
    auto n = design.lagged.rows();

    LassoResult result;
    for (std::size_t j = 0; j < d; ++j) {
        if (!active[j]) result.warnings.push_back("dropped constant column '" + series.variables[j].name + "'");
    }
    if (k == 0) throw Error(ErrorCode::fit_error, "every column is constant");
    if (n < 2 * config.folds) {
        throw Error(ErrorCode::fit_error, "need at least " + std::to_string(2 * config.folds) +
                                              " lag pairs for " + std::to_string(config.folds) + "-fold CV");
    }
    result.coefficients = Eigen::MatrixXd::Zero(d, d);
    result.chosen_lambda.assign(d, std::numeric_limits<double>::quiet_NaN());
    result.grids.resize(d);
    result.cv_mse.resize(d);

    std::vector<Edge> edges;
    for (Eigen::Index a = 0; a < k; ++a) {
        auto dst = design.columns[a];
        Eigen::VectorXd y = design.current.col(a);
        Centered full = center(design.lagged, y);
        std::vector<double> grid = config.lambdas ? *config.lambdas : default_lambda_grid(full.X, full.y);
        std::sort(grid.begin(), grid.end(), std::greater<>());

        std::vector<double> mse(grid.size(), 0.0);
        std::vector<std::vector<double>> fold_mse(grid.size());
        for (int f = 0; f < config.folds; ++f) {
            Eigen::Index lo = n * f / config.folds, hi = n * (f + 1) / config.folds;
            Centered train = center(take_rows(design.lagged, lo, hi), take_rows(y, lo, hi));
            auto path = lasso_path(train.X, train.y, grid);
            Eigen::MatrixXd Xtest = design.lagged.middleRows(lo, hi - lo).rowwise() - train.x_mean;
            Eigen::VectorXd ytest = y.segment(lo, hi - lo);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                Eigen::VectorXd pred = (Xtest * path[g]).array() + train.y_mean;
                double m = (ytest - pred).squaredNorm() / static_cast<double>(hi - lo);
                mse[g] += m / config.folds;
                fold_mse[g].push_back(m);
            }
        }
        std::size_t best = static_cast<std::size_t>(std::min_element(mse.begin(), mse.end()) - mse.begin());
        if (config.lambda_rule == LambdaRule::one_se) {
            double var = 0.0;
            for (double m : fold_mse[best]) var += (m - mse[best]) * (m - mse[best]);
            double se = std::sqrt(var / (config.folds - 1) / config.folds);
            // grid is descending, so the first qualifying value is the largest penalty
            for (std::size_t g = 0; g < best; ++g) {
                if (mse[g] <= mse[best] + se) {
                    best = g;
                    break;
                }
            }
        }
        std::vector<double> prefix(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(best) + 1);
        Eigen::VectorXd coef = lasso_path(full.X, full.y, prefix).back();

        result.chosen_lambda[dst] = grid[best];
        result.grids[dst] = grid;
        result.cv_mse[dst] = mse;
        for (Eigen::Index b = 0; b < k; ++b) {
            auto src = design.columns[b];
            result.coefficients(static_cast<Eigen::Index>(dst), static_cast<Eigen::Index>(src)) = coef(b);
        }
    }
    for (std::size_t dst = 0; dst < d; ++dst) {
        for (std::size_t src = 0; src < d; ++src) {
            double w = result.coefficients(static_cast<Eigen::Index>(dst), static_cast<Eigen::Index>(src));
            if (w != 0.0) edges.push_back({series.variables[src].name, series.variables[dst].name, 1, w});
        }
    }
    result.graph = TemporalCausalGraph(series.variables, std::move(edges));
    return result;
}

TemporalCausalGraph average_graphs(const std::vector<TemporalCausalGraph>& graphs, double prune) {
    if (graphs.empty()) throw Error(ErrorCode::invalid_argument, "nothing to average");
    auto names = [](const TemporalCausalGraph& g) {
        std::vector<std::string> n;
        for (const Variable& v : g.variables()) n.push_back(v.name);
        std::sort(n.begin(), n.end());
        return n;
    };
    const auto reference = names(graphs.front());
    using Key = std::tuple<std::string, std::string, int>;
    std::map<Key, std::vector<double>> weights;
    for (const TemporalCausalGraph& g : graphs) {
        if (names(g) != reference) throw Error(ErrorCode::invalid_argument, "graphs have different variable sets");
        for (const Edge& e : g.edges()) weights[{e.src, e.dst, e.lag}].push_back(e.weight);
    }
    std::vector<Edge> edges;
    for (auto& [key, ws] : weights) {
        std::sort(ws.begin(), ws.end());
        double sum = 0.0;
        for (double w : ws) sum += w;
        double mean = sum / static_cast<double>(graphs.size());
        if (std::abs(mean) < prune || mean == 0.0) continue;
        edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mean});
    }
    return TemporalCausalGraph(graphs.front().variables(), std::move(edges));
}

std::vector<std::pair<std::size_t, std::size_t>> condition_runs(const std::vector<bool>& match, int margin,
                                                                std::size_t min_samples) {
    if (margin < 0) throw Error(ErrorCode::invalid_argument, "margin must be >= 0");
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    const std::size_t n = match.size();
    const auto m = static_cast<std::size_t>(margin);
    for (std::size_t i = 0; i < n;) {
        if (!match[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && match[j + 1]) ++j;
        std::size_t lo = i >= m ? i - m : 0;
        std::size_t hi = std::min(n - 1, j + m);
        if (!runs.empty() && lo <= runs.back().second + 1) runs.back().second = hi;
        else runs.emplace_back(lo, hi);
        i = j + 1;
    }
    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (auto r : runs) {
        if (r.second - r.first + 1 >= min_samples) kept.push_back(r);
    }
    return kept;
}

TimeSeriesSet condition_rollout(const Rollout& rollout, const Predicate& predicate, int margin,
                                std::size_t min_samples) {
    TimeSeriesSet series;
    series.variables = frame_variables();
    std::vector<bool> match;
    for (const Frame& f : rollout.frames) match.push_back(predicate.evaluate(f.row()));
    for (auto [lo, hi] : condition_runs(match, margin, min_samples)) {
        Eigen::MatrixXd seg(static_cast<Eigen::Index>(hi - lo + 1), static_cast<Eigen::Index>(series.variables.size()));
        for (std::size_t t = lo; t <= hi; ++t) {
            const Frame& f = rollout.frames[t];
            auto row = static_cast<Eigen::Index>(t - lo);
            seg(row, 0) = f.score;
            for (std::size_t b = 0; b < kFrameBinaries.size(); ++b) seg(row, static_cast<Eigen::Index>(b + 1)) = f.bits[b];
        }
        series.segments.push_back(std::move(seg));
    }
    return series;
}

TimeSeriesSet panel_series(const PanelDataset& data) {
    TimeSeriesSet series;
    series.variables = data.variables();
    auto T = static_cast<Eigen::Index>(data.horizon());
    auto d = static_cast<Eigen::Index>(data.variables().size());
    for (std::size_t i = 0; i < data.individuals(); ++i) {
        Eigen::MatrixXd seg(T, d);
        for (Eigen::Index t = 0; t < T; ++t) {
            for (Eigen::Index v = 0; v < d; ++v) {
                seg(t, v) = data.value(i, static_cast<std::size_t>(t), static_cast<std::size_t>(v));
            }
        }
        series.segments.push_back(std::move(seg));
    }
    return series;
}

namespace {

json matrix_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(std::isfinite(M(r, c)) ? json(M(r, c)) : json(nullptr));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return out;
}

// One fit on a prepared series; returns the graph and fills `record`.
TemporalCausalGraph fit_one(const TimeSeriesSet& series, const DiscoveryConfig& config, json& record) {
    if (config.method == DiscoveryMethod::granger_var) {
        Var1Fit fit = fit_var1(series);
        GrangerResult g = granger_filter(series, fit, config);
        record["samples"] = fit.samples;
        record["p_values"] = matrix_json(g.p_values);
        record["coefficients"] = matrix_json(fit.C);
        std::vector<double> rv(fit.residual_variance.data(), fit.residual_variance.data() + fit.residual_variance.size());
        record["residual_variance"] = vector_json(rv);
        return g.graph;
    }
    LassoResult l = fit_lasso(series, config);
    record["samples"] = series.lag_pairs();
    record["coefficients"] = matrix_json(l.coefficients);
    record["lambda"] = vector_json(l.chosen_lambda);
    record["lambda_rule"] = std::string(to_string(config.lambda_rule));
    return l.graph;
}

void add_noise(TimeSeriesSet& series, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) return;
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::MatrixXd& seg : series.segments) {
        for (std::size_t v = 0; v < series.variables.size(); ++v) {
            if (series.variables[v].kind != VarKind::binary) continue;
            for (Eigen::Index r = 0; r < seg.rows(); ++r) seg(r, static_cast<Eigen::Index>(v)) += noise(rng);
        }
    }
}

// Constant columns carry no information; pinning them keeps the noise off so
// the fit drops them instead of regressing on pure noise.
void freeze_constant(TimeSeriesSet& series, std::vector<bool>& frozen) {
    frozen = non_constant(series);
    for (std::size_t v = 0; v < frozen.size(); ++v) frozen[v] = !frozen[v];
}

void check_config(const DiscoveryConfig& config) {
    if (!(config.alpha_level > 0.0 && config.alpha_level < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "alpha_level must lie in (0, 1)");
    }
    if (config.noise_sigma < 0.0) throw Error(ErrorCode::invalid_argument, "noise must be >= 0");
    if (config.prune < 0.0) throw Error(ErrorCode::invalid_argument, "prune must be >= 0");
}

ContextReport finish(const Context& ctx, const std::vector<TemporalCausalGraph>& graphs,
                     const std::vector<Variable>& variables, const DiscoveryConfig& config, ContextReport report,
                     json fits, Context& out) {
    out = ctx;
    if (graphs.empty()) {
        report.warnings.push_back("no successful fit; graph left empty");
        out.graph = TemporalCausalGraph(variables, {});
    } else {
        out.graph = average_graphs(graphs, config.prune);
    }
    json j;
    j["context"] = ctx.name;
    j["predicate"] = ctx.predicate.source();
    j["method"] = std::string(to_string(config.method));
    j["sources"] = report.sources;
    j["fitted"] = report.fitted;
    j["skipped"] = report.skipped;
    j["warnings"] = report.warnings;
    j["fits"] = std::move(fits);
    report.report_json = j.dump();
    return report;
}

}  // namespace

DiscoveryResult discover(const std::vector<Rollout>& rollouts, const ContextSet& contexts,
                         const DiscoveryConfig& config) {
    check_config(config);
    DiscoveryResult result;
    std::vector<Context> learned;
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        const Context& ctx = contexts.contexts()[c];
        ContextReport report;
        report.context = ctx.name;
        std::vector<TemporalCausalGraph> graphs;
        json fits = json::array();
        for (const Rollout& r : rollouts) {
            TimeSeriesSet series = condition_rollout(r, ctx.predicate, config.margin, config.min_samples);
            if (series.segments.empty()) continue;
            ++report.sources;
            std::vector<bool> frozen;
            freeze_constant(series, frozen);
            std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                              static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(r.id)};
            std::mt19937_64 rng(seq);
            TimeSeriesSet noisy = series;
            for (std::size_t v = 0; v < frozen.size(); ++v) {
                if (frozen[v]) noisy.variables[v].kind = VarKind::continuous;
            }
            add_noise(noisy, config.noise_sigma, rng);
            noisy.variables = series.variables;

            json record;
            record["rollout"] = r.id;
            try {
                graphs.push_back(fit_one(noisy, config, record));
                record["status"] = "ok";
                ++report.fitted;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::fit_error) throw;
                record["status"] = "skipped";
                record["reason"] = e.what();
                ++report.skipped;
            }
            fits.push_back(std::move(record));
        }
        if (report.skipped > 0) {
            report.warnings.push_back(std::to_string(report.skipped) + " fit(s) skipped");
        }
        Context out;
        result.reports.push_back(finish(ctx, graphs, frame_variables(), config, std::move(report), std::move(fits), out));
        learned.push_back(std::move(out));
    }
    result.contexts = ContextSet(std::move(learned));
    return result;
}

DiscoveryResult discover(const PanelDataset& data, const ContextSet& contexts, const DiscoveryConfig& config) {
    check_config(config);
    DiscoveryResult result;
    std::vector<Context> learned;
    for (const Context& ctx : contexts.contexts()) {
        ContextReport report;
        report.context = ctx.name;
        TimeSeriesSet series;
        series.variables = data.variables();
        for (std::size_t i = 0; i < data.individuals(); ++i) {
            std::vector<bool> match;
            for (std::size_t t = 0; t < data.horizon(); ++t) match.push_back(ctx.predicate.evaluate(data.row(i, t)));
            for (auto [lo, hi] : condition_runs(match, config.margin, config.min_samples)) {
                Eigen::MatrixXd seg(static_cast<Eigen::Index>(hi - lo + 1), static_cast<Eigen::Index>(series.variables.size()));
                for (std::size_t t = lo; t <= hi; ++t) {
                    for (std::size_t v = 0; v < series.variables.size(); ++v) {
                        seg(static_cast<Eigen::Index>(t - lo), static_cast<Eigen::Index>(v)) = data.value(i, t, v);
                    }
                }
                series.segments.push_back(std::move(seg));
            }
        }
        std::vector<TemporalCausalGraph> graphs;
        json fits = json::array();
        if (!series.segments.empty()) {
            report.sources = 1;
            json record;
            try {
                graphs.push_back(fit_one(series, config, record));
                record["status"] = "ok";
                report.fitted = 1;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::fit_error) throw;
                record["status"] = "skipped";
                record["reason"] = e.what();
                report.skipped = 1;
            }
            fits.push_back(std::move(record));
        }
        Context out;
        result.reports.push_back(finish(ctx, graphs, data.variables(), config, std::move(report), std::move(fits), out));
        learned.push_back(std::move(out));
    }
    result.contexts = ContextSet(std::move(learned));
    return result;
}

}  // namespace tsce
