#pragma once

#include "tsce/context.hpp"
#include "tsce/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsce {

/// Dense panel: individuals x time steps x variables. Storage is grouped by
/// variable, then time, so the n values of one (variable, t) cell are
/// contiguous.
class PanelDataset {
public:
    PanelDataset() = default;
    PanelDataset(std::vector<Variable> variables, std::size_t individuals, std::size_t horizon);

    std::size_t individuals() const { return n_; }
    std::size_t horizon() const { return T_; }
    const std::vector<Variable>& variables() const { return variables_; }
    std::size_t var_index(std::string_view name) const;

    double value(std::size_t individual, std::size_t t, std::size_t var) const {
        return values_[offset(individual, t, var)];
    }
    void set(std::size_t individual, std::size_t t, std::size_t var, double x) {
        values_[offset(individual, t, var)] = x;
    }

    /// All individuals' values of one variable at one step.
    std::span<const double> slice(std::size_t var, std::size_t t) const;
    Row row(std::size_t individual, std::size_t t) const;

    friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

private:
    std::size_t offset(std::size_t individual, std::size_t t, std::size_t var) const {
        return (var * T_ + t) * n_ + individual;
    }

    std::vector<Variable> variables_;
    std::size_t n_ = 0;
    std::size_t T_ = 0;
    std::vector<double> values_;
};

struct PopulationStatistic {
    enum class Kind { mean, percentile };
    Kind kind = Kind::mean;
    double p = 50.0;  ///< percentile in (0, 100); unused for the mean

    static PopulationStatistic mean() { return {}; }
    static PopulationStatistic percentile(double p);

    /// "mean" or "p<k>", the spelling used by the question grammar.
    std::string name() const;
    static PopulationStatistic parse(std::string_view text);
};

/// Mean, or linearly interpolated percentile, over all individuals at (var, t).
double statistic(const PanelDataset& data, const PopulationStatistic& stat, std::string_view var,
                 std::size_t t);

/// phi for every (variable, t) of one dataset, computed once.
class StatisticTable {
public:
    StatisticTable(const PanelDataset& data, const PopulationStatistic& stat);

    double at(std::size_t var, std::size_t t) const { return values_[var * T_ + t]; }
    const PopulationStatistic& statistic() const { return stat_; }

private:
    PopulationStatistic stat_;
    std::size_t T_ = 0;
    std::vector<double> values_;
};

/// Maps each cell to 1 iff it lies strictly above its (variable, t) statistic.
PanelDataset classify_vs_statistic(const PanelDataset& data, const PopulationStatistic& stat);

struct HansGeneratorConfig {
    std::size_t individuals = 10000;
    std::size_t steps = 50;
    double mix_new = 0.4;
    double mix_prev = 0.6;
    double noise_scale = 0.03;
    double age_low = 30.0;
    double age_high = 80.0;
    std::uint64_t seed = 0;
};

/// Synthetic Age / Nutrition / Health / Mobility panel. Each individual draws
/// from its own RNG stream keyed by (seed, individual), so output does not
/// depend on generation order.
PanelDataset generate_hans(const HansGeneratorConfig& config);

/// Full-time graph of the generator: immediate structural edges plus lag-1
/// self-persistence.
TemporalCausalGraph hans_graph();
/// Immediate edges only.
TemporalCausalGraph hans_static_graph();

std::string panel_to_csv(const PanelDataset& data);
PanelDataset panel_from_csv(std::string_view text);

}  // namespace tsce
