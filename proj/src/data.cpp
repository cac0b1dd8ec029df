#include "tsce/data.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace tsce {

PanelDataset::PanelDataset(std::vector<Variable> variables, std::size_t individuals, std::size_t horizon)
    : variables_(std::move(variables)), n_(individuals), T_(horizon),
      values_(variables_.size() * individuals * horizon, 0.0) {
    if (T_ < 1) throw Error(ErrorCode::invalid_argument, "panel horizon must be at least 1");
    if (n_ < 1) throw Error(ErrorCode::invalid_argument, "panel needs at least one individual");
}

std::size_t PanelDataset::var_index(std::string_view name) const {
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (variables_[v].name == name) return v;
    }
    throw Error(ErrorCode::variable_not_found, "variable '" + std::string(name) + "' not in dataset");
}

std::span<const double> PanelDataset::slice(std::size_t var, std::size_t t) const {
    return {values_.data() + offset(0, t, var), n_};
}

Row PanelDataset::row(std::size_t individual, std::size_t t) const {
    Row r;
    for (std::size_t v = 0; v < variables_.size(); ++v) r[variables_[v].name] = value(individual, t, v);
    return r;
}

PopulationStatistic PopulationStatistic::percentile(double p) {
    if (!(p > 0.0 && p < 100.0)) {
        throw Error(ErrorCode::invalid_argument, "percentile must lie in (0, 100)");
    }
    return {Kind::percentile, p};
}

std::string PopulationStatistic::name() const {
    if (kind == Kind::mean) return "mean";
    std::ostringstream out;
    out << "p" << p;
    return out.str();
}

PopulationStatistic PopulationStatistic::parse(std::string_view text) {
    if (text == "mean") return mean();
    if (text.size() > 1 && text[0] == 'p') {
        double p = 0.0;
        auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), p);
        if (ec == std::errc() && ptr == text.data() + text.size()) return percentile(p);
    }
    throw Error(ErrorCode::parse_error, "unknown statistic '" + std::string(text) + "'");
}

namespace {

double compute(std::span<const double> values, const PopulationStatistic& stat) {
    if (stat.kind == PopulationStatistic::Kind::mean) {
        double sum = 0.0;
        for (double x : values) sum += x;
        return sum / static_cast<double>(values.size());
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double rank = stat.p / 100.0 * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(rank));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double statistic(const PanelDataset& data, const PopulationStatistic& stat, std::string_view var,
                 std::size_t t) {
    if (t >= data.horizon()) {
        throw Error(ErrorCode::invalid_argument, "t=" + std::to_string(t) + " outside dataset horizon " +
                                                     std::to_string(data.horizon()));
    }
    return compute(data.slice(data.var_index(var), t), stat);
}

StatisticTable::StatisticTable(const PanelDataset& data, const PopulationStatistic& stat)
    : stat_(stat), T_(data.horizon()) {
    values_.resize(data.variables().size() * T_);
    for (std::size_t v = 0; v < data.variables().size(); ++v) {
        for (std::size_t t = 0; t < T_; ++t) values_[v * T_ + t] = compute(data.slice(v, t), stat);
    }
}

PanelDataset classify_vs_statistic(const PanelDataset& data, const PopulationStatistic& stat) {
    std::vector<Variable> vars = data.variables();
    for (Variable& v : vars) v.kind = VarKind::binary;
    PanelDataset out(vars, data.individuals(), data.horizon());
    StatisticTable phi(data, stat);
    for (std::size_t v = 0; v < vars.size(); ++v) {
        for (std::size_t t = 0; t < data.horizon(); ++t) {
            for (std::size_t i = 0; i < data.individuals(); ++i) {
                out.set(i, t, v, data.value(i, t, v) > phi.at(v, t) ? 1.0 : 0.0);
            }
        }
    }
    return out;
}

PanelDataset generate_hans(const HansGeneratorConfig& cfg) {
    if (std::abs(cfg.mix_new + cfg.mix_prev - 1.0) > 1e-12) {
        throw Error(ErrorCode::invalid_argument, "mix_new + mix_prev must equal 1");
    }
    if (cfg.noise_scale < 0.0) throw Error(ErrorCode::invalid_argument, "noise_scale must be >= 0");
    if (!(cfg.age_low < cfg.age_high)) throw Error(ErrorCode::invalid_argument, "age_low must be < age_high");
    if (cfg.steps < 1 || cfg.individuals < 1) {
        throw Error(ErrorCode::invalid_argument, "need at least one individual and one step");
    }

    const std::size_t T = cfg.steps;
    enum { kAge, kNutrition, kHealth, kMobility };

    // Analytic means of the structural draws, which scale the noise.
    std::vector<double> mu_f(T), mu_h(T), mu_m(T);
    {
        double f_prev = 0.0, h_prev = 0.0, m_prev = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            double age = 0.5 * (cfg.age_low + cfg.age_high) + static_cast<double>(t);
            mu_f[t] = 0.5 * age;
            double f = t == 0 ? mu_f[t] : cfg.mix_new * mu_f[t] + cfg.mix_prev * f_prev;
            mu_h[t] = -0.2 * age + 0.6 * f;
            double h = t == 0 ? mu_h[t] : cfg.mix_new * mu_h[t] + cfg.mix_prev * h_prev;
            mu_m[t] = 0.5 * h;
            double m = t == 0 ? mu_m[t] : cfg.mix_new * mu_m[t] + cfg.mix_prev * m_prev;
            f_prev = f;
            h_prev = h;
            m_prev = m;
        }
    }

    PanelDataset data({{"Age", VarKind::continuous},
                       {"Nutrition", VarKind::continuous},
                       {"Health", VarKind::continuous},
                       {"Mobility", VarKind::continuous}},
                      cfg.individuals, T);

    for (std::size_t i = 0; i < cfg.individuals; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> age_dist(cfg.age_low, cfg.age_high);
        std::normal_distribution<double> unit(0.0, 1.0);

        auto noise = [&](double mu) {
            return cfg.noise_scale > 0.0 ? unit(rng) * std::abs(mu) * cfg.noise_scale : 0.0;
        };

        double age = age_dist(rng);
        double f = 0.0, h = 0.0, m = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) age += 1.0;
            double f_star = 0.5 * age;
            f = (t == 0 ? f_star : cfg.mix_new * f_star + cfg.mix_prev * f) + noise(mu_f[t]);
            double h_star = -0.2 * age + 0.6 * f;
            h = (t == 0 ? h_star : cfg.mix_new * h_star + cfg.mix_prev * h) + noise(mu_h[t]);
            double m_star = 0.5 * h;
            m = (t == 0 ? m_star : cfg.mix_new * m_star + cfg.mix_prev * m) + noise(mu_m[t]);
            data.set(i, t, kAge, age);
            data.set(i, t, kNutrition, f);
            data.set(i, t, kHealth, h);
            data.set(i, t, kMobility, m);
        }
    }
    return data;
}

namespace {

std::vector<Variable> hans_variables() {
    return {{"Age", VarKind::continuous},
            {"Nutrition", VarKind::continuous},
            {"Health", VarKind::continuous},
            {"Mobility", VarKind::continuous}};
}

std::vector<Edge> hans_immediate_edges() {
    return {{"Age", "Nutrition", 0, 0.5},
            {"Age", "Health", 0, -0.2},
            {"Nutrition", "Health", 0, 0.6},
            {"Health", "Mobility", 0, 0.5}};
}

}  // namespace

TemporalCausalGraph hans_graph() {
    std::vector<Edge> edges = hans_immediate_edges();
    edges.push_back({"Age", "Age", 1, 1.0});
    edges.push_back({"Nutrition", "Nutrition", 1, 0.6});
    edges.push_back({"Health", "Health", 1, 0.6});
    edges.push_back({"Mobility", "Mobility", 1, 0.6});
    return TemporalCausalGraph(hans_variables(), std::move(edges));
}

TemporalCausalGraph hans_static_graph() {
    return TemporalCausalGraph(hans_variables(), hans_immediate_edges());
}

std::string panel_to_csv(const PanelDataset& data) {
    std::ostringstream out;
    out.precision(17);
    out << "individual,t";
    for (const Variable& v : data.variables()) out << ',' << v.name;
    out << '\n';
    for (std::size_t i = 0; i < data.individuals(); ++i) {
        for (std::size_t t = 0; t < data.horizon(); ++t) {
            out << i << ',' << t;
            for (std::size_t v = 0; v < data.variables().size(); ++v) out << ',' << data.value(i, t, v);
            out << '\n';
        }
    }
    return out.str();
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_number(std::string_view cell, std::size_t line_no) {
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    // strtod instead of from_chars: libstdc++ 11 lacks floating from_chars on some targets.
    std::string copy(cell);
    char* end = nullptr;
    double x = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(x)) {
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": bad number '" + copy + "'");
    }
    return x;
}

}  // namespace

PanelDataset panel_from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == text.npos ? text.npos : nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        if (nl == text.npos) break;
        start = nl + 1;
    }
    if (lines.empty()) throw Error(ErrorCode::parse_error, "empty CSV");

    auto header = split_csv(lines[0]);
    if (header.size() < 3 || header[0] != "individual" || header[1] != "t") {
        throw Error(ErrorCode::parse_error, "CSV header must start with 'individual,t' and name variables");
    }
    std::vector<Variable> vars;
    for (std::size_t c = 2; c < header.size(); ++c) vars.push_back({std::string(header[c]), VarKind::continuous});

    struct Record {
        std::size_t i, t;
        std::vector<double> values;
    };
    std::vector<Record> records;
    std::size_t n = 0, T = 0;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        auto cells = split_csv(lines[l]);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::parse_error, "line " + std::to_string(l + 1) + ": expected " +
                                                    std::to_string(header.size()) + " cells");
        }
        double ind = parse_number(cells[0], l + 1);
        double t = parse_number(cells[1], l + 1);
        if (ind < 0 || t < 0 || ind != std::floor(ind) || t != std::floor(t)) {
            throw Error(ErrorCode::parse_error, "line " + std::to_string(l + 1) + ": bad index");
        }
        Record r{static_cast<std::size_t>(ind), static_cast<std::size_t>(t), {}};
        for (std::size_t c = 2; c < cells.size(); ++c) r.values.push_back(parse_number(cells[c], l + 1));
        n = std::max(n, r.i + 1);
        T = std::max(T, r.t + 1);
        records.push_back(std::move(r));
    }
    if (records.size() != n * T) {
        throw Error(ErrorCode::parse_error, "CSV is not rectangular: " + std::to_string(records.size()) +
                                                " rows for " + std::to_string(n) + " individuals x " +
                                                std::to_string(T) + " steps");
    }
    PanelDataset data(vars, n, T);
    std::vector<char> filled(n * T, 0);
    for (const Record& r : records) {
        if (filled[r.i * T + r.t]++) {
            throw Error(ErrorCode::parse_error, "duplicate row for individual " + std::to_string(r.i) +
                                                    " t=" + std::to_string(r.t));
        }
        for (std::size_t v = 0; v < vars.size(); ++v) data.set(r.i, r.t, v, r.values[v]);
    }
    return data;
}

}  // namespace tsce
