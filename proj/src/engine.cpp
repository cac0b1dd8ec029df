#include "tsce/engine.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace tsce {

namespace {

std::vector<std::string> split_words(std::string_view text) {
    std::string spaced;
    for (char c : text) {
        if (c == '@' || c == '<' || c == '>') {
            spaced += ' ';
            spaced += c;
            spaced += ' ';
        } else {
            spaced += c;
        }
    }
    std::istringstream in(spaced);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    return words;
}

long long parse_assignment(const std::string& word, std::string_view key, std::string_view question) {
    std::string prefix = std::string(key) + "=";
    if (word.rfind(prefix, 0) != 0) {
        throw Error(ErrorCode::parse_error, "expected '" + prefix + "<int>' in question '" +
                                                std::string(question) + "'");
    }
    long long v = 0;
    const char* first = word.data() + prefix.size();
    const char* last = word.data() + word.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last || v < 0) {
        throw Error(ErrorCode::parse_error, "bad integer in '" + word + "'");
    }
    return v;
}

}  // namespace

WhyQuestion WhyQuestion::parse(std::string_view text) {
    auto words = split_words(text);
    WhyQuestion q;
    if (words.size() == 6 && (words[1] == "<" || words[1] == ">") && words[3] == "@") {
        q.var = words[0];
        q.relation = words[1] == "<" ? Relation::less : Relation::greater;
        q.statistic = PopulationStatistic::parse(words[2]);
        q.t = static_cast<int>(parse_assignment(words[4], "t", text));
        q.unit = static_cast<std::size_t>(parse_assignment(words[5], "ind", text));
        return q;
    }
    if (words.size() == 4 && words[1] == "@") {
        q.var = words[0];
        q.t = static_cast<int>(parse_assignment(words[2], "t", text));
        q.unit = static_cast<std::size_t>(parse_assignment(words[3], "rollout", text));
        return q;
    }
    throw Error(ErrorCode::parse_error,
                "question must read '<var> <|> <mean|p<k>> @ t=<int> ind=<int>' or "
                "'<var> @ t=<int> rollout=<id>', got '" +
                    std::string(text) + "'");
}

std::string WhyQuestion::to_string() const {
    std::ostringstream out;
    out << var;
    if (relation) {
        out << (*relation == Relation::less ? " < " : " > ") << statistic->name() << " @ t=" << t
            << " ind=" << unit;
    } else {
        out << " @ t=" << t << " rollout=" << unit;
    }
    return out.str();
}

VarKind Trajectory::kind(std::string_view var) const {
    for (const Variable& v : variables()) {
        if (v.name == var) return v.kind;
    }
    throw Error(ErrorCode::variable_not_found, "variable '" + std::string(var) + "' not in data");
}

bool Trajectory::has_variable(std::string_view var) const {
    return std::any_of(variables().begin(), variables().end(), [&](const Variable& v) { return v.name == var; });
}

PanelTrajectory::PanelTrajectory(const PanelDataset& data, std::size_t individual, const StatisticTable* phi)
    : data_(&data), individual_(individual), phi_(phi) {
    if (individual >= data.individuals()) {
        throw Error(ErrorCode::invalid_question, "individual " + std::to_string(individual) +
                                                     " outside dataset of " +
                                                     std::to_string(data.individuals()));
    }
}

double PanelTrajectory::value(std::string_view var, int t) const {
    return data_->value(individual_, static_cast<std::size_t>(t), data_->var_index(var));
}

std::optional<double> PanelTrajectory::phi(std::string_view var, int t) const {
    if (!phi_) return std::nullopt;
    return phi_->at(data_->var_index(var), static_cast<std::size_t>(t));
}

Row PanelTrajectory::row(int t) const { return data_->row(individual_, static_cast<std::size_t>(t)); }

SelectionConfig SelectionConfig::parse(std::string_view text, int K) {
    if (K < 0) throw Error(ErrorCode::invalid_argument, "depth K must be >= 0");
    SelectionConfig cfg;
    cfg.K = K;
    auto number = [&](std::string_view s) {
        std::string copy(s);
        char* end = nullptr;
        double v = std::strtod(copy.c_str(), &end);
        if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(v)) {
            throw Error(ErrorCode::invalid_argument, "bad selection '" + std::string(text) + "'");
        }
        return v;
    };
    bool has_theta = false, has_topn = false;
    std::string_view rest = text;
    if (rest == "all") return cfg;
    while (!rest.empty()) {
        std::size_t bar = rest.find('|');
        std::string_view part = rest.substr(0, bar);
        rest = bar == rest.npos ? std::string_view{} : rest.substr(bar + 1);
        if (part.rfind("theta:", 0) == 0 && !has_theta) {
            cfg.theta = number(part.substr(6));
            if (cfg.theta < 0) throw Error(ErrorCode::invalid_argument, "theta must be >= 0");
            has_theta = true;
        } else if (part.rfind("topn:", 0) == 0 && !has_topn) {
            double n = number(part.substr(5));
            if (n < 1 || n != std::floor(n)) throw Error(ErrorCode::invalid_argument, "topn needs an integer >= 1");
            cfg.n = static_cast<int>(n);
            has_topn = true;
        } else {
            throw Error(ErrorCode::invalid_argument, "bad selection '" + std::string(text) +
                                                         "' (use all, topn:<n>, theta:<x> or theta:<x>|topn:<n>)");
        }
    }
    if (has_theta && has_topn) cfg.mode = SelectionMode::threshold_or_topn;
    else if (has_theta) cfg.mode = SelectionMode::threshold;
    else if (has_topn) cfg.mode = SelectionMode::topn;
    else throw Error(ErrorCode::invalid_argument, "empty selection");
    return cfg;
}

std::string SelectionConfig::to_string() const {
    std::ostringstream out;
    out.precision(17);
    switch (mode) {
    case SelectionMode::all: return "all";
    case SelectionMode::threshold: out << "theta:" << theta; break;
    case SelectionMode::topn: out << "topn:" << n; break;
    case SelectionMode::threshold_or_topn: out << "theta:" << theta << "|topn:" << n; break;
    }
    return out.str();
}

std::string_view to_string(ExplainMode mode) {
    return mode == ExplainMode::retrospective ? "retro" : "antic";
}

ExplainMode explain_mode_from_string(std::string_view text) {
    if (text == "retro" || text == "retrospective") return ExplainMode::retrospective;
    if (text == "antic" || text == "anticipative") return ExplainMode::anticipative;
    throw Error(ErrorCode::invalid_argument, "mode must be retro or antic, got '" + std::string(text) + "'");
}

std::vector<Candidate> select_explainers(const TemporalCausalGraph& graph, std::string_view var, int t,
                                         const SelectionConfig& config, ExplainMode mode) {
    std::vector<Candidate> all;
    if (mode == ExplainMode::retrospective) {
        for (const Edge& e : graph.incoming(var)) {
            if (t - e.lag >= 0) all.push_back({{e.src, t - e.lag}, e.weight});
        }
    } else {
        for (const Edge& e : graph.outgoing(var)) all.push_back({{e.dst, t + e.lag}, e.weight});
    }
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        double wa = std::abs(a.alpha), wb = std::abs(b.alpha);
        if (wa != wb) return wa > wb;
        if (a.node.var != b.node.var) return a.node.var < b.node.var;
        return a.node.t > b.node.t;
    });
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        bool above = std::abs(all[i].alpha) > config.theta;
        bool top = static_cast<int>(i) < config.n;
        bool keep = false;
        switch (config.mode) {
        case SelectionMode::all: keep = true; break;
        case SelectionMode::threshold: keep = above; break;
        case SelectionMode::topn: keep = top; break;
        case SelectionMode::threshold_or_topn: keep = above || top; break;
        }
        if (keep) out.push_back(all[i]);
    }
    return out;
}

ValidatedQuestion validate_question(const WhyQuestion& q, const Trajectory& data, const ContextSet& contexts) {
    if (!data.has_variable(q.var)) {
        throw Error(ErrorCode::variable_not_found, "variable '" + q.var + "' not in data");
    }
    if (q.t < 0 || q.t >= data.horizon()) {
        throw Error(ErrorCode::invalid_question, "t=" + std::to_string(q.t) + " outside recorded steps [0, " +
                                                     std::to_string(data.horizon()) + ")");
    }
    ValidatedQuestion v{q, "", data.value(q.var, q.t), std::nullopt};
    if (q.behaviour()) {
        if (data.kind(q.var) != VarKind::binary) {
            throw Error(ErrorCode::invalid_question, "behaviour question needs a binary variable, '" + q.var +
                                                         "' is continuous");
        }
        if (v.value != 1.0) {
            throw Error(ErrorCode::invalid_question, "'" + q.var + "' is not active at t=" + std::to_string(q.t));
        }
    } else {
        v.phi = data.phi(q.var, q.t);
        if (!v.phi) throw Error(ErrorCode::invalid_question, "no population statistic available");
        bool holds = *q.relation == Relation::less ? v.value < *v.phi : v.value > *v.phi;
        if (!holds) {
            std::ostringstream msg;
            msg.precision(10);
            msg << q.var << "=" << v.value << " is not " << (*q.relation == Relation::less ? "<" : ">") << " "
                << q.statistic->name() << "=" << *v.phi << " at t=" << q.t;
            throw Error(ErrorCode::invalid_question, msg.str());
        }
    }
    const Context& ctx = contexts.select(data.row(q.t));
    if (!ctx.graph.has_variable(q.var)) {
        throw Error(ErrorCode::variable_not_found, "variable '" + q.var + "' not in graph of context '" +
                                                       ctx.name + "'");
    }
    v.context = ctx.name;
    return v;
}

ERTriple evaluate_edge(double alpha, VarKind cause_kind, std::optional<double> cause,
                       std::optional<double> cause_phi, VarKind effect_kind, std::optional<double> effect,
                       std::optional<double> effect_phi, bool sign_only) {
    if (sign_only || !cause || !effect) return eval_er_score(alpha);
    if (cause_phi && effect_phi) return eval_er_continuous({alpha, *cause, *effect, *cause_phi, *effect_phi});
    if (cause_kind == VarKind::binary && effect_kind == VarKind::binary) {
        return eval_er_binary(alpha, *cause, *effect);
    }
    return eval_er_score(alpha);
}

void apply_er3(ExplanationTree& tree, int parent_id) {
    const ExplanationNode& parent = tree.nodes[parent_id];
    bool retro = tree.mode == ExplainMode::retrospective;
    std::vector<Er3Candidate> group;
    for (int c : parent.children) {
        const ExplanationNode& child = tree.nodes[c];
        const ExplanationNode& cause = retro ? child : parent;
        Er3Candidate cand{child.var, child.t, child.er, child.alpha.value_or(1.0), cause.value.value_or(0.0),
                          cause.value ? cause.phi : std::nullopt};
        group.push_back(cand);
    }
    apply_er3(group);
    for (std::size_t i = 0; i < group.size(); ++i) tree.nodes[parent.children[i]].er = group[i].er;
}

std::vector<std::pair<int, int>> ExplanationTree::edges() const {
    std::vector<std::pair<int, int>> out;
    for (const ExplanationNode& n : nodes) {
        for (int c : n.children) out.emplace_back(n.id, c);
    }
    return out;
}

ExplanationTree explain(const ValidatedQuestion& question, const ContextSet& contexts, const Trajectory& data,
                        const ExplainOptions& options) {
    const WhyQuestion& q = question.question;
    bool retro = options.mode == ExplainMode::retrospective;
    ExplanationTree tree;
    tree.mode = options.mode;
    tree.selection = options.selection;

    ExplanationNode root;
    root.var = q.var;
    root.kind = data.kind(q.var);
    root.t = q.t;
    root.context = question.context;
    root.value = question.value;
    root.phi = question.phi;
    tree.nodes.push_back(root);

    const TemporalCausalGraph& root_graph = contexts.by_name(question.context).graph;
    std::vector<TimedVar> closure_list = retro ? root_graph.descendants(q.var, q.t, data.horizon() - 1)
                                               : root_graph.ancestors(q.var, q.t);
    std::set<TimedVar> closure(closure_list.begin(), closure_list.end());
    std::set<TimedVar> seen{{q.var, q.t}};
    std::vector<bool> expandable{true};

    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (!expandable[i] || tree.nodes[i].depth >= options.selection.K) continue;
        const ExplanationNode node = tree.nodes[i];
        const TemporalCausalGraph& graph = contexts.by_name(node.context).graph;
        if (!graph.has_variable(node.var)) continue;

        for (const Candidate& c : select_explainers(graph, node.var, node.t, options.selection, options.mode)) {
            if (!data.has_variable(c.node.var)) {
                throw Error(ErrorCode::invalid_graph, "graph variable '" + c.node.var + "' missing from data");
            }
            ExplanationNode child;
            child.id = static_cast<int>(tree.nodes.size());
            child.var = c.node.var;
            child.kind = data.kind(c.node.var);
            child.t = c.node.t;
            child.alpha = c.alpha;
            child.parent = node.id;
            child.depth = node.depth + 1;
            bool recorded = c.node.t < data.horizon();
            if (recorded) {
                child.value = data.value(c.node.var, c.node.t);
                child.phi = data.phi(c.node.var, c.node.t);
                child.context = contexts.select(data.row(c.node.t)).name;
            } else {
                child.context = node.context;
            }
            const ExplanationNode& cause = retro ? child : node;
            const ExplanationNode& effect = retro ? node : child;
            child.er = evaluate_edge(c.alpha, cause.kind, cause.value, cause.phi, effect.kind, effect.value,
                                     effect.phi, options.sign_only);
            expandable.push_back(recorded && !seen.count(c.node) && !closure.count(c.node));
            seen.insert(c.node);
            tree.nodes[i].children.push_back(child.id);
            tree.nodes.push_back(std::move(child));
        }
        apply_er3(tree, static_cast<int>(i));
    }
    assign_sequences(tree);
    return tree;
}

}  // namespace tsce
