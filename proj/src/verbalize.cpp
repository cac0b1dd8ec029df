#include "tsce/verbalize.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace tsce {

namespace {

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string join_and(const std::vector<std::string>& items, const std::string& sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += i + 1 == items.size() ? " and " : sep;
        out += items[i];
    }
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

double weight(const ExplanationNode& n) { return n.alpha ? std::abs(*n.alpha) : 0.0; }

bool by_weight(const ExplanationNode& a, const ExplanationNode& b) {
    if (weight(a) != weight(b)) return weight(a) > weight(b);
    if (a.var != b.var) return a.var < b.var;
    return a.t > b.t;
}

struct Reasons {
    std::vector<const ExplanationNode*> because;
    std::vector<const ExplanationNode*> although;
};

Reasons reasons_of(const ExplanationTree& tree, const ExplanationNode& node) {
    Reasons r;
    for (int c : node.children) {
        const ExplanationNode& child = tree.nodes[c];
        if (child.er.er1 != 0) r.because.push_back(&child);
        else if (child.er.er2 != 0) r.although.push_back(&child);
    }
    std::sort(r.because.begin(), r.because.end(), [](const ExplanationNode* a, const ExplanationNode* b) {
        if (a->er.er3 != b->er.er3) return a->er.er3 > b->er.er3;
        return by_weight(*a, *b);
    });
    std::sort(r.although.begin(), r.although.end(),
              [](const ExplanationNode* a, const ExplanationNode* b) { return by_weight(*a, *b); });
    return r;
}

int side(const ExplanationNode& child) { return child.er.er1 != 0 ? child.er.er1 : child.er.er2; }

bool above(const ExplanationNode& node) {
    if (!node.value) return true;
    if (node.phi) return *node.value > *node.phi;
    return *node.value == 1.0;
}

std::string coefficient(const ExplanationNode& n, const VerbalizeOptions& options) {
    if (!options.coefficients || !n.alpha) return "";
    return " (" + format_coefficient(*n.alpha) + ")";
}

bool uniform_offset(const ExplanationNode& node, const std::vector<const ExplanationNode*>& kids, int& offset) {
    if (kids.empty()) return false;
    offset = kids.front()->t - node.t;
    for (const ExplanationNode* k : kids) {
        if (k->t - node.t != offset) return false;
    }
    return true;
}

bool persistent(const ExplanationNode& node, const ExplanationNode& child, std::size_t span) {
    return span >= 2 && child.var == node.var && child.t < node.t;
}

// "Hans' Health" for the root, "his Health" elsewhere.
std::string possessive(const ExplanationTree& tree, const ExplanationNode& node, const Lexicon& lex) {
    std::string owner = node.id == tree.root().id ? lex.get("subject.root", "The subject's")
                                                 : lex.get("subject.pronoun", "their");
    return owner + " " + lex.noun(node.var);
}

std::string adjective_sentence(const ExplanationTree& tree, const std::vector<int>& nodes, const Lexicon& lex,
                               const VerbalizeOptions& options) {
    const ExplanationNode& node = tree.nodes[nodes.front()];
    const std::string unit = lex.get("time.unit", "time step");
    const std::string pronoun = lex.get("subject.pronoun", "their");
    std::string state = above(node) ? lex.get("state.high", "above average") : lex.get("state.low", "below average");
    bool has_root = std::find(nodes.begin(), nodes.end(), tree.root().id) != nodes.end();

    std::string main;
    if (nodes.size() >= 2) {
        std::string subject = has_root ? possessive(tree, tree.root(), lex) : pronoun + " " + lex.noun(node.var);
        main = capitalize(subject) + " has been consistently " + state + " for the past " +
               number_word(static_cast<int>(nodes.size())) + " " + unit + "s";
    } else {
        int offset = node.t - tree.root().t;
        std::string subject = possessive(tree, node, lex);
        if (offset == 0) {
            main = capitalize(subject) + " was " + state + " this " + unit;
        } else if (offset == -1) {
            main = "Last " + unit + ", " + subject + " was " + state;
        } else if (offset < 0) {
            main = capitalize(number_word(-offset)) + " " + unit + "s ago, " + subject + " was " + state;
        } else if (offset == 1) {
            main = "Next " + unit + ", " + subject + " was " + state;
        } else {
            main = capitalize(number_word(offset)) + " " + unit + "s later, " + subject + " was " + state;
        }
    }

    const std::string marker = lex.get("marker.persistent", "persistently");
    auto clause = [&](const ExplanationNode& child) {
        std::string adj = side(child) > 0 ? lex.high(child.var) : lex.low(child.var);
        std::string text = pronoun + " " + adj + " " + lex.noun(child.var);
        if (persistent(node, child, nodes.size())) text += " " + marker;
        return text + " " + lex.time_phrase(child.t - node.t) + coefficient(child, options);
    };

    Reasons r = reasons_of(tree, node);
    std::vector<std::string> because, although;
    for (const ExplanationNode* c : r.because) {
        because.push_back((c->er.er3 ? "mostly because " : "because of ") + clause(*c));
    }
    for (const ExplanationNode* c : r.although) although.push_back(clause(*c));

    std::string sentence = main;
    if (!because.empty()) sentence += ", " + join(because, " and ");
    if (!although.empty()) sentence += ", despite " + join(although, " and ");
    return sentence + ".";
}

std::string phrase_sentence(const ExplanationTree& tree, const std::vector<int>& nodes, const Lexicon& lex,
                            const VerbalizeOptions& options) {
    const ExplanationNode& node = tree.nodes[nodes.front()];
    const std::string unit = lex.get("time.unit", "time step");
    const std::string subject = lex.get("subject.root", "The agent");

    std::string main;
    if (node.id == tree.root().id || std::find(nodes.begin(), nodes.end(), tree.root().id) != nodes.end()) {
        main = subject + " is " + lex.active(node.var);
    } else {
        int offset = node.t - tree.root().t;
        main = capitalize(lex.time_phrase(offset)) + ", " + (above(node) ? lex.high(node.var) : lex.low(node.var));
    }
    if (nodes.size() >= 2) {
        auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end(),
                                            [&](int a, int b) { return tree.nodes[a].t < tree.nodes[b].t; });
        main += ", constantly over " + unit + "(s) " + std::to_string(tree.nodes[*lo].t) + " to " +
                std::to_string(tree.nodes[*hi].t) + ",";
    }

    Reasons r = reasons_of(tree, node);
    std::vector<const ExplanationNode*> all = r.because;
    all.insert(all.end(), r.although.begin(), r.although.end());
    int offset = 0;
    bool shared_time = uniform_offset(node, all, offset);
    const std::string marker = lex.get("marker.persistent", "continuously");

    std::vector<std::string> clauses;
    for (const ExplanationNode* c : all) {
        std::string lead = c->er.er1 == 0 ? "although " : c->er.er3 ? "mostly because " : "because ";
        std::string text = lead + (side(*c) > 0 ? lex.high(c->var) : lex.low(c->var)) + coefficient(*c, options);
        if (!shared_time) {
            if (persistent(node, *c, nodes.size())) text += " " + marker;
            text += " " + lex.time_phrase(c->t - node.t);
        }
        clauses.push_back(text);
    }
    std::string sentence = main;
    if (!clauses.empty()) {
        sentence += " " + join_and(clauses);
        if (shared_time) {
            bool mark = std::any_of(r.because.begin(), r.because.end(),
                                    [&](const ExplanationNode* c) { return persistent(node, *c, nodes.size()); });
            sentence += (mark ? " " + marker : std::string()) + " " + lex.time_phrase(offset);
        }
    }
    return sentence + ".";
}

void require_explained(const ExplanationTree& tree, int node_id) {
    if (node_id < 0 || node_id >= static_cast<int>(tree.nodes.size())) {
        throw Error(ErrorCode::invalid_tree, "node " + std::to_string(node_id) + " does not exist");
    }
    if (tree.nodes[node_id].leaf()) {
        throw Error(ErrorCode::invalid_tree, "node " + std::to_string(node_id) + " has no explaining children");
    }
}

}  // namespace

std::string render_node(const ExplanationTree& tree, int node_id, const Lexicon& lexicon,
                        const VerbalizeOptions& options) {
    require_explained(tree, node_id);
    if (lexicon.style() == Lexicon::Style::phrase) return phrase_sentence(tree, {node_id}, lexicon, options);
    return adjective_sentence(tree, {node_id}, lexicon, options);
}

std::string render_sequence(const ExplanationTree& tree, const std::vector<int>& nodes, const Lexicon& lexicon,
                            const VerbalizeOptions& options) {
    if (nodes.empty()) throw Error(ErrorCode::invalid_tree, "empty sequence");
    for (int id : nodes) require_explained(tree, id);
    std::vector<int> ordered = nodes;
    std::sort(ordered.begin(), ordered.end(), [&](int a, int b) {
        if (tree.nodes[a].t != tree.nodes[b].t) return tree.nodes[a].t > tree.nodes[b].t;
        return a < b;
    });
    if (lexicon.style() == Lexicon::Style::phrase) return phrase_sentence(tree, ordered, lexicon, options);
    return adjective_sentence(tree, ordered, lexicon, options);
}

std::string render_anticipative(const ExplanationTree& tree, int node_id, const Lexicon& lexicon,
                                const VerbalizeOptions& options) {
    require_explained(tree, node_id);
    const ExplanationNode& node = tree.nodes[node_id];
    std::vector<const ExplanationNode*> pos, neg;
    for (int c : node.children) {
        const ExplanationNode& child = tree.nodes[c];
        int sign = child.alpha ? (*child.alpha > 0) - (*child.alpha < 0) : child.er.er1;
        if (sign > 0) pos.push_back(&child);
        else if (sign < 0) neg.push_back(&child);
    }
    auto order = [](const ExplanationNode* a, const ExplanationNode* b) { return by_weight(*a, *b); };
    std::sort(pos.begin(), pos.end(), order);
    std::sort(neg.begin(), neg.end(), order);

    std::vector<const ExplanationNode*> all = pos;
    all.insert(all.end(), neg.begin(), neg.end());
    int offset = 0;
    bool shared_time = uniform_offset(node, all, offset);
    auto items = [&](const std::vector<const ExplanationNode*>& group) {
        std::vector<std::string> out;
        for (const ExplanationNode* c : group) {
            std::string text = lexicon.noun(c->var) + coefficient(*c, options);
            if (!shared_time) text += " " + lexicon.time_phrase(c->t - node.t);
            out.push_back(text);
        }
        return out;
    };

    std::string sentence = capitalize(lexicon.active(node.var)) + " has ";
    if (!pos.empty() && !neg.empty()) {
        sentence += "a positive effect on " + join(items(pos), ", ") + " and a negative effect on " + join_and(items(neg));
    } else if (!pos.empty()) {
        sentence += "a positive effect on " + join_and(items(pos));
    } else if (!neg.empty()) {
        sentence += "a negative effect on " + join_and(items(neg));
    } else {
        sentence += "no signed effect";
    }
    if (shared_time) sentence += " " + lexicon.time_phrase(offset);
    return sentence + ".";
}

std::string verbalize(const ExplanationTree& tree, const Lexicon& lexicon, const VerbalizeOptions& options) {
    std::map<int, std::vector<int>> by_seq;
    std::vector<std::vector<int>> groups;
    for (const ExplanationNode& n : tree.nodes) {
        if (n.leaf()) continue;
        if (n.seq) by_seq[*n.seq].push_back(n.id);
        else groups.push_back({n.id});
    }
    for (auto& [seq, ids] : by_seq) groups.push_back(ids);
    std::sort(groups.begin(), groups.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });

    std::string text;
    for (const std::vector<int>& g : groups) {
        if (tree.mode == ExplainMode::anticipative) {
            text += render_anticipative(tree, *std::min_element(g.begin(), g.end()), lexicon, options);
        } else {
            text += render_sequence(tree, g, lexicon, options);
        }
        text += "\n";
    }
    return text;
}

}  // namespace tsce
