#pragma once

#include "tsce/engine.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tsce {

/// Wording table read from `key = "value"` lines (`#` starts a comment).
///
/// Recognised keys: style (adjective | phrase), subject.root, subject.pronoun,
/// state.high, state.low, time.unit, time.current, time.prev, time.next,
/// marker.persistent, var.<name>.noun, var.<name>.high, var.<name>.low,
/// var.<name>.active. Missing entries fall back to neutral defaults.
class Lexicon {
public:
    enum class Style { adjective, phrase };

    Lexicon() = default;
    static Lexicon parse(std::string_view text);

    std::string get(const std::string& key, const std::string& fallback) const;
    Style style() const { return style_; }

    std::string noun(const std::string& var) const;
    std::string high(const std::string& var) const;
    std::string low(const std::string& var) const;
    std::string active(const std::string& var) const;
    /// Relative-time phrase for an offset in steps (0, -1, +1 from the table,
    /// others spelled out).
    std::string time_phrase(int offset) const;

private:
    Style style_ = Style::adjective;
    std::map<std::string, std::string> entries_;
};

struct VerbalizeOptions {
    bool coefficients = false;  ///< append "(alpha)" to every clause
};

/// Formats a weight with three decimals and trailing zeros removed.
std::string format_coefficient(double alpha);

/// Spelled-out numbers for two..twelve, digits otherwise.
std::string number_word(int n);

/// One sentence for a single explained (non-leaf) node.
std::string render_node(const ExplanationTree& tree, int node_id, const Lexicon& lexicon,
                        const VerbalizeOptions& options = {});

/// One sentence summarising nodes that share a sequence id (latest first).
/// A single node falls back to render_node.
std::string render_sequence(const ExplanationTree& tree, const std::vector<int>& nodes, const Lexicon& lexicon,
                            const VerbalizeOptions& options = {});

/// "X has a positive effect on ... and a negative effect on ... in the next time step."
std::string render_anticipative(const ExplanationTree& tree, int node_id, const Lexicon& lexicon,
                                const VerbalizeOptions& options = {});

/// Every sequence (or lone non-leaf node) rendered once, ordered by the
/// first node id, one sentence per line.
std::string verbalize(const ExplanationTree& tree, const Lexicon& lexicon, const VerbalizeOptions& options = {});

}  // namespace tsce
