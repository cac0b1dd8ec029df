#include "tsce/error.hpp"
#include "tsce/verbalize.hpp"

#include <cmath>
#include <cstdio>

namespace tsce {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Lexicon Lexicon::parse(std::string_view text) {
    Lexicon lex;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == text.npos ? std::string_view{} : text.substr(nl + 1);
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        auto bad = [&](const std::string& why) {
            return Error(ErrorCode::parse_error, "lexicon line " + std::to_string(line_no) + ": " + why);
        };
        std::size_t eq = line.find('=');
        if (eq == line.npos) throw bad("expected key = \"value\"");
        std::string key(trim(line.substr(0, eq)));
        std::string_view rest = trim(line.substr(eq + 1));
        if (key.empty()) throw bad("empty key");
        if (rest.size() < 2 || rest.front() != '"') throw bad("value must be a quoted string");
        std::string value;
        std::size_t i = 1;
        for (; i < rest.size() && rest[i] != '"'; ++i) {
            if (rest[i] == '\\' && i + 1 < rest.size()) ++i;
            value += rest[i];
        }
        if (i >= rest.size()) throw bad("unterminated string");
        std::string_view tail = trim(rest.substr(i + 1));
        if (!tail.empty() && tail.front() != '#') throw bad("trailing characters after value");
        lex.entries_[key] = value;
    }
    std::string style = lex.get("style", "adjective");
    if (style == "adjective") lex.style_ = Style::adjective;
    else if (style == "phrase") lex.style_ = Style::phrase;
    else throw Error(ErrorCode::parse_error, "lexicon style must be adjective or phrase, got '" + style + "'");
    return lex;
}

std::string Lexicon::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

std::string Lexicon::noun(const std::string& var) const { return get("var." + var + ".noun", var); }
std::string Lexicon::high(const std::string& var) const {
    return get("var." + var + ".high", style_ == Style::phrase ? var + " was active" : "high");
}
std::string Lexicon::low(const std::string& var) const {
    return get("var." + var + ".low", style_ == Style::phrase ? var + " was not active" : "low");
}
std::string Lexicon::active(const std::string& var) const { return get("var." + var + ".active", noun(var)); }

std::string Lexicon::time_phrase(int offset) const {
    std::string unit = get("time.unit", "time step");
    if (offset == 0) return get("time.current", "in the same " + unit);
    if (offset == -1) return get("time.prev", "one " + unit + " before");
    if (offset == 1) return get("time.next", "in the next " + unit);
    int k = std::abs(offset);
    return number_word(k) + " " + unit + "s " + (offset < 0 ? "before" : "later");
}

std::string format_coefficient(double alpha) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", alpha);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::string number_word(int n) {
    static const char* words[] = {"zero", "one", "two",   "three", "four",   "five",  "six",
                                  "seven", "eight", "nine", "ten",  "eleven", "twelve"};
    if (n >= 0 && n <= 12) return words[n];
    return std::to_string(n);
}

}  // namespace tsce
