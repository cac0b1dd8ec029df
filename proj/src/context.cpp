#include "tsce/context.hpp"

#include "tsce/error.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace tsce {

using nlohmann::json;

struct Predicate::Node {
    enum class Op { constant, equals, negate, conj, disj };
    Op op = Op::constant;
    bool constant = false;
    std::string var;
    int literal = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Predicate::Node>;

class PredicateParser {
public:
    explicit PredicateParser(std::string_view src) : src_(src) { tokenize(); }

    NodePtr parse() {
        NodePtr node = parse_or();
        if (pos_ != tokens_.size()) fail("unexpected token '" + tokens_[pos_] + "'");
        return node;
    }

private:
    void tokenize() {
        std::size_t i = 0;
        while (i < src_.size()) {
            char c = src_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '(' || c == ')') {
                tokens_.emplace_back(1, c);
                ++i;
            } else if (c == '=') {
                if (i + 1 >= src_.size() || src_[i + 1] != '=') fail("expected '=='");
                tokens_.emplace_back("==");
                i += 2;
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_' || src_[j] == '.')) {
                    ++j;
                }
                tokens_.emplace_back(src_.substr(i, j - i));
                i = j;
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::parse_error, "predicate '" + std::string(src_) + "': " + what);
    }

    bool accept(std::string_view tok) {
        if (pos_ < tokens_.size() && tokens_[pos_] == tok) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_or() {
        NodePtr lhs = parse_and();
        while (accept("or")) {
            auto node = std::make_shared<Predicate::Node>();
            node->op = Predicate::Node::Op::disj;
            node->lhs = lhs;
            node->rhs = parse_and();
            lhs = node;
        }
        return lhs;
    }

    NodePtr parse_and() {
        NodePtr lhs = parse_unary();
        while (accept("and")) {
            auto node = std::make_shared<Predicate::Node>();
            node->op = Predicate::Node::Op::conj;
            node->lhs = lhs;
            node->rhs = parse_unary();
            lhs = node;
        }
        return lhs;
    }

    NodePtr parse_unary() {
        if (accept("not")) {
            auto node = std::make_shared<Predicate::Node>();
            node->op = Predicate::Node::Op::negate;
            node->lhs = parse_unary();
            return node;
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        if (pos_ >= tokens_.size()) fail("unexpected end of expression");
        if (accept("(")) {
            NodePtr inner = parse_or();
            if (!accept(")")) fail("missing ')'");
            return inner;
        }
        auto node = std::make_shared<Predicate::Node>();
        if (accept("true") || accept("false")) {
            node->op = Predicate::Node::Op::constant;
            node->constant = tokens_[pos_ - 1] == "true";
            return node;
        }
        const std::string& ident = tokens_[pos_];
        if (ident == "and" || ident == "or" || ident == ")" || ident == "==" ||
            std::isdigit(static_cast<unsigned char>(ident[0]))) {
            fail("expected variable name, got '" + ident + "'");
        }
        ++pos_;
        if (!accept("==")) fail("expected '==' after '" + ident + "'");
        if (accept("0")) {
            node->literal = 0;
        } else if (accept("1")) {
            node->literal = 1;
        } else {
            fail("comparison literal must be 0 or 1");
        }
        node->op = Predicate::Node::Op::equals;
        node->var = ident;
        return node;
    }

    std::string_view src_;
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
};

bool eval_node(const Predicate::Node& node, const Row& row) {
    using Op = Predicate::Node::Op;
    switch (node.op) {
        case Op::constant: return node.constant;
        case Op::equals: {
            auto it = row.find(node.var);
            if (it == row.end()) {
                throw Error(ErrorCode::variable_not_found,
                            "predicate variable '" + node.var + "' missing from row");
            }
            return it->second == static_cast<double>(node.literal);
        }
        case Op::negate: return !eval_node(*node.lhs, row);
        case Op::conj: return eval_node(*node.lhs, row) && eval_node(*node.rhs, row);
        case Op::disj: return eval_node(*node.lhs, row) || eval_node(*node.rhs, row);
    }
    return false;
}

void collect_vars(const Predicate::Node& node, std::set<std::string>& out) {
    if (node.op == Predicate::Node::Op::equals) out.insert(node.var);
    if (node.lhs) collect_vars(*node.lhs, out);
    if (node.rhs) collect_vars(*node.rhs, out);
}

}  // namespace

Predicate Predicate::parse(std::string_view source) {
    Predicate p;
    p.source_ = std::string(source);
    p.root_ = PredicateParser(source).parse();
    return p;
}

Predicate Predicate::always() { return parse("true"); }

bool Predicate::evaluate(const Row& row) const {
    if (!root_) return true;
    return eval_node(*root_, row);
}

std::vector<std::string> Predicate::variables() const {
    std::set<std::string> vars;
    if (root_) collect_vars(*root_, vars);
    return {vars.begin(), vars.end()};
}

ContextSet::ContextSet(std::vector<Context> contexts) : contexts_(std::move(contexts)) {
    if (contexts_.empty()) throw Error(ErrorCode::invalid_argument, "context set is empty");
    std::set<std::string> names;
    for (const Context& c : contexts_) {
        if (!names.insert(c.name).second) {
            throw Error(ErrorCode::invalid_argument, "duplicate context name '" + c.name + "'");
        }
    }
}

const Context& ContextSet::select(const Row& row) const {
    for (const Context& c : contexts_) {
        if (c.predicate.evaluate(row)) return c;
    }
    std::ostringstream msg;
    msg << "no context matches row {";
    bool first = true;
    for (const auto& [name, value] : row) {
        msg << (first ? "" : ", ") << name << "=" << value;
        first = false;
    }
    msg << "}";
    throw Error(ErrorCode::no_context, msg.str());
}

const Context& ContextSet::by_name(std::string_view name) const {
    for (const Context& c : contexts_) {
        if (c.name == name) return c;
    }
    throw Error(ErrorCode::no_context, "unknown context '" + std::string(name) + "'");
}

ExclusivityReport ContextSet::check(const std::vector<Row>& rows) const {
    ExclusivityReport report;
    report.rows = rows.size();
    for (const Context& c : contexts_) report.matches[c.name] = 0;
    for (const Row& row : rows) {
        std::size_t hits = 0;
        for (const Context& c : contexts_) {
            if (c.predicate.evaluate(row)) {
                if (hits == 0) ++report.matches[c.name];
                ++hits;
            }
        }
        if (hits == 0) ++report.unmatched;
        if (hits > 1) ++report.overlapping;
    }
    return report;
}

namespace {

json graph_json(const TemporalCausalGraph& graph) {
    json vars = json::array();
    for (const Variable& v : graph.variables()) {
        vars.push_back({{"name", v.name}, {"kind", std::string(to_string(v.kind))}});
    }
    json edges = json::array();
    for (const Edge& e : graph.edges()) {
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"lag", e.lag}, {"weight", e.weight}});
    }
    return {{"variables", vars}, {"edges", edges}};
}

TemporalCausalGraph graph_from(const json& j) {
    try {
        std::vector<Variable> vars;
        for (const json& v : j.at("variables")) {
            vars.push_back({v.at("name").get<std::string>(),
                            var_kind_from_string(v.value("kind", std::string("continuous")))});
        }
        std::vector<Edge> edges;
        for (const json& e : j.at("edges")) {
            edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                             e.at("lag").get<int>(), e.at("weight").get<double>()});
        }
        return TemporalCausalGraph(std::move(vars), std::move(edges));
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::parse_error, std::string("graph JSON: ") + ex.what());
    }
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::parse_error, std::string("malformed JSON: ") + ex.what());
    }
}

}  // namespace

TemporalCausalGraph graph_from_json(std::string_view text) { return graph_from(parse_json(text)); }

std::string graph_to_json(const TemporalCausalGraph& graph) {
    json j = graph_json(graph);
    j["version"] = 1;
    return j.dump(2) + "\n";
}

ContextSet context_set_from_json(std::string_view text, bool require_graphs) {
    json j = parse_json(text);
    std::vector<Context> contexts;
    try {
        for (const json& c : j.at("contexts")) {
            Context ctx;
            ctx.name = c.at("name").get<std::string>();
            ctx.predicate = Predicate::parse(c.value("predicate", std::string("true")));
            if (c.contains("graph")) {
                ctx.graph = graph_from(c.at("graph"));
            } else if (require_graphs) {
                throw Error(ErrorCode::parse_error, "context '" + ctx.name + "' has no graph");
            }
            contexts.push_back(std::move(ctx));
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::parse_error, std::string("context JSON: ") + ex.what());
    }
    return ContextSet(std::move(contexts));
}

std::string context_set_to_json(const ContextSet& contexts) {
    json arr = json::array();
    for (const Context& c : contexts.contexts()) {
        arr.push_back({{"name", c.name}, {"predicate", c.predicate.source()}, {"graph", graph_json(c.graph)}});
    }
    json j = {{"version", 1}, {"contexts", arr}};
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

}  // namespace tsce
