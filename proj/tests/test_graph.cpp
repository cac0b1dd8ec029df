#include "support.hpp"

#include "tsce/context.hpp"
#include "tsce/data.hpp"
#include "tsce/error.hpp"
#include "tsce/graph.hpp"

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <random>
#include <set>

using namespace tsce;

namespace {

std::vector<TimedVar> tv(std::initializer_list<TimedVar> xs) { return xs; }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

std::set<TimedVar> bfs(const TemporalCausalGraph& g, const std::string& v, int t, bool forward, int horizon) {
    std::set<TimedVar> out;
    std::deque<TimedVar> todo{{v, t}};
    while (!todo.empty()) {
        TimedVar n = todo.front();
        todo.pop_front();
        for (const Edge& e : g.edges()) {
            TimedVar next;
            if (forward && e.src == n.var && n.t + e.lag <= horizon) next = {e.dst, n.t + e.lag};
            else if (!forward && e.dst == n.var && n.t - e.lag >= 0) next = {e.src, n.t - e.lag};
            else continue;
            if (out.insert(next).second) todo.push_back(next);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("hans parents and children") {
    TemporalCausalGraph g = hans_graph();
    CHECK(g.parents("Mobility", 5) == tv({{"Health", 5}, {"Mobility", 4}}));
    CHECK(g.children("Health", 5) == tv({{"Health", 6}, {"Mobility", 5}}));
    CHECK(g.parents("Age", 0).empty());
    CHECK(g.children("Mobility", 3) == tv({{"Mobility", 4}}));
    CHECK(hans_static_graph().children("Mobility", 3).empty());
    CHECK(code_of([&] { g.parents("Speed", 1); }) == ErrorCode::variable_not_found);
}

TEST_CASE("parents agree with an edge scan and mirror children") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 40; ++round) {
        TemporalCausalGraph g = oracle::random_graph(rng, 5);
        for (const Variable& v : g.variables()) {
            for (int t = 0; t < 4; ++t) {
                std::vector<TimedVar> scan;
                for (const Edge& e : g.edges()) {
                    if (e.dst == v.name && t - e.lag >= 0) scan.push_back({e.src, t - e.lag});
                }
                std::sort(scan.begin(), scan.end());
                CHECK(g.parents(v.name, t) == scan);
                for (const TimedVar& p : g.parents(v.name, t)) {
                    auto ch = g.children(p.var, p.t);
                    CHECK(std::find(ch.begin(), ch.end(), TimedVar{v.name, t}) != ch.end());
                }
                for (const TimedVar& c : g.children(v.name, t)) {
                    auto pa = g.parents(c.var, c.t);
                    CHECK(std::find(pa.begin(), pa.end(), TimedVar{v.name, t}) != pa.end());
                }
            }
        }
    }
}

TEST_CASE("closures match a breadth-first fixpoint") {
    TemporalCausalGraph h = hans_graph();
    auto anc = h.ancestors("Mobility", 2);
    CHECK(std::find(anc.begin(), anc.end(), TimedVar{"Age", 0}) != anc.end());

    auto de = h.descendants("Age", 3, 3);
    for (const TimedVar& n : de) CHECK(n.t == 3);
    CHECK(de.size() == 3);
    CHECK(code_of([&] { h.descendants("Age", 3, 2); }) == ErrorCode::invalid_argument);

    std::mt19937_64 rng(5);
    for (int round = 0; round < 40; ++round) {
        TemporalCausalGraph g = oracle::random_graph(rng, 6);
        for (const Variable& v : g.variables()) {
            auto a = g.ancestors(v.name, 3);
            CHECK(std::set<TimedVar>(a.begin(), a.end()) == bfs(g, v.name, 3, false, 0));
            auto d = g.descendants(v.name, 1, 4);
            CHECK(std::set<TimedVar>(d.begin(), d.end()) == bfs(g, v.name, 1, true, 4));
        }
    }
}

TEST_CASE("graph validation") {
    std::vector<Variable> vs{{"A", VarKind::continuous}, {"B", VarKind::continuous}};
    auto bad = [&](std::vector<Edge> edges) {
        return code_of([&] { TemporalCausalGraph(vs, edges); });
    };
    CHECK(bad({{"A", "B", 0, 0.5}, {"B", "A", 0, 0.5}}) == ErrorCode::invalid_graph);
    CHECK(bad({{"A", "A", 0, 0.5}}) == ErrorCode::invalid_graph);
    CHECK(bad({{"A", "B", 0, 0.0}}) == ErrorCode::invalid_graph);
    CHECK(bad({{"A", "C", 0, 1.0}}) == ErrorCode::invalid_graph);
    CHECK(bad({{"A", "B", -1, 1.0}}) == ErrorCode::invalid_graph);
    CHECK(bad({{"A", "B", 1, 1.0}, {"A", "B", 1, 2.0}}) == ErrorCode::invalid_graph);
    CHECK_NOTHROW(TemporalCausalGraph(vs, {{"A", "B", 1, 1.0}, {"B", "A", 1, 1.0}, {"A", "A", 1, 0.3}}));
}

TEST_CASE("graph json round trip") {
    TemporalCausalGraph g = hans_graph();
    TemporalCausalGraph back = graph_from_json(graph_to_json(g));
    CHECK(graph_to_json(back) == graph_to_json(g));
    CHECK(code_of([] { graph_from_json("{\"variables\": ["); }) == ErrorCode::parse_error);
}

TEST_CASE("predicates and context selection") {
    Predicate p = Predicate::parse("powerup_exists == 1 and not (enemy_exists == 0 or terminated == 1)");
    Row row{{"powerup_exists", 1}, {"enemy_exists", 1}, {"terminated", 0}};
    CHECK(p.evaluate(row));
    row["terminated"] = 1;
    CHECK_FALSE(p.evaluate(row));
    CHECK(code_of([] { Predicate::parse("a == 2"); }) == ErrorCode::parse_error);
    CHECK(code_of([] { Predicate::parse("a == 1 and"); }) == ErrorCode::parse_error);
    CHECK(code_of([&] { Predicate::parse("missing == 1").evaluate(row); }) == ErrorCode::variable_not_found);

    ContextSet killer = context_set_from_json(read_text_file(TSCE_DATA_DIR "/killer_contexts.json"), false);
    CHECK(killer.select({{"enemy_exists", 1}, {"powerup_exists", 1}}).name == "C_K1");
    CHECK(killer.select({{"enemy_exists", 1}, {"powerup_exists", 0}}).name == "C_K2");
    CHECK(killer.select({{"enemy_exists", 0}, {"powerup_exists", 0}}).name == "C_K3");
    CHECK(code_of([&] { killer.select({{"enemy_exists", 0}, {"powerup_exists", 1}}); }) == ErrorCode::no_context);

    ContextSet single({{"all", Predicate::always(), hans_graph()}});
    CHECK(single.select({}).name == "all");

    ContextSet overlap({{"a", Predicate::parse("x == 1"), {}}, {"b", Predicate::parse("true"), {}}});
    ExclusivityReport rep = overlap.check({{{"x", 1}}, {{"x", 0}}});
    CHECK(rep.overlapping == 1);
    CHECK(rep.unmatched == 0);
    CHECK_FALSE(rep.exclusive());
    CHECK(overlap.select({{"x", 1}}).name == "a");
}
