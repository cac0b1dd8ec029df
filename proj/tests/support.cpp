#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <tuple>

namespace oracle {

namespace {

int side(double v, double phi) { return v > phi ? 1 : (v < phi ? -1 : 0); }

bool holds(char rel, double a, double b) { return rel == '<' ? a < b : a > b; }

}  // namespace

ERTriple literal_continuous(double alpha, double x, double y, double phi_x, double phi_y) {
    bool er1 = false, er2 = false;
    for (char r1 : {'<', '>'}) {
        char r2 = r1 == '<' ? '>' : '<';
        bool d1 = holds(r2, x, phi_x) && holds(r1, y, phi_y);
        bool d2 = holds(r2, x, phi_x) && holds(r2, y, phi_y);
        er1 = er1 || (alpha < 0 && d1) || (alpha > 0 && d2);
        er2 = er2 || (alpha > 0 && d1) || (alpha < 0 && d2);
    }
    int s = side(x, phi_x);
    ERTriple out;
    if (er1) out.er1 = s;
    if (er2) out.er2 = s;
    return out;
}

ERTriple literal_binary(double alpha, int x, int y) {
    bool fires = (alpha < 0 && (x ^ y)) || (alpha > 0 && x == y);
    ERTriple out;
    (fires ? out.er1 : out.er2) = x == 1 ? 1 : -1;
    return out;
}

int er3_winner(const std::vector<Sibling>& siblings) {
    int because = 0, best = -1;
    for (int i = 0; i < static_cast<int>(siblings.size()); ++i) {
        const Sibling& s = siblings[i];
        if (s.er1 == 0) continue;
        ++because;
        if (best < 0) {
            best = i;
            continue;
        }
        const Sibling& b = siblings[best];
        if (std::tie(b.score, s.var, s.t) < std::tie(s.score, b.var, b.t)) best = i;
    }
    return because >= 2 ? best : -1;
}

tsce::TemporalCausalGraph random_graph(std::mt19937_64& rng, int vars, double lag_edge_p, double edge_p) {
    std::vector<tsce::Variable> vs;
    for (int i = 0; i < vars; ++i) vs.push_back({"V" + std::to_string(i), tsce::VarKind::continuous});
    std::vector<int> order(vars);
    for (int i = 0; i < vars; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> mag(1, 10);
    auto weight = [&] { return (u(rng) < 0.5 ? -1.0 : 1.0) * mag(rng) / 10.0; };
    std::vector<tsce::Edge> edges;
    for (int a = 0; a < vars; ++a) {
        for (int b = a + 1; b < vars; ++b) {
            if (u(rng) < edge_p) edges.push_back({vs[order[a]].name, vs[order[b]].name, 0, weight()});
        }
    }
    for (int a = 0; a < vars; ++a) {
        for (int b = 0; b < vars; ++b) {
            if (u(rng) < lag_edge_p) edges.push_back({vs[a].name, vs[b].name, 1, weight()});
        }
    }
    return tsce::TemporalCausalGraph(vs, edges);
}

namespace {

struct Cand {
    std::string var;
    int t;
    double alpha;
};

std::vector<Cand> candidates(const tsce::TemporalCausalGraph& g, const std::string& var, int t, const NaiveSetup& s) {
    std::vector<Cand> out;
    for (const tsce::Edge& e : g.edges()) {
        if (s.retro && e.dst == var && t - e.lag >= 0) out.push_back({e.src, t - e.lag, e.weight});
        if (!s.retro && e.src == var) out.push_back({e.dst, t + e.lag, e.weight});
    }
    std::sort(out.begin(), out.end(), [](const Cand& a, const Cand& b) {
        if (std::abs(a.alpha) != std::abs(b.alpha)) return std::abs(a.alpha) > std::abs(b.alpha);
        if (a.var != b.var) return a.var < b.var;
        return a.t > b.t;
    });
    std::vector<Cand> kept;
    for (std::size_t i = 0; i < out.size(); ++i) {
        bool above = std::abs(out[i].alpha) > s.theta;
        bool top = static_cast<int>(i) < s.n;
        bool keep = true;
        switch (s.mode) {
        case tsce::SelectionMode::all: keep = true; break;
        case tsce::SelectionMode::threshold: keep = above; break;
        case tsce::SelectionMode::topn: keep = top; break;
        case tsce::SelectionMode::threshold_or_topn: keep = above || top; break;
        }
        if (keep) kept.push_back(out[i]);
    }
    return kept;
}

// One-step relation closure by repeated scanning of the edge list.
std::set<std::pair<std::string, int>> closure(const tsce::TemporalCausalGraph& g, const std::string& var, int t,
                                              bool forward, int horizon) {
    std::set<std::pair<std::string, int>> out;
    std::deque<std::pair<std::string, int>> todo{{var, t}};
    while (!todo.empty()) {
        auto [v, s] = todo.front();
        todo.pop_front();
        for (const tsce::Edge& e : g.edges()) {
            std::pair<std::string, int> next;
            if (forward && e.src == v && s + e.lag <= horizon) next = {e.dst, s + e.lag};
            else if (!forward && e.dst == v && s - e.lag >= 0) next = {e.src, s - e.lag};
            else continue;
            if (out.insert(next).second) todo.push_back(next);
        }
    }
    return out;
}

struct FullNode {
    NaiveNode payload;
    int depth = 0;
    std::vector<int> kids;
};

}  // namespace

std::vector<NaiveNode> naive_explain(const NaiveSetup& s) {
    const tsce::PanelDataset& d = s.data;
    int T = static_cast<int>(d.horizon());
    std::size_t regime = d.var_index("regime");
    auto value = [&](const std::string& v, int t) { return d.value(s.individual, t, d.var_index(v)); };
    auto phi = [&](const std::string& v, int t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < d.individuals(); ++i) sum += d.value(i, t, d.var_index(v));
        return sum / static_cast<double>(d.individuals());
    };
    auto context_at = [&](int t) { return static_cast<int>(d.value(s.individual, t, regime)); };

    int root_ctx = context_at(s.root_t);
    auto excluded = closure(s.graphs[root_ctx], s.root_var, s.root_t, s.retro, T - 1);

    std::vector<FullNode> full;
    FullNode root;
    root.payload.var = s.root_var;
    root.payload.t = s.root_t;
    root.payload.context = "c" + std::to_string(root_ctx);
    root.payload.value = value(s.root_var, s.root_t);
    root.payload.phi = phi(s.root_var, s.root_t);
    full.push_back(root);

    // Unrestricted recursion: no duplicate bookkeeping at all.
    std::function<void(int, int)> grow = [&](int id, int ctx) {
        if (full[id].depth >= s.K) return;
        const tsce::TemporalCausalGraph& g = s.graphs[ctx];
        std::vector<int> kids;
        for (const Cand& c : candidates(g, full[id].payload.var, full[id].payload.t, s)) {
            FullNode k;
            k.depth = full[id].depth + 1;
            k.payload.var = c.var;
            k.payload.t = c.t;
            k.payload.alpha = c.alpha;
            k.payload.parent = id;
            int kctx = ctx;
            if (c.t < T) {
                kctx = context_at(c.t);
                k.payload.value = value(c.var, c.t);
                k.payload.phi = phi(c.var, c.t);
            }
            k.payload.context = "c" + std::to_string(kctx);
            const NaiveNode& parent = full[id].payload;
            const NaiveNode& cause = s.retro ? k.payload : parent;
            const NaiveNode& effect = s.retro ? parent : k.payload;
            if (cause.value && effect.value) {
                k.payload.er = literal_continuous(c.alpha, *cause.value, *effect.value, *cause.phi, *effect.phi);
            } else {
                k.payload.er.er1 = c.alpha > 0 ? 1 : -1;
            }
            full.push_back(k);
            kids.push_back(static_cast<int>(full.size()) - 1);
        }
        full[id].kids = kids;

        std::vector<Sibling> sib;
        for (int k : kids) {
            const NaiveNode& n = full[k].payload;
            const NaiveNode& cause = s.retro ? n : full[id].payload;
            double dev = cause.value ? *cause.value - *cause.phi : 1.0;
            sib.push_back({n.var, n.t, n.er.er1, std::abs(*n.alpha * dev)});
        }
        int w = er3_winner(sib);
        if (w >= 0) full[kids[w]].payload.er.er3 = 1;

        for (int k : kids) {
            const NaiveNode& n = full[k].payload;
            if (n.t >= T || excluded.count({n.var, n.t})) continue;
            grow(k, std::stoi(n.context.substr(1)));
        }
    };
    grow(0, root_ctx);

    // Breadth-first walk that keeps only the first occurrence of each (var, t)
    // as an inner node.
    std::vector<NaiveNode> out;
    std::set<std::pair<std::string, int>> seen;
    std::deque<std::pair<int, int>> queue{{0, -1}};
    while (!queue.empty()) {
        auto [id, parent] = queue.front();
        queue.pop_front();
        NaiveNode n = full[id].payload;
        n.parent = parent;
        out.push_back(n);
        int me = static_cast<int>(out.size()) - 1;
        if (!seen.insert({n.var, n.t}).second) continue;
        for (int k : full[id].kids) queue.push_back({k, me});
    }
    return out;
}

std::vector<StaticEntry> static_explanation(const tsce::TemporalCausalGraph& graph,
                                            const std::map<std::string, double>& x,
                                            const std::map<std::string, double>& phi, const std::string& root) {
    std::vector<StaticEntry> out;
    std::vector<StaticEntry> here;
    std::vector<Sibling> sib;
    for (const tsce::Edge& e : graph.edges()) {
        if (e.dst != root || e.lag != 0) continue;
        ERTriple er = literal_continuous(e.weight, x.at(e.src), x.at(root), phi.at(e.src), phi.at(root));
        here.push_back({e.src, root, er});
        sib.push_back({e.src, 0, er.er1, std::abs(e.weight * (x.at(e.src) - phi.at(e.src)))});
    }
    int w = er3_winner(sib);
    if (w >= 0) here[w].er.er3 = 1;
    out.insert(out.end(), here.begin(), here.end());
    for (const StaticEntry& h : here) {
        std::vector<StaticEntry> sub = static_explanation(graph, x, phi, h.cause);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

std::map<int, double> masked_path_sums(const tsce::TemporalCausalGraph& graph, const std::vector<std::string>& masked,
                                       const std::string& src, const std::string& dst) {
    // Edge weights between an ordered pair, keyed by lag.
    auto links = [&](const std::string& a, const std::string& b) {
        std::map<int, double> m;
        for (const tsce::Edge& e : graph.edges()) {
            if (e.src == a && e.dst == b) m[e.lag] += e.weight;
        }
        return m;
    };
    std::vector<std::string> pool;
    for (const std::string& m : masked) {
        if (m != src && m != dst) pool.push_back(m);
    }
    std::map<int, double> total;
    std::size_t subsets = std::size_t{1} << pool.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::vector<std::string> interior;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (mask & (std::size_t{1} << i)) interior.push_back(pool[i]);
        }
        std::sort(interior.begin(), interior.end());
        do {
            std::vector<std::string> path{src};
            path.insert(path.end(), interior.begin(), interior.end());
            path.push_back(dst);
            std::map<int, double> acc{{0, 1.0}};
            for (std::size_t k = 0; k + 1 < path.size() && !acc.empty(); ++k) {
                std::map<int, double> next;
                for (auto [l1, w1] : acc) {
                    for (auto [l2, w2] : links(path[k], path[k + 1])) next[l1 + l2] += w1 * w2;
                }
                acc = next;
            }
            for (auto [l, w] : acc) total[l] += w;
        } while (std::next_permutation(interior.begin(), interior.end()));
    }
    return total;
}

Eigen::MatrixXd simulate_var(const Eigen::MatrixXd& A, int T, double sigma, std::mt19937_64& rng) {
    const int burn = 200;
    std::normal_distribution<double> noise(0.0, sigma);
    Eigen::Index d = A.rows();
    Eigen::MatrixXd out(T, d);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    for (int t = -burn; t < T; ++t) {
        Eigen::VectorXd e(d);
        for (Eigen::Index i = 0; i < d; ++i) e(i) = noise(rng);
        x = A * x + e;
        if (t >= 0) out.row(t) = x.transpose();
    }
    return out;
}

bool score_identity_holds(const tsce::Rollout& r) {
    if (r.frames.empty()) return false;
    int ticks = static_cast<int>(r.frames.size()) - 1;
    int coins = 0;
    bool killed = false, died = false;
    for (int k = 0; k < ticks; ++k) {
        const tsce::Frame& f = r.frames[k];
        bool coin = f.bit("collide_goldcoin") == 1;
        bool enemy = f.bit("collide_enemy") == 1;
        bool armed = f.bit("powerup_collected") == 1;
        double expected = f.score - 1.0 + (coin ? 5.0 : 0.0) + (enemy && armed ? 9.0 : 0.0);
        if (enemy && !armed) expected = -20.0;
        if (r.frames[k + 1].score != expected) return false;
        coins += coin;
        killed = killed || (enemy && armed);
        died = died || (enemy && !armed);
    }
    double final_expected = died ? -20.0 : 20.0 - ticks + 5.0 * coins + (killed ? 9.0 : 0.0);
    return r.frames.front().score == 20.0 && r.final_score == final_expected &&
           r.frames.back().score == final_expected && r.ticks == ticks && r.coins == coins &&
           r.died == died && r.enemy_killed == killed;
}

}  // namespace oracle

namespace oracle {

tsce::PanelDataset with_regime(const tsce::PanelDataset& data) {
    std::vector<tsce::Variable> vars = data.variables();
    vars.push_back({"regime", tsce::VarKind::binary});
    tsce::PanelDataset out(vars, data.individuals(), data.horizon());
    for (std::size_t i = 0; i < data.individuals(); ++i) {
        for (std::size_t t = 0; t < data.horizon(); ++t) {
            for (std::size_t v = 0; v < data.variables().size(); ++v) out.set(i, t, v, data.value(i, t, v));
        }
    }
    return out;
}

NaiveSetup random_setup(std::mt19937_64& rng) {
    NaiveSetup s;
    std::uniform_int_distribution<int> nvars(2, 5), k(0, 3), mode(0, 3), topn(1, 3), coin(0, 1);
    int vars = nvars(rng);
    s.graphs = {random_graph(rng, vars), random_graph(rng, vars)};
    const std::size_t n = 20, T = 6;
    std::vector<tsce::Variable> vs = s.graphs[0].variables();
    vs.push_back({"regime", tsce::VarKind::binary});
    s.data = tsce::PanelDataset(vs, n, T);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            for (int v = 0; v < vars; ++v) s.data.set(i, t, v, noise(rng));
            s.data.set(i, t, vars, coin(rng));
        }
    }
    s.individual = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    s.root_var = "V" + std::to_string(std::uniform_int_distribution<int>(0, vars - 1)(rng));
    s.root_t = std::uniform_int_distribution<int>(0, static_cast<int>(T) - 1)(rng);
    s.retro = coin(rng) == 0;
    s.mode = static_cast<tsce::SelectionMode>(mode(rng));
    s.theta = coin(rng) ? 0.25 : 0.55;
    s.n = topn(rng);
    s.K = k(rng);
    return s;
}

tsce::ExplanationTree run_engine(const NaiveSetup& s) {
    std::vector<tsce::Context> ctx;
    for (std::size_t k = 0; k < s.graphs.size(); ++k) {
        ctx.push_back({"c" + std::to_string(k), tsce::Predicate::parse("regime == " + std::to_string(k)), s.graphs[k]});
    }
    tsce::ContextSet contexts(ctx);
    tsce::StatisticTable phi(s.data, tsce::PopulationStatistic::mean());
    tsce::PanelTrajectory traj(s.data, s.individual, &phi);

    tsce::WhyQuestion q;
    q.var = s.root_var;
    q.t = s.root_t;
    q.unit = s.individual;
    q.statistic = tsce::PopulationStatistic::mean();
    q.relation = traj.value(q.var, q.t) < *traj.phi(q.var, q.t) ? tsce::Relation::less : tsce::Relation::greater;

    tsce::ExplainOptions opt;
    opt.mode = s.retro ? tsce::ExplainMode::retrospective : tsce::ExplainMode::anticipative;
    opt.selection.mode = s.mode;
    opt.selection.theta = s.theta;
    opt.selection.n = s.n;
    opt.selection.K = s.K;
    return tsce::explain(tsce::validate_question(q, traj, contexts), contexts, traj, opt);
}

std::string compare(const std::vector<NaiveNode>& expected, const tsce::ExplanationTree& actual) {
    if (expected.size() != actual.nodes.size()) {
        return "node count " + std::to_string(actual.nodes.size()) + " != " + std::to_string(expected.size());
    }
    auto near = [](const std::optional<double>& a, const std::optional<double>& b) {
        if (a.has_value() != b.has_value()) return false;
        return !a || std::abs(*a - *b) <= 1e-12 * std::max(1.0, std::abs(*b));
    };
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const NaiveNode& e = expected[i];
        const tsce::ExplanationNode& a = actual.nodes[i];
        bool same = e.var == a.var && e.t == a.t && e.context == a.context && e.parent == a.parent &&
                    e.er == a.er && e.alpha == a.alpha && e.value == a.value && near(e.phi, a.phi);
        if (!same) {
            return "node " + std::to_string(i) + ": expected " + e.var + "@" + std::to_string(e.t) + " er(" +
                   std::to_string(e.er.er1) + "," + std::to_string(e.er.er2) + "," + std::to_string(e.er.er3) +
                   ") parent " + std::to_string(e.parent) + ", got " + a.var + "@" + std::to_string(a.t) + " er(" +
                   std::to_string(a.er.er1) + "," + std::to_string(a.er.er2) + "," + std::to_string(a.er.er3) +
                   ") parent " + std::to_string(a.parent);
        }
    }
    return {};
}

}  // namespace oracle
