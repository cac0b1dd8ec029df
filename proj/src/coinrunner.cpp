#include "tsce/coinrunner.hpp"

#include "tsce/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tsce {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

Pos moved(Pos p, Action a) {
    switch (a) {
    case Action::up: --p.y; break;
    case Action::down: ++p.y; break;
    case Action::left: --p.x; break;
    case Action::right: ++p.x; break;
    case Action::stay: break;
    }
    return p;
}

bool inside(const GameConfig& c, Pos p) { return p.x >= 0 && p.y >= 0 && p.x < c.width && p.y < c.height; }

int manhattan(Pos a, Pos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

std::size_t bit_index(std::string_view name) {
    for (std::size_t i = 0; i < kFrameBinaries.size(); ++i) {
        if (kFrameBinaries[i] == name) return i;
    }
    throw Error(ErrorCode::variable_not_found, "no frame variable '" + std::string(name) + "'");
}

}  // namespace

GameState init_game(std::uint64_t seed, const GameConfig& config) {
    if (config.width < 3 || config.height < 3) {
        throw Error(ErrorCode::invalid_argument, "grid must be at least 3x3");
    }
    std::mt19937_64 rng = make_rng(seed, 0);
    GameState s;
    s.config = config;
    s.score = config.start_score;

    const Pos corners[4] = {{0, 0}, {config.width - 1, 0}, {0, config.height - 1}, {config.width - 1, config.height - 1}};
    s.goal = corners[std::uniform_int_distribution<int>(0, 3)(rng)];

    std::vector<Pos> taken{s.goal};
    std::uniform_int_distribution<int> col(0, config.width - 1), row(0, config.height - 1);
    auto place = [&]() {
        while (true) {
            Pos p{col(rng), row(rng)};
            if (std::find(taken.begin(), taken.end(), p) == taken.end()) {
                taken.push_back(p);
                return p;
            }
        }
    };
    s.player = place();
    if (config.goldcoin) s.goldcoin = place();
    if (config.powerup) s.powerup = place();
    if (config.enemy) s.enemy = place();
    return s;
}

GameState step(const GameState& state, Action action) {
    if (state.terminated) throw Error(ErrorCode::invalid_argument, "step after termination");
    GameState s = state;
    Pos next = moved(s.player, action);
    if (inside(s.config, next)) s.player = next;
    s.score -= 1.0;
    ++s.tick;
    if (s.goldcoin && *s.goldcoin == s.player) {
        s.score += 5.0;
        s.goldcoin.reset();
        ++s.coins;
    }
    if (s.powerup && *s.powerup == s.player) {
        s.powerup_collected = true;
        s.powerup.reset();
    }
    if (s.enemy && *s.enemy == s.player) {
        if (s.powerup_collected) {
            s.score += 9.0;
            s.enemy.reset();
            s.enemy_killed = true;
        } else {
            s.score = -20.0;
            s.terminated = true;
            s.died = true;
            return s;
        }
    }
    if (s.goal == s.player) s.terminated = true;
    return s;
}

const std::vector<Variable>& frame_variables() {
    static const std::vector<Variable> vars = [] {
        std::vector<Variable> v{{"score", VarKind::continuous}};
        for (std::string_view b : kFrameBinaries) v.push_back({std::string(b), VarKind::binary});
        return v;
    }();
    return vars;
}

int Frame::bit(std::string_view name) const { return bits[bit_index(name)]; }
void Frame::set_bit(std::string_view name, int value) { bits[bit_index(name)] = value; }

double Frame::value(std::string_view var) const {
    if (var == "score") return score;
    return bit(var);
}

Row Frame::row() const {
    Row r{{"score", score}};
    for (std::size_t i = 0; i < kFrameBinaries.size(); ++i) r[std::string(kFrameBinaries[i])] = bits[i];
    return r;
}

namespace {

void copy_flags(Frame& f, const GameState& s) {
    f.tick = s.tick;
    f.score = s.score;
    f.set_bit("enemy_exists", s.enemy.has_value());
    f.set_bit("powerup_exists", s.powerup.has_value());
    f.set_bit("goldcoin_exists", s.goldcoin.has_value());
    f.set_bit("powerup_collected", s.powerup_collected);
    f.set_bit("enemy_killed", s.enemy_killed);
    f.set_bit("terminated", s.terminated);
}

}  // namespace

Frame extract_frame(const GameState& prev, Action, const GameState& next) {
    Frame f;
    copy_flags(f, prev);
    Pos p = next.player;
    f.set_bit("collide_enemy", prev.enemy && *prev.enemy == p);
    f.set_bit("collide_goldcoin", prev.goldcoin && *prev.goldcoin == p);
    f.set_bit("collide_powerup", prev.powerup && *prev.powerup == p);
    f.set_bit("collide_goal", prev.goal == p);

    int dx = p.x - prev.player.x, dy = p.y - prev.player.y;
    if (dx == 0 && dy == 0) return f;
    struct Target {
        std::string_view bit;
        std::optional<Pos> at;
    };
    const Target targets[] = {{"targeting_enemy", prev.enemy},
                              {"targeting_goal", prev.goal},
                              {"targeting_goldcoin", prev.goldcoin},
                              {"targeting_powerup", prev.powerup}};
    double best = 0.0;
    std::string_view winner;
    bool tie = false;
    for (const Target& t : targets) {
        if (!t.at) continue;
        double vx = t.at->x - prev.player.x, vy = t.at->y - prev.player.y;
        double norm = std::hypot(vx, vy) * std::hypot(dx, dy);
        if (norm == 0.0) continue;
        double cos = (vx * dx + vy * dy) / norm;
        if (cos <= 0.0) continue;
        if (winner.empty() || cos > best + 1e-12) {
            best = cos;
            winner = t.bit;
            tie = false;
        } else if (std::abs(cos - best) <= 1e-12) {
            tie = true;
        }
    }
    if (!winner.empty() && !tie) f.set_bit(winner, 1);
    return f;
}

Frame terminal_frame(const GameState& state) {
    Frame f;
    copy_flags(f, state);
    return f;
}

std::string_view to_string(AgentKind kind) {
    switch (kind) {
    case AgentKind::killer: return "killer";
    case AgentKind::coincollector: return "coincollector";
    case AgentKind::optimal: return "optimal";
    case AgentKind::random: return "random";
    }
    return "killer";
}

AgentKind agent_kind_from_string(std::string_view text) {
    for (AgentKind k : {AgentKind::killer, AgentKind::coincollector, AgentKind::optimal, AgentKind::random}) {
        if (to_string(k) == text) return k;
    }
    throw Error(ErrorCode::invalid_argument,
                "agent must be killer, coincollector, optimal or random, got '" + std::string(text) + "'");
}

namespace {

enum class Sprite { goldcoin, powerup, enemy, goal };

Pos where(const GameState& s, Sprite sp) {
    switch (sp) {
    case Sprite::goldcoin: return *s.goldcoin;
    case Sprite::powerup: return *s.powerup;
    case Sprite::enemy: return *s.enemy;
    case Sprite::goal: return s.goal;
    }
    return s.goal;
}

// Best pickup order by bonus minus walking distance, always ending at the goal.
Sprite optimal_objective(const GameState& s) {
    std::vector<Sprite> pickups;
    if (s.goldcoin) pickups.push_back(Sprite::goldcoin);
    if (s.powerup) pickups.push_back(Sprite::powerup);
    if (s.enemy) pickups.push_back(Sprite::enemy);

    double best_value = -1e18;
    Sprite best = Sprite::goal;
    std::size_t n = pickups.size();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<Sprite> chosen;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) chosen.push_back(pickups[i]);
        }
        std::sort(chosen.begin(), chosen.end());
        do {
            bool powered = s.powerup_collected;
            bool valid = true;
            double value = 0.0;
            Pos at = s.player;
            for (Sprite sp : chosen) {
                Pos p = where(s, sp);
                value -= manhattan(at, p);
                at = p;
                if (sp == Sprite::goldcoin) value += 5.0;
                if (sp == Sprite::powerup) powered = true;
                if (sp == Sprite::enemy) {
                    if (!powered) {
                        valid = false;
                        break;
                    }
                    value += 9.0;
                }
            }
            if (!valid) continue;
            value -= manhattan(at, s.goal);
            if (value > best_value) {
                best_value = value;
                best = chosen.empty() ? Sprite::goal : chosen.front();
            }
        } while (std::next_permutation(chosen.begin(), chosen.end()));
    }
    return best;
}

Sprite objective(AgentKind kind, const GameState& s) {
    switch (kind) {
    case AgentKind::killer:
        if (s.enemy && s.powerup && !s.powerup_collected) return Sprite::powerup;
        if (s.enemy && s.powerup_collected) return Sprite::enemy;
        return Sprite::goal;
    case AgentKind::coincollector: return s.goldcoin ? Sprite::goldcoin : Sprite::goal;
    case AgentKind::optimal: return optimal_objective(s);
    case AgentKind::random: break;
    }
    return Sprite::goal;
}

}  // namespace

Action policy_action(AgentKind kind, const GameState& s) {
    if (kind == AgentKind::random) return Action::stay;
    Sprite target = objective(kind, s);
    Pos to = where(s, target);
    int dx = to.x - s.player.x, dy = to.y - s.player.y;
    if (dx == 0 && dy == 0) return Action::stay;

    Action horizontal = dx > 0 ? Action::right : Action::left;
    Action vertical = dy > 0 ? Action::down : Action::up;
    std::vector<Action> options;
    if (std::abs(dx) >= std::abs(dy)) {
        options.push_back(horizontal);
        if (dy != 0) options.push_back(vertical);
        options.insert(options.end(), {Action::up, Action::down});
    } else {
        options.push_back(vertical);
        if (dx != 0) options.push_back(horizontal);
        options.insert(options.end(), {Action::left, Action::right});
    }
    bool avoid = s.enemy && !s.powerup_collected;
    for (Action a : options) {
        Pos p = moved(s.player, a);
        if (!inside(s.config, p)) continue;
        if (avoid && *s.enemy == p) continue;
        return a;
    }
    return Action::stay;
}

Rollout run_agent(AgentKind kind, std::uint64_t seed, double epsilon, const GameConfig& config, std::size_t id,
                  const StepObserver& observer) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be in [0, 1)");
    Rollout r;
    r.id = id;
    r.seed = seed;
    r.agent = kind;
    r.epsilon = epsilon;
    r.config = config;

    GameState s = init_game(seed, config);
    std::mt19937_64 rng = make_rng(seed, 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> any_action(0, 4);
    if (observer) observer(s);
    while (!s.terminated && s.tick < config.max_ticks()) {
        Action a = policy_action(kind, s);
        bool explore = kind == AgentKind::random || coin(rng) < epsilon;
        if (explore) a = static_cast<Action>(any_action(rng));
        GameState next = step(s, a);
        r.frames.push_back(extract_frame(s, a, next));
        s = std::move(next);
        if (observer) observer(s);
    }
    r.frames.push_back(terminal_frame(s));
    r.final_score = s.score;
    r.ticks = s.tick;
    r.coins = s.coins;
    r.enemy_killed = s.enemy_killed;
    r.died = s.died;
    r.terminated = s.terminated;
    return r;
}

std::vector<Rollout> simulate(AgentKind kind, std::size_t count, std::uint64_t seed, double epsilon,
                              const GameConfig& config) {
    std::vector<Rollout> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::uint32_t words[2];
        seq.generate(words, words + 2);
        std::uint64_t rollout_seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        out.push_back(run_agent(kind, rollout_seed, epsilon, config, i));
    }
    return out;
}

std::string render_ascii(const GameState& s) {
    std::vector<std::string> grid(s.config.height, std::string(s.config.width, '.'));
    auto put = [&](Pos p, char c) { grid[p.y][p.x] = c; };
    put(s.goal, 'G');
    if (s.goldcoin) put(*s.goldcoin, 'C');
    if (s.powerup) put(*s.powerup, 'U');
    if (s.enemy) put(*s.enemy, 'E');
    put(s.player, s.powerup_collected ? 'M' : 'P');
    std::ostringstream out;
    out << "tick " << s.tick << " score " << s.score << (s.terminated ? " (terminated)" : "") << "\n";
    for (const std::string& line : grid) out << line << "\n";
    return out.str();
}

double RolloutTrajectory::value(std::string_view var, int t) const {
    return rollout_->frames.at(static_cast<std::size_t>(t)).value(var);
}

Row RolloutTrajectory::row(int t) const { return rollout_->frames.at(static_cast<std::size_t>(t)).row(); }

}  // namespace tsce
