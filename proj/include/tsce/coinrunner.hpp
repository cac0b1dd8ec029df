#pragma once

#include "tsce/context.hpp"
#include "tsce/engine.hpp"
#include "tsce/graph.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsce {

enum class Action { up, down, left, right, stay };

struct Pos {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pos&, const Pos&) = default;
};

struct GameConfig {
    int width = 10;
    int height = 10;
    bool goldcoin = true;
    bool powerup = true;
    bool enemy = true;
    double start_score = 20.0;

    int max_ticks() const { return width * height * 10; }
};

/// y grows downwards; "up" decreases y.
struct GameState {
    GameConfig config;
    Pos player;
    std::optional<Pos> goldcoin;
    std::optional<Pos> powerup;
    std::optional<Pos> enemy;
    Pos goal;
    double score = 0.0;
    bool powerup_collected = false;
    bool enemy_killed = false;
    bool terminated = false;
    bool died = false;  ///< ran into the enemy without the powerup
    int tick = 0;
    int coins = 0;
};

/// Places player, coin, powerup and enemy on distinct cells and the goal on a
/// uniformly chosen corner.
GameState init_game(std::uint64_t seed, const GameConfig& config = {});

/// One tick: move (clipped at walls), pay one point, then resolve whatever
/// occupies the new cell.
GameState step(const GameState& state, Action action);

inline constexpr std::array<std::string_view, 14> kFrameBinaries = {
    "targeting_enemy", "targeting_goal",   "targeting_goldcoin", "targeting_powerup", "collide_enemy",
    "collide_goal",    "collide_goldcoin", "collide_powerup",    "enemy_exists",      "powerup_exists",
    "goldcoin_exists", "powerup_collected", "enemy_killed",      "terminated"};

/// Frame variables in column order: score, then the binaries above.
const std::vector<Variable>& frame_variables();

struct Frame {
    int tick = 0;
    double score = 0.0;
    std::array<int, kFrameBinaries.size()> bits{};

    int bit(std::string_view name) const;
    void set_bit(std::string_view name, int value);
    double value(std::string_view var) const;
    Row row() const;
    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Frame for the transition prev -> next. Sprite, collection, kill and
/// termination flags describe the state the action was taken in; collisions
/// and targeting describe the move. Targeting picks the existing sprite with
/// the largest positive cosine between the displacement and the direction to
/// the sprite, and nothing on ties or without movement.
Frame extract_frame(const GameState& prev, Action action, const GameState& next);

/// Closing frame of a finished game: the final flags, no movement.
Frame terminal_frame(const GameState& state);

enum class AgentKind { killer, coincollector, optimal, random };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view text);

/// Greedy policy action for the current state, before any random replacement.
Action policy_action(AgentKind kind, const GameState& state);

struct Rollout {
    std::size_t id = 0;
    std::uint64_t seed = 0;
    AgentKind agent = AgentKind::killer;
    double epsilon = 0.0;
    GameConfig config;
    std::vector<Frame> frames;
    double final_score = 0.0;
    int ticks = 0;
    int coins = 0;
    bool enemy_killed = false;
    bool died = false;
    bool terminated = false;
};

using StepObserver = std::function<void(const GameState&)>;

/// Plays one game. With probability epsilon each step's action is replaced by
/// a uniform random one. Stops at termination or after config.max_ticks().
Rollout run_agent(AgentKind kind, std::uint64_t seed, double epsilon, const GameConfig& config = {},
                  std::size_t id = 0, const StepObserver& observer = {});

/// `count` rollouts with per-rollout seeds derived from `seed`.
std::vector<Rollout> simulate(AgentKind kind, std::size_t count, std::uint64_t seed, double epsilon,
                              const GameConfig& config = {});

std::string render_ascii(const GameState& state);

std::string rollouts_to_jsonl(const std::vector<Rollout>& rollouts);
std::vector<Rollout> rollouts_from_jsonl(std::string_view text);

/// A rollout seen as a behaviour-mode trajectory (no population statistics).
class RolloutTrajectory : public Trajectory {
public:
    explicit RolloutTrajectory(const Rollout& rollout) : rollout_(&rollout) {}

    int horizon() const override { return static_cast<int>(rollout_->frames.size()); }
    const std::vector<Variable>& variables() const override { return frame_variables(); }
    double value(std::string_view var, int t) const override;
    std::optional<double> phi(std::string_view, int) const override { return std::nullopt; }
    Row row(int t) const override;

private:
    const Rollout* rollout_;
};

}  // namespace tsce
