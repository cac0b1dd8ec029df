#include "tsce/coinrunner.hpp"
#include "tsce/error.hpp"

#include <json.hpp>

namespace tsce {

using json = nlohmann::ordered_json;

std::string rollouts_to_jsonl(const std::vector<Rollout>& rollouts) {
    std::string out;
    for (const Rollout& r : rollouts) {
        json header;
        header["type"] = "rollout";
        header["version"] = 1;
        header["id"] = r.id;
        header["seed"] = r.seed;
        header["agent"] = std::string(to_string(r.agent));
        header["epsilon"] = r.epsilon;
        header["config"] = {{"width", r.config.width},       {"height", r.config.height},
                            {"goldcoin", r.config.goldcoin}, {"powerup", r.config.powerup},
                            {"enemy", r.config.enemy},       {"start_score", r.config.start_score}};
        header["frames"] = r.frames.size();
        header["final_score"] = r.final_score;
        header["ticks"] = r.ticks;
        header["coins"] = r.coins;
        header["enemy_killed"] = r.enemy_killed;
        header["died"] = r.died;
        header["terminated"] = r.terminated;
        out += header.dump() + "\n";
        for (const Frame& f : r.frames) {
            json frame;
            frame["type"] = "frame";
            frame["tick"] = f.tick;
            frame["score"] = f.score;
            for (std::size_t i = 0; i < kFrameBinaries.size(); ++i) frame[std::string(kFrameBinaries[i])] = f.bits[i];
            out += frame.dump() + "\n";
        }
    }
    return out;
}

std::vector<Rollout> rollouts_from_jsonl(std::string_view text) {
    std::vector<Rollout> rollouts;
    std::size_t expected = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == text.npos ? std::string_view{} : text.substr(nl + 1);
        if (line.find_first_not_of(" \t\r") == line.npos) continue;
        auto bad = [&](const std::string& why) {
            return Error(ErrorCode::parse_error, "rollout line " + std::to_string(line_no) + ": " + why);
        };
        try {
            json j = json::parse(line);
            std::string type = j.at("type").get<std::string>();
            if (type == "rollout") {
                if (!rollouts.empty() && rollouts.back().frames.size() != expected) {
                    throw bad("previous rollout has " + std::to_string(rollouts.back().frames.size()) +
                              " frames, header announced " + std::to_string(expected));
                }
                Rollout r;
                r.id = j.at("id").get<std::size_t>();
                r.seed = j.at("seed").get<std::uint64_t>();
                r.agent = agent_kind_from_string(j.at("agent").get<std::string>());
                r.epsilon = j.value("epsilon", 0.0);
                const json& c = j.at("config");
                r.config.width = c.value("width", 10);
                r.config.height = c.value("height", 10);
                r.config.goldcoin = c.value("goldcoin", true);
                r.config.powerup = c.value("powerup", true);
                r.config.enemy = c.value("enemy", true);
                r.config.start_score = c.value("start_score", 20.0);
                expected = j.at("frames").get<std::size_t>();
                r.final_score = j.value("final_score", 0.0);
                r.ticks = j.value("ticks", 0);
                r.coins = j.value("coins", 0);
                r.enemy_killed = j.value("enemy_killed", false);
                r.died = j.value("died", false);
                r.terminated = j.value("terminated", false);
                rollouts.push_back(std::move(r));
            } else if (type == "frame") {
                if (rollouts.empty()) throw bad("frame before any rollout header");
                Frame f;
                f.tick = j.at("tick").get<int>();
                f.score = j.at("score").get<double>();
                for (std::size_t i = 0; i < kFrameBinaries.size(); ++i) {
                    int b = j.at(std::string(kFrameBinaries[i])).get<int>();
                    if (b != 0 && b != 1) throw bad(std::string(kFrameBinaries[i]) + " must be 0 or 1");
                    f.bits[i] = b;
                }
                auto& frames = rollouts.back().frames;
                if (!frames.empty() && f.tick < frames.back().tick) throw bad("ticks must not decrease");
                frames.push_back(f);
            } else {
                throw bad("unknown record type '" + type + "'");
            }
        } catch (const json::exception& ex) {
            throw bad(ex.what());
        }
    }
    if (rollouts.empty()) throw Error(ErrorCode::parse_error, "no rollouts in input");
    if (rollouts.back().frames.size() != expected) {
        throw Error(ErrorCode::parse_error, "last rollout is truncated");
    }
    for (const Rollout& r : rollouts) {
        if (r.frames.empty()) throw Error(ErrorCode::parse_error, "rollout " + std::to_string(r.id) + " has no frames");
    }
    return rollouts;
}

}  // namespace tsce
