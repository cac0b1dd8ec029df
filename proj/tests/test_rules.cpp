#include "support.hpp"

#include "tsce/error.hpp"
#include "tsce/rules.hpp"

#include <doctest.h>

#include <random>

using namespace tsce;

TEST_CASE("continuous rule worked examples") {
    // poor Mobility because of poor Health
    CHECK(eval_er_continuous({0.5, 2.6, 26.2, 3.0, 30.0}) == ERTriple{-1, 0, 0});
    // Health low because of high Age (negative edge)
    CHECK(eval_er_continuous({-0.2, 93.8, 2.6, 55.0, 3.0}) == ERTriple{1, 0, 0});
    // despite good Food Habits
    CHECK(eval_er_continuous({0.6, 40.0, 2.6, 27.5, 3.0}) == ERTriple{0, 1, 0});
    CHECK(eval_er_continuous({0.6, 27.5, 2.6, 27.5, 3.0}).empty());
    CHECK(eval_er_continuous({0.6, 30.0, 3.0, 27.5, 3.0}).empty());
    CHECK_THROWS_AS(eval_er_continuous({0.0, 1.0, 1.0, 0.0, 0.0}), Error);
}

TEST_CASE("continuous rule matches the literal delta enumeration on all 8 cases") {
    for (double a : {-0.7, 0.7}) {
        for (double x : {-1.0, 1.0}) {
            for (double y : {-2.0, 2.0}) {
                CHECK(eval_er_continuous({a, x, y, 0.0, 0.0}) == oracle::literal_continuous(a, x, y, 0.0, 0.0));
            }
        }
    }
}

TEST_CASE("continuous rule properties") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0, 1);
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    for (int i = 0; i < 2000; ++i) {
        CausalScenario c{n(rng), n(rng), n(rng), n(rng), n(rng)};
        if (c.alpha == 0.0) continue;
        ERTriple e = eval_er_continuous(c);
        int fired = (e.er1 != 0) + (e.er2 != 0);
        CHECK(fired == 1);
        CHECK(e.er3 == 0);

        CausalScenario flipped = c;
        flipped.alpha = -c.alpha;
        ERTriple f = eval_er_continuous(flipped);
        CHECK(f.er1 == e.er2);
        CHECK(f.er2 == e.er1);

        double k = pos(rng);
        CHECK(eval_er_continuous({c.alpha * k, c.x * k, c.y * k, c.phi_x * k, c.phi_y * k}) == e);
        CHECK(eval_er_continuous({c.alpha * k, c.x, c.y, c.phi_x, c.phi_y}) == e);
    }
}

TEST_CASE("binary rule truth table") {
    CHECK(eval_er_binary(0.4, 1, 1) == ERTriple{1, 0, 0});
    CHECK(eval_er_binary(-0.4, 0, 1) == ERTriple{-1, 0, 0});
    CHECK(eval_er_binary(0.4, 0, 1) == ERTriple{0, -1, 0});
    for (double a : {-1.0, 1.0}) {
        for (int x : {0, 1}) {
            for (int y : {0, 1}) CHECK(eval_er_binary(a, x, y) == oracle::literal_binary(a, x, y));
        }
    }
    CHECK_THROWS_AS(eval_er_binary(1.0, 0.5, 1), Error);
    CHECK_THROWS_AS(eval_er_binary(1.0, 1, 2), Error);
}

TEST_CASE("score rule is sign only") {
    CHECK(eval_er_score(4.338) == ERTriple{1, 0, 0});
    CHECK(eval_er_score(-0.479) == ERTriple{-1, 0, 0});
    CHECK(eval_er_score(1e6) == eval_er_score(1.0));
}

TEST_CASE("er3 marks the dominant because-sibling") {
    std::vector<Er3Candidate> health{
        {"Health", 9, {-1, 0, 0}, 0.6, 2.0, 4.0},
        {"Age", 10, {1, 0, 0}, -0.2, 60.0, 58.0},
        {"Nutrition", 10, {0, 1, 0}, 0.6, 40.0, 27.5},
    };
    apply_er3(health);
    CHECK(health[0].er.er3 == 1);
    CHECK(health[1].er.er3 == 0);
    CHECK(health[2].er.er3 == 0);

    std::vector<Er3Candidate> single{{"A", 1, {1, 0, 0}, 0.9, 1.0, 0.0}, {"B", 1, {0, -1, 0}, 2.0, 3.0, 0.0}};
    apply_er3(single);
    CHECK(single[0].er.er3 == 0);

    std::vector<Er3Candidate> empty;
    apply_er3(empty);
    CHECK(empty.empty());

    std::vector<Er3Candidate> tie{{"B", 1, {1, 0, 0}, 0.5, 0, {}}, {"A", 2, {-1, 0, 0}, -0.5, 0, {}},
                                  {"A", 1, {1, 0, 0}, 0.5, 0, {}}};
    apply_er3(tie);
    CHECK(tie[2].er.er3 == 1);
    CHECK(tie[0].er.er3 + tie[1].er.er3 == 0);
}

TEST_CASE("er3 agrees with a linear scan on random sibling sets") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> size(0, 6), pick(-1, 1), name(0, 2), time(0, 2), mag(1, 4);
    std::normal_distribution<double> n(0, 1);
    for (int round = 0; round < 3000; ++round) {
        std::vector<Er3Candidate> sib;
        std::vector<oracle::Sibling> ref;
        int k = size(rng);
        for (int i = 0; i < k; ++i) {
            Er3Candidate c;
            c.var = std::string(1, static_cast<char>('A' + name(rng)));
            c.t = time(rng);
            c.er.er1 = pick(rng);
            c.alpha = mag(rng) * (pick(rng) < 0 ? -0.5 : 0.5);
            bool binary = round % 2 == 0;
            c.x = binary ? 0.0 : static_cast<double>(mag(rng));
            if (!binary) c.phi_x = 0.0;
            sib.push_back(c);
            ref.push_back({c.var, c.t, c.er.er1, std::abs(c.alpha * (binary ? 1.0 : c.x))});
        }
        apply_er3(sib);
        int w = oracle::er3_winner(ref);
        for (int i = 0; i < k; ++i) CHECK(sib[i].er.er3 == (i == w ? 1 : 0));
    }
}
