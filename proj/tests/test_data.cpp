#include "tsce/data.hpp"
#include "tsce/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace tsce;

namespace {

PanelDataset column(std::vector<double> xs) {
    PanelDataset d({{"X", VarKind::continuous}}, xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) d.set(i, 0, 0, xs[i]);
    return d;
}

// Sorted-array percentile with linear interpolation between order statistics.
double percentile_oracle(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    double pos = p / 100.0 * static_cast<double>(xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace

TEST_CASE("statistics") {
    CHECK(statistic(column({5, 5, 5}), PopulationStatistic::mean(), "X", 0) == 5.0);
    CHECK(statistic(column({4, 1, 3, 2}), PopulationStatistic::percentile(50), "X", 0) == doctest::Approx(2.5));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 1);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> xs(37);
        for (double& x : xs) x = n(rng);
        for (double p : {1.0, 10.0, 33.3, 50.0, 90.0, 99.0}) {
            CHECK(statistic(column(xs), PopulationStatistic::percentile(p), "X", 0) ==
                  doctest::Approx(percentile_oracle(xs, p)).epsilon(1e-12));
        }
        std::vector<double> scaled = xs;
        for (double& x : scaled) x *= 3.0;
        CHECK(statistic(column(scaled), PopulationStatistic::mean(), "X", 0) ==
              doctest::Approx(3.0 * statistic(column(xs), PopulationStatistic::mean(), "X", 0)));
    }

    CHECK(PopulationStatistic::parse("mean").kind == PopulationStatistic::Kind::mean);
    CHECK(PopulationStatistic::parse("p10").p == 10.0);
    CHECK(PopulationStatistic::parse("p10").name() == "p10");
    CHECK_THROWS_AS(PopulationStatistic::parse("p100"), Error);
    CHECK_THROWS_AS(PopulationStatistic::parse("median"), Error);
    CHECK_THROWS_AS(statistic(column({1}), PopulationStatistic::mean(), "X", 1), Error);
}

TEST_CASE("classification against a statistic is strict") {
    PanelDataset d = column({26.2, 30.0, 33.8});
    PanelDataset c = classify_vs_statistic(d, PopulationStatistic::mean());
    CHECK(c.value(0, 0, 0) == 0.0);
    CHECK(c.value(1, 0, 0) == 0.0);
    CHECK(c.value(2, 0, 0) == 1.0);
    CHECK(c.variables()[0].kind == VarKind::binary);
}

TEST_CASE("noise-free generator follows the recurrence exactly") {
    HansGeneratorConfig cfg;
    cfg.individuals = 25;
    cfg.steps = 12;
    cfg.noise_scale = 0.0;
    cfg.seed = 9;
    PanelDataset d = generate_hans(cfg);
    std::size_t A = d.var_index("Age"), F = d.var_index("Nutrition"), H = d.var_index("Health"),
                M = d.var_index("Mobility");
    for (std::size_t i = 0; i < d.individuals(); ++i) {
        double a = d.value(i, 0, A);
        CHECK(a >= 30.0);
        CHECK(a <= 80.0);
        double f = 0.5 * a, h = -0.2 * a + 0.6 * f, m = 0.5 * h;
        for (std::size_t t = 0; t < d.horizon(); ++t) {
            if (t > 0) {
                a += 1.0;
                f = 0.4 * (0.5 * a) + 0.6 * f;
                h = 0.4 * (-0.2 * a + 0.6 * f) + 0.6 * h;
                m = 0.4 * (0.5 * h) + 0.6 * m;
            }
            CHECK(d.value(i, t, A) == doctest::Approx(a).epsilon(1e-12));
            CHECK(d.value(i, t, F) == doctest::Approx(f).epsilon(1e-12));
            CHECK(d.value(i, t, H) == doctest::Approx(h).epsilon(1e-12));
            CHECK(d.value(i, t, M) == doctest::Approx(m).epsilon(1e-12));
            if (t > 0) CHECK(d.value(i, t, A) - d.value(i, t - 1, A) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("hand-evaluated structural values for Age 50") {
    // A_0 = 50 gives F_0 = 25 and H_0 = -10 + 15 = 5.
    double a = 50.0, f = 0.5 * a, h = -0.2 * a + 0.6 * f;
    CHECK(f == 25.0);
    CHECK(h == doctest::Approx(5.0));
}

TEST_CASE("generator moments and determinism") {
    HansGeneratorConfig cfg;
    cfg.individuals = 10000;
    cfg.steps = 2;
    cfg.seed = 1;
    PanelDataset d = generate_hans(cfg);
    CHECK(statistic(d, PopulationStatistic::mean(), "Age", 0) == doctest::Approx(55.0).epsilon(0.5 / 55.0));
    CHECK(statistic(d, PopulationStatistic::mean(), "Nutrition", 0) == doctest::Approx(27.5).epsilon(0.3 / 27.5));
    CHECK(generate_hans(cfg) == d);
    cfg.seed = 2;
    CHECK_FALSE(generate_hans(cfg) == d);

    PanelDataset c = classify_vs_statistic(d, PopulationStatistic::mean());
    double ones = 0;
    for (std::size_t i = 0; i < c.individuals(); ++i) ones += c.value(i, 1, c.var_index("Mobility"));
    CHECK(ones / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("generation does not depend on population size") {
    HansGeneratorConfig small;
    small.individuals = 3;
    small.steps = 5;
    small.seed = 4;
    HansGeneratorConfig big = small;
    big.individuals = 50;
    PanelDataset a = generate_hans(small), b = generate_hans(big);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t t = 0; t < 5; ++t) {
            for (std::size_t v = 0; v < 4; ++v) CHECK(a.value(i, t, v) == b.value(i, t, v));
        }
    }
}

TEST_CASE("panel csv round trip and validation") {
    HansGeneratorConfig cfg;
    cfg.individuals = 4;
    cfg.steps = 3;
    PanelDataset d = generate_hans(cfg);
    std::string csv = panel_to_csv(d);
    CHECK(csv.rfind("individual,t,Age,Nutrition,Health,Mobility\n", 0) == 0);
    CHECK(panel_from_csv(csv) == d);

    auto code = [](const std::string& text) {
        try {
            panel_from_csv(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::invalid_argument;
    };
    CHECK(code("individual,t,X\n0,0,1\n0,1,2\n1,0,3\n") == ErrorCode::parse_error);
    CHECK(code("individual,t,X\n0,0,1\n0,0,2\n") == ErrorCode::parse_error);
    CHECK(code("id,t,X\n0,0,1\n") == ErrorCode::parse_error);
    CHECK(code("individual,t,X\n0,0,abc\n") == ErrorCode::parse_error);
}
