#include <cmath>
#include <limits>

#include "doctest.h"

#include "coopeq/errors.hpp"
#include "coopeq/model.hpp"
#include "coopeq/rng.hpp"
#include "test_util.hpp"

using namespace coopeq;

TEST_CASE("global_utility sums both tables on the prisoner's dilemma") {
    const Game g = testutil::pd_game();
    CHECK(global_utility(g, {0, 0}) == 6.0);
    CHECK(global_utility(g, {0, 1}) == 5.0);
    CHECK(global_utility(g, {1, 0}) == 5.0);
    CHECK(global_utility(g, {1, 1}) == 2.0);

    // Cross-check against a direct enumeration of per-agent lookups.
    std::vector<int> x(2, 0);
    do {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) s += agent_payoff(g, i, x);
        CHECK(global_utility(g, x) == s);
    } while (next_assignment(x, g.action_counts));
}

TEST_CASE("global_utility trivial cases") {
    const Game zeros = make_normal_form({2, 2}, {{0, 0, 0, 0}, {0, 0, 0, 0}});
    CHECK(global_utility(zeros, {1, 0}) == 0.0);

    const Game solo = make_normal_form({2}, {{2, 7}});
    CHECK(global_utility(solo, {1}) == 7.0);

    CHECK_THROWS_AS(global_utility(solo, {2}), InputError);
    CHECK_THROWS_AS(global_utility(solo, {0, 0}), InputError);
}

TEST_CASE("agent_payoff looks up the owner's table") {
    const Game g = testutil::pd_game();
    CHECK(agent_payoff(g, 0, {1, 0}) == 5.0);
    CHECK(agent_payoff(g, 1, {1, 0}) == 0.0);

    // A single-variable scope ignores the other agents entirely.
    const Game f = make_factored(
        {2, 3}, {SubObjective{0, {0}, {4.0, 9.0}},
                 SubObjective{1, {0, 1}, {0, 1, 2, 3, 4, 5}}});
    for (int b = 0; b < 3; ++b) {
        CHECK(agent_payoff(f, 0, {1, b}) == 9.0);
    }
    CHECK(agent_payoff(f, 1, {1, 2}) == 5.0);
}

TEST_CASE("global_utility equals the sum of agent payoffs on random games") {
    Rng rng(401);
    for (int rep = 0; rep < 25; ++rep) {
        const Game g = testutil::random_game(rng, 2 + static_cast<int>(rng.uniform_int(2)), 2, 3);
        std::vector<int> x(static_cast<std::size_t>(g.num_agents()), 0);
        do {
            double s = 0.0;
            for (int i = 0; i < g.num_agents(); ++i) s += agent_payoff(g, i, x);
            CHECK(global_utility(g, x) == s);
        } while (next_assignment(x, g.action_counts));
    }
}

TEST_CASE("expected_agent_payoff basics") {
    SUBCASE("constant utility is e^0") {
        const Game solo = make_normal_form({2}, {{0, 0}});
        const auto ep = expected_agent_payoff(solo, 0, uniform_profile(solo), 1.0);
        CHECK(ep.linear_safe);
        CHECK(ep.linear_value == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("degenerate profile picks out the pure payoff") {
        const Game g = testutil::pd_game();
        StrategyProfile p;
        p.probs = {{1.0, 0.0}, {1.0, 0.0}};
        const auto ep = expected_agent_payoff(g, 0, p, 1.0);
        CHECK(ep.log_value == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("uniform profile on the prisoner's dilemma") {
        const Game g = testutil::pd_game();
        const auto ep = expected_agent_payoff(g, 0, uniform_profile(g), 1.0);
        const double expected =
            (std::exp(3.0) + std::exp(0.0) + std::exp(5.0) + std::exp(1.0)) / 4.0;
        CHECK(ep.linear_value == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("nonpositive hbar is rejected") {
        const Game g = testutil::pd_game();
        CHECK_THROWS_AS(expected_agent_payoff(g, 0, uniform_profile(g), 0.0), ConfigError);
        CHECK_THROWS_AS(expected_agent_payoff(g, 0, uniform_profile(g), -1.0), ConfigError);
    }
}

TEST_CASE("expected_agent_payoff at a point mass equals e^{payoff/hbar}") {
    Rng rng(402);
    for (int rep = 0; rep < 20; ++rep) {
        const Game g = testutil::random_game(rng, 2 + static_cast<int>(rng.uniform_int(2)), 2, 3);
        std::vector<int> x(static_cast<std::size_t>(g.num_agents()));
        StrategyProfile p;
        for (int j = 0; j < g.num_agents(); ++j) {
            const int a =
                static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.num_actions(j))));
            x[static_cast<std::size_t>(j)] = a;
            std::vector<double> v(static_cast<std::size_t>(g.num_actions(j)), 0.0);
            v[static_cast<std::size_t>(a)] = 1.0;
            p.probs.push_back(std::move(v));
        }
        const double hbar = 0.5 + rng.uniform01();
        const int i =
            static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.num_agents())));
        const auto ep = expected_agent_payoff(g, i, p, hbar);
        const double want = std::exp(agent_payoff(g, i, x) / hbar);
        CHECK(ep.linear_value == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("expected_agent_payoff is invariant under consistent agent relabeling") {
    Rng rng(403);
    for (int rep = 0; rep < 15; ++rep) {
        const Game g = testutil::random_game(rng, 3, 2, 3);
        const StrategyProfile p = random_profile(g, 1000 + static_cast<std::uint64_t>(rep));
        const auto perm = testutil::random_permutation(rng, 3);
        const Game pg = testutil::permute_game(g, perm);
        const StrategyProfile pp = testutil::permute_profile(p, perm);
        for (int i = 0; i < 3; ++i) {
            const auto a = expected_agent_payoff(g, i, p, 1.0);
            const auto b = expected_agent_payoff(pg, perm[static_cast<std::size_t>(i)], pp, 1.0);
            CHECK(a.log_value == doctest::Approx(b.log_value).epsilon(1e-12));
        }
    }
}

TEST_CASE("uniform_profile shapes") {
    const Game g = make_normal_form({3, 2}, {{0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}});
    const StrategyProfile p = uniform_profile(g);
    REQUIRE(p.probs.size() == 2);
    CHECK(p.probs[0] == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK(p.probs[1] == std::vector<double>{0.5, 0.5});

    const Game one = make_normal_form({1}, {{4.0}});
    CHECK(uniform_profile(one).probs[0] == std::vector<double>{1.0});
}

TEST_CASE("random_profile is seeded, normalized, and interior") {
    const Game g = testutil::pd_game();
    CHECK(random_profile(g, 7) == random_profile(g, 7));
    CHECK(sup_diff(random_profile(g, 7), random_profile(g, 8)) > 0.0);

    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const StrategyProfile p = random_profile(g, seed);
        for (const auto& v : p.probs) {
            double s = 0.0;
            for (double q : v) {
                CHECK(q > 0.0);
                s += q;
            }
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("game validation rejects malformed inputs") {
    CHECK_THROWS_AS(make_normal_form({}, {}), InputError);
    CHECK_THROWS_AS(make_normal_form({2, 2}, {{1, 2, 3}, {1, 2, 3, 4}}), InputError);
    CHECK_THROWS_AS(make_normal_form({2}, {{1.0, std::nan("")}}), InputError);

    // Scope problems: missing owner, unsorted, out of range.
    CHECK_THROWS_AS(make_factored({2, 2}, {SubObjective{0, {1}, {1, 2}},
                                           SubObjective{1, {1}, {1, 2}}}),
                    InputError);
    CHECK_THROWS_AS(make_factored({2, 2}, {SubObjective{0, {0}, {1, 2}},
                                           SubObjective{1, {1, 0}, {1, 2, 3, 4}}}),
                    InputError);
    CHECK_THROWS_AS(make_factored({2, 2}, {SubObjective{0, {0, 2}, {1, 2, 3, 4}},
                                           SubObjective{1, {1}, {1, 2}}}),
                    InputError);

    // The per-table cell cap trips before any table is inspected.
    std::vector<int> big(9, 8);  // 8^9 > 1e7
    CHECK_THROWS_AS(make_normal_form(std::move(big), {}), CapacityError);
}

TEST_CASE("profiles over very wide action spaces still validate") {
    // A uniform strategy over 1e6 actions has a true sum of exactly
    // m * fl(1/m) = 1 within one ulp; the validator must see that rather
    // than the drift of a naive accumulation.
    const Game wide = make_normal_form({1000000}, {std::vector<double>(1000000, 0.0)});
    CHECK_NOTHROW(validate_profile(wide, uniform_profile(wide)));
    CHECK_NOTHROW(validate_profile(wide, random_profile(wide, 3)));
}

TEST_CASE("make_shared_objective splits a table into equal parts") {
    const Game g = make_shared_objective({2, 2}, {4.0, 8.0, 0.0, 2.0});
    CHECK(g.flavor == GameFlavor::Factored);
    CHECK(agent_payoff(g, 0, {0, 1}) == 4.0);
    CHECK(agent_payoff(g, 1, {0, 1}) == 4.0);
    CHECK(global_utility(g, {0, 1}) == 8.0);
}

TEST_CASE("logsumexp accumulator") {
    LogSumExp acc;
    CHECK(acc.value() == -std::numeric_limits<double>::infinity());
    acc.add(-std::numeric_limits<double>::infinity());
    CHECK(acc.value() == -std::numeric_limits<double>::infinity());
    acc.add(1000.0);
    acc.add(1000.0);
    CHECK(acc.value() == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
    acc.add(-1000.0);  // vanishes next to the big terms
    CHECK(acc.value() == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
}
