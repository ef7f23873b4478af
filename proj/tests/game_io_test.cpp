#include <filesystem>
#include <string>

#include "doctest.h"

#include "coopeq/errors.hpp"
#include "coopeq/game_io.hpp"
#include "coopeq/oracle.hpp"
#include "test_util.hpp"

using namespace coopeq;

namespace {

std::string fixture(const std::string& name) {
    return (std::filesystem::path(COOPEQ_FIXTURES_DIR) / name).string();
}

}  // namespace

TEST_CASE("parse_game accepts a minimal one-player file") {
    const Game g = parse_game(R"({
        "kind": "normal_form",
        "players": [{"name": "solo", "actions": ["only"]}],
        "payoffs": [[1.5]]
    })");
    CHECK(g.num_agents() == 1);
    CHECK(g.num_actions(0) == 1);
    CHECK(agent_payoff(g, 0, {0}) == 1.5);
}

TEST_CASE("parse_game diagnostics cite the failing field") {
    SUBCASE("wrong payoff length") {
        try {
            parse_game(R"({
                "kind": "normal_form",
                "players": [{"name": "a", "actions": ["x", "y"]},
                            {"name": "b", "actions": ["x", "y"]}],
                "payoffs": [[1, 2, 3], [1, 2, 3, 4]]
            })");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("payoffs[0]") != std::string::npos);
        }
    }
    SUBCASE("malformed json") {
        CHECK_THROWS_AS(parse_game("{ not json"), ParseError);
    }
    SUBCASE("unknown kind") {
        CHECK_THROWS_AS(parse_game(R"({"kind": "extensive", "players": []})"), ParseError);
    }
    SUBCASE("non-finite payoffs are rejected") {
        CHECK_THROWS_AS(parse_game(R"({
            "kind": "normal_form",
            "players": [{"name": "a", "actions": ["x"]}],
            "payoffs": [[1e999]]
        })"),
                        ParseError);
    }
    SUBCASE("owner outside its scope") {
        try {
            parse_game(R"({
                "kind": "factored",
                "players": [{"name": "a", "actions": ["x", "y"]},
                            {"name": "b", "actions": ["x", "y"]}],
                "subobjectives": [
                    {"owner": 1, "scope": [2], "table": [0, 1]},
                    {"owner": 2, "scope": [2], "table": [0, 1]}
                ]
            })");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("scope") != std::string::npos);
        }
    }
    SUBCASE("duplicate owners") {
        CHECK_THROWS_AS(parse_game(R"({
            "kind": "factored",
            "players": [{"name": "a", "actions": ["x"]},
                        {"name": "b", "actions": ["x"]}],
            "subobjectives": [
                {"owner": 1, "scope": [1], "table": [0]},
                {"owner": 1, "scope": [1], "table": [0]}
            ]
        })"),
                        ParseError);
    }
    SUBCASE("table cap is a capacity error") {
        std::string players;
        for (int i = 0; i < 9; ++i) {
            if (i > 0) players += ",";
            players +=
                R"({"name": "p", "actions": ["1","2","3","4","5","6","7","8"]})";
        }
        CHECK_THROWS_AS(
            parse_game(R"({"kind": "normal_form", "players": [)" + players +
                       R"(], "payoffs": []})"),
            CapacityError);
    }
}

TEST_CASE("pd fixture parses end to end and the oracle agrees") {
    const ParsedGameFile pf = load_game_file(fixture("pd.json"));
    CHECK(pf.game.flavor == GameFlavor::NormalForm);
    CHECK(pf.game.player_names[0] == "row");
    const auto nash = oracle::enumerate_pure_nash(pf.game);
    REQUIRE(nash.equilibria.size() == 1);
    CHECK(nash.equilibria[0].profile == std::vector<int>{1, 1});
}

TEST_CASE("w parsing") {
    SUBCASE("named matrix") {
        const ParsedGameFile pf = load_game_file(fixture("coordination.json"));
        REQUIRE(pf.w_name.has_value());
        CHECK(*pf.w_name == "uniform");
        CHECK_FALSE(pf.w_dense.has_value());
    }
    SUBCASE("dense matrix, flat row-major form") {
        const ParsedGameFile pf = load_game_file(fixture("factored_chain.json"));
        REQUIRE(pf.w_dense.has_value());
        CHECK(pf.w_dense->n == 3);
        CHECK(validate_w(*pf.w_dense).all_ok());
    }
    SUBCASE("dense matrix, nested rows convenience form") {
        const ParsedGameFile pf = parse_game_file(R"({
            "kind": "normal_form",
            "players": [{"name": "a", "actions": ["x", "y"]},
                        {"name": "b", "actions": ["x", "y"]}],
            "payoffs": [[1, 2, 3, 4], [4, 3, 2, 1]],
            "w": [[0.5, 0.5], [0.5, 0.5]]
        })");
        REQUIRE(pf.w_dense.has_value());
        CHECK(*pf.w_dense == make_uniform_w(2));
    }
    SUBCASE("flat form with a non-square length is rejected") {
        CHECK_THROWS_AS(parse_game_file(R"({
            "kind": "normal_form",
            "players": [{"name": "a", "actions": ["x"]}],
            "payoffs": [[0]],
            "w": [0.5, 0.5]
        })"),
                        ParseError);
    }
    SUBCASE("unknown name") {
        CHECK_THROWS_AS(parse_game_file(R"({
            "kind": "normal_form",
            "players": [{"name": "a", "actions": ["x"]}],
            "payoffs": [[0]],
            "w": "magic"
        })"),
                        ParseError);
    }
    SUBCASE("wrong shape") {
        CHECK_THROWS_AS(parse_game_file(R"({
            "kind": "normal_form",
            "players": [{"name": "a", "actions": ["x"]}],
            "payoffs": [[0]],
            "w": [[1.0], [0.0]]
        })"),
                        ParseError);
    }
    SUBCASE("standalone w file parser accepts both shapes") {
        CHECK(parse_w_json("[[0.5, 0.5], [0.5, 0.5]]") == make_uniform_w(2));
        CHECK(parse_w_json("[0.5, 0.5, 0.5, 0.5]") == make_uniform_w(2));
        CHECK_THROWS_AS(parse_w_json("[[0.5], [0.5, 0.5]]"), ParseError);
        CHECK_THROWS_AS(parse_w_json("[0.5, 0.5, 0.5]"), ParseError);
    }
}

TEST_CASE("serialization round-trips every fixture") {
    for (const char* name : {"pd.json", "matching_pennies.json", "coordination.json",
                             "one_player.json", "single_action.json", "factored_chain.json"}) {
        const ParsedGameFile pf = load_game_file(fixture(name));
        const ParsedGameFile again = parse_game_file(serialize_game_file(pf));
        CHECK(again.game == pf.game);
        CHECK(again.w_name == pf.w_name);
        CHECK(again.w_dense == pf.w_dense);
    }
}

TEST_CASE("serialization round-trips random programmatic games") {
    Rng rng(419);
    for (int rep = 0; rep < 10; ++rep) {
        const Game g = testutil::random_game(rng, 2 + static_cast<int>(rng.uniform_int(2)), 2, 3);
        const Game back = parse_game(serialize_game(g));
        // Programmatic games gain default names/labels in serialization, so
        // compare the payoff structure rather than the metadata.
        CHECK(back.flavor == g.flavor);
        CHECK(back.action_counts == g.action_counts);
        CHECK(back.subs == g.subs);
    }
}
