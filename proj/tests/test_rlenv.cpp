#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ddopt/mcp_model.hpp"
#include "ddopt/misp_model.hpp"
#include "ddopt/ordering.hpp"
#include "ddopt/rlenv.hpp"

using namespace ddopt;

namespace {

Graph path3() { return Graph(3, {{0, 1, 1}, {1, 2, 1}}); }

}  // namespace

TEST_CASE("env_reset: empty sequence, zero bound, matching mode") {
    Graph g = generate_ba({.n = 5, .nu = 2, .weight_low = 1, .weight_high = 1, .seed = 1});
    Env<MispModel> ub(g, MispModel(g), Sense::ub, 3);
    CHECK(ub.inserted_seq().empty());
    CHECK(ub.dd().bound_raw() == 0);
    CHECK(ub.dd().mode() == DdMode::relaxed);
    CHECK_FALSE(ub.terminal());

    Env<MispModel> lb(g, MispModel(g), Sense::lb, 3);
    CHECK(lb.dd().mode() == DdMode::restricted);

    CHECK_THROWS_AS(Env<MispModel>(g, MispModel(g), Sense::ub, 0), ConfigError);
}

TEST_CASE("env_actions: the uninserted vertices") {
    Graph g = generate_ba({.n = 5, .nu = 2, .weight_low = 1, .weight_high = 1, .seed = 2});
    Env<MispModel> env(g, MispModel(g), Sense::ub, 2);
    CHECK(env.actions() == std::vector<int>{0, 1, 2, 3, 4});

    Graph p3 = path3();
    Env<MispModel> e3(p3, MispModel(p3), Sense::ub, 2);
    e3.step(2);
    CHECK(e3.actions() == std::vector<int>{0, 1});
    e3.step(0);
    e3.step(1);
    CHECK(e3.terminal());
    CHECK(e3.actions().empty());
}

TEST_CASE("env_step rejects repeated actions") {
    Graph p3 = path3();
    Env<MispModel> env(p3, MispModel(p3), Sense::ub, 2);
    env.step(1);
    CHECK_THROWS_AS(env.step(1), ConfigError);
}

TEST_CASE("P3 first reward is in {-1, 0} for the upper-bound sense") {
    Graph p3 = path3();
    for (int v = 0; v < 3; ++v) {
        Env<MispModel> env(p3, MispModel(p3), Sense::ub, 2);
        const auto out = env.step(v);
        CHECK((out.reward == -1.0 || out.reward == 0.0));
    }
}

TEST_CASE("episode rewards telescope to the signed final bound") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const int n = 5 + int(seed % 8);
        Graph g = generate_ba({.n = n, .nu = 2, .weight_low = 1, .weight_high = 7,
                               .seed = 40 + seed});
        auto ord = rand_ordering(g, seed);

        for (Sense sense : {Sense::ub, Sense::lb}) {
            Env<McpModel> env(g, McpModel(g), sense, 2);
            Value total = 0;
            for (int v : ord) total += env.step(v).reward_raw;
            const Value bound = env.dd().bound_raw();
            CHECK(total == (sense == Sense::ub ? -bound : bound));
            CHECK(env.terminal());
            CHECK(env.inserted_seq() == ord);
        }

        Env<MispModel> env(g, MispModel(g), Sense::ub, 3);
        Value total = 0;
        for (int v : ord) total += env.step(v).reward_raw;
        CHECK(total == -env.dd().bound_raw());
    }
}

TEST_CASE("reward signs: nonpositive for ub, nonnegative for lb") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = generate_ba({.n = 9, .nu = 3, .weight_low = 1, .weight_high = 9, .seed = seed});
        auto ord = rand_ordering(g, seed + 5);
        Env<McpModel> ub(g, McpModel(g), Sense::ub, 2);
        Env<McpModel> lb(g, McpModel(g), Sense::lb, 2);
        for (int v : ord) {
            CHECK(ub.step(v).reward_raw <= 0);
            CHECK(lb.step(v).reward_raw >= 0);
        }
    }
}

TEST_CASE("reset restores a fresh environment") {
    Graph p3 = path3();
    Env<MispModel> env(p3, MispModel(p3), Sense::lb, 1);
    env.step(0);
    env.step(1);
    env.reset();
    CHECK(env.inserted_seq().empty());
    CHECK(env.dd().bound_raw() == 0);
    CHECK(env.actions().size() == 3);
}
