#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "ddopt/misp_model.hpp"
#include "ddopt/ordering.hpp"

using namespace ddopt;

namespace {

Graph path3() { return Graph(3, {{0, 1, 1}, {1, 2, 1}}); }

bool is_permutation(const std::vector<int>& p, int n) {
    if (int(p.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int v : p) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

std::uint64_t fib(int k) {  // fib(1) = fib(2) = 1
    std::uint64_t a = 1, b = 1;
    for (int i = 2; i < k; ++i) {
        std::uint64_t c = a + b;
        a = b;
        b = c;
    }
    return k <= 2 ? 1 : b;
}

}  // namespace

TEST_CASE("rand_ordering basics") {
    Graph one(1, {});
    CHECK(rand_ordering(one, 0) == std::vector<int>{0});

    Graph g = generate_ba({.n = 9, .nu = 2, .weight_low = 1, .weight_high = 1, .seed = 4});
    CHECK(rand_ordering(g, 123) == rand_ordering(g, 123));
    CHECK(is_permutation(rand_ordering(g, 7), 9));
}

TEST_CASE("rand_ordering is uniform over permutations of 3") {
    Graph g(3, {});
    std::map<std::vector<int>, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) counts[rand_ordering(g, 1000 + i)]++;
    REQUIRE(counts.size() == 6);
    // each permutation within 3 sigma of draws/6
    const double mean = draws / 6.0;
    const double sigma = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
    for (auto& [perm, c] : counts) {
        CHECK(std::abs(c - mean) <= 3 * sigma);
    }
}

TEST_CASE("mpd_ordering") {
    CHECK(mpd_ordering(path3()) == std::vector<int>{0, 1, 2});

    Graph iso(2, {});
    CHECK(mpd_ordering(iso) == std::vector<int>{0, 1});

    // consecutive path vertices are adjacent, endpoints close their neighborhoods
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 6 + int(seed % 10);
        Graph g = generate_ba({.n = n, .nu = 2, .weight_low = 1, .weight_high = 1, .seed = seed});
        auto ord = mpd_ordering(g);
        REQUIRE(is_permutation(ord, n));
        std::vector<char> before(n, 0);
        for (std::size_t j = 0; j < ord.size(); ++j) {
            before[ord[j]] = 1;
            if (j + 1 == ord.size()) continue;
            if (g.has_edge(ord[j], ord[j + 1])) continue;
            for (int u : g.neighbors(ord[j])) CHECK(before[u] == 1);
        }
    }
}

TEST_CASE("mpd ordering bounds exact MISP widths by Fibonacci numbers") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const int n = 8 + int(seed % 11);  // up to 18
        Graph g = generate_ba({.n = n, .nu = 1 + int(seed % 3), .weight_low = 1,
                               .weight_high = 1, .seed = 900 + seed});
        auto dd = compile(MispModel(g), g, mpd_ordering(g), DdMode::exact);
        const auto& layers = dd.layers();
        for (std::size_t j = 1; j <= layers.size(); ++j)
            CHECK(layers[j - 1].size() <= fib(int(j) + 1));
    }
}

TEST_CASE("deg_ordering") {
    Graph star(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
    CHECK(deg_ordering(star) == std::vector<int>{1, 2, 3, 0});

    Graph c4(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});  // 2-regular
    CHECK(deg_ordering(c4) == std::vector<int>{0, 1, 2, 3});

    CHECK(deg_ordering(path3()) == std::vector<int>{0, 2, 1});
}

TEST_CASE("maxweight_ordering") {
    Graph tri(3, {{0, 1, 3}, {1, 2, 4}, {0, 2, 5}});
    CHECK(maxweight_ordering(tri) == std::vector<int>{2, 0, 1});

    Graph star(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
    CHECK(maxweight_ordering(star)[0] == 0);

    Graph c4(4, {{0, 1, 2}, {1, 2, 2}, {2, 3, 2}, {0, 3, 2}});
    CHECK(maxweight_ordering(c4) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("min_states_next") {
    Graph p3 = path3();
    DecisionDiagram dd(MispModel(p3), p3, DdMode::exact);
    // single root with eligible {0,1,2}: all counts tie, lowest id wins
    CHECK(min_states_next(dd, {0, 1, 2}) == 0);

    dd.insert(2);  // layer states: {0,1} (d=0) and {0} (d=1)
    CHECK(min_states_next(dd, {0, 1}) == 1);  // 1 appears once, 0 twice

    CHECK_THROWS_AS(min_states_next(dd, {}), ConfigError);
}

TEST_CASE("ordering names round-trip") {
    for (auto k : {OrderingKind::rand, OrderingKind::mpd, OrderingKind::deg, OrderingKind::maxw,
                   OrderingKind::min, OrderingKind::learned})
        CHECK(ordering_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(ordering_from_string("nope"), ConfigError);
}
