#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ddopt/dd.hpp"
#include "ddopt/mcp_model.hpp"
#include "ddopt/misp_model.hpp"
#include "ddopt/oracles.hpp"
#include "ddopt/ordering.hpp"

using namespace ddopt;

namespace {

Graph path3() { return Graph(3, {{0, 1, 1}, {1, 2, 1}}); }

Bitset mask(int n, std::initializer_list<int> bits) {
    Bitset b(n);
    for (int v : bits) b.set(v);
    return b;
}

LayerContext ctx_of(const Graph& g, const std::vector<int>& inserted, const Bitset& placed) {
    return LayerContext{&g, &inserted, &placed};
}

}  // namespace

TEST_CASE("misp root state is the full vertex set") {
    Graph p3 = path3();
    CHECK(MispModel(p3).root().eligible == mask(3, {0, 1, 2}));

    Graph empty4(4, {});
    CHECK(MispModel(empty4).root().eligible == mask(4, {0, 1, 2, 3}));

    // the five-vertex instance used by the policy-construction walkthrough
    Graph fig(5, {{0, 1, 1}, {0, 3, 1}, {1, 2, 1}, {1, 4, 1}, {3, 4, 1}, {2, 4, 1}});
    CHECK(MispModel(fig).root().eligible == mask(5, {0, 1, 2, 3, 4}));
}

TEST_CASE("misp transition") {
    Graph p3 = path3();
    MispModel m(p3);
    std::vector<int> none;
    Bitset placed(3);
    auto ctx = ctx_of(p3, none, placed);

    auto r = m.transition({mask(3, {0, 1, 2})}, 1, 1, ctx);
    REQUIRE(r.has_value());
    CHECK(r->state.eligible == mask(3, {}));
    CHECK(r->cost == 1);

    CHECK_FALSE(m.transition({mask(3, {0, 2})}, 1, 1, ctx).has_value());

    auto r0 = m.transition({mask(3, {0, 1, 2})}, 0, 0, ctx);
    REQUIRE(r0.has_value());
    CHECK(r0->state.eligible == mask(3, {1, 2}));
    CHECK(r0->cost == 0);

    // eligibility only shrinks
    for (int v = 0; v < 3; ++v)
        for (int d = 0; d <= 1; ++d) {
            auto t = m.transition({mask(3, {0, 1, 2})}, v, d, ctx);
            if (t) CHECK(t->state.eligible.subset_of(mask(3, {0, 1, 2})));
            if (t) CHECK_FALSE(t->state.eligible.test(v));
        }
}

TEST_CASE("misp merge is the union with zero corrections") {
    Graph p3 = path3();
    MispModel m(p3);
    std::vector<int> none;
    Bitset placed(3);
    auto ctx = ctx_of(p3, none, placed);

    MispState a{mask(3, {0, 2})}, b{mask(3, {1, 2})};
    auto r = m.merge({&a, &b}, ctx);
    CHECK(r.state.eligible == mask(3, {0, 1, 2}));
    CHECK(r.corrections == std::vector<Value>{0, 0});

    auto single = m.merge({&a}, ctx);
    CHECK(single.state.eligible == a.eligible);

    MispState e1{mask(3, {})}, e2{mask(3, {})};
    CHECK(m.merge({&e1, &e2}, ctx).state.eligible == mask(3, {}));
}

TEST_CASE("mcp root and first-layer symmetry breaking") {
    Graph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    McpModel m(tri);
    auto root = m.root();
    CHECK(root.sigma == std::vector<std::int32_t>{0, 0, 0});

    std::vector<int> none;
    Bitset placed(3);
    auto ctx = ctx_of(tri, none, placed);
    CHECK_FALSE(m.transition(root, 0, 0, ctx).has_value());  // side T forbidden first
    auto r = m.transition(root, 0, 1, ctx);
    REQUIRE(r.has_value());
    CHECK(r->cost == 0);
    CHECK(r->state.sigma == std::vector<std::int32_t>{0, -1, -1});
}

TEST_CASE("mcp transition costs on the unit triangle, order 0,1,2") {
    // After placing 0 in S, layer 1 sees t_1 = 1 and sigma_1 = -1: placing 1
    // in T gains the crossing edge (0,1), placing it in S gains nothing.
    // Costs are in half units (denominator 2).
    Graph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    McpModel m(tri);
    std::vector<int> ins{0};
    Bitset placed(3);
    placed.set(0);
    auto ctx = ctx_of(tri, ins, placed);

    McpState s{{0, -1, -1}};
    auto in_t = m.transition(s, 1, 0, ctx);
    auto in_s = m.transition(s, 1, 1, ctx);
    REQUIRE(in_t.has_value());
    REQUIRE(in_s.has_value());
    CHECK(in_t->cost == 2);  // cut weight 1
    CHECK(in_s->cost == 0);  // cut weight 0
    CHECK(in_t->state.sigma == std::vector<std::int32_t>{0, 0, 0});
    CHECK(in_s->state.sigma == std::vector<std::int32_t>{0, 0, -2});
}

TEST_CASE("mcp exact diagrams match brute force on tiny cases") {
    Graph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    auto dd = compile(McpModel(tri), tri, {0, 1, 2}, DdMode::exact);
    CHECK(dd.bound() == 2.0);
    CHECK(brute_force_mcp(tri) == 2);

    Graph k2(2, {{0, 1, 5}});
    auto dd2 = compile(McpModel(k2), k2, {0, 1}, DdMode::exact);
    CHECK(dd2.bound() == 5.0);
}

TEST_CASE("mcp merge: sign-consistent minimum with per-parent corrections") {
    Graph k2(2, {{0, 1, 1}});
    McpModel m(k2);
    std::vector<int> ins{0};
    Bitset placed(2);
    placed.set(0);
    auto ctx = ctx_of(k2, ins, placed);

    McpState a{{0, 3}}, b{{0, -2}};
    auto r = m.merge({&a, &b}, ctx);
    CHECK(r.state.sigma == std::vector<std::int32_t>{0, 0});
    // true corrections 1.5 and 1.0, stored as 3 and 2 half units
    CHECK(r.corrections == std::vector<Value>{3, 2});

    McpState c{{0, 2}}, d{{0, 5}};
    auto r2 = m.merge({&c, &d}, ctx);
    CHECK(r2.state.sigma == std::vector<std::int32_t>{0, 2});
    CHECK(r2.corrections == std::vector<Value>{0, 3});

    McpState e{{0, -2}}, f{{0, -5}};
    auto r3 = m.merge({&e, &f}, ctx);
    CHECK(r3.state.sigma == std::vector<std::int32_t>{0, -2});
    CHECK(r3.corrections == std::vector<Value>{0, 3});

    McpState z{{0, 0}}, p{{0, 4}};
    auto r4 = m.merge({&z, &p}, ctx);
    CHECK(r4.state.sigma == std::vector<std::int32_t>{0, 0});
    CHECK(r4.corrections == std::vector<Value>{0, 4});
}

TEST_CASE("exactness oracle: exact DD equals brute force on seeded graphs") {
    // MISP
    int done = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        for (int nu : {1, 2, 3}) {
            const int n = 5 + int(seed % 11);
            Graph g = generate_ba({.n = n, .nu = std::min(nu, n - 1), .weight_low = 1,
                                   .weight_high = 1, .seed = seed * 31 + nu});
            const int opt = brute_force_misp(g);
            for (std::uint64_t os = 0; os < 3; ++os) {
                auto ord = rand_ordering(g, seed * 97 + os);
                auto dd = compile(MispModel(g), g, ord, DdMode::exact);
                REQUIRE(dd.bound() == double(opt));
                ++done;
            }
        }
    }
    CHECK(done > 200);

    // MCP
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const int n = 5 + int(seed % 8);
        Graph g = generate_ba({.n = n, .nu = std::min<int>(2, n - 1), .weight_low = 1,
                               .weight_high = 10, .seed = 1000 + seed});
        const auto opt = brute_force_mcp(g);
        for (std::uint64_t os = 0; os < 3; ++os) {
            auto ord = rand_ordering(g, seed * 53 + os);
            auto dd = compile(McpModel(g), g, ord, DdMode::exact);
            REQUIRE(dd.bound() == double(opt));
        }
    }
}

TEST_CASE("mcp parity: exact states keep t_v and sigma_v aligned") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const int n = 5 + int(seed % 7);
        Graph g = generate_ba({.n = n, .nu = 2, .weight_low = 1, .weight_high = 10,
                               .seed = 300 + seed});
        auto ord = rand_ordering(g, seed);
        auto dd = compile(McpModel(g), g, ord, DdMode::exact);
        Bitset placed(n);
        for (std::size_t l = 0; l + 1 < dd.layers().size(); ++l) {
            const int v = ord[l];
            long long tv = 0;
            for (auto [u, w] : g.adjacent(v))
                if (placed.test(u)) tv += w;
            for (const auto& node : dd.layers()[l]) CHECK((tv + node.state.sigma[v]) % 2 == 0);
            placed.set(v);
        }
    }
}

TEST_CASE("relaxation soundness: merging any prefix is still an upper bound") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 6 + int(seed % 7);
        Graph g = generate_ba({.n = n, .nu = 2, .weight_low = 1, .weight_high = 10,
                               .seed = 500 + seed});
        const double misp_opt = brute_force_misp(g);
        const double mcp_opt = double(brute_force_mcp(g));
        for (int W : {1, 2, 3, 5}) {
            auto ord = rand_ordering(g, seed);
            CHECK(compile(MispModel(g), g, ord, DdMode::relaxed, W).bound() >= misp_opt);
            CHECK(compile(McpModel(g), g, ord, DdMode::relaxed, W).bound() >= mcp_opt);
        }
    }
}
