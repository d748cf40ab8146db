#include <doctest.h>

#include <algorithm>
#include <random>

#include "cqcount/query.hpp"
#include "cqcount/verify.hpp"

using namespace cqcount;

TEST_CASE("parse star query") {
    Query q = parse_query("Q(x1,x2) :- R(x1,z), R(x2,z).");
    REQUIRE(q.head.size() == 2);
    CHECK(q.head[0].name == "x1");
    CHECK(q.head[1].name == "x2");
    REQUIRE(q.body.size() == 2);
    CHECK(q.body[0].predicate == "R");
    CHECK(q.body[0].args == std::vector<Variable>{{"x1"}, {"z"}});
    CHECK(q.body[1].args == std::vector<Variable>{{"x2"}, {"z"}});
}

TEST_CASE("parse boolean query and comments") {
    Query q = parse_query("# boolean\nB() :- R(x,y).  # trailing\n");
    CHECK(q.head.empty());
    REQUIRE(q.body.size() == 1);
    CHECK(q.body[0].arity() == 2);
}

TEST_CASE("parse rejects bad input") {
    CHECK_THROWS_AS(parse_query("Q(x) :- R(y,z)."), ParseError);   // safety
    CHECK_THROWS_AS(parse_query("Q() :- ."), ParseError);          // empty body
    CHECK_THROWS_AS(parse_query("Q(x) :- R(x,1)."), ParseError);   // constant
    CHECK_THROWS_AS(parse_query("Q(x) :- R(x,\"a\")."), ParseError);
    CHECK_THROWS_AS(parse_query("Q(x,x) :- R(x)."), ParseError);   // duplicate head
    CHECK_THROWS_AS(parse_query("Q(x) :- R()."), ParseError);      // nullary atom
    CHECK_THROWS_AS(parse_query("Q(x) :- R(x). extra"), ParseError);
    CHECK_THROWS_AS(parse_query("Q(x) :- R(x)"), ParseError);      // missing period
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_query("Q(x) :-\n  R(x,1).");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col > 1);
    }
}

TEST_CASE("render round-trips") {
    for (const char* text : {
             "Q(x1,x2) :- R(x1,z), R(x2,z).",
             "Q() :- R(x,y).",
             "Q(x,y,z) :- A(x,y), B(y,z), C(z).",
             "Q(x) :- R(x,x).",
         }) {
        Query q = parse_query(text);
        CHECK(parse_query(render_query(q)) == q);
    }
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        Query q = verify::random_query(rng);
        CHECK(parse_query(render_query(q)) == q);
    }
}

TEST_CASE("query properties") {
    Query star2 = parse_query("Q(x1,x2) :- R(x1,z), R(x2,z).");
    auto p = query_properties(star2);
    CHECK_FALSE(p.self_join_free);
    CHECK(p.free_vars == std::set<Variable>{{"x1"}, {"x2"}});
    CHECK(p.quantified_vars == std::set<Variable>{{"z"}});

    auto path = query_properties(parse_query("Q(x1,x2) :- A(x1,z), B(z,x2)."));
    CHECK(path.self_join_free);

    auto full = query_properties(parse_query("Q(x,y) :- R(x,y)."));
    CHECK(full.quantified_vars.empty());
}

TEST_CASE("hypergraph construction") {
    Query star2 = parse_query("Q(x1,x2) :- R(x1,z), R(x2,z).");
    Hypergraph h = hypergraph_of(star2);
    CHECK(h.vertices == std::vector<Variable>{{"x1"}, {"x2"}, {"z"}});
    REQUIRE(h.edges.size() == 2);
    CHECK(h.edges[0].label == "x1,z");
    CHECK(h.edges[1].label == "x2,z");

    Hypergraph loop = hypergraph_of(parse_query("Q(x) :- R(x,x)."));
    REQUIRE(loop.edges.size() == 1);
    CHECK(loop.edges[0].vars == std::vector<Variable>{{"x"}});

    Hypergraph tri = hypergraph_of(parse_query("B() :- R(x,y), S(y,z), T(z,x)."));
    CHECK(tri.edges.size() == 3);
}

TEST_CASE("hypergraph is independent of atom order and tags every atom once") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        Query q = verify::random_query(rng);
        Hypergraph h = hypergraph_of(q);
        CHECK(h.edges.size() <= q.body.size());

        std::vector<std::size_t> tagged;
        for (const auto& e : h.edges) {
            tagged.insert(tagged.end(), e.atoms.begin(), e.atoms.end());
        }
        std::sort(tagged.begin(), tagged.end());
        std::vector<std::size_t> expect(q.body.size());
        for (std::size_t j = 0; j < q.body.size(); ++j) expect[j] = j;
        CHECK(tagged == expect);

        Query shuffled = q;
        std::shuffle(shuffled.body.begin(), shuffled.body.end(), rng);
        Hypergraph h2 = hypergraph_of(shuffled);
        std::vector<std::string> l1, l2;
        for (const auto& e : h.edges) l1.push_back(e.label);
        for (const auto& e : h2.edges) l2.push_back(e.label);
        CHECK(l1 == l2);
    }
}
