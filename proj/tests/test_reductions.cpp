#include <doctest.h>

#include <random>

#include "cqcount/count.hpp"
#include "cqcount/reductions.hpp"
#include "cqcount/verify.hpp"

using namespace cqcount;

namespace {

Graph path3() {
    return parse_graph("p ds 3 2\nv a\nv b\nv c\ne a b\ne b c\n");
}

std::set<std::vector<std::string>> relation_rows(const Database& db,
                                                 const std::string& name) {
    std::set<std::vector<std::string>> out;
    const Relation& rel = *db.find_relation(name);
    for (std::size_t i = 0; i < rel.row_count(); ++i) out.insert(db.row_text(rel, i));
    return out;
}

Database star_db(const std::vector<std::vector<std::string>>& rows) {
    Database db;
    db.add_relation("R", 2);
    for (const auto& row : rows) db.add_tuple("R", row);
    return db;
}

} // namespace

TEST_CASE("graph parsing") {
    Graph g = path3();
    CHECK(g.vertices == std::vector<std::string>{"a", "b", "c"});
    CHECK(g.adjacent("a", "b"));
    CHECK(g.adjacent("b", "a"));
    CHECK_FALSE(g.adjacent("a", "c"));

    CHECK_THROWS_AS(parse_graph("p ds 1 1\nv a\ne a a\n"), InputError);  // loop
    CHECK_THROWS_AS(parse_graph("p ds 2 2\nv a\nv b\ne a b\ne b a\n"),
                    InputError);  // parallel edge
    CHECK_THROWS_AS(parse_graph("p ds 2 0\nv a\n"), InputError);  // count mismatch
    CHECK_THROWS_AS(parse_graph("v a\n"), InputError);            // missing header
    CHECK_THROWS_AS(parse_graph("p ds 1 0\nv a|b\n"), InputError);
    CHECK(parse_graph("# comment\np ds 1 0 # inline\nv a\n").vertex_count() == 1);
}

TEST_CASE("ds reduction on the path graph, k'=2") {
    StarInstance inst = ds_to_star_instance(path3(), 2, 2);
    CHECK(inst.k == 2);
    CHECK(inst.k_prime == 2);
    CHECK(render_query(inst.query) == "Q(x1,x2) :- R(x1,z), R(x2,z).");
    // b is adjacent to everything, so only the endpoints pair up.
    CHECK(relation_rows(inst.database, "R") ==
          std::set<std::vector<std::string>>{{"a", "c"}, {"c", "a"}});
    CHECK(inst.database.find_relation("R")->row_count() <= 9);  // n^(k'/k+1)
    CHECK(inst.decoder.at("a") == std::vector<std::string>{"a"});
}

TEST_CASE("ds reduction on the path graph, k'=4 packs vertex pairs") {
    StarInstance inst = ds_to_star_instance(path3(), 2, 4);
    auto rows = relation_rows(inst.database, "R");
    for (const auto& row : rows) {
        CHECK(row[0].find('|') != std::string::npos);
        // Packed (a,c) dominates the whole path, so it never appears.
        CHECK(row[0] != "a|c");
        CHECK(row[0] != "c|a");
    }
    CHECK(rows.count({"a|a", "c"}) == 1);
    CHECK(inst.decoder.at("a|c") == std::vector<std::string>{"a", "c"});
    mpz_class bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), 3, 3);  // n^(k'/k+1) = 27
    CHECK(mpz_class(static_cast<unsigned long>(rows.size())) <= bound);
}

TEST_CASE("ds reduction rejects bad parameters") {
    CHECK_THROWS_AS(ds_to_star_instance(path3(), 2, 3), InputError);  // divisibility
    CHECK_THROWS_AS(ds_to_star_instance(path3(), 1, 2), InputError);  // k < 2
    CHECK_THROWS_AS(ds_to_star_instance(path3(), 2, 1), InputError);  // k' < k
}

TEST_CASE("isolated vertex yields an empty relation") {
    Graph g = parse_graph("p ds 1 0\nv a\n");
    StarInstance inst = ds_to_star_instance(g, 2, 2);
    CHECK(inst.database.find_relation("R")->row_count() == 0);
}

TEST_CASE("brute-force domination") {
    CHECK(brute_force_dominating(path3(), 2).dominating_selections == 7);
    Graph single = parse_graph("p ds 1 0\nv a\n");
    CHECK(brute_force_dominating(single, 1).dominating_selections == 1);
    Graph edgeless = parse_graph("p ds 3 0\nv a\nv b\nv c\n");
    CHECK(brute_force_dominating(edgeless, 2).dominating_selections == 0);
    CHECK_FALSE(brute_force_dominating(edgeless, 2).has_ds);
}

TEST_CASE("ds decision from a star count") {
    StarInstance inst = ds_to_star_instance(path3(), 2, 2);
    mpz_class answers = count(inst.query, inst.database).value;
    CHECK(answers == 2);
    DsDecision d = star_count_to_ds_decision(inst, answers);
    CHECK(d.dominating_selections == 7);  // 9 - 2
    CHECK(d.has_ds);
    CHECK_THROWS_AS(star_count_to_ds_decision(inst, mpz_class(10)), InputError);

    // Two isolated vertices: only the mixed pairs dominate.
    Graph two = parse_graph("p ds 2 0\nv a\nv b\n");
    StarInstance inst2 = ds_to_star_instance(two, 2, 2);
    mpz_class answers2 = count(inst2.query, inst2.database).value;
    CHECK(answers2 == 2);
    DsDecision d2 = star_count_to_ds_decision(inst2, answers2);
    CHECK(d2.dominating_selections == 2);
    CHECK(d2.has_ds);
}

TEST_CASE("counting identity end to end on small graphs") {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 4; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            const int bits = n * (n - 1) / 2;
            std::uint64_t mask = bits ? rng() & ((1ull << bits) - 1) : 0;
            Graph g;
            for (int i = 0; i < n; ++i) g.vertices.push_back(std::string(1, 'a' + i));
            std::size_t bit = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j, ++bit) {
                    if (mask >> bit & 1ull) g.edges.insert({g.vertices[i], g.vertices[j]});
                }
            }
            for (auto [k, kp] : {std::pair{2, 2}, std::pair{2, 4}}) {
                StarInstance inst = ds_to_star_instance(g, k, kp);
                mpz_class answers = count(inst.query, inst.database).value;
                DsDecision oracle = brute_force_dominating(g, kp);
                mpz_class total;
                mpz_ui_pow_ui(total.get_mpz_t(), n, kp);
                CHECK(answers == total - oracle.dominating_selections);
            }
        }
    }
}

TEST_CASE("embedding into the two-atom path target") {
    Query target = parse_query("Q(x1,x2) :- A(x1,z), B(z,x2).");
    Database source = star_db({{"a", "c"}, {"c", "a"}});
    EmbeddingInstance inst = embed_star2(target, source);
    CHECK(relation_rows(inst.database, "A") ==
          std::set<std::vector<std::string>>{{"a", "c"}, {"c", "a"}});
    CHECK(relation_rows(inst.database, "B") ==
          std::set<std::vector<std::string>>{{"c", "a"}, {"a", "c"}});
    CHECK(count_bruteforce(target, inst.database).value == 2);
    CHECK(verify_embedding(inst, source));
}

TEST_CASE("embedding builds identity relations between internal vertices") {
    Query target = parse_query("Q(x1,x2) :- A(x1,z1), B(z1,z2), C(z2,x2).");
    Database source = star_db({{"a", "c"}, {"c", "a"}});
    EmbeddingInstance inst = embed_star2(target, source);
    CHECK(relation_rows(inst.database, "B") ==
          std::set<std::vector<std::string>>{{"a", "a"}, {"c", "c"}});
    CHECK(verify_embedding(inst, source));
}

TEST_CASE("embedding forces off-path variables to the fresh constant") {
    Query target = parse_query("Q(x1,x2,w) :- A(x1,z), C(z,x2), U(w).");
    Database source = star_db({{"a", "c"}, {"c", "a"}});
    EmbeddingInstance inst = embed_star2(target, source);
    CHECK(relation_rows(inst.database, "U") ==
          std::set<std::vector<std::string>>{{inst.constant}});
    CHECK(verify_embedding(inst, source));
    auto answers = enumerate_answers(target, inst.database);
    for (const auto& row : answers) CHECK(row[2] == inst.constant);
}

TEST_CASE("embedding handles unary atoms on path variables") {
    Query target = parse_query("Q(x1,x2) :- A(x1,z), B(z,x2), U(x1), W(z).");
    Database source = star_db({{"a", "c"}, {"c", "a"}, {"a", "d"}});
    EmbeddingInstance inst = embed_star2(target, source);
    // U ranges over the x-domain, W over the z-domain; neither constrains.
    CHECK(relation_rows(inst.database, "U") ==
          std::set<std::vector<std::string>>{{"a"}, {"c"}});
    CHECK(relation_rows(inst.database, "W") ==
          std::set<std::vector<std::string>>{{"a"}, {"c"}, {"d"}});
    CHECK(verify_embedding(inst, source));
}

TEST_CASE("embedding rejects inapplicable targets") {
    Database source = star_db({{"a", "c"}});
    CHECK_THROWS_AS(embed_star2(parse_query("Q(x1) :- R(x1,z)."), source),
                    TargetFreeConnexError);
    CHECK_THROWS_AS(embed_star2(parse_query("Q(x1,x2) :- R(x1,z), R(x2,z)."), source),
                    InputError);  // self-join
    CHECK_THROWS_AS(
        embed_star2(parse_query("B() :- A(x,y), B(y,z), C(z,x)."), source),
        NotAcyclicError);

    Database bad;
    bad.add_relation("R", 3);
    CHECK_THROWS_AS(
        embed_star2(parse_query("Q(x1,x2) :- A(x1,z), B(z,x2)."), bad), InputError);
}

TEST_CASE("fresh constant avoids the source domain") {
    Query target = parse_query("Q(x1,x2,w) :- A(x1,z), C(z,x2), U(w).");
    Database source = star_db({{"__d", "c"}, {"c", "__d"}});
    EmbeddingInstance inst = embed_star2(target, source);
    CHECK(inst.constant != "__d");
    CHECK(verify_embedding(inst, source));
}

TEST_CASE("corrupted embeddings are detected") {
    Query target = parse_query("Q(x1,x2) :- A(x1,z1), B(z1,z2), C(z2,x2).");
    Database source = star_db({{"a", "c"}, {"c", "a"}});
    EmbeddingInstance inst = embed_star2(target, source);

    // Drop one identity tuple from B.
    Database corrupted;
    corrupted.symbols = inst.database.symbols;
    for (const auto& [name, rel] : inst.database.relations) {
        Relation& nr = corrupted.add_relation(name, rel.arity());
        for (std::size_t i = 0; i < rel.row_count(); ++i) {
            if (name == "B" && i == 0) continue;
            nr.insert(rel.row(i));
        }
    }
    EmbeddingInstance broken = inst;
    broken.database = corrupted;
    CHECK_FALSE(verify_embedding(broken, source));
}

TEST_CASE("empty source embeds to empty answer sets") {
    Query target = parse_query("Q(x1,x2) :- A(x1,z), B(z,x2).");
    Database source;
    source.add_relation("R", 2);
    EmbeddingInstance inst = embed_star2(target, source);
    CHECK(verify_embedding(inst, source));
    CHECK(count_bruteforce(target, inst.database).value == 0);
}

TEST_CASE("embedding size stays linear in the source") {
    std::mt19937_64 rng(17);
    Query target = parse_query("Q(x1,x2) :- A(x1,z1), B(z1,z2), C(z2,z3), E(z3,x2).");
    for (int rep = 0; rep < 5; ++rep) {
        Database source;
        source.add_relation("R", 2);
        const int tuples = 20 + static_cast<int>(rng() % 81);
        for (int i = 0; i < tuples; ++i) {
            source.add_tuple("R", {"s" + std::to_string(rng() % 12),
                                   "s" + std::to_string(rng() % 12)});
        }
        EmbeddingInstance inst = embed_star2(target, source);
        std::size_t target_size = 0;
        for (const auto& atom : target.body) target_size += 1 + atom.arity();
        CHECK(inst.database.norm_size() <= 4 * source.norm_size() + 10 * target_size);
        CHECK(verify_embedding(inst, source));
    }
}
