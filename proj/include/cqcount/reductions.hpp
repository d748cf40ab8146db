#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "cqcount/count.hpp"
#include "cqcount/database.hpp"
#include "cqcount/query.hpp"
#include "cqcount/structure.hpp"

namespace cqcount {

// A simple undirected graph. Vertex names must not contain '|' (reserved
// for packed symbols), ',' or whitespace.
struct Graph {
    std::vector<std::string> vertices;                    // sorted, unique
    std::set<std::pair<std::string, std::string>> edges;  // normalized a < b

    bool adjacent(const std::string& a, const std::string& b) const;
    std::size_t vertex_count() const { return vertices.size(); }
};

// Parses the `p ds <n> <m>` / `v <name>` / `e <a> <b>` format with `#`
// comments. Rejects loops, duplicate edges and undeclared endpoints.
Graph parse_graph(std::string_view text);
Graph load_graph_file(const std::string& path);
std::string render_graph(const Graph& g);

// Builds the star query Q(x1,...,xk) :- R(x1,z), ..., R(xk,z).
Query star_query(int k);

// One k-Dominating-Set instance encoded as a star-query counting instance.
// Packed symbols are '|'-joined sequences of k'/k vertices; R holds exactly
// the pairs (packed u, v) where v is neither in u nor adjacent to it.
struct StarInstance {
    int k = 0;
    int k_prime = 0;
    Query query;
    Database database;
    std::map<std::string, std::vector<std::string>> decoder;
};

// Requires k >= 2, k' >= k, k' divisible by k, g nonempty. The relation is
// bounded by n^(k'/k + 1) tuples by construction.
StarInstance ds_to_star_instance(const Graph& g, int k, int k_prime);

struct DsDecision {
    bool has_ds = false;
    mpz_class dominating_selections;  // ordered selections with repetition
};

// Interprets an exact answer count for the instance's star query:
// dominating selections = n^k' - answer_count.
DsDecision star_count_to_ds_decision(const StarInstance& inst,
                                     const mpz_class& answer_count);

// Exhaustive check of all n^k' ordered vertex selections.
DsDecision brute_force_dominating(const Graph& g, int k_prime);

// Theorem-4 style embedding of one q*2 input database into an acyclic
// non-free-connex target query along its free path.
struct EmbeddingInstance {
    Query target;
    FreePath path;
    Database database;  // D'
    std::string constant;
};

// Requires: target acyclic, self-join free and not free-connex; source_db
// has a binary relation R. Throws TargetFreeConnexError when no free path
// exists.
EmbeddingInstance embed_star2(const Query& target, const Database& source_db);

// Brute-force check: |target(D')| == |q*2(D)| and the (x1,x2)-projection of
// the target's answer set is exactly q*2's answer set (a bijection).
bool verify_embedding(const EmbeddingInstance& inst, const Database& source_db);

} // namespace cqcount
