#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqcount/query.hpp"

namespace cqcount {

enum class GyoStepKind {
    RetireEmptyEdge,  // an edge lost all its vertices and leaves as a root
    DeleteVertex,     // vertex occurred in exactly one live edge
    AbsorbEdge,       // edge contained in another live edge
};

struct GyoStep {
    GyoStepKind kind;
    std::string edge;     // original label of the affected edge
    std::string vertex;   // DeleteVertex only
    std::string witness;  // AbsorbEdge only: the containing edge
};

struct GyoResult {
    bool acyclic = false;
    std::vector<GyoStep> trace;
};

// GYO reduction with a fixed deterministic step order: retire empty edges,
// then delete vertices occurring in exactly one edge, then absorb contained
// edges; within each rule the lexicographically smallest key (original edge
// label / vertex name) goes first. Any valid order yields the same verdict.
GyoResult gyo_is_acyclic(const Hypergraph& h);

// Same reduction with steps picked pseudo-randomly from the applicable set.
// Differential-testing hook: the verdict must match gyo_is_acyclic.
bool gyo_is_acyclic_shuffled(const Hypergraph& h, std::uint64_t seed);

// A rooted forest over the hyperedges (one tree per connected component).
// `parent` maps each edge label to its parent label, or nullopt for roots.
struct JoinTree {
    std::vector<std::string> nodes;  // sorted edge labels
    std::map<std::string, std::optional<std::string>> parent;
};

// Replays the canonical GYO trace, attaching each absorbed edge to its
// witness. Throws NotAcyclicError if the hypergraph is cyclic.
JoinTree build_join_tree(const Hypergraph& h);

// Direct check of the join tree property: for every vertex, the nodes whose
// label contains it induce a connected subtree.
bool join_tree_connectivity_ok(const Hypergraph& h, const JoinTree& t);

// A chordless path between two free variables that never co-occur, with all
// internal vertices quantified.
struct FreePath {
    Variable from;
    Variable to;
    std::vector<Variable> internal;  // nonempty
};

// True iff the hypergraph plus the head set as an extra edge is acyclic.
// Boolean queries (empty head) are free-connex by convention. Throws
// NotAcyclicError when q itself is cyclic.
bool is_free_connex(const Query& q);

// Shortest (then lexicographically smallest) free path, or nullopt.
// Throws NotAcyclicError when q is cyclic.
std::optional<FreePath> find_free_path(const Query& q);

// Quantified star size: over connected components of the co-occurrence
// graph restricted to quantified variables, the maximum independent set of
// free variables attached to one component; at least 1 whenever defined.
int quantified_star_size(const Query& q);

struct AnalysisReport {
    bool acyclic = false;
    std::optional<bool> free_connex;
    std::optional<int> star_size;
    std::optional<FreePath> free_path;
    std::optional<JoinTree> join_tree;
    bool self_join_free = false;
};

// Runs the full structural analysis; never throws on cyclic queries (the
// optionals stay empty instead).
AnalysisReport analyze(const Query& q);

} // namespace cqcount
