#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cqcount/database.hpp"
#include "cqcount/query.hpp"

namespace cqcount {

enum class Engine { Auto, BruteForce, FreeConnex };

enum class EngineUsed { BruteForce, FreeConnex, FullAcyclic };

std::string engine_used_name(EngineUsed e);

// An exact answer count. Counts are arbitrary precision; they can exceed
// machine words on reduction instances.
struct AnswerCount {
    mpz_class value;
    EngineUsed engine;
};

// Enumerates the distinct head tuples of q over d by exhaustive assignment
// of the body variables over the active domain. Exponential in the query;
// the verification oracle for every other engine.
std::set<std::vector<std::string>> enumerate_answers(const Query& q, const Database& d);

AnswerCount count_bruteforce(const Query& q, const Database& d);

// Two semijoin passes (leaves-to-root, root-to-leaves) over the join tree.
// The result is globally consistent: every surviving tuple of a relation
// used by q takes part in at least one full satisfying assignment. If any
// used relation ends up empty, all of them are emptied. Unused relations
// pass through unchanged. Throws NotAcyclicError.
Database semijoin_reduce(const Query& q, const Database& d);

// Result of quantified-variable elimination. For a Boolean query every
// variable is quantified, so the outcome degenerates to the decided count
// (0 or 1) and `query`/`db` stay empty. Otherwise `query` is a full query
// over exactly the free variables with relations named t<atom index>.
struct EliminationResult {
    std::optional<unsigned> decided;  // set iff the input head was empty
    Query query;
    Database db;
};

// Observer invoked after every elimination step with the intermediate
// state; used by the verification suites to check answer preservation.
using EliminationObserver =
    std::function<void(const Query& stage_query, const Database& stage_db)>;

// Repeatedly (a) projects away a quantified variable occurring in exactly
// one atom, then (b) absorbs an atom whose variable set is contained in
// another's via a semijoin. Deterministic: smallest variable name first,
// then smallest (absorbed, witness) atom-index pair. Throws
// StuckNotFreeConnexError if quantified variables remain with no applicable
// rule — unreachable when q is free-connex.
EliminationResult eliminate_quantified(const Query& q, const Database& d,
                                       const EliminationObserver& observer = nullptr);

// Weighted join-tree dynamic programming for full acyclic queries (all
// variables free). Linear in the database for a fixed query; disconnected
// components multiply. Throws HasQuantifiedVarsError / NotAcyclicError.
AnswerCount count_full_acyclic(const Query& q, const Database& d);

// Engine dispatch. Auto picks semijoin_reduce -> eliminate_quantified ->
// count_full_acyclic when q is acyclic and free-connex, brute force
// otherwise. Forcing FreeConnex on an inapplicable query throws
// EngineInapplicableError.
AnswerCount count(const Query& q, const Database& d, Engine engine = Engine::Auto);

// Checks that every body predicate exists in d with the right arity.
void validate_query_against_db(const Query& q, const Database& d);

} // namespace cqcount
