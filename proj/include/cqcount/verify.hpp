#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cqcount/count.hpp"
#include "cqcount/query.hpp"

namespace cqcount::verify {

struct CheckResult {
    std::string name;
    bool pass = true;
    long long cases = 0;
    std::string detail;  // first counterexample, when failing

    CheckResult() = default;
    explicit CheckResult(std::string check_name) : name(std::move(check_name)) {}
};

struct SuiteResult {
    std::string suite;
    std::uint64_t seed = 0;
    int size = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    long long total_cases() const;
};

// Oracle equivalence plus the count-engine invariants over a seeded random
// corpus and a curated one. `size` is the number of pairs on which the
// free-connex engine must be exercised (default 200).
SuiteResult run_engines_suite(std::uint64_t seed, int size);

// Exhaustive structural dichotomy over all queries with at most `size`
// variables (<=3 atoms, arity <=3), up to variable renaming: free-connex
// <=> no free path <=> star size 1 <=> elimination succeeds. Also join-tree
// validity, GYO order independence and the star-query family.
SuiteResult run_structure_suite(std::uint64_t seed, int size);

// Both reductions end to end: exhaustive graphs on <=5 vertices plus `size`
// seeded random graphs on <=7 vertices for the dominating-set reduction,
// and max(10, size/2) random source databases across the embedding target
// corpus for the star-embedding reduction.
SuiteResult run_reductions_suite(std::uint64_t seed, int size);

std::string format_suite(const SuiteResult& result);

// Seeded generators shared with the acceptance tests.
Query random_query(std::mt19937_64& rng);
Database random_database(std::mt19937_64& rng, const Query& q, int max_tuples,
                         int symbol_pool);

// Free-connex engine timing probe: a three-atom chain query counted on a
// database with roughly `tuples` total tuples. Returns the best-of-`reps`
// wall time in nanoseconds (generation excluded).
long long time_engine_ns(std::uint64_t seed, std::size_t tuples, int reps);

} // namespace cqcount::verify
