#include "cqcount/verify.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "cqcount/reductions.hpp"
#include "cqcount/structure.hpp"

namespace cqcount::verify {

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

long long SuiteResult::total_cases() const {
    long long total = 0;
    for (const auto& c : checks) total += c.cases;
    return total;
}

std::string format_suite(const SuiteResult& result) {
    std::ostringstream out;
    out << "suite " << result.suite << " (seed=" << result.seed
        << ", size=" << result.size << ")\n";
    for (const auto& c : result.checks) {
        out << "  check " << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " ("
            << c.cases << " cases)\n";
        if (!c.pass && !c.detail.empty()) {
            std::istringstream lines(c.detail);
            std::string line;
            while (std::getline(lines, line)) out << "    " << line << "\n";
        }
    }
    out << "suite " << result.suite << ": " << (result.passed() ? "PASS" : "FAIL")
        << "\n";
    return out.str();
}

namespace {

std::string dump_database(const Database& db) {
    std::ostringstream out;
    for (const auto& [name, rel] : db.relations) {
        out << name << "/" << rel.arity() << ":";
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < rel.row_count(); ++i) {
            rows.push_back(db.row_text(rel, i));
        }
        std::sort(rows.begin(), rows.end());
        for (const auto& row : rows) {
            out << " (";
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ",";
                out << row[i];
            }
            out << ")";
        }
        out << "\n";
    }
    return out.str();
}

std::string dump_counterexample(const Query& q, const Database& db,
                                const std::string& note) {
    std::ostringstream out;
    out << note << "\n" << render_query(q) << "\n" << dump_database(db);
    return out.str();
}

// Sorted text rows of every relation; the canonical comparison form.
std::map<std::string, std::set<std::vector<std::string>>> db_contents(const Database& db) {
    std::map<std::string, std::set<std::vector<std::string>>> out;
    for (const auto& [name, rel] : db.relations) {
        auto& rows = out[name];
        for (std::size_t i = 0; i < rel.row_count(); ++i) {
            rows.insert(db.row_text(rel, i));
        }
    }
    return out;
}

Database remove_row(const Database& db, const std::string& relation,
                    std::size_t row) {
    Database out;
    out.symbols = db.symbols;
    for (const auto& [name, rel] : db.relations) {
        Relation& nr = out.add_relation(name, rel.arity());
        for (std::size_t i = 0; i < rel.row_count(); ++i) {
            if (name == relation && i == row) continue;
            nr.insert(rel.row(i));
        }
    }
    return out;
}

// Greedy one-tuple-at-a-time shrink that keeps `broken` true.
template <typename Pred>
Database minimize_database(const Query& q, Database db, const Pred& broken) {
    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        for (const auto& [name, rel] : db.relations) {
            for (std::size_t i = 0; i < rel.row_count(); ++i) {
                Database cand = remove_row(db, name, i);
                if (broken(q, cand)) {
                    db = std::move(cand);
                    shrunk = true;
                    break;
                }
            }
            if (shrunk) break;
        }
    }
    return db;
}

void record_failure(CheckResult& check, const std::string& detail) {
    if (check.pass) {
        check.pass = false;
        check.detail = detail;
    }
}

} // namespace

Query random_query(std::mt19937_64& rng) {
    const int nv = 1 + static_cast<int>(rng() % 4);
    const int na = 1 + static_cast<int>(rng() % 4);
    std::vector<Variable> vars;
    for (int i = 1; i <= nv; ++i) vars.push_back(Variable{"v" + std::to_string(i)});

    Query q;
    std::vector<std::pair<std::string, int>> preds;  // name, arity
    for (int i = 0; i < na; ++i) {
        Atom atom;
        if (!preds.empty() && rng() % 5 == 0) {
            auto& [name, arity] = preds[rng() % preds.size()];
            atom.predicate = name;  // self-join
            for (int j = 0; j < arity; ++j) atom.args.push_back(vars[rng() % vars.size()]);
        } else {
            const int arity = 1 + static_cast<int>(rng() % 3);
            atom.predicate = "P" + std::to_string(i);
            preds.emplace_back(atom.predicate, arity);
            for (int j = 0; j < arity; ++j) atom.args.push_back(vars[rng() % vars.size()]);
        }
        q.body.push_back(std::move(atom));
    }
    for (const auto& v : q.body_var_set()) {
        if (rng() % 2 == 0) q.head.push_back(v);
    }
    return q;
}

Database random_database(std::mt19937_64& rng, const Query& q, int max_tuples,
                         int symbol_pool) {
    Database db;
    std::vector<std::string> symbols;
    for (int i = 0; i < symbol_pool; ++i) {
        symbols.push_back(std::string(1, static_cast<char>('a' + i)));
    }
    std::map<std::string, std::size_t> arities;
    for (const auto& atom : q.body) arities[atom.predicate] = atom.arity();
    for (const auto& [name, arity] : arities) {
        db.add_relation(name, arity);
        const int tuples = static_cast<int>(rng() % (max_tuples + 1));
        for (int t = 0; t < tuples; ++t) {
            std::vector<std::string> row;
            for (std::size_t j = 0; j < arity; ++j) {
                row.push_back(symbols[rng() % symbols.size()]);
            }
            db.add_tuple(name, row);
        }
    }
    return db;
}

// ---------------------------------------------------------------------------
// Engines suite
// ---------------------------------------------------------------------------

namespace {

// Full satisfying assignments: the query projected onto all body variables.
std::set<std::vector<std::string>> full_solutions(const Query& q, const Database& db,
                                                  std::vector<Variable>& var_order) {
    Query full = q;
    const std::set<Variable> body_vars = q.body_var_set();
    full.head.assign(body_vars.begin(), body_vars.end());
    var_order = full.head;
    return enumerate_answers(full, db);
}

bool check_semijoin_invariants(const Query& q, const Database& db, std::string& why) {
    Database reduced = semijoin_reduce(q, db);

    // Never adds tuples.
    auto before = db_contents(db);
    auto after = db_contents(reduced);
    for (const auto& [name, rows] : after) {
        for (const auto& row : rows) {
            if (!before[name].count(row)) {
                why = "semijoin_reduce invented tuple in " + name;
                return false;
            }
        }
    }

    // Idempotent.
    if (db_contents(semijoin_reduce(q, reduced)) != after) {
        why = "semijoin_reduce is not idempotent";
        return false;
    }

    // Global consistency: every surviving tuple of a used relation occurs
    // in some full satisfying assignment.
    std::vector<Variable> order;
    auto solutions = full_solutions(q, reduced, order);
    std::map<Variable, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::set<std::pair<std::string, std::vector<std::string>>> used_tuples;
    for (const auto& sol : solutions) {
        for (const auto& atom : q.body) {
            std::vector<std::string> tup;
            for (const auto& a : atom.args) tup.push_back(sol[pos[a]]);
            used_tuples.insert({atom.predicate, tup});
        }
    }
    std::set<std::string> used_rels;
    for (const auto& atom : q.body) used_rels.insert(atom.predicate);
    for (const auto& name : used_rels) {
        for (const auto& row : after[name]) {
            if (!used_tuples.count({name, row})) {
                why = "tuple in " + name + " survives reduction but joins nothing";
                return false;
            }
        }
    }
    return true;
}

bool check_elimination_preservation(const Query& q, const Database& db,
                                    std::string& why) {
    const auto expected = enumerate_answers(q, db);
    bool ok = true;
    std::size_t step = 0;
    EliminationObserver obs = [&](const Query& sq, const Database& sdb) {
        if (!ok) return;
        ++step;
        if (enumerate_answers(sq, sdb) != expected) {
            ok = false;
            why = "elimination step " + std::to_string(step) +
                  " changed the projected answer set";
        }
    };
    eliminate_quantified(q, db, obs);
    return ok;
}

} // namespace

SuiteResult run_engines_suite(std::uint64_t seed, int size) {
    SuiteResult suite;
    suite.suite = "engines";
    suite.seed = seed;
    suite.size = size;

    CheckResult oracle{"oracle-equivalence"};
    CheckResult semi{"semijoin-invariants"};
    CheckResult elim{"elimination-preservation"};

    auto run_pair = [&](const Query& q, const Database& db, bool deep) -> bool {
        const mpz_class brute = count_bruteforce(q, db).value;
        const AnswerCount autoed = count(q, db, Engine::Auto);
        ++oracle.cases;
        auto mismatch_auto = [](const Query& mq, const Database& mdb) {
            return count(mq, mdb, Engine::Auto).value != count_bruteforce(mq, mdb).value;
        };
        if (autoed.value != brute) {
            Database small = minimize_database(q, db, mismatch_auto);
            record_failure(oracle,
                           dump_counterexample(q, small,
                                               "auto engine disagrees with brute force"));
            return false;
        }
        bool applicable = false;
        try {
            const AnswerCount forced = count(q, db, Engine::FreeConnex);
            applicable = true;
            if (forced.value != brute) {
                record_failure(oracle, dump_counterexample(
                                           q, db, "freeconnex engine disagrees with brute force"));
                return false;
            }
        } catch (const EngineInapplicableError&) {
        }

        if (deep) {
            bool acyclic = gyo_is_acyclic(hypergraph_of(q)).acyclic;
            if (acyclic) {
                std::string why;
                ++semi.cases;
                if (!check_semijoin_invariants(q, db, why)) {
                    record_failure(semi, dump_counterexample(q, db, why));
                }
            }
            if (applicable) {
                std::string why;
                ++elim.cases;
                if (!check_elimination_preservation(q, db, why)) {
                    record_failure(elim, dump_counterexample(q, db, why));
                }
            }
        }
        return applicable;
    };

    // Curated corpus: the star family, paths, full, Boolean, disconnected,
    // self-loop.
    std::mt19937_64 rng(seed);
    std::vector<Query> curated;
    for (int k = 1; k <= 4; ++k) curated.push_back(star_query(k));
    curated.push_back(parse_query("Q(x1,x2) :- A(x1,z), B(z,x2)."));
    curated.push_back(parse_query("Q(x,y) :- R(x,y)."));
    curated.push_back(parse_query("B() :- R(x,y), S(y,z)."));
    curated.push_back(parse_query("Q(x,y) :- R(x), S(y)."));
    curated.push_back(parse_query("Q(x) :- R(x,x)."));
    curated.push_back(parse_query("B() :- R(x,y), S(y,z), T(z,x)."));
    for (const auto& q : curated) {
        for (int rep = 0; rep < 3; ++rep) {
            Database db = random_database(rng, q, 12, 4);
            run_pair(q, db, true);
        }
    }

    // Seeded random corpus until `size` pairs exercised the free-connex
    // engine.
    int applicable = 0;
    long long attempts = 0;
    const long long max_attempts = 200LL * std::max(size, 1);
    while (applicable < size && attempts < max_attempts) {
        ++attempts;
        Query q = random_query(rng);
        Database db = random_database(rng, q, 30, 2 + static_cast<int>(rng() % 5));
        const bool deep = attempts % 3 == 0;
        if (run_pair(q, db, deep)) ++applicable;
    }
    if (applicable < size) {
        CheckResult starved{"corpus-generation"};
        starved.pass = false;
        starved.detail = "only " + std::to_string(applicable) +
                         " free-connex pairs generated";
        suite.checks.push_back(starved);
    }

    suite.checks.push_back(oracle);
    suite.checks.push_back(semi);
    suite.checks.push_back(elim);
    return suite;
}

// ---------------------------------------------------------------------------
// Structure suite
// ---------------------------------------------------------------------------

namespace {

using Shape = std::vector<int>;        // one atom: variable indices
using Body = std::vector<Shape>;       // up to three atoms

// Relabels variables by first occurrence and sorts atoms, iterating to a
// fixed point; isomorphic bodies land on the same key.
Body canonical_body(Body body) {
    for (int iter = 0; iter < 6; ++iter) {
        std::map<int, int> relabel;
        for (const auto& shape : body) {
            for (int v : shape) {
                if (!relabel.count(v)) {
                    int next = static_cast<int>(relabel.size());
                    relabel[v] = next;
                }
            }
        }
        Body renamed;
        for (const auto& shape : body) {
            Shape s;
            for (int v : shape) s.push_back(relabel[v]);
            renamed.push_back(std::move(s));
        }
        std::sort(renamed.begin(), renamed.end());
        if (renamed == body) break;
        body = std::move(renamed);
    }
    return body;
}

std::string body_key(const Body& body) {
    std::string key;
    for (const auto& shape : body) {
        for (int v : shape) key += static_cast<char>('a' + v);
        key += '|';
    }
    return key;
}

Query body_to_query(const Body& body, unsigned head_mask, int nvars) {
    Query q;
    for (std::size_t i = 0; i < body.size(); ++i) {
        Atom atom;
        atom.predicate = "R" + std::to_string(i + 1);
        for (int v : body[i]) {
            atom.args.push_back(Variable{std::string(1, static_cast<char>('a' + v))});
        }
        q.body.push_back(std::move(atom));
    }
    for (int v = 0; v < nvars; ++v) {
        if (head_mask >> v & 1u) {
            q.head.push_back(Variable{std::string(1, static_cast<char>('a' + v))});
        }
    }
    return q;
}

// Database with pseudo-random tuples over three symbols, derived only from
// the case key so reruns are identical.
Database corpus_database(const Query& q, std::uint64_t case_hash) {
    Database db;
    const std::vector<std::string> symbols{"a", "b", "c"};
    std::mt19937_64 rng(case_hash);
    for (const auto& atom : q.body) {
        db.add_relation(atom.predicate, atom.arity());
        std::vector<std::size_t> idx(atom.arity(), 0);
        for (;;) {
            if (rng() % 2 == 0) {
                std::vector<std::string> row;
                for (std::size_t p : idx) row.push_back(symbols[p]);
                db.add_tuple(atom.predicate, row);
            }
            std::size_t pos = idx.size();
            bool done = false;
            while (pos > 0) {
                --pos;
                if (++idx[pos] < symbols.size()) break;
                idx[pos] = 0;
                if (pos == 0) done = true;
            }
            if (done) break;
        }
    }
    return db;
}

bool free_path_well_formed(const Query& q, const FreePath& fp, std::string& why) {
    Hypergraph h = hypergraph_of(q);
    auto share_edge = [&](const Variable& a, const Variable& b) {
        for (const auto& e : h.edges) {
            if (std::binary_search(e.vars.begin(), e.vars.end(), a) &&
                std::binary_search(e.vars.begin(), e.vars.end(), b)) {
                return true;
            }
        }
        return false;
    };
    const auto free = q.head_set();
    if (!free.count(fp.from) || !free.count(fp.to)) {
        why = "free path endpoint is not free";
        return false;
    }
    for (const auto& z : fp.internal) {
        if (free.count(z)) {
            why = "free path internal vertex is free";
            return false;
        }
    }
    std::vector<Variable> seq;
    seq.push_back(fp.from);
    seq.insert(seq.end(), fp.internal.begin(), fp.internal.end());
    seq.push_back(fp.to);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
            const bool expect = j == i + 1;
            if (share_edge(seq[i], seq[j]) != expect) {
                why = expect ? "consecutive path vertices do not co-occur"
                             : "free path has a chord";
                return false;
            }
        }
    }
    return true;
}

} // namespace

SuiteResult run_structure_suite(std::uint64_t seed, int size) {
    SuiteResult suite;
    suite.suite = "structure";
    suite.seed = seed;
    suite.size = size;

    CheckResult dichotomy{"exhaustive-dichotomy"};
    CheckResult jointree{"join-tree-validity"};
    CheckResult freepath{"free-path-well-formedness"};
    CheckResult gyodiff{"gyo-order-independence"};
    CheckResult counts{"corpus-oracle-equivalence"};
    CheckResult stars{"star-query-family"};

    const int max_vars = std::clamp(size, 1, 4);

    std::set<std::string> seen;
    std::hash<std::string> hasher;
    for (int nvars = 1; nvars <= max_vars; ++nvars) {
        // All atom shapes over nvars variables, arity 1..3.
        std::vector<Shape> shapes;
        for (int arity = 1; arity <= 3; ++arity) {
            std::vector<int> idx(arity, 0);
            for (;;) {
                shapes.emplace_back(idx.begin(), idx.end());
                std::size_t pos = idx.size();
                bool done = false;
                while (pos > 0) {
                    --pos;
                    if (++idx[pos] < nvars) break;
                    idx[pos] = 0;
                    if (pos == 0) done = true;
                }
                if (done) break;
            }
        }
        // Non-decreasing atom index tuples of length 1..3.
        const std::size_t s = shapes.size();
        std::vector<std::vector<std::size_t>> combos;
        for (std::size_t i = 0; i < s; ++i) {
            combos.push_back({i});
            for (std::size_t j = i; j < s; ++j) {
                combos.push_back({i, j});
                for (std::size_t l = j; l < s; ++l) combos.push_back({i, j, l});
            }
        }
        for (const auto& combo : combos) {
            Body body;
            std::set<int> used;
            for (std::size_t ci : combo) {
                body.push_back(shapes[ci]);
                used.insert(shapes[ci].begin(), shapes[ci].end());
            }
            if (static_cast<int>(used.size()) != nvars) continue;  // smaller nvars covers it
            Body canon = canonical_body(std::move(body));
            std::string key = body_key(canon);
            if (!seen.insert(key).second) continue;

            Query base = body_to_query(canon, 0, nvars);
            Hypergraph h = hypergraph_of(base);
            GyoResult gyo = gyo_is_acyclic(h);

            ++gyodiff.cases;
            if (gyo_is_acyclic_shuffled(h, hasher(key)) != gyo.acyclic) {
                record_failure(gyodiff,
                               dump_counterexample(base, Database{},
                                                   "shuffled GYO verdict differs"));
            }

            ++jointree.cases;
            bool tree_built = false;
            try {
                JoinTree t = build_join_tree(h);
                tree_built = true;
                if (!join_tree_connectivity_ok(h, t)) {
                    record_failure(jointree,
                                   dump_counterexample(base, Database{},
                                                       "join tree violates connectivity"));
                }
            } catch (const NotAcyclicError&) {
            }
            if (tree_built != gyo.acyclic) {
                record_failure(jointree,
                               dump_counterexample(base, Database{},
                                                   "join tree construction disagrees "
                                                   "with the GYO verdict"));
            }
            if (!gyo.acyclic) continue;

            for (unsigned head_mask = 0; head_mask < (1u << nvars); ++head_mask) {
                Query q = body_to_query(canon, head_mask, nvars);
                ++dichotomy.cases;

                const bool fc = is_free_connex(q);
                const auto fp = find_free_path(q);
                const int star = quantified_star_size(q);
                Database db = corpus_database(q, hasher(key) * 1000003 + head_mask);
                bool elim_ok = true;
                EliminationResult er;
                try {
                    er = eliminate_quantified(q, db);
                } catch (const StuckNotFreeConnexError&) {
                    elim_ok = false;
                }
                if (fc != !fp.has_value() || fc != (star == 1) || fc != elim_ok) {
                    std::ostringstream why;
                    why << "dichotomy broke: free_connex=" << fc
                        << " free_path=" << fp.has_value() << " star=" << star
                        << " elimination=" << (elim_ok ? "succeeded" : "stuck");
                    record_failure(dichotomy, dump_counterexample(q, db, why.str()));
                }
                if (fp) {
                    ++freepath.cases;
                    std::string why;
                    if (!free_path_well_formed(q, *fp, why)) {
                        record_failure(freepath, dump_counterexample(q, db, why));
                    }
                }

                ++counts.cases;
                const mpz_class brute = count_bruteforce(q, db).value;
                if (count(q, db, Engine::Auto).value != brute) {
                    record_failure(counts,
                                   dump_counterexample(q, db,
                                                       "auto count disagrees with "
                                                       "brute force on corpus case"));
                }
            }
        }
    }

    // The star family: q*k has star size k and is free-connex only at k=1.
    for (int k = 1; k <= 6; ++k) {
        Query q = star_query(k);
        ++stars.cases;
        const int star = quantified_star_size(q);
        const bool fc = is_free_connex(q);
        const bool path = find_free_path(q).has_value();
        if (star != k || fc != (k == 1) || path != (k >= 2)) {
            std::ostringstream why;
            why << "star query k=" << k << ": star_size=" << star
                << " free_connex=" << fc << " free_path=" << path;
            record_failure(stars, dump_counterexample(q, Database{}, why.str()));
        }
    }

    suite.checks.push_back(dichotomy);
    suite.checks.push_back(jointree);
    suite.checks.push_back(freepath);
    suite.checks.push_back(gyodiff);
    suite.checks.push_back(counts);
    suite.checks.push_back(stars);
    return suite;
}

// ---------------------------------------------------------------------------
// Reductions suite
// ---------------------------------------------------------------------------

namespace {

mpz_class mpz_power(std::size_t base, unsigned exp) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), exp);
    return out;
}

Graph graph_from_mask(int n, std::uint64_t mask) {
    Graph g;
    for (int i = 0; i < n; ++i) g.vertices.push_back(std::string(1, 'a' + i));
    std::size_t bit = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++bit) {
            if (mask >> bit & 1ull) g.edges.insert({g.vertices[i], g.vertices[j]});
        }
    }
    return g;
}

// One dominating-set reduction case: instance invariants plus the counting
// identity against the exhaustive oracle.
bool check_lemma2(const Graph& g, int k, int k_prime, std::string& why) {
    StarInstance inst = ds_to_star_instance(g, k, k_prime);
    const std::size_t n = g.vertex_count();
    const Relation& rel = *inst.database.find_relation("R");

    if (mpz_class(static_cast<unsigned long>(rel.row_count())) >
        mpz_power(n, static_cast<unsigned>(k_prime / k + 1))) {
        why = "|R| exceeds n^(k'/k+1)";
        return false;
    }
    std::set<std::vector<std::string>> seqs;
    for (const auto& [packed, seq] : inst.decoder) {
        if (!seqs.insert(seq).second) {
            why = "decoder is not injective";
            return false;
        }
    }
    for (std::size_t r = 0; r < rel.row_count(); ++r) {
        auto row = inst.database.row_text(rel, r);
        auto it = inst.decoder.find(row[0]);
        if (it == inst.decoder.end()) {
            why = "packed symbol missing from decoder";
            return false;
        }
        for (const auto& u : it->second) {
            if (u == row[1] || g.adjacent(u, row[1])) {
                why = "tuple violates the non-domination condition";
                return false;
            }
        }
    }

    const mpz_class answers = count(inst.query, inst.database, Engine::Auto).value;
    const DsDecision oracle = brute_force_dominating(g, k_prime);
    if (answers != mpz_power(n, static_cast<unsigned>(k_prime)) -
                       oracle.dominating_selections) {
        why = "counting identity failed: |q*k(D)| != n^k' - dominating selections";
        return false;
    }
    const DsDecision decided = star_count_to_ds_decision(inst, answers);
    if (decided.has_ds != oracle.has_ds ||
        decided.dominating_selections != oracle.dominating_selections) {
        why = "decision via counting disagrees with the exhaustive check";
        return false;
    }
    return true;
}

std::vector<Query> embedding_targets() {
    return {
        parse_query("Q(x1,x2) :- A(x1,z), B(z,x2)."),
        parse_query("Q(x1,x2) :- A(x1,z1), B(z1,z2), C(z2,x2)."),
        parse_query("Q(x1,x2) :- A(x1,z1), B(z1,z2), C(z2,z3), E(z3,x2)."),
        parse_query("Q(x1,x2,w) :- A(x1,z), C(z,x2), U(w)."),
        parse_query("Q(x1,x2) :- A(x1,z), B(z,x2), U(x1), W(z)."),
        parse_query("Q(x1,x2) :- A(x1,z,w), B(z,x2), T(u,u2)."),
        parse_query("Q(x2,x1) :- A(x1,z), B(z,x2)."),
    };
}

std::size_t query_size(const Query& q) {
    std::size_t total = 0;
    for (const auto& atom : q.body) total += 1 + atom.arity();
    return total;
}

Database random_star_db(std::mt19937_64& rng, int max_tuples, int pool) {
    Database db;
    db.add_relation("R", 2);
    const int tuples = static_cast<int>(rng() % (max_tuples + 1));
    for (int t = 0; t < tuples; ++t) {
        db.add_tuple("R", {"s" + std::to_string(rng() % pool),
                           "s" + std::to_string(rng() % pool)});
    }
    return db;
}

} // namespace

SuiteResult run_reductions_suite(std::uint64_t seed, int size) {
    SuiteResult suite;
    suite.suite = "reductions";
    suite.seed = seed;
    suite.size = size;

    CheckResult exhaustive{"lemma2-exhaustive-graphs"};
    CheckResult randomg{"lemma2-random-graphs"};
    CheckResult embed{"theorem4-embedding"};
    CheckResult sizebound{"embedding-size-bound"};
    CheckResult determinism{"embedding-determinism"};

    // Every graph on 1..5 labeled vertices.
    for (int n = 1; n <= 5; ++n) {
        const int bits = n * (n - 1) / 2;
        for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
            Graph g = graph_from_mask(n, mask);
            for (auto [k, kp] : {std::pair{2, 2}, std::pair{2, 4}}) {
                ++exhaustive.cases;
                std::string why;
                if (!check_lemma2(g, k, kp, why)) {
                    record_failure(exhaustive, why + "\n" + render_graph(g));
                }
            }
        }
    }

    // Seeded random graphs on up to 7 vertices.
    std::mt19937_64 rng(seed);
    for (int i = 0; i < size; ++i) {
        const int n = 1 + static_cast<int>(rng() % 7);
        const int bits = n * (n - 1) / 2;
        const std::uint64_t mask =
            bits == 0 ? 0 : rng() & ((1ull << bits) - 1);
        Graph g = graph_from_mask(n, mask);
        for (auto [k, kp] : {std::pair{2, 2}, std::pair{2, 4}}) {
            ++randomg.cases;
            std::string why;
            if (!check_lemma2(g, k, kp, why)) {
                record_failure(randomg, why + "\n" + render_graph(g));
            }
        }
    }

    // The embedding across the target corpus.
    const auto targets = embedding_targets();
    const int dbs = std::max(10, size / 2);
    for (int i = 0; i < dbs; ++i) {
        Database source = random_star_db(rng, 100, 1 + static_cast<int>(rng() % 30));
        for (const auto& target : targets) {
            ++embed.cases;
            EmbeddingInstance inst = embed_star2(target, source);
            if (!verify_embedding(inst, source)) {
                record_failure(embed, dump_counterexample(target, source,
                                                          "embedding does not preserve "
                                                          "the answer set"));
                continue;
            }
            ++sizebound.cases;
            if (inst.database.norm_size() >
                4 * source.norm_size() + 10 * query_size(target)) {
                record_failure(
                    sizebound,
                    dump_counterexample(target, source,
                                        "||D'|| exceeds 4*||D|| + 10*|target|"));
            }
            ++determinism.cases;
            EmbeddingInstance again = embed_star2(target, source);
            if (db_contents(inst.database) != db_contents(again.database) ||
                inst.constant != again.constant) {
                record_failure(determinism,
                               dump_counterexample(target, source,
                                                   "embedding is not deterministic"));
            }
        }
    }

    suite.checks.push_back(exhaustive);
    suite.checks.push_back(randomg);
    suite.checks.push_back(embed);
    suite.checks.push_back(sizebound);
    suite.checks.push_back(determinism);
    return suite;
}

long long time_engine_ns(std::uint64_t seed, std::size_t tuples, int reps) {
    Query q = parse_query("Q(x,y) :- R(x,y), S(y,z), T(z,w).");
    std::mt19937_64 rng(seed);
    Database db;
    const std::size_t per_rel = tuples / 3;
    const std::size_t pool = std::max<std::size_t>(4, tuples / 6);
    for (const auto* name : {"R", "S", "T"}) {
        db.add_relation(name, 2);
        Relation& rel = db.relations.at(name);
        for (std::size_t i = 0; i < per_rel; ++i) {
            std::vector<SymbolId> row{
                db.symbols.intern("s" + std::to_string(rng() % pool)),
                db.symbols.intern("s" + std::to_string(rng() % pool))};
            rel.insert(row);
        }
    }
    long long best = -1;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        AnswerCount res = count(q, db, Engine::Auto);
        auto t1 = std::chrono::steady_clock::now();
        if (res.engine == EngineUsed::BruteForce) {
            throw InternalError("timing probe did not use the free-connex engine");
        }
        long long ns =
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        if (best < 0 || ns < best) best = ns;
    }
    return best;
}

} // namespace cqcount::verify
