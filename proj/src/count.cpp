#include "cqcount/count.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cqcount/structure.hpp"

namespace cqcount {

std::string engine_used_name(EngineUsed e) {
    switch (e) {
        case EngineUsed::BruteForce: return "bruteforce";
        case EngineUsed::FreeConnex: return "freeconnex";
        case EngineUsed::FullAcyclic: return "full_acyclic";
    }
    return "?";
}

void validate_query_against_db(const Query& q, const Database& d) {
    for (const auto& atom : q.body) {
        const Relation* rel = d.find_relation(atom.predicate);
        if (!rel) throw InputError("missing relation: " + atom.predicate);
        if (rel->arity() != atom.arity()) {
            throw InputError("arity mismatch for relation '" + atom.predicate +
                             "': query uses " + std::to_string(atom.arity()) +
                             ", database has " + std::to_string(rel->arity()));
        }
    }
}

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<SymbolId>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (SymbolId s : v) {
            h ^= s;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

using RowSet = std::unordered_set<std::vector<SymbolId>, VecHash>;

// Maps an atom's row to an assignment over the atom's distinct variables
// (in the order given by `vars`). Returns false when a repeated variable
// gets two different values.
bool row_to_assignment(const Atom& atom, const std::vector<Variable>& vars,
                       std::span<const SymbolId> row, std::vector<SymbolId>& out) {
    constexpr SymbolId kUnset = static_cast<SymbolId>(-1);
    out.assign(vars.size(), kUnset);
    for (std::size_t j = 0; j < atom.args.size(); ++j) {
        std::size_t pos =
            std::find(vars.begin(), vars.end(), atom.args[j]) - vars.begin();
        if (out[pos] == kUnset) {
            out[pos] = row[j];
        } else if (out[pos] != row[j]) {
            return false;
        }
    }
    return true;
}

std::vector<SymbolId> project(std::span<const SymbolId> row,
                              const std::vector<std::size_t>& positions) {
    std::vector<SymbolId> out;
    out.reserve(positions.size());
    for (std::size_t p : positions) out.push_back(row[p]);
    return out;
}

std::vector<std::size_t> positions_of(const std::vector<Variable>& needles,
                                      const std::vector<Variable>& haystack) {
    std::vector<std::size_t> out;
    out.reserve(needles.size());
    for (const auto& v : needles) {
        out.push_back(std::find(haystack.begin(), haystack.end(), v) -
                      haystack.begin());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

struct BruteForcePlan {
    std::vector<Variable> order;
    std::vector<SymbolId> domain;  // sorted by symbol text
    // checks[d]: atoms whose bound-variable prefix grows when order[d] binds.
    struct Check {
        std::size_t atom;
        std::size_t prefix_len;
    };
    std::vector<std::vector<Check>> checks;
    // prefix_sets[atom][L-1]: seen prefixes of the atom's rows, variables
    // ordered by binding depth.
    std::vector<std::vector<RowSet>> prefix_sets;
    std::vector<std::vector<std::size_t>> atom_var_depths;  // per atom, ascending
    std::vector<std::size_t> head_positions;                // depth of each head var
};

BruteForcePlan make_plan(const Query& q, const Database& d) {
    BruteForcePlan plan;

    // Active domain: symbols occurring in the relations the query uses.
    std::set<std::string> used;
    for (const auto& a : q.body) used.insert(a.predicate);
    std::unordered_set<SymbolId> dom;
    for (const auto& name : used) {
        const Relation& rel = *d.find_relation(name);
        for (SymbolId s : rel.flat()) dom.insert(s);
    }
    plan.domain.assign(dom.begin(), dom.end());
    std::sort(plan.domain.begin(), plan.domain.end(),
              [&](SymbolId a, SymbolId b) { return d.symbols.name(a) < d.symbols.name(b); });

    // Variable order: greedily prefer variables that complete or extend
    // atoms already touched, so pruning kicks in early.
    const std::set<Variable> var_set = q.body_var_set();
    std::vector<Variable> vars(var_set.begin(), var_set.end());
    std::set<Variable> ordered;
    while (ordered.size() < vars.size()) {
        const Variable* best = nullptr;
        std::tuple<int, int, int> best_score;
        for (const auto& v : vars) {
            if (ordered.count(v)) continue;
            int completes = 0, touches = 0, degree = 0;
            for (const auto& atom : q.body) {
                auto avars = atom.distinct_vars();
                if (std::find(avars.begin(), avars.end(), v) == avars.end()) continue;
                ++degree;
                std::size_t bound = 0;
                for (const auto& av : avars) bound += ordered.count(av);
                if (bound + 1 == avars.size()) ++completes;
                if (bound > 0) ++touches;
            }
            std::tuple<int, int, int> score{completes, touches, degree};
            if (!best || score > best_score) {
                best = &v;
                best_score = score;
            }
        }
        plan.order.push_back(*best);
        ordered.insert(*best);
    }

    auto depth_of = [&](const Variable& v) {
        return static_cast<std::size_t>(
            std::find(plan.order.begin(), plan.order.end(), v) - plan.order.begin());
    };

    plan.checks.resize(plan.order.size());
    plan.prefix_sets.resize(q.body.size());
    plan.atom_var_depths.resize(q.body.size());
    for (std::size_t a = 0; a < q.body.size(); ++a) {
        const Atom& atom = q.body[a];
        auto avars = atom.distinct_vars();
        std::sort(avars.begin(), avars.end(),
                  [&](const Variable& x, const Variable& y) {
                      return depth_of(x) < depth_of(y);
                  });
        for (const auto& v : avars) plan.atom_var_depths[a].push_back(depth_of(v));
        for (std::size_t L = 1; L <= avars.size(); ++L) {
            plan.checks[plan.atom_var_depths[a][L - 1]].push_back({a, L});
        }
        // Build prefix sets from the relation rows.
        plan.prefix_sets[a].resize(avars.size());
        const Relation& rel = *d.find_relation(atom.predicate);
        std::vector<SymbolId> assign;
        auto dv = atom.distinct_vars();
        auto reorder = positions_of(avars, dv);
        for (std::size_t i = 0; i < rel.row_count(); ++i) {
            if (!row_to_assignment(atom, dv, rel.row(i), assign)) continue;
            std::vector<SymbolId> by_depth = project(assign, reorder);
            for (std::size_t L = 1; L <= by_depth.size(); ++L) {
                plan.prefix_sets[a][L - 1].insert(
                    std::vector<SymbolId>(by_depth.begin(), by_depth.begin() + L));
            }
        }
    }
    for (const auto& v : q.head) plan.head_positions.push_back(depth_of(v));
    return plan;
}

std::set<std::vector<std::string>> run_bruteforce(const Query& q, const Database& d) {
    validate_query_against_db(q, d);
    BruteForcePlan plan = make_plan(q, d);
    RowSet heads;

    std::vector<SymbolId> assignment(plan.order.size());
    std::vector<SymbolId> key;
    std::function<void(std::size_t)> search = [&](std::size_t depth) {
        if (depth == plan.order.size()) {
            heads.insert(project(assignment, plan.head_positions));
            return;
        }
        for (SymbolId sym : plan.domain) {
            assignment[depth] = sym;
            bool ok = true;
            for (const auto& chk : plan.checks[depth]) {
                key.clear();
                for (std::size_t L = 0; L < chk.prefix_len; ++L) {
                    key.push_back(assignment[plan.atom_var_depths[chk.atom][L]]);
                }
                if (!plan.prefix_sets[chk.atom][chk.prefix_len - 1].count(key)) {
                    ok = false;
                    break;
                }
            }
            if (ok) search(depth + 1);
        }
    };
    if (plan.order.empty()) {
        // Unreachable: every atom has arity >= 1, so there is a variable.
        throw InternalError("query without variables");
    }
    search(0);

    std::set<std::vector<std::string>> out;
    for (const auto& h : heads) {
        std::vector<std::string> row;
        row.reserve(h.size());
        for (SymbolId s : h) row.push_back(d.symbols.name(s));
        out.insert(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Join tree machinery
// ---------------------------------------------------------------------------

struct TreeNode {
    std::vector<Variable> vars;  // sorted: the hyperedge's vertex set
    std::vector<std::size_t> atoms;
    Relation rel{0};
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
};

struct TreeNodes {
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> bfs;  // roots first, parents before children
    std::size_t symbol_bound = 0;  // all ids are below this
};

std::uint64_t pack2(std::span<const SymbolId> row, const std::vector<std::size_t>& pos) {
    std::uint64_t key = 0;
    for (std::size_t p : pos) key = key << 32 | row[p];
    return key;
}

// Keeps the target tuples whose projection onto `tpos` occurs among the
// source projections onto `spos`. Separator width is 1 almost always, so
// that case runs over a flat bitmap instead of a hash set.
Relation semijoin(const Relation& target, const std::vector<std::size_t>& tpos,
                  const Relation& source, const std::vector<std::size_t>& spos,
                  std::size_t symbol_bound) {
    Relation out(target.arity());
    if (tpos.empty()) {
        if (source.row_count() > 0) out = target;
        return out;
    }
    out.reserve(target.row_count());
    if (tpos.size() == 1) {
        std::vector<bool> seen(symbol_bound, false);
        for (std::size_t i = 0; i < source.row_count(); ++i) {
            seen[source.row(i)[spos[0]]] = true;
        }
        for (std::size_t i = 0; i < target.row_count(); ++i) {
            if (seen[target.row(i)[tpos[0]]]) out.insert_unchecked(target.row(i));
        }
    } else if (tpos.size() == 2) {
        std::unordered_set<std::uint64_t> keys;
        keys.reserve(source.row_count() * 2);
        for (std::size_t i = 0; i < source.row_count(); ++i) {
            keys.insert(pack2(source.row(i), spos));
        }
        for (std::size_t i = 0; i < target.row_count(); ++i) {
            if (keys.count(pack2(target.row(i), tpos))) out.insert_unchecked(target.row(i));
        }
    } else {
        RowSet keys;
        keys.reserve(source.row_count() * 2);
        for (std::size_t i = 0; i < source.row_count(); ++i) {
            keys.insert(project(source.row(i), spos));
        }
        for (std::size_t i = 0; i < target.row_count(); ++i) {
            if (keys.count(project(target.row(i), tpos))) out.insert_unchecked(target.row(i));
        }
    }
    return out;
}

std::vector<Variable> shared_vars(const std::vector<Variable>& a,
                                  const std::vector<Variable>& b) {
    std::vector<Variable> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
    return out;
}

TreeNodes build_tree_nodes(const Query& q, const Database& d, const Hypergraph& h,
                           const JoinTree& jt) {
    TreeNodes t;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        TreeNode node;
        node.vars = h.edges[i].vars;
        node.atoms = h.edges[i].atoms;
        node.rel = Relation(node.vars.size());
        t.nodes.push_back(std::move(node));
        index[h.edges[i].label] = i;
    }
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        const auto& par = jt.parent.at(h.edges[i].label);
        if (par) {
            t.nodes[i].parent = index.at(*par);
            t.nodes[index.at(*par)].children.push_back(i);
        }
    }
    // Node relation: assignments over the edge variables, consistent with
    // every atom mapped to the edge (atoms sharing an edge are mutually
    // intersected). A single atom maps rows to assignments injectively, and
    // intersections only drop rows, so no dedup probes are needed. When the
    // atom's argument list already equals the sorted edge variables, the
    // relation is reused wholesale.
    for (auto& node : t.nodes) {
        bool first = true;
        for (std::size_t ai : node.atoms) {
            const Atom& atom = q.body[ai];
            const Relation& rel = *d.find_relation(atom.predicate);
            Relation assignments(node.vars.size());
            if (atom.args == node.vars) {
                assignments = rel;
            } else {
                assignments.reserve(rel.row_count());
                std::vector<SymbolId> assign;
                for (std::size_t r = 0; r < rel.row_count(); ++r) {
                    if (row_to_assignment(atom, node.vars, rel.row(r), assign)) {
                        assignments.insert_unchecked(assign);
                    }
                }
            }
            if (first) {
                node.rel = std::move(assignments);
                first = false;
            } else {
                Relation filtered(node.vars.size());
                filtered.reserve(node.rel.row_count());
                for (std::size_t r = 0; r < node.rel.row_count(); ++r) {
                    if (assignments.contains(node.rel.row(r))) {
                        filtered.insert_unchecked(node.rel.row(r));
                    }
                }
                node.rel = std::move(filtered);
            }
        }
    }
    t.symbol_bound = d.symbols.size();
    // BFS from the roots; parents precede children.
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (!t.nodes[i].parent) t.bfs.push_back(i);
    }
    for (std::size_t at = 0; at < t.bfs.size(); ++at) {
        for (std::size_t c : t.nodes[t.bfs[at]].children) t.bfs.push_back(c);
    }
    if (t.bfs.size() != t.nodes.size()) {
        throw InternalError("join tree traversal missed a node");
    }
    return t;
}

void semijoin_passes(TreeNodes& t) {
    // Leaves to root: the parent keeps tuples that join with each child.
    for (std::size_t i = t.bfs.size(); i-- > 0;) {
        std::size_t e = t.bfs[i];
        if (!t.nodes[e].parent) continue;
        TreeNode& par = t.nodes[*t.nodes[e].parent];
        auto sh = shared_vars(par.vars, t.nodes[e].vars);
        par.rel = semijoin(par.rel, positions_of(sh, par.vars), t.nodes[e].rel,
                           positions_of(sh, t.nodes[e].vars), t.symbol_bound);
    }
    // Root to leaves.
    for (std::size_t e : t.bfs) {
        if (!t.nodes[e].parent) continue;
        TreeNode& par = t.nodes[*t.nodes[e].parent];
        auto sh = shared_vars(par.vars, t.nodes[e].vars);
        t.nodes[e].rel = semijoin(t.nodes[e].rel, positions_of(sh, t.nodes[e].vars),
                                  par.rel, positions_of(sh, par.vars), t.symbol_bound);
    }
}

} // namespace

std::set<std::vector<std::string>> enumerate_answers(const Query& q, const Database& d) {
    return run_bruteforce(q, d);
}

AnswerCount count_bruteforce(const Query& q, const Database& d) {
    auto answers = run_bruteforce(q, d);
    mpz_class value(static_cast<unsigned long>(answers.size()));
    return {value, EngineUsed::BruteForce};
}

Database semijoin_reduce(const Query& q, const Database& d) {
    validate_query_against_db(q, d);
    Hypergraph h = hypergraph_of(q);
    JoinTree jt = build_join_tree(h);  // throws NotAcyclicError
    TreeNodes t = build_tree_nodes(q, d, h, jt);
    semijoin_passes(t);

    bool any_empty = false;
    for (const auto& node : t.nodes) {
        if (node.rel.row_count() == 0) any_empty = true;
    }

    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> pred_atoms;
    for (std::size_t n = 0; n < t.nodes.size(); ++n) {
        for (std::size_t ai : t.nodes[n].atoms) {
            pred_atoms[q.body[ai].predicate].push_back({n, ai});
        }
    }

    Database out;
    out.symbols = d.symbols;
    for (const auto& [pred, orig] : d.relations) {
        auto it = pred_atoms.find(pred);
        if (it == pred_atoms.end()) {
            out.relations.emplace(pred, orig);
            continue;
        }
        Relation reduced(orig.arity());
        if (!any_empty) {
            if (it->second.size() == 1) {
                // One atom over this predicate: the surviving node
                // assignments map back to rows bijectively.
                const auto [n, ai] = it->second.front();
                const TreeNode& node = t.nodes[n];
                const Atom& atom = q.body[ai];
                if (atom.args == node.vars) {
                    reduced = node.rel;
                } else {
                    std::vector<std::size_t> argpos = positions_of(atom.args, node.vars);
                    reduced.reserve(node.rel.row_count());
                    std::vector<SymbolId> row(atom.arity());
                    for (std::size_t r = 0; r < node.rel.row_count(); ++r) {
                        auto assign = node.rel.row(r);
                        for (std::size_t j = 0; j < argpos.size(); ++j) {
                            row[j] = assign[argpos[j]];
                        }
                        reduced.insert_unchecked(row);
                    }
                }
            } else {
                // Self-join: a tuple survives if some atom can use it.
                reduced.reserve(orig.row_count());
                std::vector<SymbolId> assign;
                for (std::size_t r = 0; r < orig.row_count(); ++r) {
                    bool keep = false;
                    for (const auto& [n, ai] : it->second) {
                        if (row_to_assignment(q.body[ai], t.nodes[n].vars, orig.row(r),
                                              assign) &&
                            t.nodes[n].rel.contains(assign)) {
                            keep = true;
                            break;
                        }
                    }
                    if (keep) reduced.insert_unchecked(orig.row(r));
                }
            }
        }
        out.relations.emplace(pred, std::move(reduced));
    }
    return out;
}

EliminationResult eliminate_quantified(const Query& q, const Database& d,
                                       const EliminationObserver& observer) {
    validate_query_against_db(q, d);
    const std::set<Variable> free = q.head_set();

    struct WorkAtom {
        std::size_t orig;
        std::vector<Variable> vars;
        Relation rel{0};
        bool live = true;
    };
    std::vector<WorkAtom> work;
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        WorkAtom wa;
        wa.orig = i;
        wa.vars = q.body[i].distinct_vars();
        const Relation& rel = *d.find_relation(q.body[i].predicate);
        if (q.body[i].args == wa.vars) {
            wa.rel = rel;  // no repeated variables: assignments are the rows
        } else {
            wa.rel = Relation(wa.vars.size());
            wa.rel.reserve(rel.row_count());
            std::vector<SymbolId> assign;
            for (std::size_t r = 0; r < rel.row_count(); ++r) {
                if (row_to_assignment(q.body[i], wa.vars, rel.row(r), assign)) {
                    wa.rel.insert_unchecked(assign);
                }
            }
        }
        work.push_back(std::move(wa));
    }

    auto snapshot = [&](const EliminationObserver& obs) {
        if (!obs) return;
        Query sq;
        sq.head = q.head;
        Database sdb;
        sdb.symbols = d.symbols;
        bool unsat = false;
        for (const auto& wa : work) {
            if (!wa.live) continue;
            if (wa.vars.empty()) {
                if (wa.rel.row_count() == 0) unsat = true;
                continue;  // satisfiable zero-ary atoms constrain nothing
            }
            Atom atom;
            atom.predicate = "t" + std::to_string(wa.orig);
            atom.args = wa.vars;
            sq.body.push_back(atom);
            Relation copy = wa.rel;
            sdb.relations.emplace(atom.predicate, std::move(copy));
        }
        if (sq.body.empty()) {
            // Boolean query fully decided; encode the verdict as one
            // existential atom so the snapshot stays a valid query.
            sq.body.push_back(Atom{"t_decided", {Variable{"u"}}});
            Relation rel(1);
            if (!unsat) {
                std::vector<SymbolId> row{sdb.symbols.intern("witness")};
                rel.insert(row);
            }
            sdb.relations.emplace("t_decided", std::move(rel));
        } else if (unsat) {
            for (auto& [name, rel] : sdb.relations) rel = Relation(rel.arity());
        }
        obs(sq, sdb);
    };

    for (;;) {
        // Rule (a): quantified variable in exactly one live atom.
        std::map<Variable, std::pair<int, std::size_t>> occ;  // var -> (count, atom)
        for (std::size_t w = 0; w < work.size(); ++w) {
            if (!work[w].live) continue;
            for (const auto& v : work[w].vars) {
                if (free.count(v)) continue;
                auto& e = occ[v];
                ++e.first;
                e.second = w;
            }
        }
        bool stepped = false;
        for (const auto& [v, ca] : occ) {  // std::map: smallest name first
            if (ca.first != 1) continue;
            WorkAtom& wa = work[ca.second];
            std::vector<std::size_t> keep_pos;
            std::vector<Variable> new_vars;
            for (std::size_t p = 0; p < wa.vars.size(); ++p) {
                if (!(wa.vars[p] == v)) {
                    keep_pos.push_back(p);
                    new_vars.push_back(wa.vars[p]);
                }
            }
            Relation projected(new_vars.size());
            projected.reserve(wa.rel.row_count());
            if (keep_pos.size() == 1) {
                // Single surviving column: dedup over a flat bitmap.
                std::vector<bool> seen(d.symbols.size(), false);
                for (std::size_t r = 0; r < wa.rel.row_count(); ++r) {
                    const SymbolId id = wa.rel.row(r)[keep_pos[0]];
                    if (!seen[id]) {
                        seen[id] = true;
                        projected.insert_unchecked({&id, 1});
                    }
                }
            } else {
                for (std::size_t r = 0; r < wa.rel.row_count(); ++r) {
                    projected.insert(project(wa.rel.row(r), keep_pos));
                }
            }
            wa.vars = std::move(new_vars);
            wa.rel = std::move(projected);
            stepped = true;
            break;
        }
        if (stepped) {
            snapshot(observer);
            continue;
        }

        // Rule (b): absorb atom A into atom B when vars(A) ⊆ vars(B);
        // smallest (A, B) pair of original atom indices first.
        for (std::size_t a = 0; a < work.size() && !stepped; ++a) {
            if (!work[a].live) continue;
            std::set<Variable> avars(work[a].vars.begin(), work[a].vars.end());
            for (std::size_t b = 0; b < work.size() && !stepped; ++b) {
                if (a == b || !work[b].live) continue;
                std::set<Variable> bvars(work[b].vars.begin(), work[b].vars.end());
                if (!std::includes(bvars.begin(), bvars.end(), avars.begin(),
                                   avars.end())) {
                    continue;
                }
                std::vector<std::size_t> apos(work[a].vars.size());
                for (std::size_t p = 0; p < apos.size(); ++p) apos[p] = p;
                work[b].rel =
                    semijoin(work[b].rel, positions_of(work[a].vars, work[b].vars),
                             work[a].rel, apos, d.symbols.size());
                work[a].live = false;
                stepped = true;
            }
        }
        if (stepped) {
            snapshot(observer);
            continue;
        }

        // No rule applies: done, or stuck.
        bool quantified_left = false;
        for (const auto& wa : work) {
            if (!wa.live) continue;
            for (const auto& v : wa.vars) {
                if (!free.count(v)) quantified_left = true;
            }
        }
        if (quantified_left) {
            throw StuckNotFreeConnexError(
                "quantified-variable elimination is stuck; query is not free-connex");
        }
        break;
    }

    EliminationResult result;
    if (free.empty()) {
        // Exactly one live zero-ary atom remains.
        for (const auto& wa : work) {
            if (wa.live) result.decided = wa.rel.row_count() > 0 ? 1u : 0u;
        }
        if (!result.decided) throw InternalError("elimination lost all atoms");
        return result;
    }
    result.query.head = q.head;
    result.db.symbols = d.symbols;
    for (auto& wa : work) {
        if (!wa.live) continue;
        Atom atom;
        atom.predicate = "t" + std::to_string(wa.orig);
        atom.args = wa.vars;
        result.query.body.push_back(atom);
        result.db.relations.emplace(atom.predicate, std::move(wa.rel));
    }
    return result;
}

AnswerCount count_full_acyclic(const Query& q, const Database& d) {
    if (!q.quantified_var_set().empty()) {
        throw HasQuantifiedVarsError("query has quantified variables");
    }
    validate_query_against_db(q, d);
    Hypergraph h = hypergraph_of(q);
    JoinTree jt = build_join_tree(h);  // throws NotAcyclicError
    TreeNodes t = build_tree_nodes(q, d, h, jt);
    semijoin_passes(t);

    // Bottom-up weights over the reduced node relations. An empty weight
    // vector stands for all-ones (leaves never materialize theirs).
    std::vector<std::vector<mpz_class>> weight(t.nodes.size());
    for (std::size_t i = t.bfs.size(); i-- > 0;) {
        std::size_t e = t.bfs[i];
        TreeNode& node = t.nodes[e];
        bool inited = false;
        for (std::size_t c : node.children) {
            const Relation& crel = t.nodes[c].rel;
            const std::vector<mpz_class>& cw = weight[c];
            auto sh = shared_vars(node.vars, t.nodes[c].vars);
            auto cpos = positions_of(sh, t.nodes[c].vars);
            auto epos = positions_of(sh, node.vars);

            // Group the child weights by separator value.
            std::vector<mpz_class> sums;
            std::vector<std::int32_t> slot1;
            std::unordered_map<std::uint64_t, std::uint32_t> slot2;
            std::unordered_map<std::vector<SymbolId>, std::uint32_t, VecHash> slotn;
            if (cpos.size() == 1) {
                slot1.assign(t.symbol_bound, -1);
                for (std::size_t r = 0; r < crel.row_count(); ++r) {
                    const SymbolId id = crel.row(r)[cpos[0]];
                    if (slot1[id] < 0) {
                        slot1[id] = static_cast<std::int32_t>(sums.size());
                        sums.emplace_back();
                    }
                    if (cw.empty()) {
                        sums[slot1[id]] += 1;
                    } else {
                        sums[slot1[id]] += cw[r];
                    }
                }
            } else if (cpos.size() == 2) {
                slot2.reserve(crel.row_count() * 2);
                for (std::size_t r = 0; r < crel.row_count(); ++r) {
                    auto [it, fresh] = slot2.emplace(pack2(crel.row(r), cpos),
                                                     static_cast<std::uint32_t>(sums.size()));
                    if (fresh) sums.emplace_back();
                    if (cw.empty()) {
                        sums[it->second] += 1;
                    } else {
                        sums[it->second] += cw[r];
                    }
                }
            } else {
                for (std::size_t r = 0; r < crel.row_count(); ++r) {
                    auto [it, fresh] = slotn.emplace(project(crel.row(r), cpos),
                                                     static_cast<std::uint32_t>(sums.size()));
                    if (fresh) sums.emplace_back();
                    if (cw.empty()) {
                        sums[it->second] += 1;
                    } else {
                        sums[it->second] += cw[r];
                    }
                }
            }

            auto lookup = [&](std::size_t r) -> const mpz_class* {
                if (cpos.size() == 1) {
                    const std::int32_t s = slot1[node.rel.row(r)[epos[0]]];
                    return s < 0 ? nullptr : &sums[s];
                }
                if (cpos.size() == 2) {
                    auto it = slot2.find(pack2(node.rel.row(r), epos));
                    return it == slot2.end() ? nullptr : &sums[it->second];
                }
                auto it = slotn.find(project(node.rel.row(r), epos));
                return it == slotn.end() ? nullptr : &sums[it->second];
            };

            if (!inited) {
                weight[e].resize(node.rel.row_count());
                for (std::size_t r = 0; r < node.rel.row_count(); ++r) {
                    if (const mpz_class* s = lookup(r)) weight[e][r] = *s;
                }
                inited = true;
            } else {
                for (std::size_t r = 0; r < node.rel.row_count(); ++r) {
                    const mpz_class* s = lookup(r);
                    if (s) {
                        weight[e][r] *= *s;
                    } else {
                        weight[e][r] = 0;
                    }
                }
            }
            weight[c].clear();
            weight[c].shrink_to_fit();
        }
    }
    mpz_class total(1);
    for (std::size_t e : t.bfs) {
        if (t.nodes[e].parent) continue;
        mpz_class sum(0);
        if (weight[e].empty()) {
            sum = static_cast<unsigned long>(t.nodes[e].rel.row_count());
        } else {
            for (const auto& w : weight[e]) sum += w;
        }
        total *= sum;
    }
    return {total, EngineUsed::FullAcyclic};
}

AnswerCount count(const Query& q, const Database& d, Engine engine) {
    validate_query_against_db(q, d);
    const bool acyclic = gyo_is_acyclic(hypergraph_of(q)).acyclic;
    const bool applicable = acyclic && is_free_connex(q);

    if (engine == Engine::BruteForce) return count_bruteforce(q, d);
    if (!applicable) {
        if (engine == Engine::FreeConnex) {
            throw EngineInapplicableError(
                acyclic ? "query is not free-connex" : "query is not acyclic");
        }
        return count_bruteforce(q, d);
    }

    Database reduced = semijoin_reduce(q, d);
    EliminationResult er = eliminate_quantified(q, reduced);
    if (er.decided) {
        return {mpz_class(*er.decided), EngineUsed::FreeConnex};
    }
    AnswerCount full = count_full_acyclic(er.query, er.db);
    const bool had_quantified = !q.quantified_var_set().empty();
    return {full.value, had_quantified ? EngineUsed::FreeConnex : EngineUsed::FullAcyclic};
}

} // namespace cqcount
