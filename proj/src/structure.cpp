#include "cqcount/structure.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <iterator>
#include <queue>
#include <random>
#include <tuple>

namespace cqcount {

namespace {

// Working state for one GYO run. Edges keep their original index into
// h.edges; vertex sets shrink as vertices are deleted.
struct GyoState {
    const Hypergraph* h;
    std::vector<std::vector<int>> edge_vars;  // sorted vertex indices
    std::vector<bool> live;
    std::vector<int> vertex_occ;  // live-edge occurrence count per vertex

    explicit GyoState(const Hypergraph& hg) : h(&hg) {
        std::map<Variable, int> vid;
        for (std::size_t i = 0; i < hg.vertices.size(); ++i) {
            vid[hg.vertices[i]] = static_cast<int>(i);
        }
        vertex_occ.assign(hg.vertices.size(), 0);
        edge_vars.resize(hg.edges.size());
        live.assign(hg.edges.size(), true);
        for (std::size_t e = 0; e < hg.edges.size(); ++e) {
            for (const auto& v : hg.edges[e].vars) edge_vars[e].push_back(vid.at(v));
            for (int v : edge_vars[e]) ++vertex_occ[v];
        }
    }

    bool any_live() const {
        return std::find(live.begin(), live.end(), true) != live.end();
    }

    const std::string& label(std::size_t e) const { return h->edges[e].label; }

    // Applicable steps, in the canonical order.
    std::vector<GyoStep> applicable_retires() const {
        std::vector<GyoStep> out;
        for (std::size_t e = 0; e < live.size(); ++e) {
            if (live[e] && edge_vars[e].empty()) {
                out.push_back({GyoStepKind::RetireEmptyEdge, label(e), "", ""});
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const GyoStep& a, const GyoStep& b) { return a.edge < b.edge; });
        return out;
    }

    std::vector<GyoStep> applicable_deletes() const {
        std::vector<GyoStep> out;
        for (std::size_t v = 0; v < vertex_occ.size(); ++v) {
            if (vertex_occ[v] == 1) {
                for (std::size_t e = 0; e < live.size(); ++e) {
                    if (live[e] && std::binary_search(edge_vars[e].begin(),
                                                      edge_vars[e].end(),
                                                      static_cast<int>(v))) {
                        out.push_back({GyoStepKind::DeleteVertex, label(e),
                                       h->vertices[v].name, ""});
                        break;
                    }
                }
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const GyoStep& a, const GyoStep& b) { return a.vertex < b.vertex; });
        return out;
    }

    std::vector<GyoStep> applicable_absorbs() const {
        std::vector<GyoStep> out;
        for (std::size_t e = 0; e < live.size(); ++e) {
            if (!live[e] || edge_vars[e].empty()) continue;
            for (std::size_t f = 0; f < live.size(); ++f) {
                if (e == f || !live[f]) continue;
                if (std::includes(edge_vars[f].begin(), edge_vars[f].end(),
                                  edge_vars[e].begin(), edge_vars[e].end())) {
                    out.push_back({GyoStepKind::AbsorbEdge, label(e), "", label(f)});
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const GyoStep& a, const GyoStep& b) {
            return std::tie(a.edge, a.witness) < std::tie(b.edge, b.witness);
        });
        return out;
    }

    std::vector<GyoStep> applicable_steps() const {
        std::vector<GyoStep> out = applicable_retires();
        auto dels = applicable_deletes();
        out.insert(out.end(), dels.begin(), dels.end());
        auto abs = applicable_absorbs();
        out.insert(out.end(), abs.begin(), abs.end());
        return out;
    }

    void apply(const GyoStep& s) {
        auto edge_index = [&](const std::string& lbl) -> std::size_t {
            for (std::size_t e = 0; e < live.size(); ++e) {
                if (live[e] && label(e) == lbl) return e;
            }
            throw InternalError("GYO step refers to a dead edge");
        };
        switch (s.kind) {
            case GyoStepKind::RetireEmptyEdge:
                live[edge_index(s.edge)] = false;
                break;
            case GyoStepKind::DeleteVertex: {
                std::size_t e = edge_index(s.edge);
                int v = -1;
                for (std::size_t i = 0; i < h->vertices.size(); ++i) {
                    if (h->vertices[i].name == s.vertex) v = static_cast<int>(i);
                }
                auto& vars = edge_vars[e];
                vars.erase(std::remove(vars.begin(), vars.end(), v), vars.end());
                --vertex_occ[v];
                break;
            }
            case GyoStepKind::AbsorbEdge: {
                std::size_t e = edge_index(s.edge);
                for (int v : edge_vars[e]) --vertex_occ[v];
                edge_vars[e].clear();
                live[e] = false;
                break;
            }
        }
    }
};

} // namespace

GyoResult gyo_is_acyclic(const Hypergraph& h) {
    GyoResult res;
    GyoState st(h);
    while (st.any_live()) {
        auto steps = st.applicable_steps();
        if (steps.empty()) {
            res.acyclic = false;
            return res;
        }
        st.apply(steps.front());
        res.trace.push_back(steps.front());
    }
    res.acyclic = true;
    return res;
}

bool gyo_is_acyclic_shuffled(const Hypergraph& h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GyoState st(h);
    while (st.any_live()) {
        auto steps = st.applicable_steps();
        if (steps.empty()) return false;
        st.apply(steps[rng() % steps.size()]);
    }
    return true;
}

JoinTree build_join_tree(const Hypergraph& h) {
    GyoResult gyo = gyo_is_acyclic(h);
    if (!gyo.acyclic) throw NotAcyclicError("hypergraph is not acyclic");

    JoinTree t;
    for (const auto& e : h.edges) {
        t.nodes.push_back(e.label);
        t.parent[e.label] = std::nullopt;
    }
    std::sort(t.nodes.begin(), t.nodes.end());
    for (const auto& step : gyo.trace) {
        if (step.kind == GyoStepKind::AbsorbEdge) t.parent[step.edge] = step.witness;
    }
    return t;
}

bool join_tree_connectivity_ok(const Hypergraph& h, const JoinTree& t) {
    // Adjacency of the (undirected) forest.
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [node, par] : t.parent) {
        if (par) {
            adj[node].push_back(*par);
            adj[*par].push_back(node);
        }
    }
    for (const auto& v : h.vertices) {
        std::set<std::string> holders;
        for (const auto& e : h.edges) {
            if (std::binary_search(e.vars.begin(), e.vars.end(), v)) {
                holders.insert(e.label);
            }
        }
        if (holders.empty()) return false;
        // BFS inside `holders` from one of them must reach all.
        std::set<std::string> seen;
        std::queue<std::string> work;
        work.push(*holders.begin());
        seen.insert(*holders.begin());
        while (!work.empty()) {
            std::string cur = work.front();
            work.pop();
            for (const auto& nb : adj[cur]) {
                if (holders.count(nb) && !seen.count(nb)) {
                    seen.insert(nb);
                    work.push(nb);
                }
            }
        }
        if (seen.size() != holders.size()) return false;
    }
    return true;
}

namespace {

// Co-occurrence adjacency: u ~ v iff some hyperedge contains both.
std::map<Variable, std::set<Variable>> cooccurrence(const Hypergraph& h) {
    std::map<Variable, std::set<Variable>> adj;
    for (const auto& v : h.vertices) adj[v];
    for (const auto& e : h.edges) {
        for (const auto& a : e.vars) {
            for (const auto& b : e.vars) {
                if (!(a == b)) adj[a].insert(b);
            }
        }
    }
    return adj;
}

Hypergraph with_head_edge(const Query& q, const Hypergraph& h) {
    std::vector<Variable> head_vars(q.head.begin(), q.head.end());
    std::sort(head_vars.begin(), head_vars.end());
    for (const auto& e : h.edges) {
        if (e.vars == head_vars) return h;  // S duplicates an existing edge
    }
    Hypergraph h2 = h;
    h2.edges.push_back(Hyperedge{head_vars, {}, edge_label(head_vars)});
    std::sort(h2.edges.begin(), h2.edges.end(),
              [](const Hyperedge& a, const Hyperedge& b) { return a.label < b.label; });
    return h2;
}

} // namespace

bool is_free_connex(const Query& q) {
    Hypergraph h = hypergraph_of(q);
    if (!gyo_is_acyclic(h).acyclic) {
        throw NotAcyclicError("free-connexness is undefined for cyclic queries");
    }
    if (q.head.empty()) return true;  // Boolean: counting degenerates to deciding
    return gyo_is_acyclic(with_head_edge(q, h)).acyclic;
}

std::optional<FreePath> find_free_path(const Query& q) {
    Hypergraph h = hypergraph_of(q);
    if (!gyo_is_acyclic(h).acyclic) {
        throw NotAcyclicError("free paths are undefined for cyclic queries");
    }
    auto adj = cooccurrence(h);
    const std::set<Variable> free = q.head_set();
    std::vector<Variable> free_sorted(free.begin(), free.end());
    std::vector<Variable> quant_sorted;
    for (const auto& v : h.vertices) {
        if (!free.count(v)) quant_sorted.push_back(v);
    }

    auto adjacent = [&](const Variable& a, const Variable& b) {
        return adj[a].count(b) > 0;
    };

    // Depth-first extension of a chordless prefix; choices ascend at every
    // position, so the first hit at a given length is the lexicographically
    // smallest sequence of that length.
    std::vector<Variable> path;
    std::function<std::optional<FreePath>(std::size_t)> extend =
        [&](std::size_t want_internal) -> std::optional<FreePath> {
        std::size_t depth = path.size();  // 1 endpoint + internals so far
        if (depth == want_internal + 1) {
            for (const auto& x2 : free_sorted) {
                if (x2 == path.front()) continue;
                if (std::find(path.begin(), path.end(), x2) != path.end()) continue;
                if (!adjacent(path.back(), x2)) continue;
                bool chord = false;
                for (std::size_t i = 0; i + 1 < path.size() && !chord; ++i) {
                    if (adjacent(path[i], x2)) chord = true;
                }
                if (chord) continue;
                FreePath fp;
                fp.from = path.front();
                fp.to = x2;
                fp.internal.assign(path.begin() + 1, path.end());
                return fp;
            }
            return std::nullopt;
        }
        for (const auto& z : quant_sorted) {
            if (std::find(path.begin(), path.end(), z) != path.end()) continue;
            if (!adjacent(path.back(), z)) continue;
            bool chord = false;
            for (std::size_t i = 0; i + 1 < path.size() && !chord; ++i) {
                if (adjacent(path[i], z)) chord = true;
            }
            if (chord) continue;
            path.push_back(z);
            if (auto fp = extend(want_internal)) return fp;
            path.pop_back();
        }
        return std::nullopt;
    };

    for (std::size_t len = 1; len <= quant_sorted.size(); ++len) {
        for (const auto& x1 : free_sorted) {
            path.assign(1, x1);
            if (auto fp = extend(len)) return fp;
        }
    }
    return std::nullopt;
}

namespace {

// Maximum independent set by bitmask enumeration; |verts| stays tiny because
// queries are human-written.
int max_independent_set(const std::vector<Variable>& verts,
                        const std::map<Variable, std::set<Variable>>& adj) {
    const std::size_t n = verts.size();
    if (n > 24) throw InternalError("conflict graph too large for exact MIS");
    std::vector<std::uint32_t> nb(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && adj.at(verts[i]).count(verts[j])) nb[i] |= 1u << j;
        }
    }
    int best = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if ((mask >> i & 1u) && (mask & nb[i])) ok = false;
        }
        if (ok) best = std::max(best, static_cast<int>(std::popcount(mask)));
    }
    return best;
}

} // namespace

int quantified_star_size(const Query& q) {
    Hypergraph h = hypergraph_of(q);
    const std::set<Variable> free = q.head_set();
    if (free.empty()) return 1;
    std::vector<Variable> quant;
    for (const auto& v : h.vertices) {
        if (!free.count(v)) quant.push_back(v);
    }
    if (quant.empty()) return 1;

    auto adj = cooccurrence(h);

    // Connected components of the co-occurrence graph restricted to
    // quantified variables.
    std::set<Variable> unseen(quant.begin(), quant.end());
    int best = 1;
    while (!unseen.empty()) {
        std::set<Variable> comp;
        std::queue<Variable> work;
        work.push(*unseen.begin());
        unseen.erase(unseen.begin());
        comp.insert(work.front());
        while (!work.empty()) {
            Variable cur = work.front();
            work.pop();
            for (const auto& nb : adj[cur]) {
                if (unseen.count(nb)) {
                    unseen.erase(nb);
                    comp.insert(nb);
                    work.push(nb);
                }
            }
        }
        // Free variables sharing a hyperedge with the component.
        std::set<Variable> attached;
        for (const auto& z : comp) {
            for (const auto& nb : adj[z]) {
                if (free.count(nb)) attached.insert(nb);
            }
        }
        std::vector<Variable> n_sorted(attached.begin(), attached.end());
        best = std::max(best, max_independent_set(n_sorted, adj));
    }
    return best;
}

AnalysisReport analyze(const Query& q) {
    AnalysisReport r;
    r.self_join_free = q.self_join_free();
    Hypergraph h = hypergraph_of(q);
    r.acyclic = gyo_is_acyclic(h).acyclic;
    if (!r.acyclic) return r;
    r.free_connex = is_free_connex(q);
    r.star_size = quantified_star_size(q);
    r.free_path = find_free_path(q);
    r.join_tree = build_join_tree(h);
    return r;
}

} // namespace cqcount
