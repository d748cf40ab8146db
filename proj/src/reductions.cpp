#include "cqcount/reductions.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cqcount {

bool Graph::adjacent(const std::string& a, const std::string& b) const {
    if (a < b) return edges.count({a, b}) > 0;
    return edges.count({b, a}) > 0;
}

namespace {

void check_vertex_name(const std::string& name) {
    if (name.empty()) throw InputError("empty vertex name");
    if (name.find('|') != std::string::npos || name.find(',') != std::string::npos) {
        throw InputError("vertex name must not contain '|' or ',': " + name);
    }
}

} // namespace

Graph parse_graph(std::string_view text) {
    Graph g;
    std::set<std::string> verts;
    std::size_t declared_n = 0, declared_m = 0;
    bool saw_header = false;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "p") {
            std::string kind;
            if (saw_header || !(ls >> kind >> declared_n >> declared_m) || kind != "ds") {
                throw InputError("line " + std::to_string(lineno) +
                                 ": expected single header 'p ds <n> <m>'");
            }
            saw_header = true;
        } else if (tok == "v") {
            std::string name;
            if (!(ls >> name)) {
                throw InputError("line " + std::to_string(lineno) + ": expected 'v <name>'");
            }
            check_vertex_name(name);
            if (!verts.insert(name).second) {
                throw InputError("line " + std::to_string(lineno) +
                                 ": duplicate vertex '" + name + "'");
            }
        } else if (tok == "e") {
            std::string a, b;
            if (!(ls >> a >> b)) {
                throw InputError("line " + std::to_string(lineno) + ": expected 'e <a> <b>'");
            }
            if (a == b) {
                throw InputError("line " + std::to_string(lineno) + ": loop at '" + a + "'");
            }
            if (!verts.count(a) || !verts.count(b)) {
                throw InputError("line " + std::to_string(lineno) +
                                 ": edge endpoint not declared");
            }
            auto edge = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
            if (!g.edges.insert(edge).second) {
                throw InputError("line " + std::to_string(lineno) + ": duplicate edge");
            }
        } else {
            throw InputError("line " + std::to_string(lineno) + ": unknown directive '" +
                             tok + "'");
        }
    }
    if (!saw_header) throw InputError("missing 'p ds <n> <m>' header");
    if (verts.size() != declared_n || g.edges.size() != declared_m) {
        throw InputError("header counts do not match body (" +
                         std::to_string(verts.size()) + " vertices, " +
                         std::to_string(g.edges.size()) + " edges)");
    }
    g.vertices.assign(verts.begin(), verts.end());
    return g;
}

Graph load_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open graph file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string render_graph(const Graph& g) {
    std::ostringstream out;
    out << "p ds " << g.vertices.size() << " " << g.edges.size() << "\n";
    for (const auto& v : g.vertices) out << "v " << v << "\n";
    for (const auto& [a, b] : g.edges) out << "e " << a << " " << b << "\n";
    return out.str();
}

Query star_query(int k) {
    if (k < 1) throw InputError("star query needs k >= 1");
    Query q;
    for (int i = 1; i <= k; ++i) {
        Variable x{"x" + std::to_string(i)};
        q.head.push_back(x);
        q.body.push_back(Atom{"R", {x, Variable{"z"}}});
    }
    return q;
}

namespace {

mpz_class mpz_pow(std::size_t base, unsigned exp) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), exp);
    return out;
}

} // namespace

StarInstance ds_to_star_instance(const Graph& g, int k, int k_prime) {
    if (k < 2) throw InputError("ds reduction needs k >= 2");
    if (k_prime < k || k_prime % k != 0) {
        throw InputError("k' must be a multiple of k and at least k (got k=" +
                         std::to_string(k) + ", k'=" + std::to_string(k_prime) + ")");
    }
    if (g.vertices.empty()) throw InputError("graph has no vertices");

    const std::size_t n = g.vertices.size();
    const unsigned t = static_cast<unsigned>(k_prime / k);
    // n^t packed symbols, up to n^(t+1) tuples; refuse absurd instances.
    double est = 1.0;
    for (unsigned i = 0; i <= t; ++i) est *= static_cast<double>(n);
    if (est > 5e7) throw InputError("instance too large: n^(k'/k+1) exceeds 5e7");

    StarInstance inst;
    inst.k = k;
    inst.k_prime = k_prime;
    inst.query = star_query(k);
    Relation& rel = inst.database.add_relation("R", 2);

    // Odometer over all t-sequences of vertices, lexicographic.
    std::vector<std::size_t> idx(t, 0);
    for (;;) {
        std::string packed;
        std::vector<std::string> seq;
        for (unsigned i = 0; i < t; ++i) {
            if (i) packed += '|';
            packed += g.vertices[idx[i]];
            seq.push_back(g.vertices[idx[i]]);
        }
        inst.decoder[packed] = seq;
        for (const auto& v : g.vertices) {
            bool dominated = false;
            for (const auto& u : seq) {
                if (u == v || g.adjacent(u, v)) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) {
                std::vector<SymbolId> row{inst.database.symbols.intern(packed),
                                          inst.database.symbols.intern(v)};
                rel.insert(row);
            }
        }
        std::size_t pos = t;
        bool done = false;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < n) break;
            idx[pos] = 0;
            if (pos == 0) done = true;
        }
        if (done) break;
    }
    return inst;
}

DsDecision star_count_to_ds_decision(const StarInstance& inst,
                                     const mpz_class& answer_count) {
    // The decoder lists every packed sequence, so its entries cover all
    // graph vertices.
    std::set<std::string> verts;
    for (const auto& [packed, seq] : inst.decoder) {
        verts.insert(seq.begin(), seq.end());
    }
    const std::size_t n = verts.size();
    mpz_class total = mpz_pow(n, static_cast<unsigned>(inst.k_prime));
    if (answer_count > total || answer_count < 0) {
        throw InputError("answer count exceeds n^k': inconsistent instance");
    }
    DsDecision out;
    out.dominating_selections = total - answer_count;
    out.has_ds = out.dominating_selections > 0;
    return out;
}

DsDecision brute_force_dominating(const Graph& g, int k_prime) {
    if (k_prime < 1) throw InputError("k' must be at least 1");
    const std::size_t n = g.vertices.size();
    if (n == 0) throw InputError("graph has no vertices");
    if (n > 62) throw InputError("brute-force domination limited to 62 vertices");
    double est = 1.0;
    for (int i = 0; i < k_prime; ++i) est *= static_cast<double>(n);
    if (est > 2e8) throw InputError("n^k' too large for exhaustive domination check");

    // Closed neighborhood masks.
    std::vector<std::uint64_t> closed(n, 0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[g.vertices[i]] = i;
    for (std::size_t i = 0; i < n; ++i) closed[i] = 1ull << i;
    for (const auto& [a, b] : g.edges) {
        closed[index[a]] |= 1ull << index[b];
        closed[index[b]] |= 1ull << index[a];
    }
    const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;

    unsigned long count = 0;
    std::vector<std::size_t> sel(static_cast<std::size_t>(k_prime), 0);
    for (;;) {
        std::uint64_t covered = 0;
        for (std::size_t s : sel) covered |= closed[s];
        if (covered == full) ++count;
        std::size_t pos = sel.size();
        bool done = false;
        while (pos > 0) {
            --pos;
            if (++sel[pos] < n) break;
            sel[pos] = 0;
            if (pos == 0) done = true;
        }
        if (done) break;
    }
    DsDecision out;
    out.dominating_selections = count;
    out.has_ds = count > 0;
    return out;
}

namespace {

std::string fresh_constant(const Database& source) {
    std::string d = "__d";
    int suffix = 0;
    while (source.symbols.find(d)) {
        d = "__d" + std::to_string(suffix++);
    }
    return d;
}

} // namespace

EmbeddingInstance embed_star2(const Query& target, const Database& source_db) {
    const Relation* source = source_db.find_relation("R");
    if (!source || source->arity() != 2) {
        throw InputError("source database must contain a binary relation R");
    }
    if (!target.self_join_free()) {
        throw InputError("embedding target must be self-join free");
    }
    auto path = find_free_path(target);  // throws NotAcyclicError
    if (!path) {
        throw TargetFreeConnexError("target query is free-connex; nothing to embed");
    }

    EmbeddingInstance inst;
    inst.target = target;
    inst.path = *path;
    inst.constant = fresh_constant(source_db);

    // Column domains of R, sorted by text for reproducible construction.
    std::set<std::string> first_col, second_col;
    for (std::size_t r = 0; r < source->row_count(); ++r) {
        first_col.insert(source_db.symbols.name(source->row(r)[0]));
        second_col.insert(source_db.symbols.name(source->row(r)[1]));
    }

    const Variable& x1 = inst.path.from;
    const Variable& x2 = inst.path.to;
    const auto& zs = inst.path.internal;
    std::set<Variable> on_path{x1, x2};
    on_path.insert(zs.begin(), zs.end());

    auto fill = [&](const Atom& atom, const std::map<Variable, std::string>& values) {
        std::vector<std::string> row;
        row.reserve(atom.args.size());
        for (const auto& a : atom.args) {
            auto it = values.find(a);
            row.push_back(it == values.end() ? inst.constant : it->second);
        }
        inst.database.add_tuple(atom.predicate, row);
    };

    for (const auto& atom : target.body) {
        std::set<Variable> pvars;
        for (const auto& a : atom.args) {
            if (on_path.count(a)) pvars.insert(a);
        }
        inst.database.add_relation(atom.predicate, atom.arity());

        if (pvars.empty()) {
            fill(atom, {});
            continue;
        }
        if (pvars.size() == 1) {
            const Variable& v = *pvars.begin();
            const auto& domain = (v == x1 || v == x2) ? first_col : second_col;
            for (const auto& val : domain) fill(atom, {{v, val}});
            continue;
        }
        if (pvars.size() == 2) {
            auto has = [&](const Variable& v) { return pvars.count(v) > 0; };
            if (has(x1) && has(zs.front())) {
                for (std::size_t r = 0; r < source->row_count(); ++r) {
                    fill(atom, {{x1, source_db.symbols.name(source->row(r)[0])},
                                {zs.front(), source_db.symbols.name(source->row(r)[1])}});
                }
                continue;
            }
            if (has(x2) && has(zs.back())) {
                for (std::size_t r = 0; r < source->row_count(); ++r) {
                    fill(atom, {{x2, source_db.symbols.name(source->row(r)[0])},
                                {zs.back(), source_db.symbols.name(source->row(r)[1])}});
                }
                continue;
            }
            bool consecutive = false;
            for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
                if (has(zs[i]) && has(zs[i + 1])) {
                    for (const auto& val : second_col) {
                        fill(atom, {{zs[i], val}, {zs[i + 1], val}});
                    }
                    consecutive = true;
                    break;
                }
            }
            if (consecutive) continue;
        }
        // A chordless free path admits no other shape.
        throw InternalError("atom meets the free path in an impossible pattern: " +
                            atom.predicate);
    }
    return inst;
}

bool verify_embedding(const EmbeddingInstance& inst, const Database& source_db) {
    auto target_answers = enumerate_answers(inst.target, inst.database);
    auto star_answers = enumerate_answers(star_query(2), source_db);
    if (target_answers.size() != star_answers.size()) return false;

    std::size_t i1 = 0, i2 = 0;
    bool f1 = false, f2 = false;
    for (std::size_t i = 0; i < inst.target.head.size(); ++i) {
        if (!f1 && inst.target.head[i] == inst.path.from) {
            i1 = i;
            f1 = true;
        }
        if (!f2 && inst.target.head[i] == inst.path.to) {
            i2 = i;
            f2 = true;
        }
    }
    if (!f1 || !f2) return false;  // free path endpoints must be free

    std::set<std::vector<std::string>> projected;
    for (const auto& row : target_answers) {
        projected.insert({row[i1], row[i2]});
    }
    return projected == star_answers;
}

} // namespace cqcount
