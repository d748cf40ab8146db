#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cqcount/errors.hpp"

namespace cqcount {

// A query variable. Names are identifier tokens: a letter followed by
// letters, digits or underscores. Case-sensitive, no reserved words.
struct Variable {
    std::string name;

    auto operator<=>(const Variable&) const = default;
};

// One body atom P(v1, ..., vn). Repeated variables are allowed; arity >= 1.
struct Atom {
    std::string predicate;
    std::vector<Variable> args;

    std::size_t arity() const { return args.size(); }
    // Distinct variables in order of first occurrence.
    std::vector<Variable> distinct_vars() const;
    auto operator<=>(const Atom&) const = default;
};

// A conjunctive query: head (free) variables plus a nonempty body.
// Head order is preserved exactly as written; an empty head is a Boolean
// query.
struct Query {
    std::vector<Variable> head;
    std::vector<Atom> body;

    std::set<Variable> head_set() const;
    std::set<Variable> body_var_set() const;
    std::set<Variable> quantified_var_set() const;
    bool self_join_free() const;
    auto operator<=>(const Query&) const = default;
};

struct QueryProperties {
    bool self_join_free = false;
    std::set<Variable> free_vars;
    std::set<Variable> quantified_vars;
};

// One hyperedge: the distinct variable set of one or more atoms. `atoms`
// holds the indices of every atom whose variable set equals `vars`.
struct Hyperedge {
    std::vector<Variable> vars;      // sorted, distinct
    std::vector<std::size_t> atoms;  // originating atom indices, ascending
    std::string label;               // comma-joined sorted variable names
};

// Variables as vertices, one edge per distinct atom variable set. Edges are
// sorted by label, so the representation is independent of atom order.
struct Hypergraph {
    std::vector<Variable> vertices;  // sorted
    std::vector<Hyperedge> edges;    // sorted by label
};

// Parses exactly one query of the form `Q(x,y) :- R(x,z), S(z,y).`
// `#` starts a line comment. Constants are rejected; the head may be empty.
// Throws ParseError with 1-based position info.
Query parse_query(std::string_view source);

// Canonical renderer; parse_query(render_query(q)) == q.
std::string render_query(const Query& q);

// Reads and parses a query file.
Query load_query_file(const std::string& path);

QueryProperties query_properties(const Query& q);

Hypergraph hypergraph_of(const Query& q);

// Builds the label used for hyperedges: sorted variable names joined by ','.
std::string edge_label(const std::vector<Variable>& sorted_vars);

} // namespace cqcount
