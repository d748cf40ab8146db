#include "cqcount/query.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace cqcount {

std::vector<Variable> Atom::distinct_vars() const {
    std::vector<Variable> out;
    for (const auto& v : args) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

std::set<Variable> Query::head_set() const {
    return {head.begin(), head.end()};
}

std::set<Variable> Query::body_var_set() const {
    std::set<Variable> out;
    for (const auto& a : body) out.insert(a.args.begin(), a.args.end());
    return out;
}

std::set<Variable> Query::quantified_var_set() const {
    std::set<Variable> out = body_var_set();
    for (const auto& v : head) out.erase(v);
    return out;
}

bool Query::self_join_free() const {
    std::set<std::string> seen;
    for (const auto& a : body) {
        if (!seen.insert(a.predicate).second) return false;
    }
    return true;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool at_end() const { return pos_ >= text_.size(); }

    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void expect(char c, const char* what) {
        if (peek() != c) fail(std::string("expected '") + c + "' " + what);
        advance();
    }

    std::string identifier(const char* what) {
        if (at_end() || !is_ident_start(peek())) {
            if (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                              peek() == '"' || peek() == '\'')) {
                fail(std::string("expected ") + what +
                     " (constants are not supported)");
            }
            fail(std::string("expected ") + what);
        }
        std::size_t start = pos_;
        while (!at_end() && is_ident_char(peek())) advance();
        return std::string(text_.substr(start, pos_ - start));
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(line_, col_, msg);
    }

private:
    static bool is_ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c));
    }
    static bool is_ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

std::vector<Variable> parse_arg_list(Cursor& cur, bool allow_empty) {
    std::vector<Variable> args;
    cur.skip_ws();
    cur.expect('(', "to open the argument list");
    cur.skip_ws();
    if (cur.peek() == ')') {
        if (!allow_empty) cur.fail("atoms must have at least one argument");
        cur.expect(')', "");
        return args;
    }
    for (;;) {
        cur.skip_ws();
        args.push_back(Variable{cur.identifier("a variable name")});
        cur.skip_ws();
        if (cur.peek() == ',') {
            cur.expect(',', "");
            continue;
        }
        cur.expect(')', "to close the argument list");
        break;
    }
    return args;
}

} // namespace

Query parse_query(std::string_view source) {
    Cursor cur(source);
    cur.skip_ws();

    Query q;
    cur.identifier("the head predicate");
    q.head = parse_arg_list(cur, /*allow_empty=*/true);

    cur.skip_ws();
    cur.expect(':', "before the body (':-')");
    cur.expect('-', "before the body (':-')");

    for (;;) {
        cur.skip_ws();
        Atom atom;
        atom.predicate = cur.identifier("an atom predicate");
        atom.args = parse_arg_list(cur, /*allow_empty=*/false);
        q.body.push_back(std::move(atom));
        cur.skip_ws();
        if (cur.peek() == ',') {
            cur.expect(',', "");
            continue;
        }
        break;
    }
    cur.expect('.', "to terminate the query");
    cur.skip_ws();
    if (!cur.at_end()) cur.fail("trailing input after the query");

    if (q.body.empty()) cur.fail("empty body");

    std::set<Variable> seen_head;
    const auto body_vars = q.body_var_set();
    for (const auto& v : q.head) {
        if (!seen_head.insert(v).second) {
            cur.fail("duplicate head variable '" + v.name + "'");
        }
        if (!body_vars.count(v)) {
            cur.fail("head variable '" + v.name + "' does not occur in the body");
        }
    }
    return q;
}

std::string render_query(const Query& q) {
    std::ostringstream out;
    out << "Q(";
    for (std::size_t i = 0; i < q.head.size(); ++i) {
        if (i) out << ",";
        out << q.head[i].name;
    }
    out << ") :- ";
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        if (i) out << ", ";
        out << q.body[i].predicate << "(";
        for (std::size_t j = 0; j < q.body[i].args.size(); ++j) {
            if (j) out << ",";
            out << q.body[i].args[j].name;
        }
        out << ")";
    }
    out << ".";
    return out.str();
}

Query load_query_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open query file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_query(buf.str());
}

QueryProperties query_properties(const Query& q) {
    QueryProperties p;
    p.self_join_free = q.self_join_free();
    p.free_vars = q.head_set();
    p.quantified_vars = q.quantified_var_set();
    return p;
}

std::string edge_label(const std::vector<Variable>& sorted_vars) {
    std::string label;
    for (std::size_t i = 0; i < sorted_vars.size(); ++i) {
        if (i) label += ',';
        label += sorted_vars[i].name;
    }
    return label;
}

Hypergraph hypergraph_of(const Query& q) {
    Hypergraph h;
    std::set<Variable> verts;
    std::map<std::vector<Variable>, std::vector<std::size_t>> edges;
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        std::vector<Variable> vars = q.body[i].distinct_vars();
        std::sort(vars.begin(), vars.end());
        verts.insert(vars.begin(), vars.end());
        edges[vars].push_back(i);
    }
    h.vertices.assign(verts.begin(), verts.end());
    for (auto& [vars, atoms] : edges) {
        h.edges.push_back(Hyperedge{vars, atoms, edge_label(vars)});
    }
    std::sort(h.edges.begin(), h.edges.end(),
              [](const Hyperedge& a, const Hyperedge& b) { return a.label < b.label; });
    return h;
}

} // namespace cqcount
