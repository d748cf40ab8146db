#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cqcount/errors.hpp"

namespace cqcount {

using SymbolId = std::uint32_t;

// Interns symbol text to dense ids. Ids are assigned in first-seen order,
// so identical load sequences produce identical tables. Copies share the
// underlying store until one of them interns a new symbol (the engines copy
// tables far more often than they extend them).
class SymbolTable {
public:
    SymbolTable() : store_(std::make_shared<Store>()) {}

    SymbolId intern(std::string_view s);
    std::optional<SymbolId> find(std::string_view s) const;
    const std::string& name(SymbolId id) const { return store_->names[id]; }
    std::size_t size() const { return store_->names.size(); }

private:
    struct Store {
        std::vector<std::string> names;
        std::unordered_map<std::string, SymbolId> ids;
    };
    std::shared_ptr<Store> store_;
};

// A finite set of tuples of a fixed arity. Rows are stored flat in
// insertion order; duplicates are rejected exactly via an open-addressing
// probe table (hash plus full row comparison). Arity 0 is allowed and holds
// at most the empty tuple.
//
// The probe table is built lazily on the first lookup, so bulk pipelines
// that only append and scan never pay for it. A relation that has seen
// unchecked inserts should get one contains() call before being shared
// across threads; after that, lookups are const and safe concurrently.
class Relation {
public:
    explicit Relation(std::size_t arity) : arity_(arity) {}

    std::size_t arity() const { return arity_; }
    std::size_t row_count() const { return rows_; }

    std::span<const SymbolId> row(std::size_t i) const {
        return {data_.data() + i * arity_, arity_};
    }

    // Inserts a row; returns false if it was already present.
    bool insert(std::span<const SymbolId> row);
    // Appends a row the caller guarantees is not present (e.g. filtered or
    // bijectively mapped from an existing relation). Skips the dedup probe.
    void insert_unchecked(std::span<const SymbolId> row);
    bool contains(std::span<const SymbolId> row) const;
    void reserve(std::size_t rows);

    const std::vector<SymbolId>& flat() const { return data_; }

private:
    static constexpr std::uint32_t kEmptySlot = static_cast<std::uint32_t>(-1);

    std::uint64_t hash_row(std::span<const SymbolId> row) const;
    void ensure_table(std::size_t rows_hint) const;
    void sync_index() const;
    void place(std::uint32_t row_index) const;

    std::size_t arity_;
    std::size_t rows_ = 0;
    std::vector<SymbolId> data_;
    // Power-of-two open addressing over row indices, built on demand.
    mutable std::vector<std::uint32_t> table_;
    mutable std::size_t mask_ = 0;
    mutable std::size_t indexed_rows_ = 0;
};

// Named relations over one shared symbol table.
struct Database {
    SymbolTable symbols;
    std::map<std::string, Relation> relations;

    Relation& add_relation(const std::string& name, std::size_t arity);
    const Relation* find_relation(const std::string& name) const;
    // Interns the fields and inserts the tuple (set semantics).
    void add_tuple(const std::string& relation, const std::vector<std::string>& fields);

    std::vector<std::string> row_text(const Relation& rel, std::size_t i) const;
    // ||D||: total tuple count weighted by arity.
    std::size_t norm_size() const;
};

// Loads either a directory of `<predicate>.csv` files or a single CSV file.
// Fields are raw tokens separated by commas (surrounding blanks trimmed);
// rows are deduplicated. Ragged rows and empty files are errors.
Database load_database(const std::string& path);

// Writes every relation as `<name>.csv` with rows sorted by field text.
void write_database(const Database& db, const std::string& dir);

} // namespace cqcount
