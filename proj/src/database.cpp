#include "cqcount/database.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace cqcount {

SymbolId SymbolTable::intern(std::string_view s) {
    auto it = store_->ids.find(std::string(s));
    if (it != store_->ids.end()) return it->second;
    if (store_.use_count() > 1) store_ = std::make_shared<Store>(*store_);
    SymbolId id = static_cast<SymbolId>(store_->names.size());
    store_->names.emplace_back(s);
    store_->ids.emplace(store_->names.back(), id);
    return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view s) const {
    auto it = store_->ids.find(std::string(s));
    if (it == store_->ids.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Relation::hash_row(std::span<const SymbolId> row) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (SymbolId s : row) {
        h ^= s;
        h *= 1099511628211ull;
    }
    // Finalizer so linear probing sees well-spread low bits.
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
}

void Relation::ensure_table(std::size_t rows_hint) const {
    std::size_t cap = 16;
    while (cap < 2 * (rows_hint + 1)) cap <<= 1;
    if (cap <= table_.size()) return;
    table_.assign(cap, kEmptySlot);
    mask_ = cap - 1;
    indexed_rows_ = 0;
}

void Relation::place(std::uint32_t row_index) const {
    std::size_t slot = hash_row(row(row_index)) & mask_;
    while (table_[slot] != kEmptySlot) slot = (slot + 1) & mask_;
    table_[slot] = row_index;
}

void Relation::sync_index() const {
    if (indexed_rows_ == rows_) return;
    ensure_table(rows_);
    for (std::size_t r = indexed_rows_; r < rows_; ++r) {
        place(static_cast<std::uint32_t>(r));
    }
    indexed_rows_ = rows_;
}

bool Relation::insert(std::span<const SymbolId> row) {
    if (row.size() != arity_) throw InternalError("row arity mismatch on insert");
    if (contains(row)) return false;
    insert_unchecked(row);
    return true;
}

void Relation::insert_unchecked(std::span<const SymbolId> row) {
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
}

void Relation::reserve(std::size_t rows) {
    data_.reserve(rows * arity_);
}

bool Relation::contains(std::span<const SymbolId> r) const {
    if (rows_ == 0) return false;
    sync_index();
    std::size_t slot = hash_row(r) & mask_;
    while (table_[slot] != kEmptySlot) {
        const std::uint32_t i = table_[slot];
        if (std::equal(r.begin(), r.end(), data_.begin() + i * arity_)) return true;
        slot = (slot + 1) & mask_;
    }
    return false;
}

Relation& Database::add_relation(const std::string& name, std::size_t arity) {
    auto [it, inserted] = relations.emplace(name, Relation(arity));
    if (!inserted && it->second.arity() != arity) {
        throw InputError("relation '" + name + "' redeclared with arity " +
                         std::to_string(arity) + " (was " +
                         std::to_string(it->second.arity()) + ")");
    }
    return it->second;
}

const Relation* Database::find_relation(const std::string& name) const {
    auto it = relations.find(name);
    return it == relations.end() ? nullptr : &it->second;
}

void Database::add_tuple(const std::string& relation, const std::vector<std::string>& fields) {
    Relation& rel = add_relation(relation, fields.size());
    std::vector<SymbolId> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(symbols.intern(f));
    rel.insert(row);
}

std::vector<std::string> Database::row_text(const Relation& rel, std::size_t i) const {
    std::vector<std::string> out;
    out.reserve(rel.arity());
    for (SymbolId s : rel.row(i)) out.push_back(symbols.name(s));
    return out;
}

std::size_t Database::norm_size() const {
    std::size_t total = 0;
    for (const auto& [name, rel] : relations) total += rel.row_count() * rel.arity();
    return total;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void load_csv_into(Database& db, const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot open relation file: " + file.string());
    const std::string name = file.stem().string();

    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> arity;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            std::string field = trim(comma == std::string::npos
                                         ? line.substr(start)
                                         : line.substr(start, comma - start));
            if (field.empty()) {
                throw InputError(file.string() + ":" + std::to_string(lineno) +
                                 ": empty field");
            }
            fields.push_back(std::move(field));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!arity) {
            arity = fields.size();
            db.add_relation(name, *arity);
        } else if (fields.size() != *arity) {
            throw InputError(file.string() + ":" + std::to_string(lineno) +
                             ": ragged row (expected " + std::to_string(*arity) +
                             " fields, got " + std::to_string(fields.size()) + ")");
        }
        db.add_tuple(name, fields);
    }
    if (!arity) {
        throw InputError(file.string() + ": empty relation file (arity unknown)");
    }
}

} // namespace

Database load_database(const std::string& path) {
    Database db;
    fs::path p(path);
    if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(p)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                files.push_back(entry.path());
            }
        }
        if (files.empty()) throw InputError("no .csv relation files in: " + path);
        std::sort(files.begin(), files.end());
        for (const auto& f : files) load_csv_into(db, f);
    } else if (fs::is_regular_file(p)) {
        load_csv_into(db, p);
    } else {
        throw InputError("no such database path: " + path);
    }
    return db;
}

void write_database(const Database& db, const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& [name, rel] : db.relations) {
        std::vector<std::vector<std::string>> rows;
        rows.reserve(rel.row_count());
        for (std::size_t i = 0; i < rel.row_count(); ++i) {
            auto row = db.row_text(rel, i);
            for (const auto& f : row) {
                if (f.find(',') != std::string::npos || f.find('\n') != std::string::npos) {
                    throw InputError("symbol not representable in CSV: " + f);
                }
            }
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end());
        std::ofstream out(fs::path(dir) / (name + ".csv"), std::ios::binary);
        if (!out) throw InputError("cannot write relation file in: " + dir);
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                out << row[i];
            }
            out << '\n';
        }
    }
}

} // namespace cqcount
