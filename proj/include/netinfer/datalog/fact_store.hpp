#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "netinfer/datalog/ast.hpp"

namespace netinfer::dl {

using Symbol = std::uint32_t;
using FactId = std::uint32_t;

/// Interns constants. Symbols are dense and stable for the table's lifetime.
class SymbolTable {
public:
    Symbol intern(const Constant& c);
    std::optional<Symbol> find(const Constant& c) const;
    const Constant& value(Symbol s) const { return values_[s]; }
    std::size_t size() const { return values_.size(); }

private:
    struct Hash {
        std::size_t operator()(const Constant& c) const;
    };
    std::vector<Constant> values_;
    std::unordered_map<Constant, Symbol, Hash> ids_;
};

enum class Origin : std::uint8_t { Discovered = 1, User = 2, Derived = 4 };

const char* to_string(Origin o);

class ArityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rows sharing one value in one column, ascending. Each row is stored next to
/// a copy of its tuple so joins scan the bucket without touching the relation.
class Bucket {
public:
    Bucket() = default;
    Bucket(const std::uint32_t* data, std::size_t count, std::size_t stride)
        : data_(data), count_(count), stride_(stride) {}

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    std::uint32_t row(std::size_t k) const { return data_[k * stride_]; }
    std::span<const Symbol> tuple(std::size_t k) const { return {data_ + k * stride_ + 1, stride_ - 1}; }
    /// First position whose row is >= r.
    std::size_t lower_bound(std::uint32_t r) const {
        std::size_t lo = 0, hi = count_;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (row(mid) < r) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return lo;
    }

private:
    const std::uint32_t* data_ = nullptr;
    std::size_t count_ = 0;
    std::size_t stride_ = 1;
};

/// Tuples of one predicate, stored row-major. Rows are append-only, so a row
/// range [begin, end) identifies the facts inserted between two points in time.
/// Each argument position carries a hash index from symbol to ascending rows.
class Relation {
public:
    Relation(std::string name, std::size_t arity);

    const std::string& name() const { return name_; }
    std::size_t arity() const { return arity_; }
    std::size_t rows() const { return ids_.size(); }

    std::span<const Symbol> row(std::size_t r) const { return {data_.data() + r * arity_, arity_}; }
    FactId fact_id(std::size_t r) const { return ids_[r]; }

    /// Row holding exactly this tuple, if any.
    std::optional<std::size_t> find(std::span<const Symbol> tuple) const;

    /// Tuples sharing one first symbol.
    struct MemberSet {
        static constexpr std::uint64_t kEmpty = ~0ull;
        // open addressing over `row << 32 | tag`, power-of-two capacity
        std::vector<std::uint64_t> slots = std::vector<std::uint64_t>(4, kEmpty);
        std::size_t count = 0;

        void insert(std::uint64_t tag, std::uint32_t row);
    };

    /// Remembers the first-column group of the previous lookup. Only valid
    /// while nothing is appended to the relation.
    struct LookupCache {
        bool valid = false;
        Symbol first = 0;
        const MemberSet* members = nullptr;
    };
    /// find() for runs of lookups that mostly share their first symbol, as in
    /// the inner loop of a join.
    std::optional<std::size_t> find(std::span<const Symbol> tuple, LookupCache& cache) const;

    /// Rows whose column `col` equals `s`. Empty if none.
    Bucket lookup(std::size_t col, Symbol s) const;

    /// Appends the tuple; the caller guarantees it is not present yet.
    std::size_t append(std::span<const Symbol> tuple, FactId id);

private:
    static constexpr std::uint64_t kEmpty = ~0ull;

    // Unary tuples live in one flat table. Wider tuples are grouped by their
    // first column, so lookups that share it (as in a join's inner loop) hit
    // one small table. Entries pack the row with a tag for the remaining
    // columns: the second symbol itself for pairs, a hash otherwise.
    static std::size_t spread(std::uint64_t key) {
        key ^= key >> 33;
        key *= 0xff51afd7ed558ccdull;
        return static_cast<std::size_t>(key ^ (key >> 29));
    }
    std::uint64_t tag_of(std::span<const Symbol> tuple) const;
    std::optional<std::size_t> find_in(const MemberSet& set, std::span<const Symbol> tuple) const;
    void place(std::uint64_t key, std::uint32_t row);
    void grow();

    std::string name_;
    std::size_t arity_;
    std::vector<Symbol> data_;
    std::vector<FactId> ids_;
    // open addressing, power-of-two capacity
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> slot_rows_;
    std::unordered_map<Symbol, MemberSet> groups_;
    std::vector<std::unordered_map<Symbol, std::vector<std::uint32_t>>> columns_;
};

inline std::optional<std::size_t> Relation::find_in(const MemberSet& set, std::span<const Symbol> tuple) const {
    std::uint64_t tag = arity_ == 2 ? tuple[1] : tag_of(tuple);
    const std::uint64_t* slots = set.slots.data();
    std::size_t mask = set.slots.size() - 1;
    for (std::size_t i = spread(tag) & mask; slots[i] != MemberSet::kEmpty; i = (i + 1) & mask) {
        if ((slots[i] & 0xffffffffull) != tag) continue;
        auto r = static_cast<std::size_t>(slots[i] >> 32);
        if (arity_ == 2) return r;
        auto stored = row(r);
        if (std::equal(stored.begin(), stored.end(), tuple.begin())) return r;
    }
    return std::nullopt;
}

inline std::optional<std::size_t> Relation::find(std::span<const Symbol> tuple, LookupCache& cache) const {
    if (tuple.size() != arity_ || arity_ < 2) return find(tuple);
    if (!cache.valid || cache.first != tuple[0]) {
        auto it = groups_.find(tuple[0]);
        cache = {true, tuple[0], it == groups_.end() ? nullptr : &it->second};
    }
    if (!cache.members) return std::nullopt;
    return find_in(*cache.members, tuple);
}

struct StoredFact {
    FactId id = 0;
    Literal literal;
    std::uint64_t epoch = 0;
    Origin origin = Origin::Discovered;  // primary origin: user > discovered > derived
    std::uint8_t origins = 0;            // bitmask of every Origin that asserts the fact
    bool outdated = false;
    std::vector<FactId> supports;

    bool has_origin(Origin o) const { return (origins & static_cast<std::uint8_t>(o)) != 0; }
};

/// Substitution for the variables of a query pattern.
using Substitution = std::map<std::string, Constant>;

/// Indexed set of ground facts with per-fact epoch, origin, outdated flag and
/// derivation supports. At most one entry exists per ground literal.
class FactStore {
public:
    FactStore() = default;

    std::uint64_t current_epoch() const { return epoch_; }
    std::size_t size() const { return meta_.size(); }
    bool empty() const { return meta_.empty(); }

    SymbolTable& symbols() { return symbols_; }
    const SymbolTable& symbols() const { return symbols_; }

    /// Inserts a ground fact as base knowledge of `origin` at the current epoch,
    /// or refreshes an existing entry. Throws on non-ground or negated literals.
    FactId insert(const Literal& fact, Origin origin);

    /// Inserts a derived tuple. Returns the new id, or nullopt if the tuple was
    /// already live. An existing outdated base fact gains the derived origin.
    std::optional<FactId> insert_derived(std::size_t relation_index, std::span<const Symbol> tuple,
                                         std::span<const FactId> supports);

    std::optional<FactId> find(const Literal& fact) const;
    bool contains(const Literal& fact) const;
    StoredFact fact(FactId id) const;
    Literal literal(FactId id) const;

    /// Live facts are current: either not outdated or (re)derived.
    bool is_live(FactId id) const;
    bool is_outdated(FactId id) const { return meta_[id].outdated; }
    bool is_derived(FactId id) const { return meta_[id].origins & static_cast<std::uint8_t>(Origin::Derived); }
    bool is_base(FactId id) const { return meta_[id].origins & kBaseMask; }
    std::uint8_t origins(FactId id) const { return meta_[id].origins; }
    std::span<const FactId> supports(FactId id) const;

    /// All stored facts sorted by (predicate, args).
    std::vector<StoredFact> facts() const;
    /// Live facts of one predicate sorted by args.
    std::vector<Literal> live_facts(const std::string& predicate) const;
    /// Every live fact sorted by (predicate, args).
    std::vector<Literal> live_facts() const;
    /// Live derived facts sorted by (predicate, args).
    std::vector<Literal> derived_facts() const;

    /// Relation access for evaluators.
    std::optional<std::size_t> relation_index(const std::string& predicate) const;
    std::size_t ensure_relation(const std::string& predicate, std::size_t arity);
    const Relation& relation(std::size_t index) const { return relations_[index]; }
    std::size_t relation_count() const { return relations_.size(); }
    std::vector<std::string> predicates() const;

    /// Ingests one discovery snapshot. See ingest_snapshot().
    void ingest(std::span<const Literal> facts, Origin origin);

    /// New store holding the facts for which keep(id) is true, in id order,
    /// with supports remapped (supports to dropped facts are removed).
    template <typename Pred>
    FactStore filtered(Pred keep) const {
        std::vector<bool> mask(meta_.size());
        for (FactId id = 0; id < meta_.size(); ++id) mask[id] = keep(id);
        return rebuild(mask, true);
    }

    /// Copy without any derived knowledge: derived-only facts are dropped and
    /// the derived origin is cleared from the rest.
    FactStore base_only() const;

    /// Marks the epoch at which derived facts are stamped.
    void set_epoch(std::uint64_t e) { epoch_ = e; }

    /// Converts a tuple of symbols back to constants.
    Literal to_literal(const std::string& predicate, std::span<const Symbol> tuple) const;

private:
    static constexpr std::uint8_t kBaseMask =
        static_cast<std::uint8_t>(Origin::Discovered) | static_cast<std::uint8_t>(Origin::User);

    struct Meta {
        std::uint32_t relation;
        std::uint32_t row;
        std::uint64_t epoch;
        std::uint8_t origins;
        std::uint8_t live_origins;  // base origins whose latest snapshot still lists the fact
        bool outdated;
        std::uint32_t support_begin;
        std::uint32_t support_count;
    };

    std::optional<std::vector<Symbol>> encode(const Literal& fact) const;
    FactStore rebuild(const std::vector<bool>& keep, bool keep_derived) const;
    static Origin primary(std::uint8_t origins);

    SymbolTable symbols_;
    std::vector<Relation> relations_;
    std::map<std::string, std::size_t> relation_by_name_;
    std::vector<Meta> meta_;
    std::vector<FactId> support_pool_;
    std::uint64_t epoch_ = 0;
};

/// Increments the epoch; listed facts are inserted or refreshed with
/// outdated=false; base facts of the same origin whose predicate occurs in the
/// snapshot but which are absent from it become outdated.
FactStore ingest_snapshot(FactStore store, std::span<const Literal> facts, Origin origin);

/// Removes outdated base facts that no live derived fact references through
/// its supports (transitively). Non-outdated facts are never removed.
FactStore collect_unreferenced(const FactStore& store);

enum class QueryMode { Indexed, Scan };

/// All substitutions that map `pattern` onto a live fact, sorted by the matched
/// argument tuple. A ground pattern that is present yields one empty substitution.
std::vector<Substitution> query(const FactStore& store, const Literal& pattern,
                                QueryMode mode = QueryMode::Indexed);

}  // namespace netinfer::dl
