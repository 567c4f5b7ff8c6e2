#include "netinfer/datalog/fact_store.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <set>

namespace netinfer::dl {

// ---------------------------------------------------------------------------
// SymbolTable

std::size_t SymbolTable::Hash::operator()(const Constant& c) const {
    return std::hash<Constant>{}(c);
}

Symbol SymbolTable::intern(const Constant& c) {
    auto it = ids_.find(c);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<Symbol>(values_.size());
    values_.push_back(c);
    ids_.emplace(c, id);
    return id;
}

std::optional<Symbol> SymbolTable::find(const Constant& c) const {
    auto it = ids_.find(c);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const char* to_string(Origin o) {
    switch (o) {
        case Origin::Discovered: return "discovered";
        case Origin::User: return "user";
        case Origin::Derived: return "derived";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(std::string name, std::size_t arity)
    : name_(std::move(name)), arity_(arity), keys_(16, kEmpty), slot_rows_(16), columns_(arity) {}

std::uint64_t Relation::tag_of(std::span<const Symbol> tuple) const {
    if (arity_ == 2) return tuple[1];
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (Symbol s : tuple.subspan(1)) {
        h ^= s + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
    }
    return (h ^ (h >> 32)) & 0xffffffffull;
}

std::optional<std::size_t> Relation::find(std::span<const Symbol> tuple) const {
    if (tuple.size() != arity_) return std::nullopt;
    if (arity_ == 0) {
        if (rows() == 0) return std::nullopt;
        return 0;
    }
    if (arity_ == 1) {
        std::size_t mask = keys_.size() - 1;
        for (std::size_t i = spread(tuple[0]) & mask; keys_[i] != kEmpty; i = (i + 1) & mask) {
            if (keys_[i] == tuple[0]) return slot_rows_[i];
        }
        return std::nullopt;
    }
    auto it = groups_.find(tuple[0]);
    if (it == groups_.end()) return std::nullopt;
    return find_in(it->second, tuple);
}

Bucket Relation::lookup(std::size_t col, Symbol s) const {
    const auto& index = columns_[col];
    auto it = index.find(s);
    if (it == index.end()) return {};
    return {it->second.data(), it->second.size() / (arity_ + 1), arity_ + 1};
}

void Relation::place(std::uint64_t key, std::uint32_t row) {
    std::size_t mask = keys_.size() - 1;
    std::size_t i = spread(key) & mask;
    while (keys_[i] != kEmpty) i = (i + 1) & mask;
    keys_[i] = key;
    slot_rows_[i] = row;
}

void Relation::grow() {
    keys_.assign(keys_.size() * 2, kEmpty);
    slot_rows_.assign(keys_.size(), 0);
    for (std::uint32_t r = 0; r < rows(); ++r) place(row(r)[0], r);
}

void Relation::MemberSet::insert(std::uint64_t tag, std::uint32_t row) {
    auto put = [](std::vector<std::uint64_t>& into, std::uint64_t entry) {
        std::size_t mask = into.size() - 1;
        std::size_t i = spread(entry & 0xffffffffull) & mask;
        while (into[i] != kEmpty) i = (i + 1) & mask;
        into[i] = entry;
    };
    if ((count + 1) * 2 > slots.size()) {
        std::vector<std::uint64_t> bigger(slots.size() * 2, kEmpty);
        for (auto e : slots) {
            if (e != kEmpty) put(bigger, e);
        }
        slots = std::move(bigger);
    }
    put(slots, (std::uint64_t{row} << 32) | tag);
    ++count;
}

std::size_t Relation::append(std::span<const Symbol> tuple, FactId id) {
    if (tuple.size() != arity_) {
        throw ArityError("predicate " + name_ + " has arity " + std::to_string(arity_) + ", got " +
                         std::to_string(tuple.size()));
    }
    auto r = static_cast<std::uint32_t>(rows());
    data_.insert(data_.end(), tuple.begin(), tuple.end());
    ids_.push_back(id);
    if (arity_ == 1) {
        if (rows() * 2 > keys_.size()) {
            grow();
        } else {
            place(tuple[0], r);
        }
    } else if (arity_ >= 2) {
        groups_[tuple[0]].insert(tag_of(tuple), r);
    }
    for (std::size_t c = 0; c < arity_; ++c) {
        auto& bucket = columns_[c][tuple[c]];
        bucket.push_back(r);
        bucket.insert(bucket.end(), tuple.begin(), tuple.end());
    }
    return r;
}

// ---------------------------------------------------------------------------
// FactStore

Origin FactStore::primary(std::uint8_t origins) {
    if (origins & static_cast<std::uint8_t>(Origin::User)) return Origin::User;
    if (origins & static_cast<std::uint8_t>(Origin::Discovered)) return Origin::Discovered;
    return Origin::Derived;
}

std::optional<std::size_t> FactStore::relation_index(const std::string& predicate) const {
    auto it = relation_by_name_.find(predicate);
    if (it == relation_by_name_.end()) return std::nullopt;
    return it->second;
}

std::size_t FactStore::ensure_relation(const std::string& predicate, std::size_t arity) {
    auto it = relation_by_name_.find(predicate);
    if (it != relation_by_name_.end()) {
        if (relations_[it->second].arity() != arity) {
            throw ArityError("predicate " + predicate + " used with arity " + std::to_string(arity) +
                             " but stored with arity " + std::to_string(relations_[it->second].arity()));
        }
        return it->second;
    }
    relations_.emplace_back(predicate, arity);
    relation_by_name_.emplace(predicate, relations_.size() - 1);
    return relations_.size() - 1;
}

std::vector<std::string> FactStore::predicates() const {
    std::vector<std::string> out;
    for (const auto& [name, idx] : relation_by_name_) out.push_back(name);
    return out;
}

std::optional<std::vector<Symbol>> FactStore::encode(const Literal& fact) const {
    std::vector<Symbol> tuple;
    tuple.reserve(fact.args.size());
    for (const auto& t : fact.args) {
        auto s = symbols_.find(t.constant());
        if (!s) return std::nullopt;
        tuple.push_back(*s);
    }
    return tuple;
}

FactId FactStore::insert(const Literal& fact, Origin origin) {
    if (fact.negated) throw std::invalid_argument("cannot store negated literal " + format_literal(fact));
    if (!fact.is_ground()) throw std::invalid_argument("non-ground fact " + format_literal(fact));
    if (origin == Origin::Derived) throw std::invalid_argument("base insert with derived origin");

    std::size_t rel = ensure_relation(fact.predicate, fact.arity());
    std::vector<Symbol> tuple;
    tuple.reserve(fact.arity());
    for (const auto& t : fact.args) tuple.push_back(symbols_.intern(t.constant()));

    auto bit = static_cast<std::uint8_t>(origin);
    if (auto row = relations_[rel].find(tuple)) {
        FactId id = relations_[rel].fact_id(*row);
        Meta& m = meta_[id];
        m.origins |= bit;
        m.live_origins |= bit;
        m.epoch = epoch_;
        m.outdated = false;
        return id;
    }
    auto id = static_cast<FactId>(meta_.size());
    auto row = relations_[rel].append(tuple, id);
    meta_.push_back(Meta{static_cast<std::uint32_t>(rel), static_cast<std::uint32_t>(row), epoch_, bit, bit,
                         false, 0, 0});
    return id;
}

std::optional<FactId> FactStore::insert_derived(std::size_t relation_index, std::span<const Symbol> tuple,
                                                std::span<const FactId> supports) {
    Relation& rel = relations_[relation_index];
    auto add_supports = [&](Meta& m) {
        m.support_begin = static_cast<std::uint32_t>(support_pool_.size());
        m.support_count = static_cast<std::uint32_t>(supports.size());
        support_pool_.insert(support_pool_.end(), supports.begin(), supports.end());
    };
    if (auto row = rel.find(tuple)) {
        FactId id = rel.fact_id(*row);
        if (is_live(id)) return std::nullopt;
        Meta& m = meta_[id];
        m.origins |= static_cast<std::uint8_t>(Origin::Derived);
        m.epoch = epoch_;
        add_supports(m);
        return id;
    }
    auto id = static_cast<FactId>(meta_.size());
    auto row = rel.append(tuple, id);
    Meta m{static_cast<std::uint32_t>(relation_index), static_cast<std::uint32_t>(row), epoch_,
           static_cast<std::uint8_t>(Origin::Derived), 0, false, 0, 0};
    add_supports(m);
    meta_.push_back(m);
    return id;
}

std::optional<FactId> FactStore::find(const Literal& fact) const {
    if (!fact.is_ground() || fact.negated) return std::nullopt;
    auto rel = relation_index(fact.predicate);
    if (!rel || relations_[*rel].arity() != fact.arity()) return std::nullopt;
    auto tuple = encode(fact);
    if (!tuple) return std::nullopt;
    auto row = relations_[*rel].find(*tuple);
    if (!row) return std::nullopt;
    return relations_[*rel].fact_id(*row);
}

bool FactStore::contains(const Literal& fact) const {
    auto id = find(fact);
    return id && is_live(*id);
}

bool FactStore::is_live(FactId id) const {
    const Meta& m = meta_[id];
    return !m.outdated || (m.origins & static_cast<std::uint8_t>(Origin::Derived));
}

std::span<const FactId> FactStore::supports(FactId id) const {
    const Meta& m = meta_[id];
    return {support_pool_.data() + m.support_begin, m.support_count};
}

Literal FactStore::to_literal(const std::string& predicate, std::span<const Symbol> tuple) const {
    Literal lit;
    lit.predicate = predicate;
    lit.args.reserve(tuple.size());
    for (Symbol s : tuple) lit.args.push_back(Term::constant(symbols_.value(s)));
    return lit;
}

Literal FactStore::literal(FactId id) const {
    const Meta& m = meta_[id];
    const Relation& rel = relations_[m.relation];
    return to_literal(rel.name(), rel.row(m.row));
}

StoredFact FactStore::fact(FactId id) const {
    const Meta& m = meta_[id];
    StoredFact f;
    f.id = id;
    f.literal = literal(id);
    f.epoch = m.epoch;
    f.origins = m.origins;
    f.origin = primary(m.origins);
    f.outdated = m.outdated;
    auto sup = supports(id);
    f.supports.assign(sup.begin(), sup.end());
    return f;
}

namespace {

template <typename T>
void sort_by_literal(std::vector<T>& v, auto key) {
    std::sort(v.begin(), v.end(), [&](const T& a, const T& b) { return key(a) < key(b); });
}

}  // namespace

std::vector<StoredFact> FactStore::facts() const {
    std::vector<StoredFact> out;
    out.reserve(meta_.size());
    for (FactId id = 0; id < meta_.size(); ++id) out.push_back(fact(id));
    sort_by_literal(out, [](const StoredFact& f) -> const Literal& { return f.literal; });
    return out;
}

std::vector<Literal> FactStore::live_facts(const std::string& predicate) const {
    std::vector<Literal> out;
    auto rel = relation_index(predicate);
    if (!rel) return out;
    const Relation& r = relations_[*rel];
    for (std::size_t row = 0; row < r.rows(); ++row) {
        if (is_live(r.fact_id(row))) out.push_back(to_literal(predicate, r.row(row)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Literal> FactStore::live_facts() const {
    std::vector<Literal> out;
    for (FactId id = 0; id < meta_.size(); ++id) {
        if (is_live(id)) out.push_back(literal(id));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Literal> FactStore::derived_facts() const {
    std::vector<Literal> out;
    for (FactId id = 0; id < meta_.size(); ++id) {
        if (is_derived(id)) out.push_back(literal(id));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void FactStore::ingest(std::span<const Literal> facts, Origin origin) {
    if (origin == Origin::Derived) throw std::invalid_argument("snapshots carry discovered or user facts");
    for (const auto& f : facts) {
        if (!f.is_ground()) throw std::invalid_argument("non-ground fact " + format_literal(f));
    }
    ++epoch_;
    std::set<std::string> scope;
    std::vector<bool> seen(meta_.size(), false);
    for (const auto& f : facts) {
        scope.insert(f.predicate);
        FactId id = insert(f, origin);
        if (id >= seen.size()) seen.resize(id + 1, false);
        seen[id] = true;
    }
    auto bit = static_cast<std::uint8_t>(origin);
    for (FactId id = 0; id < meta_.size(); ++id) {
        Meta& m = meta_[id];
        if (!(m.origins & bit) || seen[id]) continue;
        if (!scope.contains(relations_[m.relation].name())) continue;
        m.live_origins &= static_cast<std::uint8_t>(~bit);
        if ((m.live_origins & kBaseMask) == 0) m.outdated = true;
    }
}

FactStore FactStore::rebuild(const std::vector<bool>& keep, bool keep_derived) const {
    FactStore out;
    out.symbols_ = symbols_;
    out.epoch_ = epoch_;
    for (const auto& rel : relations_) out.ensure_relation(rel.name(), rel.arity());

    constexpr FactId kDropped = 0xffffffffu;
    std::vector<FactId> remap(meta_.size(), kDropped);
    for (FactId id = 0; id < meta_.size(); ++id) {
        if (!keep[id]) continue;
        Meta m = meta_[id];
        if (!keep_derived) m.origins &= kBaseMask;
        if (m.origins == 0) continue;

        auto new_id = static_cast<FactId>(out.meta_.size());
        remap[id] = new_id;
        const Relation& rel = relations_[m.relation];
        m.row = static_cast<std::uint32_t>(out.relations_[m.relation].append(rel.row(meta_[id].row), new_id));
        m.support_begin = static_cast<std::uint32_t>(out.support_pool_.size());
        m.support_count = 0;
        if (m.origins & static_cast<std::uint8_t>(Origin::Derived)) {
            for (FactId s : supports(id)) {
                if (remap[s] != kDropped) {
                    out.support_pool_.push_back(remap[s]);
                    ++m.support_count;
                }
            }
        }
        out.meta_.push_back(m);
    }
    return out;
}

FactStore FactStore::base_only() const {
    return rebuild(std::vector<bool>(meta_.size(), true), false);
}

FactStore ingest_snapshot(FactStore store, std::span<const Literal> facts, Origin origin) {
    store.ingest(facts, origin);
    return store;
}

FactStore collect_unreferenced(const FactStore& store) {
    std::vector<bool> referenced(store.size(), false);
    std::vector<FactId> stack;
    for (FactId id = 0; id < store.size(); ++id) {
        if (store.is_derived(id)) stack.push_back(id);
    }
    while (!stack.empty()) {
        FactId id = stack.back();
        stack.pop_back();
        for (FactId s : store.supports(id)) {
            if (!referenced[s]) {
                referenced[s] = true;
                stack.push_back(s);
            }
        }
    }
    return store.filtered([&](FactId id) {
        return !store.is_outdated(id) || store.is_derived(id) || referenced[id];
    });
}

// ---------------------------------------------------------------------------
// query

std::vector<Substitution> query(const FactStore& store, const Literal& pattern, QueryMode mode) {
    std::vector<Substitution> out;
    auto rel_idx = store.relation_index(pattern.predicate);
    if (!rel_idx) return out;
    const Relation& rel = store.relation(*rel_idx);
    if (rel.arity() != pattern.arity()) return out;

    const std::size_t n = pattern.arity();
    std::vector<std::optional<Symbol>> bound(n);
    std::vector<std::size_t> same_as(n);  // first position carrying the same variable
    for (std::size_t i = 0; i < n; ++i) {
        const Term& t = pattern.args[i];
        same_as[i] = i;
        if (t.is_constant()) {
            bound[i] = store.symbols().find(t.constant());
            if (!bound[i]) return out;
        } else {
            for (std::size_t j = 0; j < i; ++j) {
                if (pattern.args[j].is_variable() && pattern.args[j].variable() == t.variable()) {
                    same_as[i] = j;
                    break;
                }
            }
        }
    }

    auto matches = [&](std::size_t row) {
        auto tuple = rel.row(row);
        for (std::size_t i = 0; i < n; ++i) {
            if (bound[i] && tuple[i] != *bound[i]) return false;
            if (tuple[i] != tuple[same_as[i]]) return false;
        }
        return store.is_live(rel.fact_id(row));
    };

    std::vector<std::size_t> rows;
    std::optional<std::size_t> index_col;
    if (mode == QueryMode::Indexed) {
        for (std::size_t i = 0; i < n; ++i) {
            if (bound[i] && (!index_col || rel.lookup(i, *bound[i]).size() <
                                               rel.lookup(*index_col, *bound[*index_col]).size())) {
                index_col = i;
            }
        }
    }
    if (index_col) {
        auto bucket = rel.lookup(*index_col, *bound[*index_col]);
        for (std::size_t k = 0; k < bucket.size(); ++k) {
            if (matches(bucket.row(k))) rows.push_back(bucket.row(k));
        }
    } else {
        for (std::size_t r = 0; r < rel.rows(); ++r) {
            if (matches(r)) rows.push_back(r);
        }
    }

    const auto& syms = store.symbols();
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        auto ta = rel.row(a);
        auto tb = rel.row(b);
        for (std::size_t i = 0; i < n; ++i) {
            if (ta[i] == tb[i]) continue;
            return syms.value(ta[i]) < syms.value(tb[i]);
        }
        return false;
    });

    out.reserve(rows.size());
    for (auto r : rows) {
        auto tuple = rel.row(r);
        Substitution sub;
        for (std::size_t i = 0; i < n; ++i) {
            if (pattern.args[i].is_variable()) sub.emplace(pattern.args[i].variable().name, syms.value(tuple[i]));
        }
        out.push_back(std::move(sub));
    }
    return out;
}

}  // namespace netinfer::dl
