#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netinfer/datalog/ast.hpp"

namespace netinfer::nim {

/// What an argument position holds. Id and uri roles must be strings.
enum class Role { SysId, HostId, PartyId, ConfigUri, Uri, AnyId, Key, Value };

const char* to_string(Role r);
bool requires_string(Role r);

enum class OriginClass { Discovered, User, Derived };

const char* to_string(OriginClass c);

struct PredicateSpec {
    std::string name;
    std::vector<Role> arg_roles;
    OriginClass origin_class = OriginClass::Discovered;

    std::size_t arity() const { return arg_roles.size(); }
    /// Name without the "_disc" / "_user" postfix; the full name for derived predicates.
    std::string stem() const;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable predicate catalog.
class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<PredicateSpec> specs);

    /// Built-in Network Integration Model catalog: every discovered predicate,
    /// its user variant, and the predicates derived by the bundled rules.
    static const Catalog& standard();

    const PredicateSpec* find(const std::string& name) const;
    const std::map<std::string, PredicateSpec>& specs() const { return specs_; }
    bool empty() const { return specs_.empty(); }

private:
    std::map<std::string, PredicateSpec> specs_;
};

enum class ViolationKind { UnknownPredicate, WrongArity, NonStringId, DerivedInInput };

const char* to_string(ViolationKind k);

struct Violation {
    std::size_t fact_index;
    ViolationKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<dl::Literal> valid;  // facts without violations, input order

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_facts(const Catalog& catalog, const std::vector<dl::Literal>& facts);

/// For every `<stem>_user` fact appends the matching `<stem>_disc`-shaped fact
/// unless already present. Input facts are kept. Idempotent.
/// Throws SchemaError for a `_user` predicate whose `_disc` stem is unknown.
std::vector<dl::Literal> lift_user_facts(const Catalog& catalog, const std::vector<dl::Literal>& facts);

/// Splits raw input facts into the discovered and user snapshots used for
/// ingestion: `_user` facts and their lifted `_disc` forms go to `user`,
/// everything else to `discovered`.
struct OriginSplit {
    std::vector<dl::Literal> discovered;
    std::vector<dl::Literal> user;
};
OriginSplit split_by_origin(const Catalog& catalog, const std::vector<dl::Literal>& facts);

/// One line per predicate, sorted by name: `name/arity(role, ...) origin`.
/// With `markdown`, a table with the same content.
std::string catalog_as_declarations(const Catalog& catalog, bool markdown = false);

}  // namespace netinfer::nim
