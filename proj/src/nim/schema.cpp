#include "netinfer/nim/schema.hpp"

#include <set>
#include <sstream>

namespace netinfer::nim {

namespace {

constexpr std::string_view kDisc = "_disc";
constexpr std::string_view kUser = "_user";

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string format_signature(const PredicateSpec& spec) {
    std::string out = spec.name + "/" + std::to_string(spec.arity()) + "(";
    for (std::size_t i = 0; i < spec.arg_roles.size(); ++i) {
        if (i) out += ", ";
        out += to_string(spec.arg_roles[i]);
    }
    return out + ")";
}

}  // namespace

const char* to_string(Role r) {
    switch (r) {
        case Role::SysId: return "sys_id";
        case Role::HostId: return "host_id";
        case Role::PartyId: return "party_id";
        case Role::ConfigUri: return "config_uri";
        case Role::Uri: return "uri";
        case Role::AnyId: return "any_id";
        case Role::Key: return "key";
        case Role::Value: return "value";
    }
    return "?";
}

bool requires_string(Role r) {
    return r != Role::Key && r != Role::Value;
}

const char* to_string(OriginClass c) {
    switch (c) {
        case OriginClass::Discovered: return "discovered";
        case OriginClass::User: return "user";
        case OriginClass::Derived: return "derived";
    }
    return "?";
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::UnknownPredicate: return "unknown-predicate";
        case ViolationKind::WrongArity: return "wrong-arity";
        case ViolationKind::NonStringId: return "non-string-id";
        case ViolationKind::DerivedInInput: return "derived-in-input";
    }
    return "?";
}

std::string PredicateSpec::stem() const {
    if (origin_class != OriginClass::Derived && (ends_with(name, kDisc) || ends_with(name, kUser))) {
        return name.substr(0, name.size() - kDisc.size());
    }
    return name;
}

Catalog::Catalog(std::vector<PredicateSpec> specs) {
    for (auto& s : specs) {
        if (s.origin_class == OriginClass::Discovered && !ends_with(s.name, kDisc)) {
            throw SchemaError("discovered predicate " + s.name + " must end in _disc");
        }
        if (s.origin_class == OriginClass::User && !ends_with(s.name, kUser)) {
            throw SchemaError("user predicate " + s.name + " must end in _user");
        }
        std::string name = s.name;
        if (!specs_.emplace(name, std::move(s)).second) throw SchemaError("duplicate predicate " + name);
    }
}

const Catalog& Catalog::standard() {
    static const Catalog catalog = [] {
        using R = Role;
        const std::vector<std::pair<std::string, std::vector<Role>>> discovered = {
            {"host", {R::HostId, R::Uri}},
            {"system", {R::SysId, R::Uri}},
            {"same_host", {R::HostId, R::HostId}},
            {"same_sys", {R::SysId, R::SysId}},
            {"runs_on", {R::SysId, R::HostId}},
            {"incoming", {R::SysId, R::ConfigUri}},
            {"outgoing", {R::SysId, R::ConfigUri}},
            {"recv", {R::ConfigUri, R::SysId}},
            {"recv_host", {R::ConfigUri, R::HostId}},
            {"send", {R::ConfigUri, R::SysId}},
            {"msg_flow", {R::SysId, R::SysId, R::Uri}},
            {"party", {R::PartyId, R::Uri}},
            {"attr", {R::AnyId, R::Key, R::Value}},
            {"conf_attr", {R::ConfigUri, R::Key, R::Value}},
        };
        const std::vector<std::pair<std::string, std::vector<Role>>> derived = {
            {"same_sys", {R::SysId, R::SysId}},
            {"same_host", {R::HostId, R::HostId}},
            {"msg_flow", {R::SysId, R::SysId}},
            {"msg_flow_host", {R::HostId, R::HostId}},
            {"msg_flow_conf", {R::SysId, R::SysId, R::ConfigUri}},
            {"msg_flow_host_conf", {R::HostId, R::HostId, R::SysId, R::ConfigUri}},
            {"msg_flow_in_conf", {R::SysId, R::SysId, R::ConfigUri}},
            {"iflow", {R::SysId, R::SysId, R::SysId, R::Uri}},
        };
        std::vector<PredicateSpec> specs;
        for (const auto& [stem, roles] : discovered) {
            specs.push_back({stem + "_disc", roles, OriginClass::Discovered});
            specs.push_back({stem + "_user", roles, OriginClass::User});
        }
        for (const auto& [name, roles] : derived) specs.push_back({name, roles, OriginClass::Derived});
        return Catalog(std::move(specs));
    }();
    return catalog;
}

const PredicateSpec* Catalog::find(const std::string& name) const {
    auto it = specs_.find(name);
    return it == specs_.end() ? nullptr : &it->second;
}

ValidationReport validate_facts(const Catalog& catalog, const std::vector<dl::Literal>& facts) {
    ValidationReport report;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const auto& f = facts[i];
        const PredicateSpec* spec = catalog.find(f.predicate);
        std::size_t before = report.violations.size();
        if (!spec) {
            report.violations.push_back({i, ViolationKind::UnknownPredicate, "unknown predicate " + f.predicate});
        } else if (spec->arity() != f.arity()) {
            report.violations.push_back({i, ViolationKind::WrongArity,
                                         f.predicate + " expects " + std::to_string(spec->arity()) +
                                             " arguments, got " + std::to_string(f.arity())});
        } else {
            if (spec->origin_class == OriginClass::Derived) {
                report.violations.push_back(
                    {i, ViolationKind::DerivedInInput, f.predicate + " is derived and cannot be asserted"});
            }
            for (std::size_t a = 0; a < f.arity(); ++a) {
                const auto& t = f.args[a];
                if (requires_string(spec->arg_roles[a]) &&
                    (t.is_variable() || !std::holds_alternative<std::string>(t.constant()))) {
                    report.violations.push_back({i, ViolationKind::NonStringId,
                                                 f.predicate + " argument " + std::to_string(a + 1) + " (" +
                                                     to_string(spec->arg_roles[a]) + ") must be a string"});
                }
            }
        }
        if (report.violations.size() == before) report.valid.push_back(f);
    }
    return report;
}

namespace {

std::optional<dl::Literal> lifted(const Catalog& catalog, const dl::Literal& f) {
    const PredicateSpec* spec = catalog.find(f.predicate);
    bool is_user = spec ? spec->origin_class == OriginClass::User : ends_with(f.predicate, kUser);
    if (!is_user) return std::nullopt;
    std::string target = f.predicate.substr(0, f.predicate.size() - kUser.size()) + std::string(kDisc);
    if (!catalog.find(target)) throw SchemaError("user predicate " + f.predicate + " has no discovered stem " + target);
    dl::Literal out = f;
    out.predicate = std::move(target);
    return out;
}

}  // namespace

std::vector<dl::Literal> lift_user_facts(const Catalog& catalog, const std::vector<dl::Literal>& facts) {
    std::vector<dl::Literal> out = facts;
    std::set<dl::Literal> present(facts.begin(), facts.end());
    for (const auto& f : facts) {
        if (auto l = lifted(catalog, f); l && present.insert(*l).second) out.push_back(std::move(*l));
    }
    return out;
}

OriginSplit split_by_origin(const Catalog& catalog, const std::vector<dl::Literal>& facts) {
    OriginSplit split;
    for (const auto& f : facts) {
        if (auto l = lifted(catalog, f)) {
            split.user.push_back(f);
            split.user.push_back(std::move(*l));
        } else {
            split.discovered.push_back(f);
        }
    }
    return split;
}

std::string catalog_as_declarations(const Catalog& catalog, bool markdown) {
    std::ostringstream out;
    if (markdown && !catalog.empty()) {
        out << "| predicate | arity | arguments | origin |\n";
        out << "|---|---|---|---|\n";
    }
    for (const auto& [name, spec] : catalog.specs()) {
        if (markdown) {
            out << "| " << name << " | " << spec.arity() << " | ";
            for (std::size_t i = 0; i < spec.arg_roles.size(); ++i) {
                if (i) out << ", ";
                out << to_string(spec.arg_roles[i]);
            }
            out << " | " << to_string(spec.origin_class) << " |\n";
        } else {
            out << format_signature(spec) << " " << to_string(spec.origin_class) << "\n";
        }
    }
    return out.str();
}

}  // namespace netinfer::nim
