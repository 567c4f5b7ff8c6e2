#include "netinfer/inference/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "netinfer/datalog/engine.hpp"
#include "netinfer/datalog/parser.hpp"

namespace netinfer::infer {

namespace bundled {
// Generated from rules/*.dl at configure time.
extern const std::vector<std::pair<std::string, std::string>> kRuleFiles;
}  // namespace bundled

namespace {

using dl::Literal;

std::string arg(const Literal& f, std::size_t i) {
    return dl::to_string(f.args[i].constant());
}

constexpr std::uint8_t kUserBit = static_cast<std::uint8_t>(dl::Origin::User);

/// key -> candidate values with the origins asserting them.
using AttributeCandidates = std::map<std::string, std::map<std::string, std::uint8_t>>;

/// attr_disc / conf_attr_disc facts indexed by their first argument.
std::map<std::string, AttributeCandidates> attribute_index(const dl::FactStore& store, const std::string& predicate) {
    std::map<std::string, AttributeCandidates> index;
    auto rel = store.relation_index(predicate);
    if (!rel || store.relation(*rel).arity() != 3) return index;
    const auto& r = store.relation(*rel);
    for (std::size_t row = 0; row < r.rows(); ++row) {
        dl::FactId id = r.fact_id(row);
        if (!store.is_live(id)) continue;
        Literal f = store.literal(id);
        index[arg(f, 0)][arg(f, 1)][arg(f, 2)] |= store.origins(id);
    }
    return index;
}

/// User-asserted values win; ties break to the smallest value.
std::map<std::string, std::string> resolve_attributes(const AttributeCandidates& candidates,
                                                      const std::string& subject, Report& report) {
    std::map<std::string, std::string> out;
    for (const auto& [key, values] : candidates) {
        const std::string* chosen = nullptr;
        for (const auto& [value, origins] : values) {
            if (origins & kUserBit) {
                chosen = &value;
                break;
            }
        }
        if (!chosen) chosen = &values.begin()->first;
        out.emplace(key, *chosen);
        if (values.size() > 1) {
            std::string all;
            for (const auto& [value, origins] : values) all += (all.empty() ? "" : ", ") + value;
            report.push_back({InconsistencyKind::AttributeConflict, subject,
                              "attribute " + key + " has values {" + all + "}; kept " + *chosen});
        }
    }
    return out;
}

void merge_candidates(AttributeCandidates& into, const AttributeCandidates& from) {
    for (const auto& [key, values] : from) {
        for (const auto& [value, origins] : values) into[key][value] |= origins;
    }
}

std::optional<std::string> single_attribute(const std::map<std::string, AttributeCandidates>& index,
                                            const std::string& subject, const std::string& key) {
    auto it = index.find(subject);
    if (it == index.end()) return std::nullopt;
    auto k = it->second.find(key);
    if (k == it->second.end()) return std::nullopt;
    Report ignored;
    AttributeCandidates only{{key, k->second}};
    return resolve_attributes(only, subject, ignored).at(key);
}

std::string flow_key(const std::map<std::string, AttributeCandidates>& conf_attrs, const std::string& config) {
    return single_attribute(conf_attrs, config, "interface").value_or(config);
}

std::set<std::string> configs_of(const dl::FactStore& store, const std::string& predicate, std::size_t position) {
    std::set<std::string> out;
    for (const auto& f : store.live_facts(predicate)) {
        if (f.arity() > position) out.insert(arg(f, position));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// RuleSet

const RuleSet& RuleSet::bundled() {
    static const RuleSet rules = [] {
        RuleSet r;
        r.equivalence = dl::parse_program(bundled_source(kEquivalenceFile));
        r.outgoing = dl::parse_program(bundled_source(kOutgoingFile));
        r.incoming = dl::parse_program(bundled_source(kIncomingFile));
        r.iflows = dl::parse_program(bundled_source(kIFlowFile));
        return r;
    }();
    return rules;
}

std::string RuleSet::bundled_source(const std::string& file) {
    for (const auto& [name, text] : bundled::kRuleFiles) {
        if (name == file) return text;
    }
    return {};
}

RuleSet RuleSet::load(const std::filesystem::path& dir) {
    auto read = [&](const char* file) {
        std::filesystem::path p = dir / file;
        if (!std::filesystem::exists(p)) return dl::parse_program(bundled_source(file));
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot read " + p.string());
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            return dl::parse_program(ss.str());
        } catch (const dl::ParseError& e) {
            throw dl::ParseError(e.line(), e.column(), p.string() + ": " + e.detail());
        }
    };
    RuleSet r;
    r.equivalence = read(kEquivalenceFile);
    r.outgoing = read(kOutgoingFile);
    r.incoming = read(kIncomingFile);
    r.iflows = read(kIFlowFile);
    return r;
}

dl::Program RuleSet::flow_program() const {
    dl::Program p = outgoing;
    p.merge(incoming);
    p.merge(iflows);
    return p;
}

dl::Program RuleSet::all() const {
    dl::Program p = equivalence;
    p.merge(flow_program());
    return p;
}

// ---------------------------------------------------------------------------
// Stages

dl::FactStore make_store(const std::vector<Literal>& facts, const nim::Catalog& catalog) {
    auto split = nim::split_by_origin(catalog, facts);
    dl::FactStore store;
    store.ingest(split.discovered, dl::Origin::Discovered);
    if (!split.user.empty()) store.ingest(split.user, dl::Origin::User);
    return store;
}

dl::FactStore evaluate_equivalences(const dl::FactStore& store, const RuleSet& rules) {
    return dl::evaluate_seminaive(dl::stratify(rules.equivalence), store);
}

Partitions step1_equivalences(const dl::FactStore& evaluated, const nim::Catalog& catalog) {
    Partitions p;
    for (std::size_t r = 0; r < evaluated.relation_count(); ++r) {
        const auto& rel = evaluated.relation(r);
        const nim::PredicateSpec* spec = catalog.find(rel.name());
        if (!spec || spec->arity() != rel.arity()) continue;
        for (std::size_t row = 0; row < rel.rows(); ++row) {
            if (!evaluated.is_live(rel.fact_id(row))) continue;
            auto tuple = rel.row(row);
            for (std::size_t a = 0; a < rel.arity(); ++a) {
                std::string id = dl::to_string(evaluated.symbols().value(tuple[a]));
                if (spec->arg_roles[a] == nim::Role::SysId) p.systems.add(id);
                if (spec->arg_roles[a] == nim::Role::HostId) p.hosts.add(id);
            }
        }
    }
    for (const auto& f : evaluated.live_facts("same_sys")) {
        if (f.arity() == 2) p.systems.unite(arg(f, 0), arg(f, 1));
    }
    for (const auto& f : evaluated.live_facts("same_host")) {
        if (f.arity() == 2) p.hosts.unite(arg(f, 0), arg(f, 1));
    }
    return p;
}

dl::FactStore canonicalize(const dl::FactStore& store, const Partitions& partitions, const nim::Catalog& catalog) {
    dl::FactStore out;
    out.set_epoch(store.current_epoch());
    for (dl::FactId id = 0; id < store.size(); ++id) {
        if (!store.is_base(id) || store.is_outdated(id)) continue;
        Literal f = store.literal(id);
        const nim::PredicateSpec* spec = catalog.find(f.predicate);
        if (spec && spec->origin_class == nim::OriginClass::Derived) continue;
        if (spec && spec->arity() == f.arity()) {
            for (std::size_t a = 0; a < f.arity(); ++a) {
                const auto& c = f.args[a].constant();
                if (!std::holds_alternative<std::string>(c)) continue;
                const auto& s = std::get<std::string>(c);
                if (spec->arg_roles[a] == nim::Role::SysId) f.args[a] = dl::Term::str(partitions.systems.canonical(s));
                if (spec->arg_roles[a] == nim::Role::HostId) f.args[a] = dl::Term::str(partitions.hosts.canonical(s));
            }
        }
        std::uint8_t origins = store.origins(id);
        if (origins & static_cast<std::uint8_t>(dl::Origin::Discovered)) out.insert(f, dl::Origin::Discovered);
        if (origins & kUserBit) out.insert(f, dl::Origin::User);
    }
    return out;
}

dl::FactStore evaluate_flows(const dl::FactStore& canonical, const RuleSet& rules) {
    return dl::evaluate_seminaive(dl::stratify(rules.flow_program()), canonical);
}

std::vector<CallEndpoint> step2_endpoints(const dl::FactStore& store, const Partitions& partitions, Report& report) {
    auto conf_attrs = attribute_index(store, "conf_attr_disc");
    std::map<std::pair<std::string, Direction>, std::set<std::string>> owners;
    for (const auto& f : store.live_facts("incoming_disc")) {
        owners[{arg(f, 1), Direction::Incoming}].insert(partitions.systems.canonical(arg(f, 0)));
    }
    for (const auto& f : store.live_facts("outgoing_disc")) {
        owners[{arg(f, 1), Direction::Outgoing}].insert(partitions.systems.canonical(arg(f, 0)));
    }
    std::vector<CallEndpoint> out;
    for (const auto& [key, systems] : owners) {
        const auto& [config, direction] = key;
        CallEndpoint ep;
        ep.config_uri = config;
        ep.direction = direction;
        ep.owner = *systems.begin();
        if (systems.size() > 1) {
            std::string all;
            for (const auto& s : systems) all += (all.empty() ? "" : ", ") + s;
            report.push_back({InconsistencyKind::OwnerConflict, config,
                              std::string(to_string(direction)) + " configuration owned by {" + all + "}; kept " +
                                  ep.owner});
        }
        ep.protocol = single_attribute(conf_attrs, config, "protocol");
        ep.message_type = single_attribute(conf_attrs, config, "message_type");
        ep.interface = single_attribute(conf_attrs, config, "interface");
        out.push_back(std::move(ep));
    }
    return out;
}

OutgoingFlows step3_flows_outgoing(const dl::FactStore& flows, const Partitions& partitions, Report& report) {
    auto conf_attrs = attribute_index(flows, "conf_attr_disc");
    OutgoingFlows out;
    auto add_edge = [&](std::string s, std::string r, const std::string& config) {
        if (s == r) {
            report.push_back({InconsistencyKind::SelfEdgeSuppressed, s, "outgoing configuration " + config +
                                                                            " targets its own system"});
            return;
        }
        out.edges.push_back({std::move(s), std::move(r), flow_key(conf_attrs, config), {config},
                             {Evidence::OutgoingMatch}, {}});
    };

    for (const auto& f : flows.live_facts("msg_flow_conf")) {
        add_edge(partitions.systems.canonical(arg(f, 0)), partitions.systems.canonical(arg(f, 1)), arg(f, 2));
    }

    std::map<std::string, std::set<std::string>> systems_on_host;
    for (const auto& f : flows.live_facts("runs_on_disc")) {
        systems_on_host[partitions.hosts.canonical(arg(f, 1))].insert(partitions.systems.canonical(arg(f, 0)));
    }
    for (const auto& f : flows.live_facts("msg_flow_host_conf")) {
        std::string host_recv = partitions.hosts.canonical(arg(f, 1));
        std::string sender = partitions.systems.canonical(arg(f, 2));
        const auto& receivers = systems_on_host[host_recv];
        if (receivers.size() == 1) {
            add_edge(sender, *receivers.begin(), arg(f, 3));
        } else {
            out.host_flows.push_back({partitions.hosts.canonical(arg(f, 0)), host_recv, sender, arg(f, 3)});
            report.push_back({InconsistencyKind::AmbiguousHostFlow, arg(f, 3),
                              "receiving host " + host_recv + " runs " + std::to_string(receivers.size()) +
                                  " systems; flow kept at host level"});
        }
    }

    auto outgoing = configs_of(flows, "outgoing_disc", 1);
    for (const char* pred : {"recv_disc", "recv_host_disc"}) {
        for (const auto& config : configs_of(flows, pred, 0)) {
            if (!outgoing.contains(config)) {
                report.push_back({InconsistencyKind::DanglingReference, config,
                                  std::string(pred) + " names a configuration no system sends through"});
            }
        }
    }
    std::sort(out.host_flows.begin(), out.host_flows.end());
    return out;
}

std::vector<MessageFlowEdge> step4_flows_incoming(const dl::FactStore& flows, const Partitions& partitions,
                                                  Report& report) {
    auto conf_attrs = attribute_index(flows, "conf_attr_disc");
    std::vector<MessageFlowEdge> out;
    for (const auto& f : flows.live_facts("msg_flow_in_conf")) {
        std::string s = partitions.systems.canonical(arg(f, 0));
        std::string r = partitions.systems.canonical(arg(f, 1));
        if (s == r) {
            report.push_back({InconsistencyKind::SelfEdgeSuppressed, s,
                              "incoming configuration " + arg(f, 2) + " is fed by its own system"});
            continue;
        }
        out.push_back({s, r, flow_key(conf_attrs, arg(f, 2)), {arg(f, 2)}, {Evidence::IncomingMatch}, {}});
    }
    auto incoming = configs_of(flows, "incoming_disc", 1);
    for (const auto& config : configs_of(flows, "send_disc", 0)) {
        if (!incoming.contains(config)) {
            report.push_back({InconsistencyKind::DanglingReference, config,
                              "send_disc names a configuration no system receives through"});
        }
    }
    return out;
}

std::vector<MessageFlowEdge> declared_flows(const dl::FactStore& raw, const Partitions& partitions, Report& report) {
    std::vector<MessageFlowEdge> out;
    for (const auto& f : raw.live_facts("msg_flow_disc")) {
        if (f.arity() != 3) continue;
        std::string s = partitions.systems.canonical(arg(f, 0));
        std::string r = partitions.systems.canonical(arg(f, 1));
        if (s == r && arg(f, 0) != arg(f, 1)) {
            report.push_back({InconsistencyKind::SelfEdgeSuppressed, s,
                              "declared flow " + arg(f, 0) + " -> " + arg(f, 1) + " collapses to one system"});
            continue;
        }
        out.push_back({s, r, arg(f, 2), {arg(f, 2)}, {Evidence::Declared}, {}});
    }
    return out;
}

bool compatible(const CallEndpoint& outgoing, const CallEndpoint& incoming) {
    return outgoing.protocol && incoming.protocol && outgoing.message_type && incoming.message_type &&
           *outgoing.protocol == *incoming.protocol && *outgoing.message_type == *incoming.message_type;
}

MergeResult step5_merge(const std::vector<CallEndpoint>& endpoints, const std::vector<MessageFlowEdge>& flows3,
                        const std::vector<MessageFlowEdge>& flows4, const std::vector<MessageFlowEdge>& declared) {
    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, MessageFlowEdge> edges;
    auto add = [&](const MessageFlowEdge& e) {
        auto [it, inserted] = edges.try_emplace(Key{e.sender, e.receiver, e.key}, e);
        if (inserted) return;
        MessageFlowEdge& into = it->second;
        into.evidence.insert(e.evidence.begin(), e.evidence.end());
        into.via.insert(into.via.end(), e.via.begin(), e.via.end());
    };
    for (const auto* list : {&flows3, &flows4, &declared}) {
        for (const auto& e : *list) add(e);
    }

    std::set<std::string> used;
    for (const auto& [k, e] : edges) used.insert(e.via.begin(), e.via.end());

    MergeResult result;
    result.endpoints = endpoints;
    for (auto& ep : result.endpoints) ep.linked = used.contains(ep.config_uri);

    std::vector<CallEndpoint*> open_out, open_in;
    for (auto& ep : result.endpoints) {
        if (ep.linked) continue;
        (ep.direction == Direction::Outgoing ? open_out : open_in).push_back(&ep);
    }
    for (CallEndpoint* out : open_out) {
        for (CallEndpoint* in : open_in) {
            if (out->owner == in->owner || !compatible(*out, *in)) continue;
            add({out->owner, in->owner, out->interface.value_or(out->config_uri),
                 {out->config_uri, in->config_uri}, {Evidence::GraphMerge}, {}});
            out->linked = true;
            in->linked = true;
        }
    }

    for (auto& [k, e] : edges) {
        std::sort(e.via.begin(), e.via.end());
        e.via.erase(std::unique(e.via.begin(), e.via.end()), e.via.end());
        result.flows.push_back(std::move(e));
    }
    for (const auto& ep : result.endpoints) {
        if (!ep.linked) result.unlinked.push_back(ep);
    }
    return result;
}

std::vector<IFlow> step6_iflows(const dl::FactStore& flows, const Partitions& partitions) {
    std::set<IFlow> out;
    for (const auto& f : flows.live_facts("iflow")) {
        if (f.arity() != 4) continue;
        IFlow i{partitions.systems.canonical(arg(f, 0)), partitions.systems.canonical(arg(f, 1)),
                partitions.systems.canonical(arg(f, 2)), arg(f, 3)};
        if (i.sender == i.receiver || i.sender == i.middleware || i.receiver == i.middleware) continue;
        out.insert(std::move(i));
    }
    return {out.begin(), out.end()};
}

std::vector<TopLevelConnection> group_top_level(const std::vector<MessageFlowEdge>& flows) {
    std::map<std::pair<std::string, std::string>, std::vector<MessageFlowEdge>> groups;
    for (const auto& e : flows) {
        auto pair = std::minmax(e.sender, e.receiver);
        groups[{pair.first, pair.second}].push_back(e);
    }
    std::vector<TopLevelConnection> out;
    out.reserve(groups.size());
    for (auto& [pair, members] : groups) {
        std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
            return std::tie(a.sender, a.receiver, a.key) < std::tie(b.sender, b.receiver, b.key);
        });
        out.push_back({pair.first, pair.second, std::move(members)});
    }
    return out;
}

NetworkGraph build_network(const PipelineStages& stages) {
    NetworkGraph g;
    Report report = stages.report;
    const auto& store = stages.canonical;
    auto attrs = attribute_index(store, "attr_disc");
    auto conf_attrs = attribute_index(store, "conf_attr_disc");

    auto merged_attributes = [&](const std::vector<std::string>& ids, const std::string& subject) {
        AttributeCandidates candidates;
        for (const auto& id : ids) {
            if (auto it = attrs.find(id); it != attrs.end()) merge_candidates(candidates, it->second);
        }
        return resolve_attributes(candidates, subject, report);
    };

    std::map<std::string, std::set<std::string>> runs_on;
    for (const auto& f : store.live_facts("runs_on_disc")) {
        runs_on[stages.partitions.systems.canonical(arg(f, 0))].insert(stages.partitions.hosts.canonical(arg(f, 1)));
    }

    for (auto& members : stages.partitions.systems.classes()) {
        SystemNode node;
        node.id = members.front();
        node.attributes = merged_attributes(members, node.id);
        if (auto it = runs_on.find(node.id); it != runs_on.end()) {
            node.hosts.assign(it->second.begin(), it->second.end());
        }
        if (node.hosts.size() > 1) {
            std::string all;
            for (const auto& h : node.hosts) all += (all.empty() ? "" : ", ") + h;
            report.push_back({InconsistencyKind::MultipleHosts, node.id, "system runs on hosts {" + all + "}"});
        }
        node.members = std::move(members);
        g.systems.push_back(std::move(node));
    }
    for (auto& members : stages.partitions.hosts.classes()) {
        HostNode node;
        node.id = members.front();
        node.attributes = merged_attributes(members, node.id);
        node.members = std::move(members);
        g.hosts.push_back(std::move(node));
    }

    std::map<std::string, std::set<std::string>> party_uris;
    for (const auto& f : store.live_facts("party_disc")) party_uris[arg(f, 0)].insert(arg(f, 1));
    for (const auto& [id, uris] : party_uris) {
        PartyNode party;
        party.id = id;
        party.uris.assign(uris.begin(), uris.end());
        party.attributes = merged_attributes({id}, id);
        for (const auto& sys : g.systems) {
            auto it = sys.attributes.find("party");
            if (it != sys.attributes.end() && it->second == id) party.systems.push_back(sys.id);
        }
        g.parties.push_back(std::move(party));
    }

    std::vector<MessageFlowEdge> flows = stages.merged.flows;
    for (auto& e : flows) {
        AttributeCandidates candidates;
        for (const auto& v : e.via) {
            if (auto it = conf_attrs.find(v); it != conf_attrs.end()) merge_candidates(candidates, it->second);
        }
        e.attributes = resolve_attributes(candidates, e.sender + "->" + e.receiver + ":" + e.key, report);
    }
    g.groups = group_top_level(flows);
    g.iflows = stages.iflows;
    g.unlinked = stages.merged.unlinked;
    g.host_flows = stages.outgoing.host_flows;

    std::sort(report.begin(), report.end());
    report.erase(std::unique(report.begin(), report.end()), report.end());
    g.inconsistencies = std::move(report);
    return g;
}

PipelineStages run_stages(const dl::FactStore& store, const RuleSet& rules, const nim::Catalog& catalog) {
    PipelineStages s;
    s.equivalences = evaluate_equivalences(store, rules);
    s.partitions = step1_equivalences(s.equivalences, catalog);
    s.canonical = canonicalize(store, s.partitions, catalog);
    s.flows = evaluate_flows(s.canonical, rules);
    s.endpoints = step2_endpoints(s.flows, s.partitions, s.report);
    s.outgoing = step3_flows_outgoing(s.flows, s.partitions, s.report);
    s.incoming = step4_flows_incoming(s.flows, s.partitions, s.report);
    s.declared = declared_flows(store, s.partitions, s.report);
    s.merged = step5_merge(s.endpoints, s.outgoing.edges, s.incoming, s.declared);
    s.iflows = step6_iflows(s.flows, s.partitions);
    s.graph = build_network(s);
    return s;
}

NetworkGraph run_pipeline(const dl::FactStore& store, const RuleSet& rules, const nim::Catalog& catalog) {
    return run_stages(store, rules, catalog).graph;
}

}  // namespace netinfer::infer
