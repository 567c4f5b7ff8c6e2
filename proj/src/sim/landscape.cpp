#include "netinfer/sim/landscape.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace netinfer::sim {

namespace {

/// mt19937_64 is fully specified; the distributions below are written out so
/// that output does not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n).
    std::uint64_t uniform(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p;
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[uniform(v.size())]; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform(i)]);
    }

private:
    std::mt19937_64 engine_;
};

std::string padded(std::int64_t i, std::int64_t count) {
    std::string digits = std::to_string(i);
    std::size_t width = std::to_string(std::max<std::int64_t>(count - 1, 0)).size();
    return std::string(width - std::min(width, digits.size()), '0') + digits;
}

enum class FlowKind { Outgoing, Incoming, Both, HostLevel, GraphMerge, Runtime };

const std::vector<std::string> kProtocols{"HTTP", "IDoc", "RFC", "SOAP"};
const std::vector<std::string> kSystemKeys{"vendor", "version", "location", "owner"};
const std::vector<std::string> kFlowKeys{"adapter", "qos", "encoding"};

class Generator {
public:
    explicit Generator(const ScenarioConfig& c) : c_(c), rng_(c.rng_seed) {}

    Scenario run() {
        make_hosts();
        make_systems();
        make_flows();
        std::sort(out_.facts.begin(), out_.facts.end());
        out_.facts.erase(std::unique(out_.facts.begin(), out_.facts.end()), out_.facts.end());
        out_.truth.sort();
        return std::move(out_);
    }

private:
    void fact(const std::string& predicate, std::vector<std::string> args) {
        out_.facts.push_back(dl::make_fact(predicate, std::move(args)));
    }

    /// Reported ids of one entity; the first is the true id.
    std::vector<std::string> aliases(const std::string& id, const std::vector<std::string>& suffixes) {
        std::vector<std::string> ids{id};
        if (rng_.bernoulli(c_.duplication_rate)) {
            std::size_t extra = rng_.bernoulli(0.5) ? 2 : 1;
            for (std::size_t i = 0; i < extra; ++i) ids.push_back(id + suffixes[i]);
        }
        return ids;
    }

    /// Links the ids by a chain of witnesses in random order and direction.
    void chain(const std::string& predicate, std::vector<std::string> ids) {
        rng_.shuffle(ids);
        for (std::size_t i = 1; i < ids.size(); ++i) {
            if (rng_.bernoulli(0.5)) fact(predicate, {ids[i - 1], ids[i]});
            else fact(predicate, {ids[i], ids[i - 1]});
        }
    }

    void make_hosts() {
        for (std::int64_t k = 0; k < c_.n_hosts; ++k) {
            TrueHost h{"host_" + padded(k, c_.n_hosts), {}};
            h.aliases = aliases(h.id, {".corp.example", ".dc"});
            for (const auto& a : h.aliases) fact("host_disc", {a, "urn:host:" + a});
            chain("same_host_disc", h.aliases);
            std::sort(h.aliases.begin(), h.aliases.end());
            host_systems_.push_back(0);
            out_.truth.hosts.push_back(std::move(h));
        }
    }

    void make_systems() {
        std::int64_t total = c_.n_systems + c_.n_middlewares;
        for (std::int64_t i = 0; i < total; ++i) {
            bool middleware = i >= c_.n_systems;
            TrueSystem s;
            s.id = middleware ? "mw_" + padded(i - c_.n_systems, c_.n_middlewares) : "sys_" + padded(i, c_.n_systems);
            s.aliases = aliases(s.id, {"@pi", "@sld"});
            for (const auto& a : s.aliases) fact("system_disc", {a, "urn:sys:" + a});
            chain("same_sys_disc", s.aliases);
            if (c_.n_hosts > 0) {
                std::size_t h = rng_.uniform(c_.n_hosts);
                s.host = out_.truth.hosts[h].id;
                host_of_.push_back(h);
                ++host_systems_[h];
                fact("runs_on_disc", {rng_.pick(s.aliases), rng_.pick(out_.truth.hosts[h].aliases)});
                if (s.aliases.size() > 1 && rng_.bernoulli(0.5)) {
                    fact("runs_on_disc", {rng_.pick(s.aliases), rng_.pick(out_.truth.hosts[h].aliases)});
                }
            }
            for (const auto& key : kSystemKeys) {
                std::string value = key + "_" + std::to_string(rng_.uniform(8));
                s.attributes[key] = value;
                if (!rng_.bernoulli(c_.attr_loss_rate)) fact("attr_disc", {rng_.pick(s.aliases), key, value});
            }
            std::sort(s.aliases.begin(), s.aliases.end());
            out_.truth.systems.push_back(std::move(s));
        }
    }

    const std::string& alias(std::size_t system) { return rng_.pick(out_.truth.systems[system].aliases); }

    /// Attributes of one flow, emitted on `subject` unless lost.
    std::map<std::string, std::string> flow_attributes(const std::string& subject) {
        std::map<std::string, std::string> attrs;
        for (const auto& key : kFlowKeys) {
            std::string value = key + "_" + std::to_string(rng_.uniform(8));
            attrs[key] = value;
            if (!rng_.bernoulli(c_.attr_loss_rate)) fact("conf_attr_disc", {subject, key, value});
        }
        return attrs;
    }

    void configuration(const std::string& uri, const std::string& key, const std::string& protocol) {
        fact("conf_attr_disc", {uri, "protocol", protocol});
        fact("conf_attr_disc", {uri, "message_type", "mt_" + key});
        fact("conf_attr_disc", {uri, "interface", key});
    }

    void make_flows() {
        std::size_t n_sys = c_.n_systems;
        std::size_t total = c_.n_systems + c_.n_middlewares;
        std::int64_t routes = (n_sys >= 2 && c_.n_middlewares > 0) ? (c_.n_flows / 2 + 1) / 2 : 0;
        std::int64_t direct = c_.n_flows - 2 * routes;

        for (std::int64_t k = 0; k < routes; ++k) {
            std::size_t s = rng_.uniform(n_sys);
            std::size_t r = rng_.uniform(n_sys - 1);
            if (r >= s) ++r;
            std::size_t mw = n_sys + rng_.uniform(c_.n_middlewares);
            std::string uri = "route_" + padded(k, routes);
            fact("msg_flow_disc", {alias(s), alias(mw), uri});
            fact("msg_flow_disc", {alias(mw), alias(r), uri});
            auto attrs = flow_attributes(uri);
            const auto& sys = out_.truth.systems;
            out_.truth.flows.push_back({sys[s].id, sys[mw].id, uri, attrs});
            out_.truth.flows.push_back({sys[mw].id, sys[r].id, uri, attrs});
            out_.truth.iflows.push_back({sys[s].id, sys[r].id, sys[mw].id, uri});
        }

        for (std::int64_t f = 0; f < direct; ++f) {
            std::size_t s = rng_.uniform(total);
            std::size_t r = rng_.uniform(total - 1);
            if (r >= s) ++r;
            std::string key = "if_" + padded(f, direct);
            std::string out_cfg = "cfg/out/" + key;
            std::string in_cfg = "cfg/in/" + key;

            std::vector<FlowKind> kinds{FlowKind::Outgoing, FlowKind::Incoming, FlowKind::Both,
                                        FlowKind::GraphMerge, FlowKind::Runtime};
            if (c_.n_hosts > 0 && host_systems_[host_of_[r]] == 1) kinds.push_back(FlowKind::HostLevel);
            FlowKind kind = rng_.pick(kinds);
            const std::string& protocol = rng_.pick(kProtocols);

            std::string attr_subject = out_cfg;
            switch (kind) {
                case FlowKind::Outgoing:
                    fact("outgoing_disc", {alias(s), out_cfg});
                    fact("recv_disc", {out_cfg, alias(r)});
                    configuration(out_cfg, key, protocol);
                    break;
                case FlowKind::Incoming:
                    fact("incoming_disc", {alias(r), in_cfg});
                    fact("send_disc", {in_cfg, alias(s)});
                    configuration(in_cfg, key, protocol);
                    attr_subject = in_cfg;
                    break;
                case FlowKind::Both:
                    fact("outgoing_disc", {alias(s), out_cfg});
                    fact("recv_disc", {out_cfg, alias(r)});
                    fact("incoming_disc", {alias(r), in_cfg});
                    fact("send_disc", {in_cfg, alias(s)});
                    configuration(out_cfg, key, protocol);
                    configuration(in_cfg, key, protocol);
                    break;
                case FlowKind::HostLevel:
                    fact("outgoing_disc", {alias(s), out_cfg});
                    fact("recv_host_disc", {out_cfg, rng_.pick(out_.truth.hosts[host_of_[r]].aliases)});
                    configuration(out_cfg, key, protocol);
                    break;
                case FlowKind::GraphMerge:
                    fact("outgoing_disc", {alias(s), out_cfg});
                    fact("incoming_disc", {alias(r), in_cfg});
                    configuration(out_cfg, key, protocol);
                    configuration(in_cfg, key, protocol);
                    break;
                case FlowKind::Runtime:
                    fact("msg_flow_disc", {alias(s), alias(r), key});
                    attr_subject = key;
                    break;
            }
            auto attrs = flow_attributes(attr_subject);
            out_.truth.flows.push_back({out_.truth.systems[s].id, out_.truth.systems[r].id, key, attrs});
        }
    }

    const ScenarioConfig& c_;
    Rng rng_;
    Scenario out_;
    std::vector<std::size_t> host_of_;        // per system
    std::vector<std::size_t> host_systems_;   // per host
};

}  // namespace

void validate(const ScenarioConfig& c) {
    if (c.n_systems < 0 || c.n_hosts < 0 || c.n_middlewares < 0 || c.n_flows < 0) {
        throw InfeasibleConfig("counts must be non-negative");
    }
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(c.duplication_rate)) throw InfeasibleConfig("duplication rate must lie in [0,1]");
    if (!rate_ok(c.attr_loss_rate)) throw InfeasibleConfig("attribute loss rate must lie in [0,1]");
    std::int64_t total = c.n_systems + c.n_middlewares;
    if (c.n_flows > 0 && total < 2) throw InfeasibleConfig("flows need at least two systems");
    if (c.n_flows > total * total) {
        throw InfeasibleConfig(std::to_string(c.n_flows) + " flows exceed " + std::to_string(total) +
                               " systems squared");
    }
}

Scenario generate(const ScenarioConfig& config) {
    validate(config);
    return Generator(config).run();
}

// ---------------------------------------------------------------------------
// GroundTruth

std::vector<std::pair<std::string, std::string>> GroundTruth::groups() const {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& f : flows) {
        auto [a, b] = std::minmax(f.sender, f.receiver);
        pairs.emplace(a, b);
    }
    return {pairs.begin(), pairs.end()};
}

std::map<std::string, std::string> GroundTruth::system_aliases() const {
    std::map<std::string, std::string> out;
    for (const auto& s : systems) {
        for (const auto& a : s.aliases) out.emplace(a, s.id);
    }
    return out;
}

std::map<std::string, std::string> GroundTruth::host_aliases() const {
    std::map<std::string, std::string> out;
    for (const auto& h : hosts) {
        for (const auto& a : h.aliases) out.emplace(a, h.id);
    }
    return out;
}

std::size_t GroundTruth::attribute_count() const {
    std::size_t n = 0;
    for (const auto& s : systems) n += s.attributes.size();
    for (const auto& f : flows) n += f.attributes.size();
    return n;
}

void GroundTruth::merge(const GroundTruth& other) {
    systems.insert(systems.end(), other.systems.begin(), other.systems.end());
    hosts.insert(hosts.end(), other.hosts.begin(), other.hosts.end());
    parties.insert(parties.end(), other.parties.begin(), other.parties.end());
    flows.insert(flows.end(), other.flows.begin(), other.flows.end());
    iflows.insert(iflows.end(), other.iflows.begin(), other.iflows.end());
    sort();
}

void GroundTruth::sort() {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(systems.begin(), systems.end(), by_id);
    std::sort(hosts.begin(), hosts.end(), by_id);
    std::sort(parties.begin(), parties.end(), by_id);
    std::sort(flows.begin(), flows.end(), [](const TrueFlow& a, const TrueFlow& b) {
        return std::tie(a.sender, a.receiver, a.key) < std::tie(b.sender, b.receiver, b.key);
    });
    std::sort(iflows.begin(), iflows.end());
}

Scenario BundledFixtures::combined() const {
    Scenario s = hxp;
    s.facts.insert(s.facts.end(), h73.facts.begin(), h73.facts.end());
    s.truth.merge(h73.truth);
    return s;
}

// ---------------------------------------------------------------------------
// Scoring

double ScoreRow::percentage() const {
    return expected == 0 ? 100.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(expected);
}

std::vector<const ScoreRow*> ScoreReport::rows() const {
    return {&systems, &system_attributes, &parties, &groups, &flows, &flow_attributes};
}

std::string ScoreReport::to_text() const {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-44s %8s %8s %8s %10s %8s\n", "category", "expected", "found", "correct",
                  "unexpected", "percent");
    out += line;
    for (const ScoreRow* r : rows()) {
        std::snprintf(line, sizeof line, "%-44s %8zu %8zu %8zu %10zu %7.1f%%\n", r->label.c_str(), r->expected,
                      r->found, r->correct, r->unexpected, r->percentage());
        out += line;
    }
    return out;
}

namespace {

void score_attributes(ScoreRow& row, const std::map<std::string, std::string>& expected,
                      const std::map<std::string, std::string>* actual) {
    row.expected += expected.size();
    if (!actual) return;
    for (const auto& [key, value] : expected) {
        auto it = actual->find(key);
        if (it == actual->end()) continue;
        ++row.found;
        if (it->second == value) ++row.correct;
    }
}

}  // namespace

ScoreReport score(const infer::NetworkGraph& graph, const GroundTruth& truth) {
    ScoreReport report;
    auto alias = truth.system_aliases();
    auto true_id = [&](const std::string& raw) -> std::optional<std::string> {
        auto it = alias.find(raw);
        if (it == alias.end()) return std::nullopt;
        return it->second;
    };

    // Systems: a node matches when its member set is exactly the alias set.
    std::map<std::vector<std::string>, const infer::SystemNode*> by_members;
    for (const auto& n : graph.systems) by_members.emplace(n.members, &n);
    std::set<const infer::SystemNode*> matched_nodes;
    report.systems.expected = truth.systems.size();
    for (const auto& s : truth.systems) {
        auto it = by_members.find(s.aliases);
        const infer::SystemNode* node = it == by_members.end() ? nullptr : it->second;
        if (node) {
            ++report.systems.found;
            ++report.systems.correct;
            matched_nodes.insert(node);
        }
        score_attributes(report.system_attributes, s.attributes, node ? &node->attributes : nullptr);
    }
    report.systems.unexpected = graph.systems.size() - matched_nodes.size();

    // Parties: same id and the same member systems.
    report.parties.expected = truth.parties.size();
    std::set<std::string> matched_parties;
    for (const auto& p : truth.parties) {
        for (const auto& out : graph.parties) {
            if (out.id != p.id) continue;
            std::vector<std::string> members;
            for (const auto& sys : out.systems) members.push_back(true_id(sys).value_or("?" + sys));
            std::sort(members.begin(), members.end());
            if (members == p.systems) {
                ++report.parties.found;
                ++report.parties.correct;
                matched_parties.insert(p.id);
            }
        }
    }
    report.parties.unexpected = graph.parties.size() - matched_parties.size();

    // Groups and flows, with output ids mapped to true ids.
    using FlowKey = std::tuple<std::string, std::string, std::string>;
    std::map<FlowKey, const infer::MessageFlowEdge*> out_flows;
    std::set<std::pair<std::string, std::string>> out_groups;
    std::size_t total_out = 0;
    for (const auto& g : graph.groups) {
        auto a = true_id(g.first), b = true_id(g.second);
        if (a && b) out_groups.insert(std::minmax(*a, *b));
        for (const auto& e : g.flows) {
            ++total_out;
            auto s = true_id(e.sender), r = true_id(e.receiver);
            if (s && r) out_flows.emplace(FlowKey{*s, *r, e.key}, &e);
        }
    }

    auto expected_groups = truth.groups();
    report.groups.expected = expected_groups.size();
    for (const auto& g : expected_groups) {
        if (out_groups.contains(g)) ++report.groups.found;
    }
    report.groups.correct = report.groups.found;
    report.groups.unexpected = graph.groups.size() - report.groups.found;

    report.flows.expected = truth.flows.size();
    for (const auto& f : truth.flows) {
        auto it = out_flows.find(FlowKey{f.sender, f.receiver, f.key});
        const infer::MessageFlowEdge* edge = it == out_flows.end() ? nullptr : it->second;
        if (edge) ++report.flows.found;
        score_attributes(report.flow_attributes, f.attributes, edge ? &edge->attributes : nullptr);
    }
    report.flows.correct = report.flows.found;
    report.flows.unexpected = total_out - report.flows.found;
    return report;
}

}  // namespace netinfer::sim
