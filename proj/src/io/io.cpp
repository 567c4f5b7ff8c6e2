#include "netinfer/io/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netinfer/datalog/parser.hpp"

namespace netinfer::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("error writing " + path.string());
}

std::vector<dl::Literal> read_fact_files(const std::vector<std::filesystem::path>& paths) {
    std::vector<dl::Literal> facts;
    for (const auto& p : paths) {
        std::string text = read_file(p);
        try {
            auto part = dl::parse_fact_file(text);
            facts.insert(facts.end(), part.begin(), part.end());
        } catch (const dl::ParseError& e) {
            throw dl::ParseError(e.line(), e.column(), p.string() + ": " + e.detail());
        }
    }
    return facts;
}

std::string format_facts(const std::vector<dl::Literal>& facts) {
    std::string out;
    for (const auto& f : facts) {
        out += dl::format_literal(f);
        out += ".\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json endpoint_json(const infer::CallEndpoint& e) {
    return {{"config_uri", e.config_uri},     {"owner", e.owner},
            {"direction", infer::to_string(e.direction)},
            {"protocol", optional_string(e.protocol)},
            {"message_type", optional_string(e.message_type)},
            {"interface", optional_string(e.interface)},
            {"linked", e.linked}};
}

json flow_json(const infer::MessageFlowEdge& e) {
    json evidence = json::array();
    for (auto ev : e.evidence) evidence.push_back(infer::to_string(ev));
    return {{"sender", e.sender}, {"receiver", e.receiver}, {"key", e.key},
            {"via", e.via},       {"evidence", evidence},   {"attributes", e.attributes}};
}

json iflow_json(const infer::IFlow& i) {
    return {{"sender", i.sender}, {"receiver", i.receiver}, {"middleware", i.middleware}, {"uri", i.uri}};
}

template <typename T>
T get(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

const json& array(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
        throw FormatError(std::string("field '") + key + "' must be an array");
    }
    return j.at(key);
}

std::optional<std::string> get_optional(const json& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    if (j.at(key).is_null()) return std::nullopt;
    return get<std::string>(j, key);
}

using StringMap = std::map<std::string, std::string>;
using Strings = std::vector<std::string>;

infer::CallEndpoint endpoint_from(const json& j) {
    infer::CallEndpoint e;
    e.config_uri = get<std::string>(j, "config_uri");
    e.owner = get<std::string>(j, "owner");
    auto dir = get<std::string>(j, "direction");
    if (dir == "incoming") e.direction = infer::Direction::Incoming;
    else if (dir == "outgoing") e.direction = infer::Direction::Outgoing;
    else throw FormatError("unknown direction '" + dir + "'");
    e.protocol = get_optional(j, "protocol");
    e.message_type = get_optional(j, "message_type");
    e.interface = get_optional(j, "interface");
    e.linked = get<bool>(j, "linked");
    return e;
}

infer::MessageFlowEdge flow_from(const json& j) {
    infer::MessageFlowEdge e;
    e.sender = get<std::string>(j, "sender");
    e.receiver = get<std::string>(j, "receiver");
    e.key = get<std::string>(j, "key");
    e.via = get<Strings>(j, "via");
    for (const auto& s : get<Strings>(j, "evidence")) {
        auto ev = infer::evidence_from_string(s);
        if (!ev) throw FormatError("unknown evidence '" + s + "'");
        e.evidence.insert(*ev);
    }
    e.attributes = get<StringMap>(j, "attributes");
    return e;
}

infer::IFlow iflow_from(const json& j) {
    return {get<std::string>(j, "sender"), get<std::string>(j, "receiver"), get<std::string>(j, "middleware"),
            get<std::string>(j, "uri")};
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

void check_version(const json& doc) {
    auto v = get<std::string>(doc, "schema_version");
    if (v != kSchemaVersion) throw FormatError("unsupported schema_version '" + v + "'");
}

}  // namespace

std::string export_network(const infer::NetworkGraph& g) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json systems = json::array();
    for (const auto& s : g.systems) {
        systems.push_back({{"id", s.id}, {"members", s.members}, {"attributes", s.attributes}, {"hosts", s.hosts}});
    }
    doc["systems"] = systems;
    json hosts = json::array();
    for (const auto& h : g.hosts) {
        hosts.push_back({{"id", h.id}, {"members", h.members}, {"attributes", h.attributes}});
    }
    doc["hosts"] = hosts;
    json parties = json::array();
    for (const auto& p : g.parties) {
        parties.push_back({{"id", p.id}, {"uris", p.uris}, {"attributes", p.attributes}, {"systems", p.systems}});
    }
    doc["parties"] = parties;
    json groups = json::array();
    for (const auto& grp : g.groups) {
        json flows = json::array();
        for (const auto& f : grp.flows) flows.push_back(flow_json(f));
        groups.push_back({{"first", grp.first}, {"second", grp.second}, {"flows", flows}});
    }
    doc["groups"] = groups;
    json iflows = json::array();
    for (const auto& i : g.iflows) iflows.push_back(iflow_json(i));
    doc["iflows"] = iflows;
    json unlinked = json::array();
    for (const auto& e : g.unlinked) unlinked.push_back(endpoint_json(e));
    doc["unlinked"] = unlinked;
    json host_flows = json::array();
    for (const auto& h : g.host_flows) {
        host_flows.push_back({{"host_sender", h.host_sender},
                              {"host_receiver", h.host_receiver},
                              {"sender", h.sender},
                              {"config_uri", h.config_uri}});
    }
    doc["host_flows"] = host_flows;
    json issues = json::array();
    for (const auto& i : g.inconsistencies) {
        issues.push_back({{"kind", infer::to_string(i.kind)}, {"subject", i.subject}, {"message", i.message}});
    }
    doc["inconsistencies"] = issues;
    return doc.dump(2) + "\n";
}

infer::NetworkGraph import_network(const std::string& text) {
    json doc = parse(text);
    check_version(doc);
    infer::NetworkGraph g;
    for (const auto& s : array(doc, "systems")) {
        g.systems.push_back({get<std::string>(s, "id"), get<Strings>(s, "members"), get<StringMap>(s, "attributes"),
                             get<Strings>(s, "hosts")});
    }
    for (const auto& h : array(doc, "hosts")) {
        g.hosts.push_back({get<std::string>(h, "id"), get<Strings>(h, "members"), get<StringMap>(h, "attributes")});
    }
    for (const auto& p : array(doc, "parties")) {
        g.parties.push_back({get<std::string>(p, "id"), get<Strings>(p, "uris"), get<StringMap>(p, "attributes"),
                             get<Strings>(p, "systems")});
    }
    for (const auto& grp : array(doc, "groups")) {
        infer::TopLevelConnection c{get<std::string>(grp, "first"), get<std::string>(grp, "second"), {}};
        for (const auto& f : array(grp, "flows")) c.flows.push_back(flow_from(f));
        g.groups.push_back(std::move(c));
    }
    for (const auto& i : array(doc, "iflows")) g.iflows.push_back(iflow_from(i));
    for (const auto& e : array(doc, "unlinked")) g.unlinked.push_back(endpoint_from(e));
    for (const auto& h : array(doc, "host_flows")) {
        g.host_flows.push_back({get<std::string>(h, "host_sender"), get<std::string>(h, "host_receiver"),
                                get<std::string>(h, "sender"), get<std::string>(h, "config_uri")});
    }
    for (const auto& i : array(doc, "inconsistencies")) {
        auto kind = get<std::string>(i, "kind");
        auto k = infer::inconsistency_from_string(kind);
        if (!k) throw FormatError("unknown inconsistency kind '" + kind + "'");
        g.inconsistencies.push_back({*k, get<std::string>(i, "subject"), get<std::string>(i, "message")});
    }
    return g;
}

std::string export_truth(const sim::GroundTruth& t) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json systems = json::array();
    for (const auto& s : t.systems) {
        systems.push_back({{"id", s.id},
                           {"aliases", s.aliases},
                           {"attributes", s.attributes},
                           {"host", optional_string(s.host)}});
    }
    doc["systems"] = systems;
    json hosts = json::array();
    for (const auto& h : t.hosts) hosts.push_back({{"id", h.id}, {"aliases", h.aliases}});
    doc["hosts"] = hosts;
    json parties = json::array();
    for (const auto& p : t.parties) parties.push_back({{"id", p.id}, {"systems", p.systems}});
    doc["parties"] = parties;
    json flows = json::array();
    for (const auto& f : t.flows) {
        flows.push_back(
            {{"sender", f.sender}, {"receiver", f.receiver}, {"key", f.key}, {"attributes", f.attributes}});
    }
    doc["flows"] = flows;
    json iflows = json::array();
    for (const auto& i : t.iflows) iflows.push_back(iflow_json(i));
    doc["iflows"] = iflows;
    return doc.dump(2) + "\n";
}

sim::GroundTruth import_truth(const std::string& text) {
    json doc = parse(text);
    check_version(doc);
    sim::GroundTruth t;
    for (const auto& s : array(doc, "systems")) {
        t.systems.push_back({get<std::string>(s, "id"), get<Strings>(s, "aliases"), get<StringMap>(s, "attributes"),
                             get_optional(s, "host")});
    }
    for (const auto& h : array(doc, "hosts")) {
        t.hosts.push_back({get<std::string>(h, "id"), get<Strings>(h, "aliases")});
    }
    for (const auto& p : array(doc, "parties")) {
        t.parties.push_back({get<std::string>(p, "id"), get<Strings>(p, "systems")});
    }
    for (const auto& f : array(doc, "flows")) {
        t.flows.push_back({get<std::string>(f, "sender"), get<std::string>(f, "receiver"), get<std::string>(f, "key"),
                           get<StringMap>(f, "attributes")});
    }
    for (const auto& i : array(doc, "iflows")) t.iflows.push_back(iflow_from(i));
    return t;
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_id(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_dot(const infer::NetworkGraph& g) {
    std::ostringstream out;
    out << "digraph network {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box];\n";
    for (const auto& s : g.systems) {
        std::string label = s.id;
        if (s.members.size() > 1) label += "\n(" + std::to_string(s.members.size()) + " ids)";
        out << "  " << dot_id(s.id) << " [label=" << dot_id(label) << "];\n";
    }
    for (const auto& h : g.hosts) {
        out << "  " << dot_id("host:" + h.id) << " [label=" << dot_id(h.id) << ", shape=ellipse, style=dashed];\n";
    }
    for (const auto& s : g.systems) {
        for (const auto& h : s.hosts) {
            out << "  " << dot_id(s.id) << " -> " << dot_id("host:" + h)
                << " [style=dashed, arrowhead=none, label=\"runs_on\"];\n";
        }
    }
    for (const auto& grp : g.groups) {
        bool forward = false, backward = false;
        std::string label;
        for (const auto& f : grp.flows) {
            (f.sender == grp.first ? forward : backward) = true;
            if (!label.empty()) label += "\n";
            label += f.key;
        }
        std::string from = grp.first, to = grp.second;
        const char* dir = "forward";
        if (forward && backward) dir = "both";
        else if (backward) std::swap(from, to);
        out << "  " << dot_id(from) << " -> " << dot_id(to) << " [label=" << dot_id(label) << ", dir=" << dir
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Report

std::string format_report(const infer::NetworkGraph& g, const sim::ScoreReport* score) {
    std::ostringstream out;
    std::size_t flows = 0;
    for (const auto& grp : g.groups) flows += grp.flows.size();
    out << "systems: " << g.systems.size() << "\n";
    out << "hosts: " << g.hosts.size() << "\n";
    out << "parties: " << g.parties.size() << "\n";
    out << "top-level connection groups: " << g.groups.size() << "\n";
    out << "message flows: " << flows << "\n";
    out << "iflows: " << g.iflows.size() << "\n";
    out << "unlinked configurations: " << g.unlinked.size() << "\n";
    out << "inconsistencies: " << g.inconsistencies.size() << "\n";

    out << "\n[systems]\n";
    for (const auto& s : g.systems) {
        out << s.id;
        if (s.members.size() > 1) {
            out << " =";
            for (const auto& m : s.members) out << " " << m;
        }
        if (!s.hosts.empty()) {
            out << " on";
            for (const auto& h : s.hosts) out << " " << h;
        }
        out << "\n";
    }
    out << "\n[groups]\n";
    for (const auto& grp : g.groups) {
        out << grp.first << " <-> " << grp.second << " (" << grp.flows.size() << ")\n";
        for (const auto& f : grp.flows) {
            out << "  " << f.sender << " -> " << f.receiver << " " << f.key << " [";
            bool first = true;
            for (auto ev : f.evidence) {
                out << (first ? "" : ", ") << infer::to_string(ev);
                first = false;
            }
            out << "]\n";
        }
    }
    if (!g.iflows.empty()) {
        out << "\n[iflows]\n";
        for (const auto& i : g.iflows) {
            out << i.sender << " -> " << i.middleware << " -> " << i.receiver << " " << i.uri << "\n";
        }
    }
    if (!g.unlinked.empty()) {
        out << "\n[unlinked]\n";
        for (const auto& e : g.unlinked) {
            out << infer::to_string(e.direction) << " " << e.config_uri << " owned by " << e.owner << "\n";
        }
    }
    if (!g.inconsistencies.empty()) {
        out << "\n[inconsistencies]\n";
        for (const auto& i : g.inconsistencies) {
            out << infer::to_string(i.kind) << " " << i.subject << ": " << i.message << "\n";
        }
    }
    if (score) out << "\n[score]\n" << score->to_text();
    return out.str();
}

}  // namespace netinfer::io
