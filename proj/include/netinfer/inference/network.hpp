#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace netinfer::infer {

enum class Direction { Incoming, Outgoing };

const char* to_string(Direction d);

/// An incoming or outgoing call configuration and the system that owns it.
struct CallEndpoint {
    std::string config_uri;
    std::string owner;  // canonical sys_id
    Direction direction = Direction::Outgoing;
    std::optional<std::string> protocol;
    std::optional<std::string> message_type;
    std::optional<std::string> interface;
    bool linked = false;

    auto operator<=>(const CallEndpoint&) const = default;
    bool operator==(const CallEndpoint&) const = default;
};

/// Where a message flow was found.
enum class Evidence { OutgoingMatch, IncomingMatch, GraphMerge, Declared };

const char* to_string(Evidence e);
std::optional<Evidence> evidence_from_string(const std::string& s);

/// A directed flow between canonical systems. `key` identifies the flow within
/// its pair: the interface name of its configurations when known, otherwise
/// the configuration or flow uri.
struct MessageFlowEdge {
    std::string sender;
    std::string receiver;
    std::string key;
    std::vector<std::string> via;  // configuration and flow uris, sorted
    std::set<Evidence> evidence;
    std::map<std::string, std::string> attributes;

    bool same_flow(const MessageFlowEdge& o) const {
        return sender == o.sender && receiver == o.receiver && key == o.key;
    }
    bool operator==(const MessageFlowEdge&) const = default;
};

/// Every flow between one unordered pair of systems; first < second.
struct TopLevelConnection {
    std::string first;
    std::string second;
    std::vector<MessageFlowEdge> flows;

    bool operator==(const TopLevelConnection&) const = default;
};

struct IFlow {
    std::string sender;
    std::string receiver;
    std::string middleware;
    std::string uri;

    auto operator<=>(const IFlow&) const = default;
    bool operator==(const IFlow&) const = default;
};

/// Host-level flow that could not be attributed to a single receiving system.
struct HostFlow {
    std::string host_sender;
    std::string host_receiver;
    std::string sender;  // canonical sys_id
    std::string config_uri;

    auto operator<=>(const HostFlow&) const = default;
    bool operator==(const HostFlow&) const = default;
};

struct SystemNode {
    std::string id;                    // canonical representative
    std::vector<std::string> members;  // every equivalent id, sorted
    std::map<std::string, std::string> attributes;
    std::vector<std::string> hosts;    // canonical host ids it runs on

    bool operator==(const SystemNode&) const = default;
};

struct HostNode {
    std::string id;
    std::vector<std::string> members;
    std::map<std::string, std::string> attributes;

    bool operator==(const HostNode&) const = default;
};

struct PartyNode {
    std::string id;
    std::vector<std::string> uris;
    std::map<std::string, std::string> attributes;
    std::vector<std::string> systems;  // systems with attribute party=<id>

    bool operator==(const PartyNode&) const = default;
};

enum class InconsistencyKind {
    OwnerConflict,
    MultipleHosts,
    SelfEdgeSuppressed,
    DanglingReference,
    AmbiguousHostFlow,
    AttributeConflict,
};

const char* to_string(InconsistencyKind k);
std::optional<InconsistencyKind> inconsistency_from_string(const std::string& s);

struct Inconsistency {
    InconsistencyKind kind;
    std::string subject;
    std::string message;

    auto operator<=>(const Inconsistency&) const = default;
    bool operator==(const Inconsistency&) const = default;
};

/// Collected anomalies; sorted and deduplicated on assembly.
using Report = std::vector<Inconsistency>;

struct NetworkGraph {
    std::vector<SystemNode> systems;
    std::vector<HostNode> hosts;
    std::vector<PartyNode> parties;
    std::vector<TopLevelConnection> groups;
    std::vector<IFlow> iflows;
    std::vector<CallEndpoint> unlinked;
    std::vector<HostFlow> host_flows;
    std::vector<Inconsistency> inconsistencies;

    const SystemNode* system(const std::string& id) const;
    const TopLevelConnection* group(const std::string& a, const std::string& b) const;
    /// Flows of every group, in group order.
    std::vector<MessageFlowEdge> flows() const;

    bool operator==(const NetworkGraph&) const = default;
};

}  // namespace netinfer::infer
