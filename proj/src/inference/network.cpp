#include "netinfer/inference/network.hpp"

#include <algorithm>

namespace netinfer::infer {

const char* to_string(Direction d) { return d == Direction::Incoming ? "incoming" : "outgoing"; }

const char* to_string(Evidence e) {
    switch (e) {
        case Evidence::OutgoingMatch: return "outgoing_match";
        case Evidence::IncomingMatch: return "incoming_match";
        case Evidence::GraphMerge: return "graph_merge";
        case Evidence::Declared: return "declared";
    }
    return "?";
}

std::optional<Evidence> evidence_from_string(const std::string& s) {
    for (Evidence e : {Evidence::OutgoingMatch, Evidence::IncomingMatch, Evidence::GraphMerge, Evidence::Declared}) {
        if (s == to_string(e)) return e;
    }
    return std::nullopt;
}

const char* to_string(InconsistencyKind k) {
    switch (k) {
        case InconsistencyKind::OwnerConflict: return "owner_conflict";
        case InconsistencyKind::MultipleHosts: return "multiple_hosts";
        case InconsistencyKind::SelfEdgeSuppressed: return "self_edge_suppressed";
        case InconsistencyKind::DanglingReference: return "dangling_reference";
        case InconsistencyKind::AmbiguousHostFlow: return "ambiguous_host_flow";
        case InconsistencyKind::AttributeConflict: return "attribute_conflict";
    }
    return "?";
}

std::optional<InconsistencyKind> inconsistency_from_string(const std::string& s) {
    for (auto k : {InconsistencyKind::OwnerConflict, InconsistencyKind::MultipleHosts,
                   InconsistencyKind::SelfEdgeSuppressed, InconsistencyKind::DanglingReference,
                   InconsistencyKind::AmbiguousHostFlow, InconsistencyKind::AttributeConflict}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

const SystemNode* NetworkGraph::system(const std::string& id) const {
    auto it = std::lower_bound(systems.begin(), systems.end(), id,
                               [](const SystemNode& n, const std::string& v) { return n.id < v; });
    if (it != systems.end() && it->id == id) return &*it;
    for (const auto& n : systems) {
        if (std::binary_search(n.members.begin(), n.members.end(), id)) return &n;
    }
    return nullptr;
}

const TopLevelConnection* NetworkGraph::group(const std::string& a, const std::string& b) const {
    const auto& [first, second] = std::minmax(a, b);
    for (const auto& g : groups) {
        if (g.first == first && g.second == second) return &g;
    }
    return nullptr;
}

std::vector<MessageFlowEdge> NetworkGraph::flows() const {
    std::vector<MessageFlowEdge> out;
    for (const auto& g : groups) out.insert(out.end(), g.flows.begin(), g.flows.end());
    return out;
}

}  // namespace netinfer::infer
