#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netinfer/datalog/ast.hpp"
#include "netinfer/datalog/fact_store.hpp"
#include "netinfer/inference/network.hpp"
#include "netinfer/inference/partition.hpp"
#include "netinfer/nim/schema.hpp"

namespace netinfer::infer {

/// The inference programs. They are data: the bundled copies are compiled in
/// and any of them can be replaced from a directory at runtime.
struct RuleSet {
    static constexpr const char* kEquivalenceFile = "step1_equivalence.dl";
    static constexpr const char* kOutgoingFile = "step3_outgoing.dl";
    static constexpr const char* kIncomingFile = "step4_incoming.dl";
    static constexpr const char* kIFlowFile = "step6_iflows.dl";

    dl::Program equivalence;
    dl::Program outgoing;
    dl::Program incoming;
    dl::Program iflows;

    static const RuleSet& bundled();
    /// Bundled source text of one of the files above; empty if unknown.
    static std::string bundled_source(const std::string& file);
    /// Loads each file from `dir` if present, otherwise the bundled copy.
    static RuleSet load(const std::filesystem::path& dir);

    /// Outgoing, incoming and iflow programs combined.
    dl::Program flow_program() const;
    /// Every rule, for schema checks.
    dl::Program all() const;
};

struct Partitions {
    Partition systems{EntityKind::System};
    Partition hosts{EntityKind::Host};
};

/// Builds a store from raw input facts: discovered facts as one snapshot, then
/// `_user` facts with their lifted `_disc` forms as a user snapshot.
dl::FactStore make_store(const std::vector<dl::Literal>& facts, const nim::Catalog& catalog = nim::Catalog::standard());

/// Runs the equivalence rules over `store`.
dl::FactStore evaluate_equivalences(const dl::FactStore& store, const RuleSet& rules = RuleSet::bundled());

/// Step 1. `evaluated` must hold the output of evaluate_equivalences. Every id
/// in a sys_id / host_id position of a live fact gets a class.
Partitions step1_equivalences(const dl::FactStore& evaluated, const nim::Catalog& catalog = nim::Catalog::standard());

/// Copy of the live base facts with sys_id and host_id arguments replaced by
/// their representatives. Origins are kept; derived facts are dropped.
dl::FactStore canonicalize(const dl::FactStore& store, const Partitions& partitions,
                           const nim::Catalog& catalog = nim::Catalog::standard());

/// Runs the flow and iflow rules over a canonical store.
dl::FactStore evaluate_flows(const dl::FactStore& canonical, const RuleSet& rules = RuleSet::bundled());

/// Step 2: one endpoint per (direction, config uri), owner canonicalized.
std::vector<CallEndpoint> step2_endpoints(const dl::FactStore& store, const Partitions& partitions, Report& report);

struct OutgoingFlows {
    std::vector<MessageFlowEdge> edges;
    std::vector<HostFlow> host_flows;  // not attributable to one receiving system
};

/// Step 3, over the output of evaluate_flows.
OutgoingFlows step3_flows_outgoing(const dl::FactStore& flows, const Partitions& partitions, Report& report);

/// Step 4, over the output of evaluate_flows.
std::vector<MessageFlowEdge> step4_flows_incoming(const dl::FactStore& flows, const Partitions& partitions,
                                                  Report& report);

/// Flows asserted directly by msg_flow_disc facts. Reads the raw store so that
/// explicit self-flows can be told apart from ones produced by equivalence.
std::vector<MessageFlowEdge> declared_flows(const dl::FactStore& raw, const Partitions& partitions, Report& report);

/// Whether an unmatched outgoing endpoint may be joined to an unmatched
/// incoming one: equal, non-null protocol and message type.
bool compatible(const CallEndpoint& outgoing, const CallEndpoint& incoming);

struct MergeResult {
    std::vector<MessageFlowEdge> flows;  // sorted by (sender, receiver, key)
    std::vector<CallEndpoint> endpoints;  // with linked set
    std::vector<CallEndpoint> unlinked;
};

/// Step 5: unify duplicate edges, join unmatched compatible endpoints, and
/// mark the endpoints every edge uses as linked.
MergeResult step5_merge(const std::vector<CallEndpoint>& endpoints, const std::vector<MessageFlowEdge>& flows3,
                        const std::vector<MessageFlowEdge>& flows4,
                        const std::vector<MessageFlowEdge>& declared = {});

/// Step 6, over the output of evaluate_flows: iflows with pairwise distinct
/// canonical sender, receiver and middleware.
std::vector<IFlow> step6_iflows(const dl::FactStore& flows, const Partitions& partitions);

/// Groups flows by unordered system pair.
std::vector<TopLevelConnection> group_top_level(const std::vector<MessageFlowEdge>& flows);

/// Everything the pipeline computed, for inspection.
struct PipelineStages {
    dl::FactStore equivalences;
    Partitions partitions;
    dl::FactStore canonical;
    dl::FactStore flows;
    std::vector<CallEndpoint> endpoints;
    OutgoingFlows outgoing;
    std::vector<MessageFlowEdge> incoming;
    std::vector<MessageFlowEdge> declared;
    MergeResult merged;
    std::vector<IFlow> iflows;
    Report report;
    NetworkGraph graph;
};

/// Assembles nodes with merged attributes and host references, groups, iflows
/// and unlinked endpoints from the earlier stages.
NetworkGraph build_network(const PipelineStages& stages);

PipelineStages run_stages(const dl::FactStore& store, const RuleSet& rules = RuleSet::bundled(),
                          const nim::Catalog& catalog = nim::Catalog::standard());

/// Steps 1-6, grouping and assembly. A pure function of the store contents.
NetworkGraph run_pipeline(const dl::FactStore& store, const RuleSet& rules = RuleSet::bundled(),
                          const nim::Catalog& catalog = nim::Catalog::standard());

}  // namespace netinfer::infer
