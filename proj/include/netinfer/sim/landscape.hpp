#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netinfer/datalog/ast.hpp"
#include "netinfer/inference/network.hpp"

namespace netinfer::sim {

struct ScenarioConfig {
    std::int64_t n_systems = 0;
    std::int64_t n_hosts = 0;
    std::int64_t n_middlewares = 0;
    std::int64_t n_flows = 0;
    double duplication_rate = 0.0;  // probability a system or host is reported under 2+ ids
    double attr_loss_rate = 0.0;    // probability an attribute is dropped
    std::uint64_t rng_seed = 0;
};

/// Invalid or unsatisfiable configuration.
class InfeasibleConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InfeasibleConfig unless counts are non-negative, rates lie in [0,1]
/// and the flows fit: at least two systems when there are flows, and no more
/// flows than systems squared.
void validate(const ScenarioConfig& config);

struct TrueSystem {
    std::string id;
    std::vector<std::string> aliases;  // raw ids, sorted; includes id
    std::map<std::string, std::string> attributes;
    std::optional<std::string> host;   // true host id

    bool operator==(const TrueSystem&) const = default;
};

struct TrueHost {
    std::string id;
    std::vector<std::string> aliases;

    bool operator==(const TrueHost&) const = default;
};

struct TrueParty {
    std::string id;
    std::vector<std::string> systems;  // true system ids, sorted

    bool operator==(const TrueParty&) const = default;
};

struct TrueFlow {
    std::string sender;
    std::string receiver;
    std::string key;
    std::map<std::string, std::string> attributes;

    bool operator==(const TrueFlow&) const = default;
};

/// The network a fact set was generated from. Ids are true ids; aliases map
/// them to the raw ids that occur in the facts.
struct GroundTruth {
    std::vector<TrueSystem> systems;
    std::vector<TrueHost> hosts;
    std::vector<TrueParty> parties;
    std::vector<TrueFlow> flows;
    std::vector<infer::IFlow> iflows;

    /// Unordered system pairs with at least one flow; first < second, sorted.
    std::vector<std::pair<std::string, std::string>> groups() const;
    /// Raw system id -> true system id.
    std::map<std::string, std::string> system_aliases() const;
    /// Raw host id -> true host id.
    std::map<std::string, std::string> host_aliases() const;
    std::size_t attribute_count() const;

    /// Appends another truth with disjoint ids and sorts everything.
    void merge(const GroundTruth& other);
    void sort();

    bool operator==(const GroundTruth&) const = default;
};

struct Scenario {
    std::vector<dl::Literal> facts;
    GroundTruth truth;
};

/// Random landscape fragmented into raw facts. Deterministic in the config.
Scenario generate(const ScenarioConfig& config);

/// The two hand-authored middleware landscapes.
struct BundledFixtures {
    Scenario hxp;
    Scenario h73;

    /// Both fact sets and truths combined.
    Scenario combined() const;
};

BundledFixtures build_fixtures();

struct ScoreRow {
    std::string label;
    std::size_t expected = 0;
    std::size_t found = 0;       // expected items located in the output
    std::size_t correct = 0;     // located and exactly equal
    std::size_t unexpected = 0;  // output items matching nothing expected

    /// correct / expected in percent; 100 when nothing is expected.
    double percentage() const;
    bool operator==(const ScoreRow&) const = default;
};

struct ScoreReport {
    ScoreRow systems{"Found expected Systems"};
    ScoreRow system_attributes{"Correct System Attributes"};
    ScoreRow parties{"Found expected Parties"};
    ScoreRow groups{"Found Expected Top-Level Connection Groups"};
    ScoreRow flows{"Found Expected MessageFlows"};
    ScoreRow flow_attributes{"Correct MessageFlow Attributes"};

    std::vector<const ScoreRow*> rows() const;
    /// Fixed-width table, one line per row.
    std::string to_text() const;
};

/// Exact-match scoring after mapping output ids through the alias sets.
ScoreReport score(const infer::NetworkGraph& graph, const GroundTruth& truth);

}  // namespace netinfer::sim
