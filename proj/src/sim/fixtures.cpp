#include <algorithm>

#include "netinfer/sim/landscape.hpp"

namespace netinfer::sim {

namespace {

class FixtureBuilder {
public:
    void fact(const std::string& predicate, std::vector<std::string> args) {
        s_.facts.push_back(dl::make_fact(predicate, std::move(args)));
    }

    /// A system reported under every id in `ids`; ids[0] is the true id.
    /// Consecutive ids are linked by same_sys_disc.
    void system(std::vector<std::string> ids, std::map<std::string, std::string> attrs) {
        for (const auto& id : ids) fact("system_disc", {id, "urn:sys:" + id});
        for (std::size_t i = 1; i < ids.size(); ++i) fact("same_sys_disc", {ids[i - 1], ids[i]});
        std::size_t n = 0;
        for (const auto& [k, v] : attrs) fact("attr_disc", {ids[n++ % ids.size()], k, v});
        TrueSystem t{ids[0], ids, std::move(attrs), std::nullopt};
        std::sort(t.aliases.begin(), t.aliases.end());
        s_.truth.systems.push_back(std::move(t));
    }

    void truth_attribute(const std::string& system, const std::string& key, const std::string& value) {
        for (auto& t : s_.truth.systems) {
            if (t.id == system) t.attributes[key] = value;
        }
    }

    void host(std::vector<std::string> ids) {
        for (const auto& id : ids) fact("host_disc", {id, "urn:host:" + id});
        for (std::size_t i = 1; i < ids.size(); ++i) fact("same_host_disc", {ids[i - 1], ids[i]});
        TrueHost t{ids[0], ids};
        std::sort(t.aliases.begin(), t.aliases.end());
        s_.truth.hosts.push_back(std::move(t));
    }

    void runs_on(const std::string& system_alias, const std::string& host_alias, const std::string& system,
                 const std::string& host) {
        fact("runs_on_disc", {system_alias, host_alias});
        for (auto& t : s_.truth.systems) {
            if (t.id == system) t.host = host;
        }
    }

    void configuration(const std::string& uri, const std::string& interface, const std::string& protocol,
                       const std::string& message_type) {
        fact("conf_attr_disc", {uri, "interface", interface});
        fact("conf_attr_disc", {uri, "protocol", protocol});
        fact("conf_attr_disc", {uri, "message_type", message_type});
    }

    static std::map<std::string, std::string> config_attrs(const std::string& interface, const std::string& protocol,
                                                           const std::string& message_type) {
        return {{"interface", interface}, {"message_type", message_type}, {"protocol", protocol}};
    }

    /// outgoing_disc + recv_disc.
    void outgoing(const std::string& snd_alias, const std::string& rcv_alias, const std::string& snd,
                  const std::string& rcv, const std::string& interface, const std::string& protocol,
                  const std::string& message_type) {
        std::string cfg = lower(snd) + "/out/" + interface;
        fact("outgoing_disc", {snd_alias, cfg});
        fact("recv_disc", {cfg, rcv_alias});
        configuration(cfg, interface, protocol, message_type);
        flow(snd, rcv, interface, config_attrs(interface, protocol, message_type));
    }

    /// incoming_disc + send_disc.
    void incoming(const std::string& snd_alias, const std::string& rcv_alias, const std::string& snd,
                  const std::string& rcv, const std::string& interface, const std::string& protocol,
                  const std::string& message_type) {
        std::string cfg = lower(rcv) + "/in/" + interface;
        fact("incoming_disc", {rcv_alias, cfg});
        fact("send_disc", {cfg, snd_alias});
        configuration(cfg, interface, protocol, message_type);
        flow(snd, rcv, interface, config_attrs(interface, protocol, message_type));
    }

    /// outgoing_disc + recv_host_disc to the receiver's host.
    void host_level(const std::string& snd_alias, const std::string& host_alias, const std::string& snd,
                    const std::string& rcv, const std::string& interface, const std::string& protocol,
                    const std::string& message_type) {
        std::string cfg = lower(snd) + "/out/" + interface;
        fact("outgoing_disc", {snd_alias, cfg});
        fact("recv_host_disc", {cfg, host_alias});
        configuration(cfg, interface, protocol, message_type);
        flow(snd, rcv, interface, config_attrs(interface, protocol, message_type));
    }

    /// An outgoing and an incoming configuration with equal protocol and
    /// message type and no flow facts between them.
    void graph_merge(const std::string& snd_alias, const std::string& rcv_alias, const std::string& snd,
                     const std::string& rcv, const std::string& interface, const std::string& protocol,
                     const std::string& message_type) {
        std::string out = lower(snd) + "/out/" + interface;
        std::string in = lower(rcv) + "/in/" + interface;
        fact("outgoing_disc", {snd_alias, out});
        fact("incoming_disc", {rcv_alias, in});
        configuration(out, interface, protocol, message_type);
        configuration(in, interface, protocol, message_type);
        flow(snd, rcv, interface, config_attrs(interface, protocol, message_type));
    }

    /// Flow observed at runtime, identified by its interface.
    void runtime(const std::string& snd_alias, const std::string& rcv_alias, const std::string& snd,
                 const std::string& rcv, const std::string& interface) {
        fact("msg_flow_disc", {snd_alias, rcv_alias, interface});
        flow(snd, rcv, interface, {});
    }

    void flow(const std::string& snd, const std::string& rcv, const std::string& key,
              std::map<std::string, std::string> attrs) {
        s_.truth.flows.push_back({snd, rcv, key, std::move(attrs)});
    }

    void iflow(const std::string& snd, const std::string& rcv, const std::string& mw, const std::string& uri) {
        s_.truth.iflows.push_back({snd, rcv, mw, uri});
    }

    void party(const std::string& id, std::vector<std::string> systems) {
        fact("party_disc", {id, "urn:party:" + id});
        std::sort(systems.begin(), systems.end());
        s_.truth.parties.push_back({id, std::move(systems)});
    }

    Scenario finish() {
        std::sort(s_.facts.begin(), s_.facts.end());
        s_.facts.erase(std::unique(s_.facts.begin(), s_.facts.end()), s_.facts.end());
        s_.truth.sort();
        return std::move(s_);
    }

private:
    static std::string lower(std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    }

    Scenario s_;
};

std::map<std::string, std::string> app(const std::string& description) {
    return {{"description", description}, {"type", "application"}};
}

Scenario hxp() {
    FixtureBuilder b;
    b.system({"HXP", "sld:HXP"}, {{"description", "airline integration hub"}, {"type", "middleware"}});
    b.system({"HXP_105", "sld:HXP_105"}, app("booking engine"));
    b.system({"HXP_106", "sld:HXP_106"}, app("seat inventory"));
    b.system({"HXP_107", "sld:HXP_107"}, app("fare management"));
    b.system({"HXP_108", "sld:HXP_108"}, app("catering"));
    b.system({"HXP_109", "sld:HXP_109"}, app("travel agency gateway"));
    b.system({"HXP_110", "sld:HXP_110"}, app("pricing"));
    b.system({"HXP_111", "sld:HXP_111"}, app("check-in"));
    for (const char* c : {"Interflug", "Singapore", "Qantas", "Alitalia"}) {
        b.system({c}, {{"description", std::string(c) + " reservation system"}, {"type", "component"}});
    }

    // The user corrects a discovered location; the user value wins.
    b.fact("attr_disc", {"sld:HXP_109", "location", "FRA"});
    b.fact("attr_user", {"HXP_109", "location", "Frankfurt"});
    b.truth_attribute("HXP_109", "location", "Frankfurt");

    b.host({"xxx2474", "xxx2474.corp.example"});
    b.host({"tavhost01"});
    b.runs_on("HXP", "xxx2474", "HXP", "xxx2474");
    b.runs_on("sld:HXP_105", "xxx2474.corp.example", "HXP_105", "xxx2474");
    b.runs_on("HXP_109", "tavhost01", "HXP_109", "tavhost01");

    // HXP_105 <-> HXP_106: configuration and runtime evidence for each flow.
    b.outgoing("HXP_105", "sld:HXP_106", "HXP_105", "HXP_106", "FlightSeatAvailQuery", "SOAP",
               "FlightSeatAvailQuery_Req");
    b.fact("msg_flow_disc", {"sld:HXP_105", "HXP_106", "FlightSeatAvailQuery"});
    b.outgoing("sld:HXP_105", "HXP_106", "HXP_105", "HXP_106", "BookOrderRequest", "SOAP", "BookOrderRequest");
    b.fact("msg_flow_disc", {"HXP_105", "HXP_106", "BookOrderRequest"});
    b.outgoing("HXP_106", "HXP_105", "HXP_106", "HXP_105", "FlightBookOrderConfirm", "SOAP",
               "FlightBookOrderConfirm");
    b.fact("msg_flow_disc", {"sld:HXP_106", "sld:HXP_105", "FlightBookOrderConfirm"});

    // HXP_105 <-> HXP_107: outgoing configurations.
    b.outgoing("HXP_105", "HXP_107", "HXP_105", "HXP_107", "FareFiling", "SOAP", "FareFiling");
    b.outgoing("sld:HXP_107", "HXP_105", "HXP_107", "HXP_105", "FareFilingAck", "SOAP", "FareFilingAck");
    b.outgoing("HXP_105", "sld:HXP_107", "HXP_105", "HXP_107", "AvailabilityPush", "RFC", "AVAIL_PUSH");

    // HXP_105 <-> HXP_108: incoming configurations.
    b.incoming("HXP_108", "HXP_105", "HXP_108", "HXP_105", "MealOrder", "SOAP", "MealOrder");
    b.incoming("sld:HXP_105", "HXP_108", "HXP_105", "HXP_108", "MealOrderConfirm", "SOAP", "MealOrderConfirm");
    b.incoming("HXP_105", "sld:HXP_108", "HXP_105", "HXP_108", "SpecialServiceRequest", "SOAP", "SSR");
    // Never matched; stays unlinked.
    b.fact("incoming_disc", {"HXP_108", "hxp_108/in/LegacyStatus"});
    b.configuration("hxp_108/in/LegacyStatus", "LegacyStatus", "RFC", "STATUS");

    // HXP_109 <-> HXP_105: an incoming configuration and a host-level one.
    b.incoming("HXP_109", "sld:HXP_105", "HXP_109", "HXP_105", "TravelRequest", "SOAP", "TravelRequest");
    b.host_level("HXP_105", "tavhost01", "HXP_105", "HXP_109", "TravelConfirm", "SOAP", "TravelConfirm");

    // HXP_105 <-> HXP_110: matched by protocol and message type only.
    b.graph_merge("HXP_105", "sld:HXP_110", "HXP_105", "HXP_110", "FareQuote", "SOAP", "FareQuoteReq");
    b.graph_merge("HXP_110", "HXP_105", "HXP_110", "HXP_105", "FareQuoteReply", "SOAP", "FareQuoteRes");

    // HXP_109 <-> HXP_111.
    b.outgoing("HXP_109", "HXP_111", "HXP_109", "HXP_111", "PassengerManifest", "SOAP", "PassengerManifest");
    b.graph_merge("sld:HXP_111", "HXP_109", "HXP_111", "HXP_109", "CheckinStatus", "HTTP", "CheckinStatus");
    b.runtime("HXP_109", "sld:HXP_111", "HXP_109", "HXP_111", "BaggageNotice");

    // HXP_110 <-> HXP_111.
    b.runtime("HXP_110", "HXP_111", "HXP_110", "HXP_111", "LoyaltyUpdate");
    b.runtime("sld:HXP_111", "sld:HXP_110", "HXP_111", "HXP_110", "LoyaltyAck");

    // HXP_106 -> HXP_107, sender known only under its landscape directory id.
    b.graph_merge("sld:HXP_106", "HXP_107", "HXP_106", "HXP_107", "CodeshareUpdate", "SOAP", "CodeshareUpdate");

    // Routed through the HXP middleware.
    b.runtime("HXP_105", "HXP", "HXP_105", "HXP", "BookingSync");
    b.runtime("sld:HXP_105", "sld:HXP", "HXP_105", "HXP", "ScheduleFeed");
    b.runtime("HXP", "HXP_105", "HXP", "HXP_105", "BookingAck");
    for (const char* c : {"Interflug", "Singapore", "Qantas"}) {
        b.runtime("HXP", c, "HXP", c, "BookingSync");
        b.runtime(c, "HXP", c, "HXP", "BookingAck");
        b.iflow("HXP_105", c, "HXP", "BookingSync");
        b.iflow(c, "HXP_105", "HXP", "BookingAck");
    }
    for (const char* c : {"Interflug", "Singapore", "Alitalia"}) {
        b.runtime("HXP", c, "HXP", c, "ScheduleFeed");
        b.iflow("HXP_105", c, "HXP", "ScheduleFeed");
    }
    return b.finish();
}

Scenario h73() {
    FixtureBuilder b;
    b.system({"H73", "sld:H73"}, {{"description", "B2B integration hub"}, {"type", "middleware"}});
    b.system({"H73_200", "sld:H73_200"}, app("order management"));
    b.system({"H73_201", "sld:H73_201"}, app("logistics"));
    b.system({"AcmeTravel_B2B"}, {{"party", "AcmeTravel"}, {"type", "partner"}});
    b.system({"GlobalAir_B2B"}, {{"party", "GlobalAir"}, {"type", "partner"}});
    b.system({"HotelWorld_B2B"}, {{"party", "HotelWorld"}, {"type", "partner"}});
    b.party("AcmeTravel", {"AcmeTravel_B2B"});
    b.party("GlobalAir", {"GlobalAir_B2B"});
    b.party("HotelWorld", {"HotelWorld_B2B"});

    b.runtime("H73_200", "H73", "H73_200", "H73", "ORDERS");
    b.runtime("sld:H73", "sld:H73_200", "H73", "H73_200", "ORDRSP");
    b.runtime("H73", "AcmeTravel_B2B", "H73", "AcmeTravel_B2B", "ORDERS");
    b.runtime("AcmeTravel_B2B", "H73", "AcmeTravel_B2B", "H73", "ORDRSP");
    b.iflow("H73_200", "AcmeTravel_B2B", "H73", "ORDERS");
    b.iflow("AcmeTravel_B2B", "H73_200", "H73", "ORDRSP");

    b.graph_merge("sld:H73", "GlobalAir_B2B", "H73", "GlobalAir_B2B", "INVOIC", "IDoc", "INVOIC02");
    b.graph_merge("H73_201", "HotelWorld_B2B", "H73_201", "HotelWorld_B2B", "DESADV", "IDoc", "DESADV01");
    return b.finish();
}

}  // namespace

BundledFixtures build_fixtures() { return {hxp(), h73()}; }

}  // namespace netinfer::sim
