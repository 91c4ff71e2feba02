#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "routecheck/geo.hpp"
#include "routecheck/kml.hpp"

namespace routecheck {

struct ModeSet {
    std::uint8_t bits = 0;

    constexpr bool contains(Mode m) const {
        return (bits & (1u << static_cast<unsigned>(m))) != 0;
    }
    constexpr ModeSet with(Mode m) const {
        return ModeSet{static_cast<std::uint8_t>(bits | (1u << static_cast<unsigned>(m)))};
    }
    constexpr bool empty() const { return bits == 0; }
    bool operator==(const ModeSet&) const = default;

    std::string to_string() const;  // "rail+hh_truck", enum order
};

ModeSet mode_set_from_string(std::string_view s);  // throws on unknown tag

// Fallback order for picking the transport mode combination:
// rail only, then truck-to-rail, then truck only, then barge-to-rail.
inline constexpr std::array<ModeSet, 4> kModePriorityLadder = {
    ModeSet{}.with(Mode::Rail),
    ModeSet{}.with(Mode::HhTruck).with(Mode::Rail),
    ModeSet{}.with(Mode::HhTruck),
    ModeSet{}.with(Mode::Barge).with(Mode::Rail),
};

struct NetworkNode {
    std::string id;
    GeoPoint pos;
    bool transfer = false;  // mode changes allowed here
};

struct NetworkEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    Mode mode = Mode::Rail;
    double length_m = 0.0;  // always derived from node coordinates
};

// Undirected multimodal graph. Immutable once loaded; queries are reentrant.
class ModalNetwork {
public:
    std::uint32_t add_node(std::string id, GeoPoint pos, bool transfer);
    void add_edge(std::string_view from_id, std::string_view to_id, Mode mode);

    std::optional<std::uint32_t> find_node(std::string_view id) const;
    std::uint32_t require_node(std::string_view id) const;  // throws std::out_of_range

    const std::vector<NetworkNode>& nodes() const { return nodes_; }
    const std::vector<NetworkEdge>& edges() const { return edges_; }
    std::span<const std::uint32_t> edges_at(std::uint32_t node) const {
        return adjacency_[node];
    }

private:
    std::vector<NetworkNode> nodes_;
    std::vector<NetworkEdge> edges_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
    std::map<std::string, std::uint32_t, std::less<>> index_;
};

// nodes.csv: id,lon,lat,transfer (transfer 0/1); edges.csv: from,to,mode.
ModalNetwork load_network(std::istream& nodes_csv, std::istream& edges_csv);
ModalNetwork load_network_files(const std::filesystem::path& nodes_path,
                                const std::filesystem::path& edges_path);
void write_network_files(const ModalNetwork& net, const std::filesystem::path& nodes_path,
                         const std::filesystem::path& edges_path);

struct RouteResult {
    RoutePolyline line;                      // densified node chain with mode tags
    std::vector<std::string> node_sequence;  // network node ids along the path
    double length_m = 0.0;                   // sum of traversed edge lengths
};

struct RouteOptions {
    double densify_max_leg_m = 5000.0;
};

// Minimum total length path restricted to the allowed modes, with mode
// changes only at transfer nodes. Among equal-length shortest paths the
// lexicographically smallest node-id sequence is returned. std::nullopt
// means no feasible path. origin == dest is rejected as degenerate input.
std::optional<RouteResult> shortest_route(const ModalNetwork& net, std::string_view origin,
                                          std::string_view dest, ModeSet allowed,
                                          const RouteOptions& options = {});

struct PriorityRoute {
    int rung = 0;  // 1-based position in kModePriorityLadder
    ModeSet modes;
    RouteResult route;
};

// First ladder rung that yields a feasible route wins; std::nullopt when all
// four fail (a recorded outcome, not an error).
std::optional<PriorityRoute> route_with_mode_priority(const ModalNetwork& net,
                                                      std::string_view origin,
                                                      std::string_view dest,
                                                      const RouteOptions& options = {});

struct TestCase {
    std::string id;      // "<origin>-<width>"
    std::string origin;
    std::string dest;
    double width_m = 0.0;
    std::optional<int> rung;  // empty: route generation failed
    ModeSet modes;

    bool failed() const { return !rung.has_value(); }
};

struct SuiteCase {
    TestCase test;
    std::shared_ptr<const RouteDocument> doc;  // shared by the width pair; null when failed
};

// One routing run per origin, then one TestCase per buffer width sharing the
// geometry. Failures stay in the list, marked.
std::vector<SuiteCase> generate_test_suite(const ModalNetwork& net,
                                           std::span<const std::string> origins,
                                           std::string_view dest,
                                           std::span<const double> widths_m,
                                           const RouteOptions& options = {});

// JSON-lines manifest: one TestCase per line, plus the KML file carrying the
// shared geometry for non-failed cases.
struct ManifestEntry {
    TestCase test;
    std::string kml;  // path relative to the manifest file; empty when failed
};

void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> parse_manifest(std::istream& in);

}  // namespace routecheck
