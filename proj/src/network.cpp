#include "routecheck/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "routecheck/errors.hpp"

namespace routecheck {

std::string ModeSet::to_string() const {
    std::string out;
    for (int i = 0; i < kModeCount; ++i) {
        const Mode m = static_cast<Mode>(i);
        if (!contains(m)) continue;
        if (!out.empty()) out += '+';
        out += mode_name(m);
    }
    return out;
}

ModeSet mode_set_from_string(std::string_view s) {
    ModeSet set;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t plus = s.find('+', start);
        const std::string_view tag =
            s.substr(start, plus == std::string_view::npos ? s.size() - start : plus - start);
        if (!tag.empty()) {
            const auto m = mode_from_name(tag);
            if (!m) throw std::invalid_argument("unknown mode tag '" + std::string(tag) + "'");
            set = set.with(*m);
        }
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return set;
}

// --- graph construction -------------------------------------------------------

std::uint32_t ModalNetwork::add_node(std::string id, GeoPoint pos, bool transfer) {
    if (id.empty()) throw std::invalid_argument("node id must not be empty");
    require_valid(pos, "node " + id);
    const auto idx = static_cast<std::uint32_t>(nodes_.size());
    if (!index_.emplace(id, idx).second) {
        throw std::invalid_argument("duplicate node id '" + id + "'");
    }
    nodes_.push_back(NetworkNode{std::move(id), pos, transfer});
    adjacency_.emplace_back();
    return idx;
}

void ModalNetwork::add_edge(std::string_view from_id, std::string_view to_id, Mode mode) {
    const std::uint32_t a = require_node(from_id);
    const std::uint32_t b = require_node(to_id);
    if (a == b) {
        throw std::invalid_argument("self-loop edge at node '" + std::string(from_id) + "'");
    }
    const double len = haversine_m(nodes_[a].pos, nodes_[b].pos);
    if (!(len > 0.0)) {
        throw std::invalid_argument("zero-length edge between '" + std::string(from_id) +
                                    "' and '" + std::string(to_id) + "'");
    }
    const auto idx = static_cast<std::uint32_t>(edges_.size());
    edges_.push_back(NetworkEdge{a, b, mode, len});
    adjacency_[a].push_back(idx);
    adjacency_[b].push_back(idx);
}

std::optional<std::uint32_t> ModalNetwork::find_node(std::string_view id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t ModalNetwork::require_node(std::string_view id) const {
    const auto idx = find_node(id);
    if (!idx) throw std::out_of_range("unknown node id '" + std::string(id) + "'");
    return *idx;
}

// --- CSV I/O -------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    for (std::string& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

double parse_csv_double(const std::string& tok, const std::string& where) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("bad numeric value '" + tok + "'", where);
    }
    return v;
}

}  // namespace

ModalNetwork load_network(std::istream& nodes_csv, std::istream& edges_csv) {
    ModalNetwork net;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(nodes_csv, line) || split_csv_line(line) !=
            std::vector<std::string>{"id", "lon", "lat", "transfer"}) {
        throw ParseError("nodes header must be 'id,lon,lat,transfer'", "nodes.csv line 1");
    }
    line_no = 1;
    while (std::getline(nodes_csv, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::string where = "nodes.csv line " + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) throw ParseError("expected 4 fields", where);
        const double lon = parse_csv_double(fields[1], where);
        const double lat = parse_csv_double(fields[2], where);
        bool transfer = false;
        if (fields[3] == "1") {
            transfer = true;
        } else if (fields[3] != "0") {
            throw ParseError("transfer flag must be 0 or 1", where);
        }
        try {
            net.add_node(fields[0], GeoPoint{lon, lat}, transfer);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), where);
        }
    }

    if (!std::getline(edges_csv, line) ||
        split_csv_line(line) != std::vector<std::string>{"from", "to", "mode"}) {
        throw ParseError("edges header must be 'from,to,mode'", "edges.csv line 1");
    }
    line_no = 1;
    while (std::getline(edges_csv, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::string where = "edges.csv line " + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) throw ParseError("expected 3 fields", where);
        const auto mode = mode_from_name(fields[2]);
        if (!mode) throw ParseError("unknown mode '" + fields[2] + "'", where);
        try {
            net.add_edge(fields[0], fields[1], *mode);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), where);
        }
    }
    return net;
}

ModalNetwork load_network_files(const std::filesystem::path& nodes_path,
                                const std::filesystem::path& edges_path) {
    std::ifstream nodes_in(nodes_path);
    if (!nodes_in) throw ParseError("cannot open nodes file", nodes_path.string());
    std::ifstream edges_in(edges_path);
    if (!edges_in) throw ParseError("cannot open edges file", edges_path.string());
    return load_network(nodes_in, edges_in);
}

void write_network_files(const ModalNetwork& net, const std::filesystem::path& nodes_path,
                         const std::filesystem::path& edges_path) {
    std::ofstream nodes_out(nodes_path);
    if (!nodes_out) throw ParseError("cannot write nodes file", nodes_path.string());
    nodes_out << "id,lon,lat,transfer\n";
    char buf[64];
    for (const NetworkNode& n : net.nodes()) {
        std::snprintf(buf, sizeof(buf), "%.9f,%.9f", n.pos.lon, n.pos.lat);
        nodes_out << n.id << ',' << buf << ',' << (n.transfer ? 1 : 0) << '\n';
    }
    std::ofstream edges_out(edges_path);
    if (!edges_out) throw ParseError("cannot write edges file", edges_path.string());
    edges_out << "from,to,mode\n";
    for (const NetworkEdge& e : net.edges()) {
        edges_out << net.nodes()[e.from].id << ',' << net.nodes()[e.to].id << ','
                  << mode_name(e.mode) << '\n';
    }
}

// --- routing -------------------------------------------------------------------

namespace {

// Search states are (node, arrival mode); slot 0 is the pre-departure state
// that exists only at the origin.
constexpr std::uint32_t kStartSlot = 0;
constexpr std::uint32_t kSlotsPerNode = 4;

inline std::uint32_t state_of(std::uint32_t node, std::uint32_t slot) {
    return node * kSlotsPerNode + slot;
}
inline std::uint32_t node_of(std::uint32_t state) { return state / kSlotsPerNode; }

inline std::uint32_t mode_slot(Mode m) { return static_cast<std::uint32_t>(m) + 1; }

bool step_allowed(const ModalNetwork& net, std::uint32_t state, Mode edge_mode) {
    const std::uint32_t slot = state % kSlotsPerNode;
    if (slot == kStartSlot) return true;
    if (slot == mode_slot(edge_mode)) return true;
    return net.nodes()[node_of(state)].transfer;
}

}  // namespace

std::optional<RouteResult> shortest_route(const ModalNetwork& net, std::string_view origin,
                                          std::string_view dest, ModeSet allowed,
                                          const RouteOptions& options) {
    if (allowed.empty()) throw std::invalid_argument("shortest_route: empty mode set");
    const std::uint32_t src = net.require_node(origin);
    const std::uint32_t dst = net.require_node(dest);
    if (src == dst) {
        throw std::invalid_argument("shortest_route: origin equals destination ('" +
                                    std::string(origin) + "')");
    }

    const std::size_t n_states = net.nodes().size() * kSlotsPerNode;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n_states, kInf);

    using QItem = std::pair<double, std::uint32_t>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> queue;
    const std::uint32_t start = state_of(src, kStartSlot);
    dist[start] = 0.0;
    queue.push({0.0, start});

    while (!queue.empty()) {
        const auto [d, s] = queue.top();
        queue.pop();
        if (d > dist[s]) continue;
        const std::uint32_t u = node_of(s);
        for (const std::uint32_t ei : net.edges_at(u)) {
            const NetworkEdge& e = net.edges()[ei];
            if (!allowed.contains(e.mode) || !step_allowed(net, s, e.mode)) continue;
            const std::uint32_t v = e.from == u ? e.to : e.from;
            const std::uint32_t t = state_of(v, mode_slot(e.mode));
            const double nd = d + e.length_m;
            if (nd < dist[t]) {
                dist[t] = nd;
                queue.push({nd, t});
            }
        }
    }

    double best = kInf;
    for (std::uint32_t slot = 1; slot < kSlotsPerNode; ++slot) {
        best = std::min(best, dist[state_of(dst, slot)]);
    }
    if (!std::isfinite(best)) return std::nullopt;

    // Walk the shortest-path DAG for the lexicographically smallest node-id
    // sequence. "Good" states are those on some shortest path to dest.
    std::vector<char> good(n_states, 0);
    {
        // Reverse relaxation: t is good if it is a dest state at the optimum,
        // or some forward transition from t leads to a good state.
        std::vector<std::vector<std::uint32_t>> preds(n_states);
        for (std::uint32_t s = 0; s < n_states; ++s) {
            if (!std::isfinite(dist[s])) continue;
            const std::uint32_t u = node_of(s);
            for (const std::uint32_t ei : net.edges_at(u)) {
                const NetworkEdge& e = net.edges()[ei];
                if (!allowed.contains(e.mode) || !step_allowed(net, s, e.mode)) continue;
                const std::uint32_t v = e.from == u ? e.to : e.from;
                const std::uint32_t t = state_of(v, mode_slot(e.mode));
                if (dist[s] + e.length_m == dist[t]) preds[t].push_back(s);
            }
        }
        std::vector<std::uint32_t> stack;
        for (std::uint32_t slot = 1; slot < kSlotsPerNode; ++slot) {
            const std::uint32_t s = state_of(dst, slot);
            if (dist[s] == best) {
                good[s] = 1;
                stack.push_back(s);
            }
        }
        while (!stack.empty()) {
            const std::uint32_t t = stack.back();
            stack.pop_back();
            for (const std::uint32_t p : preds[t]) {
                if (!good[p]) {
                    good[p] = 1;
                    stack.push_back(p);
                }
            }
        }
    }

    // Greedy walk: at each step take the smallest-id next node that keeps us
    // on a shortest path; carry every arrival-mode state that reaches it.
    std::vector<std::uint32_t> frontier{start};
    std::vector<std::uint32_t> path_nodes{src};
    std::vector<Mode> path_modes;
    while (path_nodes.back() != dst) {
        const std::string* best_id = nullptr;
        std::uint32_t best_node = 0;
        for (const std::uint32_t s : frontier) {
            const std::uint32_t u = node_of(s);
            for (const std::uint32_t ei : net.edges_at(u)) {
                const NetworkEdge& e = net.edges()[ei];
                if (!allowed.contains(e.mode) || !step_allowed(net, s, e.mode)) continue;
                const std::uint32_t v = e.from == u ? e.to : e.from;
                const std::uint32_t t = state_of(v, mode_slot(e.mode));
                if (!good[t] || dist[s] + e.length_m != dist[t]) continue;
                const std::string& vid = net.nodes()[v].id;
                if (best_id == nullptr || vid < *best_id) {
                    best_id = &vid;
                    best_node = v;
                }
            }
        }
        if (best_id == nullptr) {
            throw std::logic_error("shortest_route: dead end in shortest-path walk");
        }
        std::vector<std::uint32_t> next;
        Mode step_mode = Mode::Barge;
        bool have_mode = false;
        for (const std::uint32_t s : frontier) {
            const std::uint32_t u = node_of(s);
            for (const std::uint32_t ei : net.edges_at(u)) {
                const NetworkEdge& e = net.edges()[ei];
                if (!allowed.contains(e.mode) || !step_allowed(net, s, e.mode)) continue;
                const std::uint32_t v = e.from == u ? e.to : e.from;
                if (v != best_node) continue;
                const std::uint32_t t = state_of(v, mode_slot(e.mode));
                if (!good[t] || dist[s] + e.length_m != dist[t]) continue;
                if (std::find(next.begin(), next.end(), t) == next.end()) next.push_back(t);
                if (!have_mode || static_cast<int>(e.mode) < static_cast<int>(step_mode)) {
                    step_mode = e.mode;
                    have_mode = true;
                }
            }
        }
        frontier = std::move(next);
        path_nodes.push_back(best_node);
        path_modes.push_back(step_mode);
    }

    RouteResult out;
    out.length_m = best;
    out.node_sequence.reserve(path_nodes.size());
    RoutePolyline raw;
    for (const std::uint32_t node : path_nodes) {
        out.node_sequence.push_back(net.nodes()[node].id);
        raw.vertices.push_back(net.nodes()[node].pos);
    }
    raw.segment_modes = std::move(path_modes);
    out.line = densify(raw, options.densify_max_leg_m);
    return out;
}

std::optional<PriorityRoute> route_with_mode_priority(const ModalNetwork& net,
                                                      std::string_view origin,
                                                      std::string_view dest,
                                                      const RouteOptions& options) {
    for (std::size_t rung = 0; rung < kModePriorityLadder.size(); ++rung) {
        auto route = shortest_route(net, origin, dest, kModePriorityLadder[rung], options);
        if (route) {
            return PriorityRoute{static_cast<int>(rung) + 1, kModePriorityLadder[rung],
                                 std::move(*route)};
        }
    }
    return std::nullopt;
}

std::vector<SuiteCase> generate_test_suite(const ModalNetwork& net,
                                           std::span<const std::string> origins,
                                           std::string_view dest,
                                           std::span<const double> widths_m,
                                           const RouteOptions& options) {
    if (origins.empty()) throw std::invalid_argument("generate_test_suite: no origins");
    net.require_node(dest);

    std::vector<SuiteCase> cases;
    cases.reserve(origins.size() * widths_m.size());
    for (const std::string& origin : origins) {
        const auto routed = route_with_mode_priority(net, origin, dest, options);
        std::shared_ptr<const RouteDocument> doc;
        if (routed) {
            auto d = std::make_shared<RouteDocument>();
            d->id = origin + "--" + std::string(dest);
            d->route = routed->route.line;
            d->metadata["origin"] = origin;
            d->metadata["destination"] = std::string(dest);
            d->metadata["modes"] = routed->modes.to_string();
            d->metadata["rung"] = std::to_string(routed->rung);
            doc = std::move(d);
        }
        for (const double width : widths_m) {
            SuiteCase sc;
            sc.test.id = origin + "-" + std::to_string(static_cast<long long>(width));
            sc.test.origin = origin;
            sc.test.dest = std::string(dest);
            sc.test.width_m = width;
            if (routed) {
                sc.test.rung = routed->rung;
                sc.test.modes = routed->modes;
                sc.doc = doc;
            }
            cases.push_back(std::move(sc));
        }
    }
    return cases;
}

// --- manifest ------------------------------------------------------------------

void write_manifest(std::ostream& out, std::span<const ManifestEntry> entries) {
    for (const ManifestEntry& entry : entries) {
        nlohmann::json j;
        j["id"] = entry.test.id;
        j["origin"] = entry.test.origin;
        j["dest"] = entry.test.dest;
        j["width_m"] = entry.test.width_m;
        if (entry.test.failed()) {
            j["status"] = "failed";
        } else {
            j["status"] = "ok";
            j["rung"] = *entry.test.rung;
            j["modes"] = entry.test.modes.to_string();
            j["kml"] = entry.kml;
        }
        out << j.dump() << '\n';
    }
}

std::vector<ManifestEntry> parse_manifest(std::istream& in) {
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "manifest line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), where);
        }
        try {
            ManifestEntry entry;
            entry.test.id = j.at("id").get<std::string>();
            entry.test.origin = j.at("origin").get<std::string>();
            entry.test.dest = j.at("dest").get<std::string>();
            entry.test.width_m = j.at("width_m").get<double>();
            const std::string status = j.at("status").get<std::string>();
            if (status == "ok") {
                entry.test.rung = j.at("rung").get<int>();
                entry.test.modes = mode_set_from_string(j.at("modes").get<std::string>());
                entry.kml = j.value("kml", std::string());
            } else if (status != "failed") {
                throw ParseError("status must be 'ok' or 'failed'", where);
            }
            if (entry.test.id.empty()) throw ParseError("empty case id", where);
            entries.push_back(std::move(entry));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), where);
        }
    }
    return entries;
}

}  // namespace routecheck
