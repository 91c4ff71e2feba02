// Acceptance suite: one check per release criterion, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "netoracle.hpp"
#include "routecheck/geo.hpp"
#include "routecheck/grid.hpp"
#include "routecheck/harness.hpp"
#include "routecheck/kml.hpp"
#include "routecheck/netgen.hpp"
#include "routecheck/network.hpp"
#include "routecheck/validate.hpp"
#include "testutil.hpp"

using namespace routecheck;
namespace fs = std::filesystem;

namespace {

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& message) {
    if (!condition) throw CheckFailed(message);
}

std::string format_count(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

RoutePolyline make_route(std::vector<GeoPoint> pts, Mode mode = Mode::Rail) {
    RoutePolyline r;
    r.vertices = std::move(pts);
    r.segment_modes.assign(r.vertices.size() - 1, mode);
    return r;
}

// East-west ground-length segment at the given latitude.
RoutePolyline straight_route_m(double length_m, double lat, double lon0 = -100.0) {
    const double dlon = length_m / (kMeanEarthRadiusM * kDegToRad * std::cos(lat * kDegToRad));
    return make_route({{lon0, lat}, {lon0 + dlon, lat}});
}

RoutePolyline straight_route_north_m(double length_m, double lat0, double lon = -100.0) {
    const double dlat = length_m / (kMeanEarthRadiusM * kDegToRad);
    return make_route({{lon, lat0}, {lon, lat0 + dlat}});
}

// Independent buffer-area quadrature: different frame anchoring, different
// membership implementation, finer pitch.
double oracle_union_area_m2(const std::vector<RoutePolyline>& parts, double width_m,
                            double spacing_m) {
    BoundingBox bb = bounds(std::span<const RoutePolyline>(parts.data(), parts.size()));
    const double lat_c = 0.5 * (bb.lat_min + bb.lat_max);
    const double m_per_deg_lat = kMeanEarthRadiusM * kDegToRad;
    const double m_per_deg_lon = m_per_deg_lat * std::cos(lat_c * kDegToRad);

    const double x0 = bb.lon_min * m_per_deg_lon - width_m;
    const double x1 = bb.lon_max * m_per_deg_lon + width_m;
    const double y0 = bb.lat_min * m_per_deg_lat - width_m;
    const double y1 = bb.lat_max * m_per_deg_lat + width_m;
    std::size_t hits = 0;
    for (double y = y0 + 0.5 * spacing_m; y < y1; y += spacing_m) {
        for (double x = x0 + 0.5 * spacing_m; x < x1; x += spacing_m) {
            const GeoPoint p{x / m_per_deg_lon, y / m_per_deg_lat};
            for (const RoutePolyline& part : parts) {
                if (testutil::oracle_point_to_route_m(p, part.vertices) <= width_m) {
                    ++hits;
                    break;
                }
            }
        }
    }
    return static_cast<double>(hits) * spacing_m * spacing_m;
}

PopulationTriplet brute_force_union_zonal(const PopulationGrid& g,
                                          const std::vector<RoutePolyline>& parts,
                                          double width_m) {
    double day = 0.0, night = 0.0;
    for (std::size_t r = 0; r < g.nrows; ++r) {
        for (std::size_t c = 0; c < g.ncols; ++c) {
            const GeoPoint centroid = g.cell_centroid(r, c);
            bool inside = false;
            for (const RoutePolyline& part : parts) {
                if (distance_point_to_route_m(centroid, part) <= width_m) {
                    inside = true;
                    break;
                }
            }
            if (inside) {
                const double dv = g.day_at(r, c);
                const double nv = g.night_at(r, c);
                if (!g.is_nodata(dv)) day += dv;
                if (!g.is_nodata(nv)) night += nv;
            }
        }
    }
    return make_triplet(day, night);
}

fs::path working_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "routecheck-acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- criteria ---------------------------------------------------------------

// Day/night weighting stays within one ulp of the exact expression.
void criterion_average_population() {
    testutil::Rng rng(1001);
    for (int i = 0; i < 10000; ++i) {
        const double day = rng.uniform(0.0, 1e9);
        const double night = rng.uniform(0.0, 1e9);
        const double got = average_population(day, night);
        const double exact = static_cast<double>(
            (static_cast<long double>(day) + 2.0L * static_cast<long double>(night)) / 3.0L);
        const double ulp =
            std::nextafter(exact, std::numeric_limits<double>::infinity()) - exact;
        expect(std::abs(got - exact) <= ulp,
               "weighted average off by more than 1 ulp at day=" + format_count(day) +
                   " night=" + format_count(night));
    }
}

// Windowed centroid extraction equals the exhaustive scan exactly.
void criterion_zonal_oracle() {
    testutil::Rng rng(1002);
    for (int iter = 0; iter < 100; ++iter) {
        const PopulationGrid g = testutil::random_grid(rng, 200);
        const BoundingBox e = g.extent();
        const auto route = testutil::random_route(rng, 10, 0.5 * (e.lon_min + e.lon_max),
                                                  0.5 * (e.lat_min + e.lat_max), 0.05);
        const double w = rng.uniform(300.0, 3000.0);
        const ZonalResult z = zonal_population_centroid(g, route, w);
        const PopulationTriplet brute = testutil::brute_force_zonal(g, route, w);
        expect(z.population.day == brute.day && z.population.night == brute.night &&
                   z.population.average == brute.average,
               "centroid extraction diverged from the exhaustive scan on case " +
                   std::to_string(iter));
    }
}

// The bundled synthetic suite reproduces the tolerance envelope: every
// population comparison within +-5%, a majority within +-1%.
void criterion_tolerance_envelope() {
    NetworkGenConfig net_cfg;  // defaults: 120 nodes over the demo box
    net_cfg.seed = 1;
    GridGenConfig grid_cfg;
    grid_cfg.seed = 1ull ^ 0x9e3779b97f4a7c15ull;
    const ModalNetwork net = generate_network(net_cfg);
    const PopulationGrid grid = generate_population_grid(grid_cfg);
    expect(grid.cellsize * kMetersPerDegree <= 800.0 / 10.0,
           "demo grid cells must not exceed a tenth of the narrow buffer");

    std::string dest;
    double best = std::numeric_limits<double>::infinity();
    const GeoPoint center{0.5 * (net_cfg.bbox.lon_min + net_cfg.bbox.lon_max),
                          0.5 * (net_cfg.bbox.lat_min + net_cfg.bbox.lat_max)};
    for (const NetworkNode& n : net.nodes()) {
        const double d = haversine_m(n.pos, center);
        if (d < best) {
            best = d;
            dest = n.id;
        }
    }
    std::vector<std::string> origins;
    for (const NetworkNode& n : net.nodes()) {
        if (n.id != dest) origins.push_back(n.id);
    }
    const std::vector<double> widths{800.0, 2500.0};
    const auto cases = generate_test_suite(net, origins, dest, widths);
    expect(cases.size() >= 200, "suite must contain at least 200 cases, got " +
                                    std::to_string(cases.size()));

    const SuiteReport report = run_suite(cases, grid);
    std::size_t pop_records = 0, pop_within_1 = 0;
    for (const ComparisonRecord& rec : report.records) {
        if (rec.metric != "population_average") continue;
        ++pop_records;
        expect(std::abs(rec.pct_diff) <= 5.0,
               rec.case_id + ": population difference " + format_count(rec.pct_diff) +
                   "% breaches the 5% envelope");
        if (std::abs(rec.pct_diff) <= 1.0) ++pop_within_1;
    }
    expect(pop_records >= 190, "too few population records: " + std::to_string(pop_records));
    expect(2 * pop_within_1 > pop_records,
           "only " + std::to_string(pop_within_1) + " of " + std::to_string(pop_records) +
               " population records within 1%");
    expect(report.verdict.pass, "suite verdict must pass on the bundled demo");
}

// Quadrature area against the analytic capsule 2wL + pi w^2.
void criterion_capsule_area() {
    for (const double length : {1000.0, 10000.0, 100000.0}) {
        for (const double width : {800.0, 2500.0}) {
            for (const bool northward : {false, true}) {
                const RoutePolyline route = northward
                                                ? straight_route_north_m(length, 39.0)
                                                : straight_route_m(length, 39.5);
                const double true_length = geodesic_length_m(route);
                const double expected =
                    2.0 * width * true_length + std::numbers::pi * width * width;
                const double got = buffer_area_m2(route, width, width / 20.0);
                const double rel = std::abs(got - expected) / expected;
                expect(rel < 0.005, "capsule L=" + format_count(length) +
                                        " w=" + format_count(width) +
                                        (northward ? " N-S" : " E-W") + ": error " +
                                        format_count(100.0 * rel) + "%");
            }
        }
    }
}

// Mercator round trip, the sec(lat) scale law, and the ground correction.
void criterion_projection_laws() {
    testutil::Rng rng(1005);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint p{rng.uniform(-180.0, 180.0), rng.uniform(-85.0, 85.0)};
        const GeoPoint back = from_web_mercator(to_web_mercator(p));
        expect(std::abs(back.lon - p.lon) < 1e-9 && std::abs(back.lat - p.lat) < 1e-9,
               "round trip drift at lon=" + format_count(p.lon) +
                   " lat=" + format_count(p.lat));
    }
    for (const double lat : {0.0, 30.0, 45.0, 60.0}) {
        const RoutePolyline seg = straight_route_m(1000.0, lat);
        const double ratio = planar_length_mercator_m(seg) / geodesic_length_m(seg);
        // The projection inflates by sec(lat); the remaining constant factor
        // is the documented radius split between the two length definitions.
        const double expected =
            (kWebMercatorRadiusM / kMeanEarthRadiusM) / std::cos(lat * kDegToRad);
        expect(std::abs(ratio - expected) / expected < 0.001,
               "scale law off at latitude " + format_count(lat));
    }
    for (int i = 0; i < 50; ++i) {
        RoutePolyline r = testutil::random_route(rng, 12, -100.0, 45.0, 0.3);
        r = densify(r, 49000.0);
        const double corrected = ground_corrected_length_m(r);
        const double geodesic = geodesic_length_m(r);
        expect(std::abs(corrected - geodesic) / geodesic < 0.005,
               "ground-corrected length drift " +
                   format_count(100.0 * std::abs(corrected - geodesic) / geodesic) + "%");
    }
}

// Router against exhaustive enumeration, and the mode-priority ladder.
void criterion_routing() {
    testutil::Rng rng(1006);
    int feasible = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const ModalNetwork net = testutil::random_network(rng);
        const auto n = net.nodes().size();
        const std::uint32_t origin = static_cast<std::uint32_t>(rng.index(n));
        std::uint32_t dest = static_cast<std::uint32_t>(rng.index(n));
        if (dest == origin) dest = static_cast<std::uint32_t>((dest + 1) % n);
        const ModeSet allowed = kModePriorityLadder[rng.index(4)];

        const auto got =
            shortest_route(net, net.nodes()[origin].id, net.nodes()[dest].id, allowed);
        const testutil::OraclePath expected = testutil::oracle_shortest(net, origin, dest, allowed);
        if (!expected.feasible()) {
            expect(!got.has_value(), "router found a path enumeration says cannot exist");
            continue;
        }
        ++feasible;
        expect(got.has_value(), "router missed a feasible path on graph " +
                                    std::to_string(iter));
        expect(std::abs(got->length_m - expected.length) <= 1e-9 * expected.length,
               "suboptimal path length on graph " + std::to_string(iter));
        expect(got->node_sequence == expected.nodes,
               "tie-break did not pick the lexicographically smallest sequence on graph " +
                   std::to_string(iter));

        // Ladder order: the first enumeration-feasible rung must win.
        const auto priority =
            route_with_mode_priority(net, net.nodes()[origin].id, net.nodes()[dest].id);
        int first_feasible = 0;
        for (std::size_t rung = 0; rung < kModePriorityLadder.size(); ++rung) {
            if (testutil::oracle_shortest(net, origin, dest, kModePriorityLadder[rung])
                    .feasible()) {
                first_feasible = static_cast<int>(rung) + 1;
                break;
            }
        }
        if (first_feasible == 0) {
            expect(!priority.has_value(), "priority routing invented a route");
        } else {
            expect(priority.has_value() && priority->rung == first_feasible,
                   "ladder skipped rung " + std::to_string(first_feasible) + " on graph " +
                       std::to_string(iter));
        }
    }
    expect(feasible >= 40, "random graphs produced too few feasible cases: " +
                               std::to_string(feasible));
}

// Segment-weighted vs whole-route density: agreement when buffers are
// disjoint, a divergence matching the oracle when they overlap.
void criterion_density_methodology() {
    const double w = 2000.0;
    PopulationGrid flat;
    flat.ncols = flat.nrows = 110;
    flat.cellsize = 0.0009;
    flat.xll = -100.35;
    flat.yll = 39.15;
    flat.nodata = -9999.0;
    flat.day.assign(flat.ncols * flat.nrows, 3.0);
    flat.night.assign(flat.ncols * flat.nrows, 3.0);

    {
        const std::vector<RoutePolyline> parts{
            make_route({{-100.33, 39.17}, {-100.30, 39.17}}),
            make_route({{-100.27, 39.23}, {-100.30, 39.23}}),
        };
        const DensityResult sw = density_segment_weighted(flat, parts, w);
        const DensityResult wr = density_whole_route(
            flat, std::span<const RoutePolyline>(parts.data(), parts.size()), w);
        const double rel = std::abs(sw.density_per_km2 - wr.density_per_km2) /
                           wr.density_per_km2;
        expect(rel < 0.005, "disjoint-buffer methods diverge by " +
                                format_count(100.0 * rel) + "%");
    }

    // Apex hotspot: the overlap disk is double-counted by the segment-
    // weighted method, so the two densities part ways.
    PopulationGrid hot = flat;
    const GeoPoint apex{-100.3, 39.2};
    for (std::size_t r = 0; r < hot.nrows; ++r) {
        for (std::size_t c = 0; c < hot.ncols; ++c) {
            const GeoPoint p = hot.cell_centroid(r, c);
            const double d2 = (p.lon - apex.lon) * (p.lon - apex.lon) +
                              (p.lat - apex.lat) * (p.lat - apex.lat);
            hot.day[r * hot.ncols + c] += 500.0 * std::exp(-d2 / (2.0 * 0.004 * 0.004));
            hot.night[r * hot.ncols + c] = hot.day[r * hot.ncols + c];
        }
    }
    const std::vector<RoutePolyline> legs{
        make_route({{-100.325, 39.23}, apex}),
        make_route({apex, {-100.275, 39.23}}),
    };
    const DensityResult sw = density_segment_weighted(hot, legs, w);
    const DensityResult wr =
        density_whole_route(hot, std::span<const RoutePolyline>(legs.data(), legs.size()), w);
    expect(sw.density_per_km2 > 1.03 * wr.density_per_km2,
           "hotspot case failed to produce a methodology divergence");

    // Oracle recomputation of both densities: exhaustive population scans,
    // analytic capsule areas per leg, independent quadrature for the union.
    double oracle_sw_pop = 0.0, oracle_sw_area = 0.0;
    for (const RoutePolyline& leg : legs) {
        oracle_sw_pop += testutil::brute_force_zonal(hot, leg, w).average;
        const double len = geodesic_length_m(leg);
        oracle_sw_area += 2.0 * w * len + std::numbers::pi * w * w;
    }
    const double oracle_sw = oracle_sw_pop / (oracle_sw_area / 1e6);
    const PopulationTriplet union_pop = brute_force_union_zonal(hot, legs, w);
    const double oracle_wr_area = oracle_union_area_m2(legs, w, w / 50.0);
    const double oracle_wr = union_pop.average / (oracle_wr_area / 1e6);

    const double gap = sw.density_per_km2 - wr.density_per_km2;
    const double oracle_gap = oracle_sw - oracle_wr;
    expect(std::abs(gap - oracle_gap) <= 0.01 * oracle_wr,
           "methodology gap " + format_count(gap) + " vs oracle gap " +
               format_count(oracle_gap) + " differs by more than 1% of the density");
}

// KML round trip plus full recall on the seeded aberration corpus.
void criterion_io_validation() {
    testutil::Rng rng(1008);
    for (int iter = 0; iter < 100; ++iter) {
        RouteDocument doc;
        doc.id = "case-" + std::to_string(iter);
        doc.route = testutil::random_route(rng);
        doc.metadata["origin"] = "o" + std::to_string(iter);
        const RouteDocument back = parse_kml(serialize_kml(doc));
        expect(back.id == doc.id && back.metadata == doc.metadata &&
                   back.route.segment_modes == doc.route.segment_modes,
               "KML round trip lost structure on case " + std::to_string(iter));
        expect(back.route.vertices.size() == doc.route.vertices.size(),
               "KML round trip changed the vertex count");
        for (std::size_t i = 0; i < doc.route.vertices.size(); ++i) {
            expect(std::abs(back.route.vertices[i].lon - doc.route.vertices[i].lon) < 1e-9 &&
                       std::abs(back.route.vertices[i].lat - doc.route.vertices[i].lat) < 1e-9,
                   "KML round trip moved a vertex beyond 1e-9 degrees");
        }
    }

    // Clean corpus: monotone eastbound walks cannot contain any defect.
    const auto clean_route = [&rng]() {
        RoutePolyline r;
        double lon = -100.0, lat = 39.5;
        r.vertices.push_back({lon, lat});
        const int n = 5 + static_cast<int>(rng.index(8));
        for (int i = 1; i < n; ++i) {
            const double heading = rng.uniform(-0.6, 0.6);
            const double step = rng.uniform(0.01, 0.05);
            lon += step * std::cos(heading);
            lat += step * std::sin(heading);
            r.vertices.push_back({lon, lat});
            r.segment_modes.push_back(Mode::Rail);
        }
        return r;
    };
    for (int i = 0; i < 50; ++i) {
        expect(validate_geometry(clean_route()).empty(),
               "false positive on the clean corpus, route " + std::to_string(i));
    }

    // Seeded corpus: every planted defect kind must be recalled.
    const double lat = 39.5;
    const double m2lon = 1.0 / (kMetersPerDegree * std::cos(lat * kDegToRad));
    for (int i = 0; i < 10; ++i) {
        const double jitter = rng.uniform(-0.01, 0.01);

        RoutePolyline dup = clean_route();
        dup.vertices.insert(dup.vertices.begin() + 2, dup.vertices[1]);
        dup.segment_modes.push_back(Mode::Rail);
        auto found = validate_geometry(dup);
        expect(std::any_of(found.begin(), found.end(),
                           [](const Aberration& a) {
                               return a.kind == AberrationKind::DuplicateVertex && a.index_a == 2;
                           }),
               "seeded duplicate vertex missed");

        const double leg = rng.uniform(20.0, 90.0);
        const RoutePolyline spike =
            make_route({{-100.0 + jitter, lat},
                        {-100.0 + jitter + leg * m2lon, lat},
                        {-100.0 + jitter + 1.5 * m2lon, lat + 2.0 * m2lon}});
        found = validate_geometry(spike);
        expect(std::any_of(found.begin(), found.end(),
                           [](const Aberration& a) {
                               return a.kind == AberrationKind::Spike && a.index_a == 1;
                           }),
               "seeded spike missed");

        RoutePolyline jump = clean_route();
        jump.vertices.push_back({jump.vertices.back().lon + 0.2, jump.vertices.back().lat});
        jump.segment_modes.push_back(Mode::Rail);
        found = validate_geometry(jump);
        expect(std::any_of(found.begin(), found.end(),
                           [&](const Aberration& a) {
                               return a.kind == AberrationKind::Discontinuity &&
                                      a.index_a == jump.segment_count() - 1;
                           }),
               "seeded jump missed");

        const double s = rng.uniform(0.02, 0.06);
        const RoutePolyline cross = make_route({{-100.0 + jitter, lat},
                                                {-100.0 + jitter + s, lat + s},
                                                {-100.0 + jitter + s, lat},
                                                {-100.0 + jitter, lat + s}});
        found = validate_geometry(cross);
        expect(std::any_of(found.begin(), found.end(),
                           [](const Aberration& a) {
                               return a.kind == AberrationKind::SelfIntersection &&
                                      a.index_a == 0 && a.index_b == 2;
                           }),
               "seeded crossing missed");
    }
}

// The suite command, run twice through the real binary with one seed,
// produces byte-identical reports.
void criterion_determinism() {
    const char* bin = std::getenv("ROUTECHECK_BIN");
    expect(bin != nullptr && *bin != '\0',
           "ROUTECHECK_BIN must point at the routecheck binary (set by ctest)");
    const fs::path dir = working_dir() / "determinism";
    fs::create_directories(dir);

    const std::string cmd = std::string(bin) +
                            " suite --demo --demo-origins 40 --seed 7 --out " +
                            (dir / "run").string() + " > " + (dir / "log.txt").string() +
                            " 2>&1";
    const auto run_once = [&]() {
        const int status = std::system(cmd.c_str());
        expect(WIFEXITED(status), "suite run did not exit normally");
        expect(WEXITSTATUS(status) == 0,
               "suite run exited with status " + std::to_string(WEXITSTATUS(status)));
    };

    run_once();
    const std::string csv_a = read_file(dir / "run" / "report.csv");
    const std::string json_a = read_file(dir / "run" / "report.json");
    const std::string manifest_a = read_file(dir / "run" / "manifest.jsonl");
    expect(!csv_a.empty() && !json_a.empty(), "first suite run produced no reports");

    run_once();
    expect(read_file(dir / "run" / "report.csv") == csv_a, "report.csv changed between runs");
    expect(read_file(dir / "run" / "report.json") == json_a,
           "report.json changed between runs");
    expect(read_file(dir / "run" / "manifest.jsonl") == manifest_a,
           "manifest.jsonl changed between runs");
}

// Suites containing infeasible pairs complete, list the failures apart, and
// keep them out of the gate denominators.
void criterion_failure_handling() {
    ModalNetwork net;
    net.add_node("hub", {-100.2, 39.5}, true);
    net.add_node("a", {-100.25, 39.45}, false);
    net.add_node("b", {-100.15, 39.55}, false);
    net.add_node("c", {-100.22, 39.58}, false);
    net.add_node("island1", {-100.05, 39.3}, false);
    net.add_node("island2", {-100.04, 39.31}, false);
    net.add_edge("a", "hub", Mode::Rail);
    net.add_edge("b", "hub", Mode::Rail);
    net.add_edge("c", "hub", Mode::HhTruck);
    net.add_edge("island1", "island2", Mode::HhTruck);

    GridGenConfig grid_cfg;
    grid_cfg.seed = 9;
    grid_cfg.bbox = BoundingBox{-100.35, -100.0, 39.35, 39.7};
    grid_cfg.cellsize = 0.0007;  // cells well under a tenth of the narrow width
    const PopulationGrid grid = generate_population_grid(grid_cfg);

    const std::vector<std::string> origins{"a", "b", "c", "island1", "island2"};
    const std::vector<double> widths{800.0, 2500.0};
    const auto cases = generate_test_suite(net, origins, "hub", widths);
    expect(cases.size() == 10, "expected 10 cases");

    const SuiteReport report = run_suite(cases, grid);
    expect(report.failures.size() == 4, "expected 4 failure entries, got " +
                                            std::to_string(report.failures.size()));
    for (const CaseFailure& f : report.failures) {
        expect(f.case_id.rfind("island", 0) == 0,
               "unexpected failure case id " + f.case_id);
    }
    expect(report.records.size() == 3 * 6,
           "records must cover exactly the six feasible cases, got " +
               std::to_string(report.records.size()));
    expect(report.errors.empty(), "no processing errors expected");
    expect(report.verdict.pass, "feasible cases should gate clean");
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "day/night weighting exact to 1 ulp over 10k samples", 1.0,
         criterion_average_population},
        {2, "centroid zonal extraction equals the exhaustive scan", 30.0,
         criterion_zonal_oracle},
        {3, "bundled suite reproduces the 5%/1% tolerance envelope", 300.0,
         criterion_tolerance_envelope},
        {4, "buffer area matches the analytic capsule within 0.5%", 120.0,
         criterion_capsule_area},
        {5, "projection round trip, scale law, ground correction", 10.0,
         criterion_projection_laws},
        {6, "routing optimality and mode-priority ladder order", 60.0, criterion_routing},
        {7, "density methodology agreement and divergence", 60.0,
         criterion_density_methodology},
        {8, "KML round trip and aberration recall", 30.0, criterion_io_validation},
        {9, "suite reports are byte-identical across reruns", 600.0, criterion_determinism},
        {10, "infeasible pairs are listed apart and excluded from gates", 60.0,
         criterion_failure_handling},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > c.budget_s) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.1f", c.budget_s);
            error = "runtime " + std::to_string(elapsed) + " s exceeds the " + buf +
                    " s budget";
        }
        if (error.empty()) {
            std::printf("[PASS] criterion %2d: %s (%.2f s)\n", c.id, c.name, elapsed);
        } else {
            std::printf("[FAIL] criterion %2d: %s (%.2f s): %s\n", c.id, c.name, elapsed,
                        error.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("%d criteria FAILED\n", failures);
    }
    return failures;
}
