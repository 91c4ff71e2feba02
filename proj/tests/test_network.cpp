#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "netoracle.hpp"
#include "routecheck/errors.hpp"
#include "routecheck/network.hpp"
#include "routecheck/validate.hpp"
#include "testutil.hpp"

using namespace routecheck;
using testutil::oracle_shortest;
using testutil::OraclePath;
using testutil::random_network;

namespace {

ModalNetwork from_csv(const std::string& nodes, const std::string& edges) {
    std::istringstream n(nodes), e(edges);
    return load_network(n, e);
}

const std::string kTinyNodes =
    "id,lon,lat,transfer\n"
    "a,-100.0,39.0,0\n"
    "b,-99.9,39.0,1\n"
    "c,-99.8,39.0,0\n";

}  // namespace

TEST_CASE("network csv loading") {
    SUBCASE("happy path computes geodesic lengths") {
        const auto net = from_csv(kTinyNodes, "from,to,mode\na,b,rail\nb,c,hh_truck\n");
        REQUIRE(net.edges().size() == 2);
        CHECK(net.edges()[0].length_m ==
              doctest::Approx(haversine_m({-100.0, 39.0}, {-99.9, 39.0})).epsilon(1e-12));
        CHECK(net.nodes()[1].transfer);
    }
    SUBCASE("bad header") {
        CHECK_THROWS_AS(from_csv("id,lon,lat\n", "from,to,mode\n"), ParseError);
    }
    SUBCASE("unknown mode names the line") {
        try {
            from_csv(kTinyNodes, "from,to,mode\na,b,mule\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("self loops and unknown endpoints are rejected") {
        CHECK_THROWS_AS(from_csv(kTinyNodes, "from,to,mode\na,a,rail\n"), ParseError);
        CHECK_THROWS_AS(from_csv(kTinyNodes, "from,to,mode\na,zz,rail\n"), ParseError);
    }
    SUBCASE("duplicate node ids are rejected") {
        CHECK_THROWS_AS(
            from_csv("id,lon,lat,transfer\nx,0,0,0\nx,1,1,0\n", "from,to,mode\n"), ParseError);
    }
    SUBCASE("write and reload round trip") {
        testutil::Rng rng(17);
        const ModalNetwork net = random_network(rng);
        const auto dir = std::filesystem::temp_directory_path() / "routecheck-test-net";
        std::filesystem::create_directories(dir);
        write_network_files(net, dir / "nodes.csv", dir / "edges.csv");
        const ModalNetwork back = load_network_files(dir / "nodes.csv", dir / "edges.csv");
        REQUIRE(back.nodes().size() == net.nodes().size());
        REQUIRE(back.edges().size() == net.edges().size());
        for (std::size_t i = 0; i < net.nodes().size(); ++i) {
            CHECK(back.nodes()[i].id == net.nodes()[i].id);
            CHECK(back.nodes()[i].transfer == net.nodes()[i].transfer);
            CHECK(std::abs(back.nodes()[i].pos.lon - net.nodes()[i].pos.lon) < 1e-9);
        }
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("shortest route basics") {
    // b sits between a and c; the two-hop path is the only rail connection
    // when the direct edge is absent, and loses to it when present.
    const auto net = from_csv(kTinyNodes, "from,to,mode\na,b,rail\nb,c,rail\n");
    const auto hop = shortest_route(net, "a", "c", kModePriorityLadder[0]);
    REQUIRE(hop.has_value());
    CHECK(hop->node_sequence == std::vector<std::string>{"a", "b", "c"});

    const auto with_direct =
        from_csv(kTinyNodes, "from,to,mode\na,b,rail\nb,c,rail\na,c,rail\n");
    const auto direct = shortest_route(with_direct, "a", "c", kModePriorityLadder[0]);
    REQUIRE(direct.has_value());
    CHECK(direct->node_sequence == std::vector<std::string>{"a", "c"});
    CHECK(direct->length_m < hop->length_m);

    SUBCASE("degenerate origin == dest is an input error") {
        CHECK_THROWS_AS(shortest_route(net, "a", "a", kModePriorityLadder[0]),
                        std::invalid_argument);
    }
    SUBCASE("unknown node is a lookup error") {
        CHECK_THROWS_AS(shortest_route(net, "a", "zz", kModePriorityLadder[0]),
                        std::out_of_range);
    }
    SUBCASE("no path is a value, not an exception") {
        const auto none = shortest_route(net, "a", "c", kModePriorityLadder[2]);  // truck only
        CHECK_FALSE(none.has_value());
    }
    SUBCASE("polyline carries mode tags and passes validation") {
        const auto mixed = from_csv(kTinyNodes, "from,to,mode\na,b,rail\nb,c,hh_truck\n");
        const auto r = shortest_route(mixed, "a", "c", kModePriorityLadder[1]);
        REQUIRE(r.has_value());
        r->line.check();
        CHECK(r->line.segment_modes.front() == Mode::Rail);
        CHECK(r->line.segment_modes.back() == Mode::HhTruck);
        CHECK(validate_geometry(r->line).empty());
    }
}

TEST_CASE("equal-length ties pick the lexicographically smallest node sequence") {
    // Two mirror-image detours; segment lengths are bitwise equal by symmetry.
    const std::string nodes =
        "id,lon,lat,transfer\n"
        "a,-100.0,39.0,0\n"
        "d,-99.9,39.0,0\n"
        "p,-99.95,39.02,0\n"
        "q,-99.95,38.98,0\n";
    const auto net = from_csv(nodes, "from,to,mode\na,p,rail\np,d,rail\na,q,rail\nq,d,rail\n");
    const auto r = shortest_route(net, "a", "d", kModePriorityLadder[0]);
    REQUIRE(r.has_value());
    CHECK(r->node_sequence == std::vector<std::string>{"a", "p", "d"});
}

TEST_CASE("mode priority ladder") {
    SUBCASE("rail wins even when a shorter truck path exists") {
        const std::string nodes =
            "id,lon,lat,transfer\n"
            "o,-100.0,39.0,0\n"
            "m,-99.95,39.3,0\n"
            "d,-99.9,39.0,0\n";
        const auto net =
            from_csv(nodes, "from,to,mode\no,d,hh_truck\no,m,rail\nm,d,rail\n");
        const auto r = route_with_mode_priority(net, "o", "d");
        REQUIRE(r.has_value());
        CHECK(r->rung == 1);
        CHECK(r->modes == kModePriorityLadder[0]);
        CHECK(r->route.length_m >
              shortest_route(net, "o", "d", kModePriorityLadder[2])->length_m);
    }
    SUBCASE("truck feeds rail through a transfer node") {
        const std::string nodes =
            "id,lon,lat,transfer\n"
            "o,-100.0,39.0,0\n"
            "t,-99.95,39.0,1\n"
            "d,-99.8,39.0,0\n";
        const auto net = from_csv(nodes, "from,to,mode\no,t,hh_truck\nt,d,rail\n");
        const auto r = route_with_mode_priority(net, "o", "d");
        REQUIRE(r.has_value());
        CHECK(r->rung == 2);
        CHECK(r->modes == (ModeSet{}.with(Mode::HhTruck).with(Mode::Rail)));
    }
    SUBCASE("mode changes require the transfer flag") {
        const std::string nodes =
            "id,lon,lat,transfer\n"
            "o,-100.0,39.0,0\n"
            "t,-99.95,39.0,0\n"  // not a terminal
            "d,-99.8,39.0,0\n";
        const auto net = from_csv(nodes, "from,to,mode\no,t,hh_truck\nt,d,rail\n");
        CHECK_FALSE(route_with_mode_priority(net, "o", "d").has_value());
    }
    SUBCASE("isolated origin records a failure") {
        const auto net = from_csv(kTinyNodes, "from,to,mode\nb,c,rail\n");
        CHECK_FALSE(route_with_mode_priority(net, "a", "c").has_value());
    }
}

TEST_CASE("routing agrees with exhaustive enumeration on small graphs") {
    testutil::Rng rng(123);
    int feasible_seen = 0;
    for (int iter = 0; iter < 120; ++iter) {
        const ModalNetwork net = random_network(rng);
        const std::uint32_t origin = static_cast<std::uint32_t>(rng.index(net.nodes().size()));
        std::uint32_t dest = static_cast<std::uint32_t>(rng.index(net.nodes().size()));
        if (dest == origin) dest = (dest + 1) % static_cast<std::uint32_t>(net.nodes().size());
        const ModeSet allowed = kModePriorityLadder[rng.index(4)];

        const auto got = shortest_route(net, net.nodes()[origin].id, net.nodes()[dest].id,
                                        allowed);
        const OraclePath expect = oracle_shortest(net, origin, dest, allowed);

        if (!std::isfinite(expect.length)) {
            CHECK_FALSE(got.has_value());
            continue;
        }
        ++feasible_seen;
        REQUIRE(got.has_value());
        CHECK(got->length_m == doctest::Approx(expect.length).epsilon(1e-12));
        CHECK(got->node_sequence == expect.nodes);
    }
    CHECK(feasible_seen > 20);

    SUBCASE("origin-destination symmetry of the length") {
        testutil::Rng rng2(321);
        for (int iter = 0; iter < 60; ++iter) {
            const ModalNetwork net = random_network(rng2);
            const auto a = net.nodes()[rng2.index(net.nodes().size())].id;
            auto b = net.nodes()[rng2.index(net.nodes().size())].id;
            if (a == b) continue;
            const ModeSet allowed = kModePriorityLadder[rng2.index(4)];
            const auto fwd = shortest_route(net, a, b, allowed);
            const auto rev = shortest_route(net, b, a, allowed);
            CHECK(fwd.has_value() == rev.has_value());
            if (fwd && rev) {
                CHECK(fwd->length_m == doctest::Approx(rev->length_m).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("suite generation") {
    const std::string nodes =
        "id,lon,lat,transfer\n"
        "o1,-100.0,39.0,0\n"
        "o2,-100.0,39.1,0\n"
        "o3,-100.05,39.05,0\n"
        "x,-99.5,38.5,0\n"  // isolated
        "d,-99.9,39.05,0\n";
    const auto net = from_csv(
        nodes, "from,to,mode\no1,d,rail\no2,d,rail\no3,o1,rail\n");

    SUBCASE("three feasible origins make six cases") {
        const std::vector<std::string> origins{"o1", "o2", "o3"};
        const auto cases =
            generate_test_suite(net, origins, "d", std::vector<double>{800.0, 2500.0});
        REQUIRE(cases.size() == 6);
        CHECK(cases[0].test.id == "o1-800");
        CHECK(cases[1].test.id == "o1-2500");
        CHECK(cases[0].doc == cases[1].doc);  // geometry shared across widths
        for (const auto& sc : cases) {
            CHECK_FALSE(sc.test.failed());
            REQUIRE(sc.doc != nullptr);
            CHECK(validate_geometry(sc.doc->route).empty());
        }
    }
    SUBCASE("failures are marked and carried") {
        const std::vector<std::string> origins{"o1", "x"};
        const auto cases =
            generate_test_suite(net, origins, "d", std::vector<double>{800.0, 2500.0});
        REQUIRE(cases.size() == 4);
        CHECK_FALSE(cases[0].test.failed());
        CHECK(cases[2].test.failed());
        CHECK(cases[2].doc == nullptr);
        CHECK(cases[2].test.id == "x-800");
    }
}

TEST_CASE("manifest round trip") {
    const std::string nodes =
        "id,lon,lat,transfer\n"
        "o1,-100.0,39.0,0\n"
        "x,-99.5,38.5,0\n"
        "d,-99.9,39.05,0\n";
    const auto net = from_csv(nodes, "from,to,mode\no1,d,rail\n");
    const std::vector<std::string> origins{"o1", "x"};
    const auto cases = generate_test_suite(net, origins, "d", std::vector<double>{800.0});

    std::vector<ManifestEntry> entries;
    for (const auto& sc : cases) {
        entries.push_back({sc.test, sc.doc ? sc.doc->id + ".kml" : ""});
    }
    std::ostringstream out;
    write_manifest(out, entries);
    std::istringstream in(out.str());
    const auto back = parse_manifest(in);
    REQUIRE(back.size() == entries.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].test.id == entries[i].test.id);
        CHECK(back[i].test.width_m == entries[i].test.width_m);
        CHECK(back[i].test.failed() == entries[i].test.failed());
        CHECK(back[i].test.modes == entries[i].test.modes);
        CHECK(back[i].kml == entries[i].kml);
    }

    SUBCASE("mangled lines are rejected with the line number") {
        std::istringstream bad("{\"id\": \"x\"\n");
        CHECK_THROWS_AS(parse_manifest(bad), ParseError);
    }
}

TEST_CASE("mode set string round trip") {
    for (const ModeSet& set : kModePriorityLadder) {
        CHECK(mode_set_from_string(set.to_string()) == set);
    }
    CHECK(kModePriorityLadder[1].to_string() == "rail+hh_truck");
    CHECK_THROWS_AS(mode_set_from_string("rail+mule"), std::invalid_argument);
}
