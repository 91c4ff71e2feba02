#include "routecheck/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "routecheck/errors.hpp"
#include "routecheck/harness.hpp"
#include "routecheck/netgen.hpp"
#include "routecheck/validate.hpp"

namespace fs = std::filesystem;

namespace routecheck {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string fmt_persons(double v) {  // half-up integer rendering for tables
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%-10lld", static_cast<long long>(std::floor(v + 0.5)));
    return buf;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (const double v : values) {
        if (!out.empty()) out += ',';
        out += fmt("%g", v);
    }
    return out;
}

// Shared analysis knobs; every command that computes embeds the resolved
// values (and the seed) into its JSON output.
struct CommonParams {
    std::vector<double> widths{800.0, 2500.0};
    double spacing_factor = 20.0;
    double independent_spacing_factor = 40.0;
    int subsample_k = 4;
    double max_leg_m = 5000.0;
    std::uint64_t seed = 1;
    int jobs = 0;

    AnalysisParams analysis() const {
        AnalysisParams p;
        p.spacing_factor = spacing_factor;
        p.independent_spacing_factor = independent_spacing_factor;
        p.subsample_k = subsample_k;
        return p;
    }
    RouteOptions route_options() const { return RouteOptions{max_leg_m}; }

    void echo_into(std::map<std::string, std::string>& config) const {
        config["widths_m"] = join_doubles(widths);
        config["spacing_factor"] = fmt("%g", spacing_factor);
        config["independent_spacing_factor"] = fmt("%g", independent_spacing_factor);
        config["subsample_k"] = std::to_string(subsample_k);
        config["max_leg_m"] = fmt("%g", max_leg_m);
        config["seed"] = std::to_string(seed);
        config["jobs"] = std::to_string(jobs);
    }
};

void add_common_options(CLI::App* cmd, CommonParams& params) {
    cmd->add_option("--widths", params.widths, "Buffer widths in meters")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--spacing-factor", params.spacing_factor,
                    "Area quadrature spacing = width / factor")
        ->check(CLI::Range(10.0, 1000.0));
    cmd->add_option("--independent-spacing-factor", params.independent_spacing_factor,
                    "Quadrature factor for the independent method family")
        ->check(CLI::Range(10.0, 1000.0));
    cmd->add_option("--subsample-k", params.subsample_k,
                    "Area-weighted extraction uses k x k subcells")
        ->check(CLI::Range(2, 64));
    cmd->add_option("--max-leg-m", params.max_leg_m,
                    "Densify generated routes to this segment length")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", params.seed, "Random seed, recorded in outputs");
    cmd->add_option("--jobs", params.jobs, "Suite worker threads (0 = auto)");
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file", path.string());
    out << content;
}

// --- route -----------------------------------------------------------------------

struct RouteArgs {
    std::string nodes, edges, origin, dest, out_dir;
    CommonParams params;
};

int cmd_route(const RouteArgs& args, std::ostream& out) {
    const ModalNetwork net = load_network_files(args.nodes, args.edges);
    net.require_node(args.origin);
    net.require_node(args.dest);

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    const std::vector<std::string> origins{args.origin};
    const auto cases = generate_test_suite(net, origins, args.dest, args.params.widths,
                                           args.params.route_options());

    std::vector<ManifestEntry> entries;
    std::string kml_name;
    for (const SuiteCase& sc : cases) {
        ManifestEntry entry;
        entry.test = sc.test;
        if (sc.doc) {
            kml_name = sc.doc->id + ".kml";
            entry.kml = kml_name;
        }
        entries.push_back(std::move(entry));
    }
    if (cases.front().doc) {
        write_kml_file(*cases.front().doc, out_dir / kml_name);
    }
    std::ofstream manifest(out_dir / "manifest.jsonl", std::ios::app | std::ios::binary);
    if (!manifest) throw ParseError("cannot write manifest", (out_dir / "manifest.jsonl").string());
    write_manifest(manifest, entries);

    const TestCase& tc = cases.front().test;
    if (tc.failed()) {
        out << args.origin << " -> " << args.dest
            << ": no feasible route for any transport mode (failure recorded)\n";
    } else {
        const double length = geodesic_length_m(cases.front().doc->route);
        out << args.origin << " -> " << args.dest << ": modes " << tc.modes.to_string()
            << " (priority " << *tc.rung << "), length " << fmt("%.3f", length / 1000.0)
            << " km, " << kml_name << " written\n";
    }
    return 0;
}

// --- analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
    std::string day, night, kml, json_path;
    CommonParams params;
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
    const PopulationGrid grid = load_grid_files(args.day, args.night);
    RouteDocument doc = parse_kml_file(args.kml);
    if (doc.id.empty()) doc.id = fs::path(args.kml).stem().string();

    out << "route " << doc.id << " (" << doc.route.vertices.size() << " vertices)\n";
    out << "width_m  method       day        night      average    density/km2  area_km2  "
           "planar_km  corrected_km  geodesic_km\n";

    nlohmann::json results = nlohmann::json::array();
    bool overlap_warning = false;
    for (const double width : args.params.widths) {
        const auto [primary, independent] =
            analyze_route(grid, doc, width, args.params.analysis());
        for (const AnalysisResult* r : {&primary, &independent}) {
            out << fmt("%-8g", r->width_m) << " " << r->method
                << (r->method == "primary" ? "      " : "  ") << fmt_persons(r->population.day)
                << " " << fmt_persons(r->population.night) << " "
                << fmt_persons(r->population.average)
                << " " << fmt("%-12.2f", r->density.density_per_km2) << " "
                << fmt("%-9.3f", r->density.area_km2) << " "
                << fmt("%-10.3f", r->distance_planar_mercator_m / 1000.0) << " "
                << fmt("%-13.3f", r->distance_ground_corrected_m / 1000.0) << " "
                << fmt("%.3f", r->distance_geodesic_m / 1000.0) << "\n";
            overlap_warning = overlap_warning || !r->overlaps_grid;

            nlohmann::json jr;
            jr["case_id"] = r->case_id;
            jr["width_m"] = r->width_m;
            jr["method"] = r->method;
            jr["population"] = {{"day", r->population.day},
                                {"night", r->population.night},
                                {"average", r->population.average}};
            jr["density_per_km2"] = r->density.density_per_km2;
            jr["area_km2"] = r->density.area_km2;
            jr["distance_planar_mercator_m"] = r->distance_planar_mercator_m;
            jr["distance_ground_corrected_m"] = r->distance_ground_corrected_m;
            jr["distance_geodesic_m"] = r->distance_geodesic_m;
            jr["overlaps_grid"] = r->overlaps_grid;
            results.push_back(std::move(jr));
        }
        // Both density methodologies, for routes with several mode runs.
        const auto runs = split_mode_runs(doc.route);
        if (runs.size() > 1) {
            const DensityResult segment_weighted = density_segment_weighted(
                grid, runs, width, args.params.spacing_factor);
            out << "         segment-weighted density (" << runs.size()
                << " mode runs): " << fmt("%.2f", segment_weighted.density_per_km2)
                << " persons/km2\n";
        }
    }
    if (overlap_warning) {
        out << "warning: route buffer does not overlap the population grid; populations are "
               "zero\n";
    }

    if (!args.json_path.empty()) {
        std::map<std::string, std::string> config;
        args.params.echo_into(config);
        config["day_grid"] = args.day;
        config["night_grid"] = args.night;
        config["kml"] = args.kml;
        nlohmann::json j;
        j["results"] = results;
        nlohmann::json cfg = nlohmann::json::object();
        for (const auto& [k, v] : config) cfg[k] = v;
        j["config"] = cfg;
        write_text_file(args.json_path, j.dump(2) + "\n");
    }
    return 0;
}

// --- suite -----------------------------------------------------------------------

struct SuiteArgs {
    bool demo = false;
    int demo_nodes = 120;
    int demo_origins = 0;          // 0: every node except the destination
    double demo_cellsize = 0.0007;  // degrees; default keeps cells <= 800/10 m
    std::string manifest, day, night, nodes, edges, kml_dir, out_dir;
    CommonParams params;
};

// Deterministic destination: the node closest to the network's center.
std::string pick_center_node(const ModalNetwork& net) {
    BoundingBox bb{180.0, -180.0, 90.0, -90.0};
    for (const NetworkNode& n : net.nodes()) {
        bb.lon_min = std::min(bb.lon_min, n.pos.lon);
        bb.lon_max = std::max(bb.lon_max, n.pos.lon);
        bb.lat_min = std::min(bb.lat_min, n.pos.lat);
        bb.lat_max = std::max(bb.lat_max, n.pos.lat);
    }
    const GeoPoint center{0.5 * (bb.lon_min + bb.lon_max), 0.5 * (bb.lat_min + bb.lat_max)};
    std::string best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const NetworkNode& n : net.nodes()) {
        const double d = haversine_m(n.pos, center);
        if (d < best_dist || (d == best_dist && n.id < best)) {
            best_dist = d;
            best = n.id;
        }
    }
    return best;
}

int cmd_suite(const SuiteArgs& args, std::ostream& out) {
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    std::map<std::string, std::string> config;
    args.params.echo_into(config);
    config["out"] = args.out_dir;

    PopulationGrid grid;
    std::vector<ManifestEntry> entries;
    SuiteInputs inputs;
    inputs.params = args.params.analysis();
    inputs.route_options = args.params.route_options();
    inputs.jobs = args.params.jobs;

    ModalNetwork net;
    if (args.demo) {
        // Self-contained demo: generate every asset under --out, write it in
        // the interchange formats, then read it all back and run.
        NetworkGenConfig net_cfg;
        net_cfg.seed = args.params.seed;
        net_cfg.node_count = args.demo_nodes;
        GridGenConfig grid_cfg;
        grid_cfg.seed = args.params.seed ^ 0x9e3779b97f4a7c15ull;
        grid_cfg.bbox = net_cfg.bbox;
        grid_cfg.cellsize = args.demo_cellsize;

        write_network_files(generate_network(net_cfg), out_dir / "nodes.csv",
                            out_dir / "edges.csv");
        write_grid_files(generate_population_grid(grid_cfg), out_dir / "day.asc",
                         out_dir / "night.asc");
        net = load_network_files(out_dir / "nodes.csv", out_dir / "edges.csv");
        grid = load_grid_files(out_dir / "day.asc", out_dir / "night.asc");

        const std::string dest = pick_center_node(net);
        std::vector<std::string> origins;
        for (const NetworkNode& n : net.nodes()) {
            if (n.id != dest) origins.push_back(n.id);
        }
        if (args.demo_origins > 0 && static_cast<std::size_t>(args.demo_origins) < origins.size()) {
            origins.resize(static_cast<std::size_t>(args.demo_origins));
        }
        const auto cases = generate_test_suite(net, origins, dest, args.params.widths,
                                               args.params.route_options());

        fs::create_directories(out_dir / "routes");
        std::string last_doc;
        for (const SuiteCase& sc : cases) {
            ManifestEntry entry;
            entry.test = sc.test;
            if (sc.doc) {
                entry.kml = "routes/" + sc.doc->id + ".kml";
                if (sc.doc->id != last_doc) {
                    write_kml_file(*sc.doc, out_dir / entry.kml);
                    last_doc = sc.doc->id;
                }
            }
            entries.push_back(std::move(entry));
        }
        std::ofstream manifest_out(out_dir / "manifest.jsonl", std::ios::binary);
        write_manifest(manifest_out, entries);
        manifest_out.close();

        std::ifstream manifest_in(out_dir / "manifest.jsonl");
        entries = parse_manifest(manifest_in);
        inputs.kml_dir = out_dir;

        config["demo"] = "true";
        config["demo_nodes"] = std::to_string(args.demo_nodes);
        config["demo_origins"] = std::to_string(args.demo_origins);
        config["demo_cellsize"] = fmt("%g", args.demo_cellsize);
        config["destination"] = dest;
    } else {
        if (args.manifest.empty() || args.day.empty() || args.night.empty()) {
            throw std::invalid_argument(
                "suite needs --manifest, --day and --night (or --demo)");
        }
        grid = load_grid_files(args.day, args.night);
        std::ifstream manifest_in(args.manifest);
        if (!manifest_in) throw ParseError("cannot open manifest", args.manifest);
        entries = parse_manifest(manifest_in);
        if (!args.kml_dir.empty()) {
            inputs.kml_dir = args.kml_dir;
        } else {
            inputs.kml_dir = fs::path(args.manifest).parent_path();
        }
        if (!args.nodes.empty() && !args.edges.empty()) {
            net = load_network_files(args.nodes, args.edges);
            inputs.net = &net;
        }
        config["manifest"] = args.manifest;
        config["day_grid"] = args.day;
        config["night_grid"] = args.night;
        config["kml_dir"] = inputs.kml_dir.string();
    }

    inputs.grid = &grid;
    const SuiteReport report = run_suite(entries, inputs);

    write_text_file(out_dir / "report.csv", report_csv(report));
    write_text_file(out_dir / "report.json", report_json(report, config));

    out << "cases: " << report.cases_run << ", records: " << report.records.size()
        << ", failures: " << report.failures.size() << ", errors: " << report.errors.size()
        << "\n";
    out << "pass share (|pd| <= 1%): " << fmt("%.1f", 100.0 * report.verdict.pass_share)
        << "%\n";
    for (const auto& [metric, entry] : report.per_metric) {
        out << "  " << metric << ": " << entry.first << " records, "
            << fmt("%.1f", 100.0 * entry.second) << "% pass\n";
    }
    out << "verdict: " << (report.verdict.pass ? "pass" : "fail")
        << (report.verdict.vacuous ? " (vacuous)" : "") << "\n";

    if (report.verdict.vacuous) return 2;
    return report.verdict.pass ? 0 : 1;
}

// --- validate --------------------------------------------------------------------

struct ValidateArgs {
    std::string kml, json_path;
    GeometryThresholds thresholds;
};

int cmd_validate(const ValidateArgs& args, std::ostream& out) {
    const RouteDocument doc = parse_kml_file(args.kml);
    const auto aberrations = validate_geometry(doc.route, args.thresholds);

    nlohmann::json list = nlohmann::json::array();
    for (const Aberration& a : aberrations) {
        out << aberration_name(a.kind);
        switch (a.kind) {
            case AberrationKind::DuplicateVertex:
                out << " at vertex " << a.index_a << " (separation "
                    << fmt("%.3f", a.measure) << " m)";
                break;
            case AberrationKind::Spike:
                out << " at vertex " << a.index_a << " (turn " << fmt("%.1f", a.measure)
                    << " deg)";
                break;
            case AberrationKind::Discontinuity:
                out << " at segment " << a.index_a << " (length " << fmt("%.1f", a.measure)
                    << " m)";
                break;
            case AberrationKind::SelfIntersection:
                out << " between segments " << a.index_a << " and " << a.index_b;
                break;
        }
        out << "\n";
        list.push_back({{"kind", aberration_name(a.kind)},
                        {"index_a", a.index_a},
                        {"index_b", a.index_b},
                        {"measure", a.measure}});
    }
    if (aberrations.empty()) {
        out << "clean: no aberrations found\n";
    } else {
        out << aberrations.size() << " aberration(s) found\n";
    }

    if (!args.json_path.empty()) {
        nlohmann::json j;
        j["kml"] = args.kml;
        j["aberrations"] = list;
        j["clean"] = aberrations.empty();
        j["thresholds"] = {{"duplicate_m", args.thresholds.duplicate_m},
                           {"spike_angle_deg", args.thresholds.spike_angle_deg},
                           {"spike_leg_m", args.thresholds.spike_leg_m},
                           {"jump_m", args.thresholds.jump_m}};
        write_text_file(args.json_path, j.dump(2) + "\n");
    }
    return aberrations.empty() ? 0 : 1;
}

// --- gen-network -----------------------------------------------------------------

struct GenNetworkArgs {
    std::string out_dir;
    NetworkGenConfig config;
    std::vector<double> bbox;  // lon_min, lat_min, lon_max, lat_max
};

int cmd_gen_network(const GenNetworkArgs& args, std::ostream& out) {
    NetworkGenConfig cfg = args.config;
    if (!args.bbox.empty()) {
        if (args.bbox.size() != 4) {
            throw std::invalid_argument("--bbox needs lon_min,lat_min,lon_max,lat_max");
        }
        cfg.bbox = BoundingBox{args.bbox[0], args.bbox[2], args.bbox[1], args.bbox[3]};
    }
    const ModalNetwork net = generate_network(cfg);
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    write_network_files(net, out_dir / "nodes.csv", out_dir / "edges.csv");

    std::size_t transfer = 0;
    std::array<std::size_t, 3> by_mode{0, 0, 0};
    for (const NetworkNode& n : net.nodes()) {
        if (n.transfer) ++transfer;
    }
    for (const NetworkEdge& e : net.edges()) {
        ++by_mode[static_cast<std::size_t>(e.mode)];
    }
    out << net.nodes().size() << " nodes (" << transfer << " transfer), " << net.edges().size()
        << " edges (rail " << by_mode[0] << ", hh_truck " << by_mode[1] << ", barge "
        << by_mode[2] << "), seed " << cfg.seed << "\n";
    return 0;
}

}  // namespace

// --- entry point -------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multimodal route assessment with differential verification"};
    app.require_subcommand(1);
    const char* config_env = std::getenv("ROUTECHECK_CONFIG");
    app.set_config("--config", config_env ? config_env : "",
                   "Configuration file (flags take precedence)");

    RouteArgs route_args;
    AnalyzeArgs analyze_args;
    SuiteArgs suite_args;
    ValidateArgs validate_args;
    GenNetworkArgs gen_args;

    CLI::App* route = app.add_subcommand("route", "Route one origin-destination pair");
    route->add_option("--nodes", route_args.nodes, "nodes.csv")->required();
    route->add_option("--edges", route_args.edges, "edges.csv")->required();
    route->add_option("--origin", route_args.origin)->required();
    route->add_option("--dest", route_args.dest)->required();
    route->add_option("--out", route_args.out_dir, "Output directory")->required();
    add_common_options(route, route_args.params);

    CLI::App* analyze = app.add_subcommand("analyze", "Analyze one route against the grids");
    analyze->add_option("--day", analyze_args.day, "Day population grid")->required();
    analyze->add_option("--night", analyze_args.night, "Night population grid")->required();
    analyze->add_option("--kml", analyze_args.kml, "Route KML")->required();
    analyze->add_option("--json", analyze_args.json_path, "Write full-precision JSON here");
    add_common_options(analyze, analyze_args.params);

    CLI::App* suite = app.add_subcommand("suite", "Run a verification suite");
    suite->add_flag("--demo", suite_args.demo, "Generate and run the bundled synthetic suite");
    suite->add_option("--demo-nodes", suite_args.demo_nodes, "Demo network size");
    suite->add_option("--demo-origins", suite_args.demo_origins,
                      "Limit demo origins (0 = all nodes)");
    suite->add_option("--demo-cellsize", suite_args.demo_cellsize,
                      "Demo population grid cell size, degrees")
        ->check(CLI::PositiveNumber);
    suite->add_option("--manifest", suite_args.manifest, "Suite manifest (JSON lines)");
    suite->add_option("--day", suite_args.day, "Day population grid");
    suite->add_option("--night", suite_args.night, "Night population grid");
    suite->add_option("--nodes", suite_args.nodes, "nodes.csv for geometry recomputation");
    suite->add_option("--edges", suite_args.edges, "edges.csv for geometry recomputation");
    suite->add_option("--kml-dir", suite_args.kml_dir, "Base directory for manifest KML paths");
    suite->add_option("--out", suite_args.out_dir, "Report output directory")->required();
    add_common_options(suite, suite_args.params);

    CLI::App* validate = app.add_subcommand("validate", "Check a route for geometry aberrations");
    validate->add_option("--kml", validate_args.kml, "Route KML")->required();
    validate->add_option("--json", validate_args.json_path, "Write the JSON listing here");
    validate->add_option("--dup-m", validate_args.thresholds.duplicate_m,
                         "Duplicate vertex separation threshold");
    validate->add_option("--spike-angle", validate_args.thresholds.spike_angle_deg,
                         "Spike turn angle threshold (degrees)");
    validate->add_option("--spike-leg", validate_args.thresholds.spike_leg_m,
                         "Spike short-leg threshold (meters)");
    validate->add_option("--jump-m", validate_args.thresholds.jump_m,
                         "Suspicious jump length threshold");

    CLI::App* gen = app.add_subcommand("gen-network", "Generate a synthetic modal network");
    gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
    gen->add_option("--seed", gen_args.config.seed);
    gen->add_option("--nodes", gen_args.config.node_count)->check(CLI::Range(4, 100000));
    gen->add_option("--bbox", gen_args.bbox, "lon_min,lat_min,lon_max,lat_max")
        ->delimiter(',');
    gen->add_option("--rail-share", gen_args.config.rail_share)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--truck-share", gen_args.config.truck_share)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--barge-share", gen_args.config.barge_share)->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (route->parsed()) return cmd_route(route_args, out);
        if (analyze->parsed()) return cmd_analyze(analyze_args, out);
        if (suite->parsed()) return cmd_suite(suite_args, out);
        if (validate->parsed()) return cmd_validate(validate_args, out);
        if (gen->parsed()) return cmd_gen_network(gen_args, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace routecheck
