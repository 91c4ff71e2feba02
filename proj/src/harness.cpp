#include "routecheck/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace routecheck {

double percent_difference(double candidate, double reference) {
    if (!(reference > 0.0)) {
        throw std::domain_error("percent_difference: reference must be positive");
    }
    return 100.0 * (candidate - reference) / reference;
}

const char* gate_name(Gate g) {
    switch (g) {
        case Gate::Pass: return "pass";
        case Gate::Warn: return "warn";
        case Gate::Fail: return "fail";
    }
    return "?";
}

Gate gate(double pct_diff) {
    if (!std::isfinite(pct_diff)) {
        throw std::domain_error("gate: percent difference must be finite");
    }
    const double mag = std::abs(pct_diff);
    if (mag <= 1.0) return Gate::Pass;
    if (mag <= 5.0) return Gate::Warn;
    return Gate::Fail;
}

// --- per-case analysis ----------------------------------------------------------

std::pair<AnalysisResult, AnalysisResult> analyze_route(const PopulationGrid& grid,
                                                        const RouteDocument& doc, double width_m,
                                                        const AnalysisParams& params,
                                                        const std::string& case_id) {
    doc.route.check();
    if (!(width_m > 0.0)) {
        throw std::domain_error("analyze_route: width must be positive");
    }
    if (params.subsample_k < 2) {
        throw std::domain_error("analyze_route: subsample factor must be >= 2");
    }
    if (!(params.spacing_factor >= 10.0) || !(params.independent_spacing_factor >= 10.0)) {
        throw std::domain_error("analyze_route: spacing factors must be >= 10");
    }

    AnalysisResult primary;
    primary.case_id = case_id.empty() ? doc.id : case_id;
    primary.width_m = width_m;
    primary.method = "primary";
    AnalysisResult independent = primary;
    independent.method = "independent";

    const double planar = planar_length_mercator_m(doc.route);
    const double corrected = ground_corrected_length_m(doc.route);
    const double geodesic = geodesic_length_m(doc.route);
    primary.distance_planar_mercator_m = independent.distance_planar_mercator_m = planar;
    primary.distance_ground_corrected_m = independent.distance_ground_corrected_m = corrected;
    primary.distance_geodesic_m = independent.distance_geodesic_m = geodesic;

    const ZonalResult centroid = zonal_population_centroid(grid, doc.route, width_m);
    primary.population = centroid.population;
    primary.overlaps_grid = centroid.overlaps_grid;
    const double area_primary_m2 =
        buffer_area_m2(doc.route, width_m, width_m / params.spacing_factor);
    primary.density.method = DensityMethod::WholeRoute;
    primary.density.population = centroid.population;
    primary.density.area_km2 = area_primary_m2 / 1e6;
    primary.density.density_per_km2 = centroid.population.average / primary.density.area_km2;
    primary.density.overlaps_grid = centroid.overlaps_grid;

    const ZonalResult weighted =
        zonal_population_area_weighted(grid, doc.route, width_m, params.subsample_k);
    independent.population = weighted.population;
    independent.overlaps_grid = weighted.overlaps_grid;
    const double area_independent_m2 =
        buffer_area_m2(doc.route, width_m, width_m / params.independent_spacing_factor);
    independent.density.method = DensityMethod::WholeRoute;
    independent.density.population = weighted.population;
    independent.density.area_km2 = area_independent_m2 / 1e6;
    independent.density.density_per_km2 =
        weighted.population.average / independent.density.area_km2;
    independent.density.overlaps_grid = weighted.overlaps_grid;

    return {std::move(primary), std::move(independent)};
}

CaseComparison compare_case(const TestCase& test, const AnalysisResult& primary,
                            const AnalysisResult& independent) {
    if (primary.case_id != independent.case_id || primary.case_id != test.id) {
        throw std::invalid_argument("compare_case: case id mismatch");
    }
    if (primary.width_m != independent.width_m || primary.width_m != test.width_m) {
        throw std::invalid_argument("compare_case: width mismatch");
    }

    CaseComparison out;
    const auto add = [&](const char* metric, double candidate, double reference) {
        if (!(reference > 0.0)) {
            out.undefined.push_back(
                {test.id, std::string("undefined comparison for '") + metric +
                              "': reference is not positive"});
            return;
        }
        ComparisonRecord rec;
        rec.case_id = test.id;
        rec.metric = metric;
        rec.candidate = candidate;
        rec.reference = reference;
        rec.pct_diff = percent_difference(candidate, reference);
        rec.gate = gate(rec.pct_diff);
        out.records.push_back(std::move(rec));
    };

    add("population_average", primary.population.average, independent.population.average);
    add("density_whole_route", primary.density.density_per_km2,
        independent.density.density_per_km2);
    add("distance", primary.distance_ground_corrected_m, independent.distance_geodesic_m);
    return out;
}

Verdict suite_verdict(std::span<const ComparisonRecord> records) {
    Verdict v;
    if (records.empty()) {
        v.vacuous = true;
        return v;
    }
    std::size_t passes = 0;
    bool any_fail = false;
    for (const ComparisonRecord& r : records) {
        if (r.gate == Gate::Pass) ++passes;
        if (r.gate == Gate::Fail) any_fail = true;
    }
    v.pass_share = static_cast<double>(passes) / static_cast<double>(records.size());
    v.pass = !any_fail && 2 * passes > records.size();
    return v;
}

// --- suite runner ---------------------------------------------------------------

namespace {

struct WorkItem {
    TestCase test;
    std::shared_ptr<const RouteDocument> doc;  // null: failed case or load error
    std::string load_error;
};

struct CaseOutcome {
    std::vector<ComparisonRecord> records;
    std::vector<CaseFailure> errors;
    bool failed_route = false;
};

SuiteReport run_items(std::vector<WorkItem> items, const PopulationGrid& grid,
                      const AnalysisParams& params, int jobs) {
    std::vector<CaseOutcome> outcomes(items.size());

    const auto process = [&](std::size_t i) {
        const WorkItem& item = items[i];
        CaseOutcome& out = outcomes[i];
        if (item.test.failed()) {
            out.failed_route = true;
            return;
        }
        if (!item.doc) {
            out.errors.push_back({item.test.id, item.load_error.empty()
                                                    ? std::string("route geometry unavailable")
                                                    : item.load_error});
            return;
        }
        try {
            const auto [primary, independent] =
                analyze_route(grid, *item.doc, item.test.width_m, params, item.test.id);
            CaseComparison cmp = compare_case(item.test, primary, independent);
            out.records = std::move(cmp.records);
            out.errors = std::move(cmp.undefined);
        } catch (const std::exception& e) {
            out.errors.push_back({item.test.id, e.what()});
        }
    };

    std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, items.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= items.size()) return;
                    process(i);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    SuiteReport report;
    report.cases_run = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
        CaseOutcome& out = outcomes[i];
        for (ComparisonRecord& r : out.records) report.records.push_back(std::move(r));
        for (CaseFailure& e : out.errors) report.errors.push_back(std::move(e));
        if (out.failed_route) {
            report.failures.push_back(
                {items[i].test.id, "route generation failed for every transport mode"});
        }
    }
    std::sort(report.records.begin(), report.records.end(),
              [](const ComparisonRecord& a, const ComparisonRecord& b) {
                  return std::tie(a.case_id, a.metric) < std::tie(b.case_id, b.metric);
              });
    const auto by_id = [](const CaseFailure& a, const CaseFailure& b) {
        return std::tie(a.case_id, a.reason) < std::tie(b.case_id, b.reason);
    };
    std::sort(report.failures.begin(), report.failures.end(), by_id);
    std::sort(report.errors.begin(), report.errors.end(), by_id);

    report.verdict = suite_verdict(report.records);
    for (const ComparisonRecord& r : report.records) {
        auto& [count, share] = report.per_metric[r.metric];
        ++count;
        if (r.gate == Gate::Pass) share += 1.0;  // counts for now, share below
    }
    for (auto& [metric, entry] : report.per_metric) {
        entry.second = entry.first == 0 ? 0.0 : entry.second / static_cast<double>(entry.first);
    }
    return report;
}

}  // namespace

SuiteReport run_suite(std::span<const ManifestEntry> entries, const SuiteInputs& inputs) {
    if (inputs.grid == nullptr) {
        throw std::invalid_argument("run_suite: population grid is required");
    }
    std::vector<WorkItem> items;
    items.reserve(entries.size());
    for (const ManifestEntry& entry : entries) {
        WorkItem item;
        item.test = entry.test;
        if (!entry.test.failed()) {
            if (!entry.kml.empty()) {
                try {
                    auto doc = std::make_shared<RouteDocument>(
                        parse_kml_file(inputs.kml_dir / entry.kml));
                    item.doc = std::move(doc);
                } catch (const std::exception& e) {
                    item.load_error = e.what();
                }
            } else if (inputs.net != nullptr) {
                try {
                    const auto routed = route_with_mode_priority(
                        *inputs.net, entry.test.origin, entry.test.dest, inputs.route_options);
                    if (routed) {
                        auto doc = std::make_shared<RouteDocument>();
                        doc->id = entry.test.id;
                        doc->route = routed->route.line;
                        item.doc = std::move(doc);
                    } else {
                        item.load_error = "manifest says ok but routing found no feasible path";
                    }
                } catch (const std::exception& e) {
                    item.load_error = e.what();
                }
            } else {
                item.load_error = "no KML path in manifest and no network provided";
            }
        }
        items.push_back(std::move(item));
    }
    return run_items(std::move(items), *inputs.grid, inputs.params, inputs.jobs);
}

SuiteReport run_suite(std::span<const SuiteCase> cases, const PopulationGrid& grid,
                      const AnalysisParams& params, int jobs) {
    std::vector<WorkItem> items;
    items.reserve(cases.size());
    for (const SuiteCase& sc : cases) {
        items.push_back(WorkItem{sc.test, sc.doc, {}});
    }
    return run_items(std::move(items), grid, params, jobs);
}

// --- reports --------------------------------------------------------------------

namespace {

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string report_csv(const SuiteReport& report) {
    std::string out = "case_id,metric,candidate,reference,pct_diff,gate\n";
    for (const ComparisonRecord& r : report.records) {
        out += r.case_id;
        out += ',';
        out += r.metric;
        out += ',';
        out += full_precision(r.candidate);
        out += ',';
        out += full_precision(r.reference);
        out += ',';
        out += full_precision(r.pct_diff);
        out += ',';
        out += gate_name(r.gate);
        out += '\n';
    }
    return out;
}

std::string report_json(const SuiteReport& report,
                        const std::map<std::string, std::string>& config_echo) {
    nlohmann::json j;
    j["verdict"] = report.verdict.pass ? "pass" : "fail";
    j["vacuous"] = report.verdict.vacuous;
    j["pass_share"] = report.verdict.pass_share;

    std::size_t warns = 0, fails = 0, passes = 0;
    for (const ComparisonRecord& r : report.records) {
        if (r.gate == Gate::Pass) ++passes;
        if (r.gate == Gate::Warn) ++warns;
        if (r.gate == Gate::Fail) ++fails;
    }
    j["counts"] = {
        {"cases", report.cases_run},   {"records", report.records.size()},
        {"pass", passes},              {"warn", warns},
        {"fail", fails},               {"failures", report.failures.size()},
        {"errors", report.errors.size()},
    };
    nlohmann::json per_metric = nlohmann::json::object();
    for (const auto& [metric, entry] : report.per_metric) {
        per_metric[metric] = {{"records", entry.first}, {"pass_share", entry.second}};
    }
    j["per_metric"] = per_metric;
    nlohmann::json failures = nlohmann::json::array();
    for (const CaseFailure& f : report.failures) {
        failures.push_back({{"case_id", f.case_id}, {"reason", f.reason}});
    }
    j["failures"] = failures;
    nlohmann::json errors = nlohmann::json::array();
    for (const CaseFailure& e : report.errors) {
        errors.push_back({{"case_id", e.case_id}, {"reason", e.reason}});
    }
    j["errors"] = errors;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [key, value] : config_echo) config[key] = value;
    j["config"] = config;
    return j.dump(2) + "\n";
}

}  // namespace routecheck
