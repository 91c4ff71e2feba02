#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "routecheck/grid.hpp"
#include "routecheck/kml.hpp"
#include "routecheck/network.hpp"

namespace routecheck {

// Signed percent difference of a candidate against a reference value.
// Throws std::domain_error when reference <= 0 (the caller records those).
double percent_difference(double candidate, double reference);

enum class Gate { Pass, Warn, Fail };
const char* gate_name(Gate g);

// |pd| <= 1 pass, <= 5 warn, else fail; boundaries go to the milder verdict.
Gate gate(double pct_diff);

struct ComparisonRecord {
    std::string case_id;
    std::string metric;
    double candidate = 0.0;
    double reference = 0.0;
    double pct_diff = 0.0;
    Gate gate = Gate::Pass;
};

// Everything computed for one route at one buffer width by one method family.
struct AnalysisResult {
    std::string case_id;
    double width_m = 0.0;
    PopulationTriplet population;
    DensityResult density;
    double distance_planar_mercator_m = 0.0;
    double distance_ground_corrected_m = 0.0;
    double distance_geodesic_m = 0.0;
    std::string method;  // "primary" | "independent"
    bool overlaps_grid = true;
};

struct AnalysisParams {
    double spacing_factor = 20.0;              // primary area quadrature, spacing = w/factor
    double independent_spacing_factor = 40.0;  // finer grid for the independent family
    int subsample_k = 4;                       // area-weighted extraction subcells
};

// Primary family: centroid-rule population, quadrature area at the default
// spacing. Independent family: area-weighted population, finer quadrature.
// Distances (shared geometry) are filled into both results.
std::pair<AnalysisResult, AnalysisResult> analyze_route(const PopulationGrid& grid,
                                                        const RouteDocument& doc, double width_m,
                                                        const AnalysisParams& params = {},
                                                        const std::string& case_id = "");

struct CaseFailure {
    std::string case_id;
    std::string reason;
};

struct CaseComparison {
    std::vector<ComparisonRecord> records;
    std::vector<CaseFailure> undefined;  // reference <= 0: recorded, not thrown
};

// One record per metric: average population, whole-route density, distance
// (ground-corrected Mercator against geodesic). The independent family is
// always the reference. Throws std::invalid_argument on id/width mismatch.
CaseComparison compare_case(const TestCase& test, const AnalysisResult& primary,
                            const AnalysisResult& independent);

struct Verdict {
    bool pass = true;
    bool vacuous = false;
    double pass_share = 0.0;  // share of records with |pd| <= 1
};

// Pass iff no record gates fail and strictly more than half gate pass.
// Empty record sets pass vacuously, flagged.
Verdict suite_verdict(std::span<const ComparisonRecord> records);

struct SuiteReport {
    std::vector<ComparisonRecord> records;  // ordered by case id, then metric
    std::vector<CaseFailure> failures;      // route generation failures
    std::vector<CaseFailure> errors;        // per-case processing errors
    Verdict verdict;
    std::size_t cases_run = 0;
    std::map<std::string, std::pair<std::size_t, double>> per_metric;  // count, pass share
};

struct SuiteInputs {
    const PopulationGrid* grid = nullptr;
    const ModalNetwork* net = nullptr;  // geometry fallback when no KML path
    std::filesystem::path kml_dir;      // base directory for manifest KML paths
    AnalysisParams params;
    RouteOptions route_options;
    int jobs = 0;  // worker threads; 0 = hardware concurrency
};

// Runs every manifest entry through both method families. Failures and
// per-case errors are carried in the report; the suite always completes.
// Output is deterministic for fixed inputs regardless of the job count.
SuiteReport run_suite(std::span<const ManifestEntry> entries, const SuiteInputs& inputs);

// In-memory variant for suites that were just generated.
SuiteReport run_suite(std::span<const SuiteCase> cases, const PopulationGrid& grid,
                      const AnalysisParams& params = {}, int jobs = 0);

// case_id,metric,candidate,reference,pct_diff,gate
std::string report_csv(const SuiteReport& report);

// Verdict, counts, shares, failure and error lists, plus the caller's
// resolved configuration echo (seed included).
std::string report_json(const SuiteReport& report,
                        const std::map<std::string, std::string>& config_echo);

}  // namespace routecheck
