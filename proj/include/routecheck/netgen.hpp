#pragma once

#include <cstdint>

#include "routecheck/geo.hpp"
#include "routecheck/grid.hpp"
#include "routecheck/network.hpp"

namespace routecheck {

// Seeded generators for self-contained test assets. Reproducible across
// platforms: all randomness comes from std::mt19937_64 through explicit
// mappings, never through distribution objects.

struct NetworkGenConfig {
    std::uint64_t seed = 1;
    int node_count = 120;
    BoundingBox bbox{-100.7, -99.7, 39.0, 40.0};
    double rail_share = 0.65;     // nodes participating in the rail layer
    double truck_share = 0.78;    // nodes participating in the road layer
    double barge_share = 0.10;    // nodes strung into the waterway chain
    int rail_neighbors = 2;       // nearest-neighbour links per rail node
    int truck_neighbors = 3;
    double transfer_chance = 0.85;  // multi-mode nodes flagged as terminals
};

ModalNetwork generate_network(const NetworkGenConfig& config);

struct GridGenConfig {
    std::uint64_t seed = 1;
    BoundingBox bbox{-100.7, -99.7, 39.0, 40.0};
    double cellsize = 0.0007;  // degrees
    int blob_count = 25;       // population centers
    double background = 2.0;   // persons per cell away from centers
    double blob_peak_min = 40.0;
    double blob_peak_max = 400.0;
    double blob_sigma_min = 0.01;  // degrees
    double blob_sigma_max = 0.05;
};

// Smooth day/night fields: shared population centers with different day and
// night amplitudes, rounded to whole persons per cell.
PopulationGrid generate_population_grid(const GridGenConfig& config);

}  // namespace routecheck
