#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "routecheck/geo.hpp"

namespace routecheck {

// Day/night population with the 1/3-day + 2/3-night weighted average.
struct PopulationTriplet {
    double day = 0.0;
    double night = 0.0;
    double average = 0.0;
};

// (day + 2 * night) / 3, full precision; rounding happens only in rendered
// output. Throws std::domain_error on negative input.
double average_population(double day, double night);

PopulationTriplet make_triplet(double day, double night);

// Geographic raster of persons per cell, day and night layers, row 0 at the
// northern edge. Immutable after load; safe to share across threads.
struct PopulationGrid {
    std::size_t ncols = 0;
    std::size_t nrows = 0;
    double xll = 0.0;       // lower-left corner, degrees
    double yll = 0.0;
    double cellsize = 0.0;  // degrees
    double nodata = -9999.0;
    std::vector<double> day;    // row-major
    std::vector<double> night;

    double day_at(std::size_t row, std::size_t col) const { return day[row * ncols + col]; }
    double night_at(std::size_t row, std::size_t col) const { return night[row * ncols + col]; }
    bool is_nodata(double v) const { return v == nodata; }

    // lon = xll + (col + 0.5) * cellsize, lat = yll + (nrows - 1 - row + 0.5) * cellsize.
    GeoPoint cell_centroid(std::size_t row, std::size_t col) const;

    BoundingBox extent() const;
    double cell_diagonal_m() const;
};

// Two ASCII grid streams (day, night) with matching headers. Header lines
// `ncols nrows xllcorner yllcorner cellsize NODATA_value` (case-insensitive
// keys, any order), then nrows whitespace-separated rows, north first.
PopulationGrid load_grid(std::istream& day_in, std::istream& night_in);
PopulationGrid load_grid_files(const std::filesystem::path& day_path,
                               const std::filesystem::path& night_path);

enum class GridLayer { Day, Night };
void write_grid_layer(std::ostream& out, const PopulationGrid& grid, GridLayer layer);
void write_grid_files(const PopulationGrid& grid, const std::filesystem::path& day_path,
                      const std::filesystem::path& night_path);

struct ZonalResult {
    PopulationTriplet population;
    bool overlaps_grid = false;  // false: buffer bounding box misses the grid
};

// Centroid rule: a cell contributes its full value iff its centroid lies
// within the buffer. Equals the exhaustive all-cells scan exactly.
ZonalResult zonal_population_centroid(const PopulationGrid& grid, const RoutePolyline& route,
                                      double width_m);
ZonalResult zonal_population_centroid(const PopulationGrid& grid,
                                      std::span<const RoutePolyline> parts, double width_m);

// Area-weighted rule: each cell contributes value * (fraction of k x k
// subcell centroids inside the buffer). k >= 2.
ZonalResult zonal_population_area_weighted(const PopulationGrid& grid, const RoutePolyline& route,
                                           double width_m, int subsample_k);
ZonalResult zonal_population_area_weighted(const PopulationGrid& grid,
                                           std::span<const RoutePolyline> parts, double width_m,
                                           int subsample_k);

enum class DensityMethod { WholeRoute, SegmentWeighted };
const char* density_method_name(DensityMethod m);

struct DensityResult {
    DensityMethod method = DensityMethod::WholeRoute;
    double density_per_km2 = 0.0;
    PopulationTriplet population;
    double area_km2 = 0.0;
    bool overlaps_grid = false;
};

// Average population over the buffer divided by the buffer footprint area
// (quadrature at spacing = width / spacing_factor).
DensityResult density_whole_route(const PopulationGrid& grid, const RoutePolyline& route,
                                  double width_m, double spacing_factor = 20.0);
DensityResult density_whole_route(const PopulationGrid& grid, std::span<const RoutePolyline> parts,
                                  double width_m, double spacing_factor = 20.0);

// Per-segment population and area summed independently before dividing;
// regions covered by several segment buffers are double-counted on both
// sides of the ratio.
DensityResult density_segment_weighted(const PopulationGrid& grid,
                                       std::span<const RoutePolyline> segments, double width_m,
                                       double spacing_factor = 20.0);

}  // namespace routecheck
