#include "routecheck/grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "routecheck/errors.hpp"

namespace routecheck {

double average_population(double day, double night) {
    if (!(day >= 0.0) || !(night >= 0.0)) {
        throw std::domain_error("average_population: counts must be non-negative");
    }
    return (day + 2.0 * night) / 3.0;
}

PopulationTriplet make_triplet(double day, double night) {
    return PopulationTriplet{day, night, average_population(day, night)};
}

GeoPoint PopulationGrid::cell_centroid(std::size_t row, std::size_t col) const {
    if (row >= nrows || col >= ncols) {
        throw std::out_of_range("cell_centroid: index out of range");
    }
    GeoPoint p;
    p.lon = xll + (static_cast<double>(col) + 0.5) * cellsize;
    p.lat = yll + (static_cast<double>(nrows - 1 - row) + 0.5) * cellsize;
    return p;
}

BoundingBox PopulationGrid::extent() const {
    return BoundingBox{xll, xll + static_cast<double>(ncols) * cellsize, yll,
                       yll + static_cast<double>(nrows) * cellsize};
}

double PopulationGrid::cell_diagonal_m() const {
    // Latitude scale bounds the longitude scale, so this is conservative.
    return cellsize * kMetersPerDegree * std::numbers::sqrt2;
}

// --- ASCII grid I/O ----------------------------------------------------------

namespace {

struct GridLayerData {
    std::size_t ncols = 0, nrows = 0;
    double xll = 0, yll = 0, cellsize = 0, nodata = -9999;
    std::vector<double> values;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double_token(const std::string& tok, const std::string& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("bad numeric value '" + tok + "'", where);
    }
    return v;
}

GridLayerData parse_layer(std::istream& in, const std::string& label) {
    GridLayerData g;
    std::map<std::string, double> header;
    std::string line;
    std::size_t line_no = 0;

    while (header.size() < 6) {
        if (!std::getline(in, line)) {
            throw ParseError("unexpected end of header", label + " line " + std::to_string(line_no));
        }
        ++line_no;
        std::istringstream ls(line);
        std::string key, value, extra;
        if (!(ls >> key >> value) || (ls >> extra)) {
            throw ParseError("header line must be 'key value'", label + " line " + std::to_string(line_no));
        }
        const std::string k = lower(key);
        if (k != "ncols" && k != "nrows" && k != "xllcorner" && k != "yllcorner" &&
            k != "cellsize" && k != "nodata_value") {
            throw ParseError("unknown header key '" + key + "'", label + " line " + std::to_string(line_no));
        }
        if (!header.emplace(k, parse_double_token(value, label + " line " + std::to_string(line_no))).second) {
            throw ParseError("duplicate header key '" + key + "'", label + " line " + std::to_string(line_no));
        }
    }

    const double ncols_d = header.at("ncols");
    const double nrows_d = header.at("nrows");
    if (ncols_d < 1 || nrows_d < 1 || ncols_d != std::floor(ncols_d) || nrows_d != std::floor(nrows_d)) {
        throw ParseError("ncols/nrows must be positive integers", label + " header");
    }
    g.ncols = static_cast<std::size_t>(ncols_d);
    g.nrows = static_cast<std::size_t>(nrows_d);
    g.xll = header.at("xllcorner");
    g.yll = header.at("yllcorner");
    g.cellsize = header.at("cellsize");
    g.nodata = header.at("nodata_value");
    if (!(g.cellsize > 0.0)) {
        throw ParseError("cellsize must be positive", label + " header");
    }
    const double lat_top = g.yll + static_cast<double>(g.nrows) * g.cellsize;
    if (g.yll <= -85.0 || lat_top >= 85.0) {
        throw ParseError("grid extent must lie strictly inside latitude +/-85", label + " header");
    }
    if (g.xll < -180.0 || g.xll + static_cast<double>(g.ncols) * g.cellsize > 180.0) {
        throw ParseError("grid extent must lie inside longitude +/-180", label + " header");
    }

    g.values.reserve(g.nrows * g.ncols);
    for (std::size_t r = 0; r < g.nrows; ++r) {
        if (!std::getline(in, line)) {
            throw ParseError("missing data row " + std::to_string(r), label + " line " + std::to_string(line_no + 1));
        }
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        std::size_t c = 0;
        while (ls >> tok) {
            if (c >= g.ncols) {
                throw ParseError("row " + std::to_string(r) + " has more than " +
                                     std::to_string(g.ncols) + " columns",
                                 label + " line " + std::to_string(line_no));
            }
            const double v =
                parse_double_token(tok, label + " line " + std::to_string(line_no));
            if (v != g.nodata && v < 0.0) {
                throw ParseError("negative population in row " + std::to_string(r),
                                 label + " line " + std::to_string(line_no));
            }
            g.values.push_back(v);
            ++c;
        }
        if (c != g.ncols) {
            throw ParseError("row " + std::to_string(r) + " has " + std::to_string(c) +
                                 " columns, expected " + std::to_string(g.ncols),
                             label + " line " + std::to_string(line_no));
        }
    }
    return g;
}

}  // namespace

PopulationGrid load_grid(std::istream& day_in, std::istream& night_in) {
    GridLayerData d = parse_layer(day_in, "day");
    GridLayerData n = parse_layer(night_in, "night");
    if (d.ncols != n.ncols || d.nrows != n.nrows || d.xll != n.xll || d.yll != n.yll ||
        d.cellsize != n.cellsize || d.nodata != n.nodata) {
        throw ParseError("day and night headers do not match", "night header");
    }
    PopulationGrid g;
    g.ncols = d.ncols;
    g.nrows = d.nrows;
    g.xll = d.xll;
    g.yll = d.yll;
    g.cellsize = d.cellsize;
    g.nodata = d.nodata;
    g.day = std::move(d.values);
    g.night = std::move(n.values);
    return g;
}

PopulationGrid load_grid_files(const std::filesystem::path& day_path,
                               const std::filesystem::path& night_path) {
    std::ifstream day_in(day_path);
    if (!day_in) throw ParseError("cannot open grid file", day_path.string());
    std::ifstream night_in(night_path);
    if (!night_in) throw ParseError("cannot open grid file", night_path.string());
    return load_grid(day_in, night_in);
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

void write_grid_layer(std::ostream& out, const PopulationGrid& grid, GridLayer layer) {
    std::string s;
    s += "ncols " + std::to_string(grid.ncols) + "\n";
    s += "nrows " + std::to_string(grid.nrows) + "\n";
    s += "xllcorner ";
    append_double(s, grid.xll);
    s += "\nyllcorner ";
    append_double(s, grid.yll);
    s += "\ncellsize ";
    append_double(s, grid.cellsize);
    s += "\nNODATA_value ";
    append_double(s, grid.nodata);
    s += "\n";
    const std::vector<double>& values = layer == GridLayer::Day ? grid.day : grid.night;
    for (std::size_t r = 0; r < grid.nrows; ++r) {
        for (std::size_t c = 0; c < grid.ncols; ++c) {
            if (c > 0) s += ' ';
            append_double(s, values[r * grid.ncols + c]);
        }
        s += '\n';
        out << s;
        s.clear();
    }
    if (grid.nrows == 0) out << s;
}

void write_grid_files(const PopulationGrid& grid, const std::filesystem::path& day_path,
                      const std::filesystem::path& night_path) {
    std::ofstream day_out(day_path);
    if (!day_out) throw ParseError("cannot write grid file", day_path.string());
    write_grid_layer(day_out, grid, GridLayer::Day);
    std::ofstream night_out(night_path);
    if (!night_out) throw ParseError("cannot write grid file", night_path.string());
    write_grid_layer(night_out, grid, GridLayer::Night);
}

// --- zonal extraction ---------------------------------------------------------

namespace {

struct Window {
    std::size_t row0 = 0, row1 = 0, col0 = 0, col1 = 0;  // inclusive
    bool empty = true;
};

// Conservative cell window: every cell whose centroid (or any k x k
// subcentroid) can lie within `width` of the geometry is included.
Window compute_window(const PopulationGrid& grid, std::span<const RoutePolyline> parts,
                      double width_m) {
    const double pad_m = width_m + grid.cell_diagonal_m();
    const BoundingBox bb = bounds(parts);
    const double pad_lat = pad_m / kMetersPerDegree;
    const double lat_lo = bb.lat_min - pad_lat;
    const double lat_hi = bb.lat_max + pad_lat;
    const double abs_lat = std::min(89.9, std::max(std::abs(lat_lo), std::abs(lat_hi)));
    const double pad_lon = pad_lat / std::cos(abs_lat * kDegToRad);
    const double lon_lo = bb.lon_min - pad_lon;
    const double lon_hi = bb.lon_max + pad_lon;

    // Centroid lat of row r is yll + (nrows - 1 - r + 0.5) * cellsize, decreasing in r.
    const double r_lo_d =
        static_cast<double>(grid.nrows) - 0.5 - (lat_hi - grid.yll) / grid.cellsize;
    const double r_hi_d =
        static_cast<double>(grid.nrows) - 0.5 - (lat_lo - grid.yll) / grid.cellsize;
    const double c_lo_d = (lon_lo - grid.xll) / grid.cellsize - 0.5;
    const double c_hi_d = (lon_hi - grid.xll) / grid.cellsize - 0.5;

    // Widen by one cell against floating-point slop; widened cells are still
    // tested for membership, so the result is unaffected.
    const double r0 = std::floor(r_lo_d) - 1.0;
    const double r1 = std::ceil(r_hi_d) + 1.0;
    const double c0 = std::floor(c_lo_d) - 1.0;
    const double c1 = std::ceil(c_hi_d) + 1.0;

    Window w;
    if (r1 < 0.0 || c1 < 0.0 || r0 >= static_cast<double>(grid.nrows) ||
        c0 >= static_cast<double>(grid.ncols)) {
        return w;
    }
    w.row0 = static_cast<std::size_t>(std::max(0.0, r0));
    w.row1 = std::min(grid.nrows - 1, static_cast<std::size_t>(std::max(0.0, r1)));
    w.col0 = static_cast<std::size_t>(std::max(0.0, c0));
    w.col1 = std::min(grid.ncols - 1, static_cast<std::size_t>(std::max(0.0, c1)));
    w.empty = w.row0 > w.row1 || w.col0 > w.col1;
    return w;
}

ZonalResult zonal_centroid_impl(const PopulationGrid& grid, std::span<const RoutePolyline> parts,
                                double width_m) {
    if (!(width_m > 0.0)) {
        throw std::domain_error("zonal_population_centroid: width must be positive");
    }
    const Window w = compute_window(grid, parts, width_m);
    if (w.empty) return ZonalResult{make_triplet(0.0, 0.0), false};

    const std::vector<RouteShape> shapes = make_shapes(parts);
    const std::size_t width_cells = w.col1 - w.col0 + 1;
    std::vector<double> lons(width_cells), lats(width_cells), dist(width_cells);
    for (std::size_t c = 0; c < width_cells; ++c) {
        lons[c] = grid.xll + (static_cast<double>(w.col0 + c) + 0.5) * grid.cellsize;
    }

    double day_sum = 0.0;
    double night_sum = 0.0;
    for (std::size_t r = w.row0; r <= w.row1; ++r) {
        const double lat =
            grid.yll + (static_cast<double>(grid.nrows - 1 - r) + 0.5) * grid.cellsize;
        std::fill(lats.begin(), lats.end(), lat);
        min_distance_batch(shapes, lons, lats, dist);
        const double* day_row = grid.day.data() + r * grid.ncols;
        const double* night_row = grid.night.data() + r * grid.ncols;
        for (std::size_t c = 0; c < width_cells; ++c) {
            if (dist[c] <= width_m) {
                const double dv = day_row[w.col0 + c];
                const double nv = night_row[w.col0 + c];
                if (!grid.is_nodata(dv)) day_sum += dv;
                if (!grid.is_nodata(nv)) night_sum += nv;
            }
        }
    }
    return ZonalResult{make_triplet(day_sum, night_sum), true};
}

ZonalResult zonal_area_weighted_impl(const PopulationGrid& grid,
                                     std::span<const RoutePolyline> parts, double width_m,
                                     int subsample_k) {
    if (!(width_m > 0.0)) {
        throw std::domain_error("zonal_population_area_weighted: width must be positive");
    }
    if (subsample_k < 2) {
        throw std::domain_error("zonal_population_area_weighted: subsample factor must be >= 2");
    }
    const Window w = compute_window(grid, parts, width_m);
    if (w.empty) return ZonalResult{make_triplet(0.0, 0.0), false};

    const std::vector<RouteShape> shapes = make_shapes(parts);
    const std::size_t width_cells = w.col1 - w.col0 + 1;
    const auto k = static_cast<std::size_t>(subsample_k);
    const double diag_m = grid.cell_diagonal_m();

    std::vector<double> lons(width_cells), lats(width_cells), dist(width_cells);
    std::vector<double> sub_lons(k * k), sub_lats(k * k), sub_dist(k * k);
    for (std::size_t c = 0; c < width_cells; ++c) {
        lons[c] = grid.xll + (static_cast<double>(w.col0 + c) + 0.5) * grid.cellsize;
    }

    double day_sum = 0.0;
    double night_sum = 0.0;
    for (std::size_t r = w.row0; r <= w.row1; ++r) {
        const double lat_base = grid.yll + static_cast<double>(grid.nrows - 1 - r) * grid.cellsize;
        std::fill(lats.begin(), lats.end(), lat_base + 0.5 * grid.cellsize);
        min_distance_batch(shapes, lons, lats, dist);
        const double* day_row = grid.day.data() + r * grid.ncols;
        const double* night_row = grid.night.data() + r * grid.ncols;
        for (std::size_t c = 0; c < width_cells; ++c) {
            // Cells whose centroid is more than a cell diagonal clear of the
            // boundary are wholly inside or outside; only boundary cells get
            // the k x k treatment.
            double frac = 0.0;
            if (dist[c] <= width_m - diag_m) {
                frac = 1.0;
            } else if (dist[c] > width_m + diag_m) {
                frac = 0.0;
            } else {
                const double lon_base = grid.xll + static_cast<double>(w.col0 + c) * grid.cellsize;
                std::size_t idx = 0;
                for (std::size_t i = 0; i < k; ++i) {
                    const double sub_lat =
                        lat_base +
                        (static_cast<double>(i) + 0.5) / static_cast<double>(k) * grid.cellsize;
                    for (std::size_t j = 0; j < k; ++j, ++idx) {
                        sub_lats[idx] = sub_lat;
                        sub_lons[idx] =
                            lon_base +
                            (static_cast<double>(j) + 0.5) / static_cast<double>(k) * grid.cellsize;
                    }
                }
                min_distance_batch(shapes, sub_lons, sub_lats, sub_dist);
                std::size_t hits = 0;
                for (std::size_t s = 0; s < k * k; ++s) {
                    if (sub_dist[s] <= width_m) ++hits;
                }
                frac = static_cast<double>(hits) / static_cast<double>(k * k);
            }
            if (frac > 0.0) {
                const double dv = day_row[w.col0 + c];
                const double nv = night_row[w.col0 + c];
                if (!grid.is_nodata(dv)) day_sum += dv * frac;
                if (!grid.is_nodata(nv)) night_sum += nv * frac;
            }
        }
    }
    return ZonalResult{make_triplet(day_sum, night_sum), true};
}

}  // namespace

ZonalResult zonal_population_centroid(const PopulationGrid& grid, const RoutePolyline& route,
                                      double width_m) {
    return zonal_centroid_impl(grid, std::span<const RoutePolyline>(&route, 1), width_m);
}

ZonalResult zonal_population_centroid(const PopulationGrid& grid,
                                      std::span<const RoutePolyline> parts, double width_m) {
    return zonal_centroid_impl(grid, parts, width_m);
}

ZonalResult zonal_population_area_weighted(const PopulationGrid& grid, const RoutePolyline& route,
                                           double width_m, int subsample_k) {
    return zonal_area_weighted_impl(grid, std::span<const RoutePolyline>(&route, 1), width_m,
                                    subsample_k);
}

ZonalResult zonal_population_area_weighted(const PopulationGrid& grid,
                                           std::span<const RoutePolyline> parts, double width_m,
                                           int subsample_k) {
    return zonal_area_weighted_impl(grid, parts, width_m, subsample_k);
}

// --- densities ----------------------------------------------------------------

const char* density_method_name(DensityMethod m) {
    switch (m) {
        case DensityMethod::WholeRoute: return "whole-route";
        case DensityMethod::SegmentWeighted: return "segment-weighted";
    }
    return "?";
}

namespace {

DensityResult density_whole_impl(const PopulationGrid& grid, std::span<const RoutePolyline> parts,
                                 double width_m, double spacing_factor) {
    if (!(spacing_factor >= 10.0)) {
        throw std::domain_error("density: spacing factor must be >= 10");
    }
    const ZonalResult z = zonal_centroid_impl(grid, parts, width_m);
    const double area_m2 = buffer_area_m2(parts, width_m, width_m / spacing_factor);
    if (!(area_m2 > 0.0)) {
        throw std::domain_error("density: buffer area is zero");
    }
    DensityResult d;
    d.method = DensityMethod::WholeRoute;
    d.population = z.population;
    d.area_km2 = area_m2 / 1e6;
    d.density_per_km2 = z.population.average / d.area_km2;
    d.overlaps_grid = z.overlaps_grid;
    return d;
}

}  // namespace

DensityResult density_whole_route(const PopulationGrid& grid, const RoutePolyline& route,
                                  double width_m, double spacing_factor) {
    return density_whole_impl(grid, std::span<const RoutePolyline>(&route, 1), width_m,
                              spacing_factor);
}

DensityResult density_whole_route(const PopulationGrid& grid, std::span<const RoutePolyline> parts,
                                  double width_m, double spacing_factor) {
    return density_whole_impl(grid, parts, width_m, spacing_factor);
}

DensityResult density_segment_weighted(const PopulationGrid& grid,
                                       std::span<const RoutePolyline> segments, double width_m,
                                       double spacing_factor) {
    if (segments.empty()) {
        throw std::domain_error("density_segment_weighted: no segments");
    }
    if (!(spacing_factor >= 10.0)) {
        throw std::domain_error("density: spacing factor must be >= 10");
    }
    double day_sum = 0.0;
    double night_sum = 0.0;
    double area_m2 = 0.0;
    bool overlaps = false;
    for (const RoutePolyline& seg : segments) {
        const ZonalResult z = zonal_population_centroid(grid, seg, width_m);
        day_sum += z.population.day;
        night_sum += z.population.night;
        overlaps = overlaps || z.overlaps_grid;
        area_m2 += buffer_area_m2(seg, width_m, width_m / spacing_factor);
    }
    if (!(area_m2 > 0.0)) {
        throw std::domain_error("density: buffer area is zero");
    }
    DensityResult d;
    d.method = DensityMethod::SegmentWeighted;
    d.population = make_triplet(day_sum, night_sum);
    d.area_km2 = area_m2 / 1e6;
    d.density_per_km2 = d.population.average / d.area_km2;
    d.overlaps_grid = overlaps;
    return d;
}

}  // namespace routecheck
