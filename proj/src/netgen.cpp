#include "routecheck/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace routecheck {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool chance(double p) { return uniform() < p; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

private:
    std::mt19937_64 eng_;
};

}  // namespace

ModalNetwork generate_network(const NetworkGenConfig& config) {
    if (config.node_count < 4) {
        throw std::invalid_argument("generate_network: need at least 4 nodes");
    }
    Rng rng(config.seed);
    ModalNetwork net;

    std::vector<GeoPoint> pos(static_cast<std::size_t>(config.node_count));
    for (std::size_t i = 0; i < pos.size(); ++i) {
        pos[i].lon = rng.uniform(config.bbox.lon_min, config.bbox.lon_max);
        pos[i].lat = rng.uniform(config.bbox.lat_min, config.bbox.lat_max);
    }

    std::vector<bool> on_rail(pos.size()), on_truck(pos.size()), on_barge(pos.size(), false);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        on_rail[i] = rng.chance(config.rail_share);
        on_truck[i] = rng.chance(config.truck_share);
        // Orphan nodes still get road access; isolated origins come from the
        // layer structure, not from nodes with no edges at all.
        if (!on_rail[i] && !on_truck[i]) on_truck[i] = true;
    }
    std::vector<std::size_t> barge_nodes;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (rng.chance(config.barge_share)) {
            barge_nodes.push_back(i);
            on_barge[i] = true;
        }
    }

    std::vector<int> mode_count(pos.size(), 0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        mode_count[i] = (on_rail[i] ? 1 : 0) + (on_truck[i] ? 1 : 0) + (on_barge[i] ? 1 : 0);
    }
    char name[32];
    for (std::size_t i = 0; i < pos.size(); ++i) {
        std::snprintf(name, sizeof(name), "n%03zu", i);
        const bool transfer = mode_count[i] >= 2 && rng.chance(config.transfer_chance);
        net.add_node(name, pos[i], transfer);
    }

    // Nearest-neighbour links within a layer; duplicates collapse via the set.
    std::vector<std::tuple<std::size_t, std::size_t, Mode>> seen;
    const auto link = [&](std::size_t a, std::size_t b, Mode mode) {
        const auto key = std::make_tuple(std::min(a, b), std::max(a, b), mode);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
        seen.push_back(key);
        std::snprintf(name, sizeof(name), "n%03zu", a);
        char other[32];
        std::snprintf(other, sizeof(other), "n%03zu", b);
        net.add_edge(name, other, mode);
    };

    const auto connect_layer = [&](const std::vector<bool>& member, int neighbors, Mode mode) {
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < member.size(); ++i) {
            if (member[i]) ids.push_back(i);
        }
        for (const std::size_t a : ids) {
            std::vector<std::pair<double, std::size_t>> dist;
            for (const std::size_t b : ids) {
                if (b == a) continue;
                dist.emplace_back(haversine_m(pos[a], pos[b]), b);
            }
            std::sort(dist.begin(), dist.end());
            const auto take = std::min<std::size_t>(static_cast<std::size_t>(neighbors), dist.size());
            for (std::size_t k = 0; k < take; ++k) {
                link(a, dist[k].second, mode);
            }
        }
    };
    connect_layer(on_rail, config.rail_neighbors, Mode::Rail);
    connect_layer(on_truck, config.truck_neighbors, Mode::HhTruck);

    // Waterway: one west-to-east chain.
    std::sort(barge_nodes.begin(), barge_nodes.end(),
              [&](std::size_t a, std::size_t b) { return pos[a].lon < pos[b].lon; });
    for (std::size_t k = 0; k + 1 < barge_nodes.size(); ++k) {
        link(barge_nodes[k], barge_nodes[k + 1], Mode::Barge);
    }

    return net;
}

PopulationGrid generate_population_grid(const GridGenConfig& config) {
    if (!(config.cellsize > 0.0)) {
        throw std::invalid_argument("generate_population_grid: cellsize must be positive");
    }
    Rng rng(config.seed);

    PopulationGrid grid;
    grid.cellsize = config.cellsize;
    grid.xll = config.bbox.lon_min;
    grid.yll = config.bbox.lat_min;
    grid.ncols = static_cast<std::size_t>(
        std::ceil((config.bbox.lon_max - config.bbox.lon_min) / config.cellsize));
    grid.nrows = static_cast<std::size_t>(
        std::ceil((config.bbox.lat_max - config.bbox.lat_min) / config.cellsize));
    grid.nodata = -9999.0;
    grid.day.assign(grid.nrows * grid.ncols, config.background);
    grid.night.assign(grid.nrows * grid.ncols, config.background);

    struct Blob {
        double lon, lat, sigma, day_peak, night_peak;
    };
    std::vector<Blob> blobs;
    blobs.reserve(static_cast<std::size_t>(config.blob_count));
    const double lon_margin = 0.05 * (config.bbox.lon_max - config.bbox.lon_min);
    const double lat_margin = 0.05 * (config.bbox.lat_max - config.bbox.lat_min);
    for (int b = 0; b < config.blob_count; ++b) {
        Blob blob{};
        blob.lon = rng.uniform(config.bbox.lon_min + lon_margin, config.bbox.lon_max - lon_margin);
        blob.lat = rng.uniform(config.bbox.lat_min + lat_margin, config.bbox.lat_max - lat_margin);
        blob.sigma = rng.uniform(config.blob_sigma_min, config.blob_sigma_max);
        const double peak = rng.uniform(config.blob_peak_min, config.blob_peak_max);
        blob.day_peak = peak * rng.uniform(0.6, 1.6);     // workplaces draw people in
        blob.night_peak = peak * rng.uniform(0.5, 1.4);   // residents sleep at home
        blobs.push_back(blob);
    }

    // Each blob only touches cells within 4 sigma of its center.
    for (const Blob& blob : blobs) {
        const double reach = 4.0 * blob.sigma;
        const auto col_lo = static_cast<std::ptrdiff_t>(
            std::floor((blob.lon - reach - grid.xll) / grid.cellsize));
        const auto col_hi = static_cast<std::ptrdiff_t>(
            std::ceil((blob.lon + reach - grid.xll) / grid.cellsize));
        const double top_lat = grid.yll + static_cast<double>(grid.nrows) * grid.cellsize;
        const auto row_lo = static_cast<std::ptrdiff_t>(
            std::floor((top_lat - (blob.lat + reach)) / grid.cellsize));
        const auto row_hi = static_cast<std::ptrdiff_t>(
            std::ceil((top_lat - (blob.lat - reach)) / grid.cellsize));
        const double inv2s2 = 1.0 / (2.0 * blob.sigma * blob.sigma);
        for (std::ptrdiff_t r = std::max<std::ptrdiff_t>(0, row_lo);
             r <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(grid.nrows) - 1, row_hi);
             ++r) {
            const double lat = grid.yll +
                               (static_cast<double>(grid.nrows - 1 - static_cast<std::size_t>(r)) +
                                0.5) *
                                   grid.cellsize;
            const double dlat = lat - blob.lat;
            for (std::ptrdiff_t c = std::max<std::ptrdiff_t>(0, col_lo);
                 c <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(grid.ncols) - 1, col_hi);
                 ++c) {
                const double lon = grid.xll + (static_cast<double>(c) + 0.5) * grid.cellsize;
                const double dlon = lon - blob.lon;
                const double g = std::exp(-(dlon * dlon + dlat * dlat) * inv2s2);
                const std::size_t idx =
                    static_cast<std::size_t>(r) * grid.ncols + static_cast<std::size_t>(c);
                grid.day[idx] += blob.day_peak * g;
                grid.night[idx] += blob.night_peak * g;
            }
        }
    }

    // Whole persons per cell, half-up.
    for (double& v : grid.day) v = std::floor(v + 0.5);
    for (double& v : grid.night) v = std::floor(v + 0.5);
    return grid;
}

}  // namespace routecheck
