#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "routecheck/geo.hpp"

namespace routecheck {

// One test route plus its identification and bookkeeping tags.
struct RouteDocument {
    std::string id;
    RoutePolyline route;
    std::map<std::string, std::string> metadata;
};

// Parses the KML subset: every LineString in document order contributes its
// coordinates (lon,lat[,alt] tuples, altitude dropped); the enclosing
// Placemark name selects the segment mode when it matches a mode tag;
// Document <name> becomes the id and Document ExtendedData the metadata.
// Namespaced and bare element names are both accepted. Duplicate vertices
// and other geometry defects survive parsing so the validator can see them.
RouteDocument parse_kml(std::string_view text);
RouteDocument parse_kml_file(const std::filesystem::path& path);

// One Placemark per contiguous mode run, coordinates with 9 decimal places.
// parse_kml(serialize_kml(doc)) reproduces the document.
std::string serialize_kml(const RouteDocument& doc);
void write_kml_file(const RouteDocument& doc, const std::filesystem::path& path);

}  // namespace routecheck
