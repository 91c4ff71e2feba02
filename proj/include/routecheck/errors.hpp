#pragma once

#include <stdexcept>
#include <string>

namespace routecheck {

// Error for malformed input files (ASCII grids, KML, network CSV).
// `where` carries a line number or element path, whichever the format has.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, const std::string& where)
        : std::runtime_error(where.empty() ? message : where + ": " + message),
          where_(where) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace routecheck
