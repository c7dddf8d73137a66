#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pvfc/grid.hpp"

namespace pvfc {

/// Columnar text layout for one (variable, lead) field:
///
///     variable,lead_days,lat_min,lat_max,lon_min,lon_max,n_lat,n_lon
///     ssr,0,35,50,5,20,31,31
///     date,i_lat,i_lon,value
///     2011-01-01,0,0,1234.5
///     ...
///
/// Data rows are date-major then lat-major then lon, with no gaps. Numbers are
/// written in shortest round-trip form so store -> load is bit-exact.
void write_field(std::ostream& out, const GridField& field);
GridField read_field(std::istream& in, const std::string& source_name = "<stream>");

void store_field(const GridField& field, const std::filesystem::path& path);
GridField load_field(const std::filesystem::path& path);

/// Conventional file name inside a weather directory, e.g. `ssr_lead03.txt`.
std::string field_file_name(Variable variable, int lead_days);

} // namespace pvfc
