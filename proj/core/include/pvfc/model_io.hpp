#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pvfc/linear_model.hpp"
#include "pvfc/svr.hpp"

namespace pvfc {

// Versioned whitespace-separated text. Numbers use shortest round-trip
// formatting, so a reloaded model predicts bit-identically.

void write_svr_model(std::ostream& out, const SvrModel& model);
SvrModel read_svr_model(std::istream& in, const std::string& source_name = "<stream>");
void write_linear_model(std::ostream& out, const LinearModel& model);
LinearModel read_linear_model(std::istream& in, const std::string& source_name = "<stream>");

void store_svr_model(const SvrModel& model, const std::filesystem::path& path);
SvrModel load_svr_model(const std::filesystem::path& path);
void store_linear_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_linear_model(const std::filesystem::path& path);

} // namespace pvfc
