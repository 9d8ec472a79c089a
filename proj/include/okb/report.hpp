#pragma once

#include <json.hpp>

#include <string>

namespace okb {

using Json = nlohmann::ordered_json;

// FNV-1a hash of the canonical config serialization, embedded in every
// report for reproducibility.
std::string config_hash(const Json& config);

// Report skeleton with version, command, config and its hash.
Json base_report(const std::string& command, const Json& config);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Static SVG line plot from a CSV table. kind "ladder" plots column 1
// against column 0; kind "field" plots the value column of a field CSV
// against the first coordinate, skipping missing nodes. Byte-stable for
// identical input; empty tables are an error.
std::string svg_plot_from_csv(const std::string& csv, const std::string& kind);

}  // namespace okb
