#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "plancal/sample.hpp"

namespace plancal {

inline constexpr const char* kSampleCsvHeader = "j1_deg,j2_deg,j3_deg,j4_deg,j5_deg,j6_deg,dial_mm";

// On-disk row: joint angles in degrees, dial reading in mm. Kept separate
// from Sample (radians) so the text round trip is bit-exact in file units.
struct SampleRow {
    std::array<double, 6> q_deg{};
    double dial_mm = 0.0;
};

SampleRow to_row(const Sample& sample);
Sample from_row(const SampleRow& row);

std::string rows_to_csv(const std::vector<SampleRow>& rows);
// Throws ConfigError with a 1-based line number on any malformed content.
std::vector<SampleRow> rows_from_csv(const std::string& text);

std::string samples_to_csv(const std::vector<Sample>& samples);
std::vector<Sample> samples_from_csv(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

void write_samples_csv(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> read_samples_csv(const std::filesystem::path& path);

// Objective-per-iteration curve for external plotting.
std::string curve_to_csv(const std::vector<double>& objective_mm2);

}  // namespace plancal
