#pragma once

#include "nsdyn/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace nsdyn {

/// CSV text: header "t,<labels>,stuck,event,surface", then one row per sample
/// (stuck = bit mask of stuck surfaces, event and surface empty) with event
/// rows interleaved in time order (stuck empty). An event row precedes the
/// sample taken at the same time. Numbers use 17 significant digits.
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);

/// Inverse of trajectory_csv. Throws ConfigError with the line number on
/// malformed input. Mode history and statistics are not part of the format.
[[nodiscard]] Trajectory parse_trajectory_csv(std::string_view text);

/// Throws IoError with the path on failure; DomainError for an empty trajectory.
void export_trajectory(const Trajectory& traj, const std::filesystem::path& path);
[[nodiscard]] Trajectory read_trajectory(const std::filesystem::path& path);

/// Summary JSON with a fixed field order, terminated by a newline.
[[nodiscard]] std::string summary_json(const RunSummary& summary);
[[nodiscard]] RunSummary parse_summary_json(std::string_view text);

void export_summary(const RunSummary& summary, const std::filesystem::path& path);
[[nodiscard]] RunSummary read_summary(const std::filesystem::path& path);

/// Python/matplotlib script that plots the velocity channels and the
/// oscillation coordinate over time from `csv_name`, resolved next to the
/// script.
[[nodiscard]] std::string plot_script(const RunSummary& summary, const SystemModel& model,
                                      const std::string& csv_name);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace nsdyn
