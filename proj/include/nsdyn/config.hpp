#pragma once

#include "nsdyn/scenario.hpp"

#include <filesystem>
#include <string_view>

namespace nsdyn {

/// Parses the sectioned key = value format:
///
///   # comment
///   [model]        scenario = <built-in id>, name = <model>, id = <run id>
///   [params]       <parameter key> = <number>
///   [initial]      <coordinate label> = <number>, or state = <n comma-separated numbers>
///   [integration]  rel_tol, abs_tol, max_step, event_tol, stick_epsilon, t_end, output_step, max_steps
///   [analysis]     classify, radius, n_probes, seed, workers, tail_fraction, sommerfeld_pair,
///                  basin, basin_n, basin_x, basin_x_lo, basin_x_hi, basin_x_n (same for y)
///
/// A built-in scenario supplies every default; [model] name alone starts from
/// the model defaults and a zero state. Overridden parameters are marked
/// user-provided. Errors are ConfigError messages of the form
/// "line N: section.key: ...", with a suggestion for unknown names.
[[nodiscard]] ScenarioSpec parse_config(std::string_view text);
[[nodiscard]] ScenarioSpec read_config(const std::filesystem::path& path);

}  // namespace nsdyn
