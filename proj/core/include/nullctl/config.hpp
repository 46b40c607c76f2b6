#pragma once

#include "nullctl/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace nullctl {

/// Reads a NetworkSpec from JSON text. Schema (see README "Network files"):
///
///   {
///     "lambda":       ["7.5", "2"],
///     "mu":           [["4", "7"], ["2", "4"]],
///     "nu":           ["1", "1"],
///     "lambda_hat":   ["0", "0"],              optional, default 0
///     "mu_hat":       [["0", "0"], ["0", "0"]], optional, default 0
///     "interarrival": ["exponential", "erlang(3)"], optional, default exponential
///     "scv":          ["1", "0.3333"],          optional, derived from interarrival
///     "x0_hat":       ["-1", "-1"]              optional, default 0
///   }
///
/// Rates are decimal strings so parsing never depends on the C locale; bare JSON
/// numbers are accepted and read through their shortest textual form.
NetworkSpec parse_spec(std::string_view json_text);
NetworkSpec load_spec(const std::filesystem::path& path);

/// Inverse of parse_spec (rationals written exactly).
std::string dump_spec(const NetworkSpec& spec);

}  // namespace nullctl
