#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "gpimdp/gp.h"
#include "gpimdp/imdp.h"
#include "gpimdp/synthesis.h"

namespace gpimdp::io {

/// Reads a transition CSV with header x_1..x_n,u,xplus_1..xplus_n (actions
/// 0-based). Lines starting with '#' are comments. Throws IoError naming the path when it is missing or malformed.
gp::Dataset readDataset(std::filesystem::path const& path, std::size_t stateDim, int actions);
void writeDataset(std::ostream& out, gp::Dataset const& data);

/// Shortest decimal text that round-trips the double.
std::string formatNumber(double v);

/// One row per product state: state_id,region_id,dfa_state,action,p_lower,p_upper.
void writeStrategy(std::ostream& out, Pimdp const& p, synthesis::ValueResult const& values);

/// Writes `j` as indented JSON followed by a newline; creates parent directories.
void writeJson(std::filesystem::path const& path, nlohmann::json const& j);
void writeText(std::filesystem::path const& path, std::string const& content);

}  // namespace gpimdp::io
