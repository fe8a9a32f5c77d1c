#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "headmotion/trajectory.hpp"

namespace hm {

// Trajectory CSV: header `t,rx,ry,rz[,speaking]`, one row per frame, `t` in
// seconds at 1/sample_rate spacing, `speaking` in {0,1}. Numbers are written
// in shortest round-trip form so files reload bit-exactly.

Trajectory read_trajectory_csv(std::istream& in, const std::string& source = "<stream>");
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace hm
