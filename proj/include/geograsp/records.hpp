#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "geograsp/grasp_sim.hpp"

namespace geograsp {

// One JSON object per line with keys scene, px, py, pz, qx, qy, qz, qw,
// outcome (0/1), source, draw. Collision is written as 0 and reads back as
// failure.
std::string record_to_json(const GraspRecord& r);
// `offset` is the byte offset of the line, used in errors.
GraspRecord record_from_json(const std::string& line, std::uint64_t offset = 0);

void write_records(std::ostream& out, const std::vector<GraspRecord>& records);
std::vector<GraspRecord> read_records(std::istream& in);
void save_records(const std::string& path, const std::vector<GraspRecord>& records);
std::vector<GraspRecord> load_records(const std::string& path);

}  // namespace geograsp
