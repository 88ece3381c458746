#include "geograsp/records.hpp"

#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "geograsp/io.hpp"

namespace geograsp {

using Json = nlohmann::ordered_json;

std::string record_to_json(const GraspRecord& r) {
  Json j;
  j["scene"] = r.scene;
  j["px"] = r.pose.position.x;
  j["py"] = r.pose.position.y;
  j["pz"] = r.pose.position.z;
  j["qx"] = r.pose.orientation.x;
  j["qy"] = r.pose.orientation.y;
  j["qz"] = r.pose.orientation.z;
  j["qw"] = r.pose.orientation.w;
  j["outcome"] = r.success() ? 1 : 0;
  j["source"] = to_string(r.source);
  j["draw"] = r.draw;
  return j.dump();
}

namespace {

const Json& field(const Json& j, const char* key, std::uint64_t offset) {
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("grasp record: missing key '") + key + "'", offset);
  return *it;
}

double number(const Json& j, const char* key, std::uint64_t offset) {
  const Json& v = field(j, key, offset);
  if (!v.is_number()) throw FormatError(std::string("grasp record: '") + key + "' is not a number", offset);
  return v.get<double>();
}

}  // namespace

GraspRecord record_from_json(const std::string& line, std::uint64_t offset) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("grasp record: ") + e.what(), offset + (e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!j.is_object()) throw FormatError("grasp record: line is not a JSON object", offset);
  static const char* kKeys[] = {"scene", "px", "py", "pz", "qx", "qy", "qz", "qw", "outcome", "source", "draw"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw FormatError("grasp record: unknown key '" + key + "'", offset);
  }
  GraspRecord r;
  const Json& scene = field(j, "scene", offset);
  if (!scene.is_string()) throw FormatError("grasp record: 'scene' is not a string", offset);
  r.scene = scene.get<std::string>();
  r.pose.position = {number(j, "px", offset), number(j, "py", offset), number(j, "pz", offset)};
  r.pose.orientation = {number(j, "qx", offset), number(j, "qy", offset), number(j, "qz", offset),
                        number(j, "qw", offset)};
  try {
    r.pose.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("grasp record: ") + e.what(), offset);
  }
  const Json& outcome = field(j, "outcome", offset);
  if (!outcome.is_number_integer() || (outcome.get<int>() != 0 && outcome.get<int>() != 1))
    throw FormatError("grasp record: 'outcome' must be 0 or 1", offset);
  r.outcome = outcome.get<int>() == 1 ? GraspOutcome::kSuccess : GraspOutcome::kFailure;
  const Json& source = field(j, "source", offset);
  if (!source.is_string()) throw FormatError("grasp record: 'source' is not a string", offset);
  try {
    r.source = grasp_source_from_string(source.get<std::string>());
  } catch (const Error& e) {
    throw FormatError(std::string("grasp record: ") + e.what(), offset);
  }
  const Json& draw = field(j, "draw", offset);
  if (!draw.is_number_integer()) throw FormatError("grasp record: 'draw' is not an integer", offset);
  r.draw = draw.get<int>();
  return r;
}

void write_records(std::ostream& out, const std::vector<GraspRecord>& records) {
  for (const auto& r : records) out << record_to_json(r) << '\n';
}

std::vector<GraspRecord> read_records(std::istream& in) {
  std::vector<GraspRecord> out;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(record_from_json(line, offset));
    offset += line.size() + 1;
  }
  return out;
}

void save_records(const std::string& path, const std::vector<GraspRecord>& records) {
  std::ostringstream ss;
  write_records(ss, records);
  write_file(path, ss.str());
}

std::vector<GraspRecord> load_records(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_records(in);
}

}  // namespace geograsp
