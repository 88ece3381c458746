#include "geograsp/scene_io.hpp"

#include <algorithm>
#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>

#include "geograsp/io.hpp"
#include "geograsp/records.hpp"

namespace geograsp {

namespace fs = std::filesystem;

namespace {

struct KeyLine {
  HeaderToken key;
  std::vector<HeaderToken> values;
};

// "key v1 v2 ..." lines; blank lines and '#' comments are skipped.
std::vector<KeyLine> read_key_lines(std::istream& in) {
  std::vector<KeyLine> out;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t start = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    KeyLine kl;
    std::size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] == ' ') {
        ++pos;
        continue;
      }
      const std::size_t end = std::min(line.find(' ', pos), line.size());
      HeaderToken tok{line.substr(pos, end - pos), start + pos};
      if (kl.key.text.empty())
        kl.key = tok;
      else
        kl.values.push_back(tok);
      pos = end;
    }
    out.push_back(std::move(kl));
  }
  return out;
}

const KeyLine* find_key(const std::vector<KeyLine>& lines, const std::string& key) {
  for (const auto& l : lines)
    if (l.key.text == key) return &l;
  return nullptr;
}

const KeyLine& require_key(const std::vector<KeyLine>& lines, const std::string& key,
                           std::size_t count, const char* what) {
  const KeyLine* l = find_key(lines, key);
  if (!l) throw FormatError(std::string(what) + ": missing key '" + key + "'", 0);
  if (l->values.size() != count)
    throw FormatError(std::string(what) + ": '" + key + "' needs " + std::to_string(count) + " values",
                      l->key.offset);
  return *l;
}

std::vector<double> doubles(const KeyLine& l) {
  std::vector<double> v;
  for (const auto& t : l.values) v.push_back(parse_double(t));
  return v;
}

Vec3 vec3(const KeyLine& l) {
  const auto v = doubles(l);
  return {v[0], v[1], v[2]};
}

void check_unknown(const std::vector<KeyLine>& lines, std::initializer_list<const char*> known,
                   const char* what) {
  for (const auto& l : lines) {
    bool ok = false;
    for (const char* k : known) ok = ok || l.key.text == k;
    if (!ok) throw FormatError(std::string(what) + ": unknown key '" + l.key.text + "'", l.key.offset);
  }
}

void write_mat(std::ostream& out, const char* key, const Mat4& m) {
  out << key;
  for (double v : m.data()) out << ' ' << format_double(v);
  out << '\n';
}

Mat4 read_mat(const KeyLine& l) {
  std::array<double, 16> a{};
  for (int i = 0; i < 16; ++i) a[i] = parse_double(l.values[i]);
  return Mat4(a);
}

void write_vec(std::ostream& out, const char* key, const Vec3& v) {
  out << key << ' ' << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z)
      << '\n';
}

}  // namespace

void write_camera(std::ostream& out, const SceneCamera& c) {
  out << "width " << c.camera.width() << '\n';
  out << "height " << c.camera.height() << '\n';
  out << "z_near " << format_double(c.camera.z_near()) << '\n';
  out << "z_far " << format_double(c.camera.z_far()) << '\n';
  write_mat(out, "projection", c.camera.projection());
  write_mat(out, "view", c.camera.view());
  out << "azimuth " << c.azimuth_deg << '\n';
  out << "elevation " << c.elevation_deg << '\n';
  write_vec(out, "target", c.target);
  out << "distance " << format_double(c.distance) << '\n';
}

SceneCamera read_camera(std::istream& in) {
  const auto lines = read_key_lines(in);
  check_unknown(lines,
                {"width", "height", "z_near", "z_far", "projection", "view", "azimuth", "elevation",
                 "target", "distance"},
                "camera");
  const auto& w = require_key(lines, "width", 1, "camera");
  const auto& h = require_key(lines, "height", 1, "camera");
  const auto& zn = require_key(lines, "z_near", 1, "camera");
  const auto& zf = require_key(lines, "z_far", 1, "camera");
  const auto& proj = require_key(lines, "projection", 16, "camera");
  const auto& view = require_key(lines, "view", 16, "camera");
  const long long width = parse_int(w.values[0]);
  const long long height = parse_int(h.values[0]);
  if (width < 1 || width > 65536) throw FormatError("camera: width out of range", w.values[0].offset);
  if (height < 1 || height > 65536) throw FormatError("camera: height out of range", h.values[0].offset);
  try {
    SceneCamera c{CameraModel(read_mat(proj), read_mat(view), parse_double(zn.values[0]),
                              parse_double(zf.values[0]), static_cast<int>(width),
                              static_cast<int>(height)),
                  0, 0, {}, 0.0};
    if (const auto* a = find_key(lines, "azimuth")) c.azimuth_deg = static_cast<int>(parse_int(a->values.at(0)));
    if (const auto* e = find_key(lines, "elevation")) c.elevation_deg = static_cast<int>(parse_int(e->values.at(0)));
    if (find_key(lines, "target")) c.target = vec3(require_key(lines, "target", 3, "camera"));
    if (find_key(lines, "distance"))
      c.distance = parse_double(require_key(lines, "distance", 1, "camera").values[0]);
    return c;
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("camera: ") + e.what(), zn.key.offset);
  }
}

void write_object(std::ostream& out, const Scene& scene) {
  const PrimitiveShape& s = scene.shape;
  out << "seed " << scene.seed << '\n';
  out << "kind " << to_string(s.kind) << '\n';
  write_vec(out, "center", s.center);
  out << "orientation " << format_double(s.orientation.x) << ' ' << format_double(s.orientation.y)
      << ' ' << format_double(s.orientation.z) << ' ' << format_double(s.orientation.w) << '\n';
  write_vec(out, "half_extents", s.half_extents);
  out << "radius " << format_double(s.radius) << '\n';
  out << "inner_radius " << format_double(s.inner_radius) << '\n';
  out << "half_height " << format_double(s.half_height) << '\n';
}

PrimitiveShape read_object(std::istream& in, std::uint64_t* seed) {
  const auto lines = read_key_lines(in);
  check_unknown(lines,
                {"seed", "kind", "center", "orientation", "half_extents", "radius", "inner_radius",
                 "half_height"},
                "object");
  PrimitiveShape s;
  const auto& kind = require_key(lines, "kind", 1, "object");
  try {
    s.kind = primitive_kind_from_string(kind.values[0].text);
  } catch (const Error& e) {
    throw FormatError(std::string("object: ") + e.what(), kind.values[0].offset);
  }
  s.center = vec3(require_key(lines, "center", 3, "object"));
  const auto q = doubles(require_key(lines, "orientation", 4, "object"));
  s.orientation = {q[0], q[1], q[2], q[3]};
  s.half_extents = vec3(require_key(lines, "half_extents", 3, "object"));
  s.radius = parse_double(require_key(lines, "radius", 1, "object").values[0]);
  s.inner_radius = parse_double(require_key(lines, "inner_radius", 1, "object").values[0]);
  s.half_height = parse_double(require_key(lines, "half_height", 1, "object").values[0]);
  if (seed) {
    const auto& sl = require_key(lines, "seed", 1, "object");
    const std::string& t = sl.values[0].text;
    std::uint64_t v = 0;
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      throw FormatError("object: seed must be an unsigned integer", sl.values[0].offset);
    std::istringstream(t) >> v;
    *seed = v;
  }
  return s;
}

std::string scene_dir_name(std::uint64_t seed) { return "scene_" + std::to_string(seed); }

void save_scene(const std::string& dir, const Scene& scene) {
  fs::create_directories(dir);
  save_voxl((fs::path(dir) / "object.voxl").string(), scene.grid);
  std::ostringstream obj;
  write_object(obj, scene);
  write_file((fs::path(dir) / "object.txt").string(), obj.str());
  for (const auto& c : scene.cameras) {
    std::ostringstream ss;
    write_camera(ss, c);
    write_file((fs::path(dir) / ("cam_" + c.name() + ".txt")).string(), ss.str());
  }
}

void save_renders(const std::string& dir, const Scene& scene, const std::vector<Projection>& renders) {
  if (renders.size() != scene.cameras.size())
    throw InvalidArgumentError("save_renders: one render per camera is required");
  fs::create_directories(dir);
  for (std::size_t i = 0; i < renders.size(); ++i) {
    const std::string name = scene.cameras[i].name();
    save_dpth((fs::path(dir) / ("depth_" + name + ".dpth")).string(), renders[i].depth);
    save_mask_pgm((fs::path(dir) / ("mask_" + name + ".pgm")).string(), renders[i].mask);
  }
}

Scene load_scene(const std::string& dir) {
  Scene scene;
  scene.grid = load_voxl((fs::path(dir) / "object.voxl").string());
  {
    std::istringstream in(read_file((fs::path(dir) / "object.txt").string()));
    scene.shape = read_object(in, &scene.seed);
  }
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
  std::vector<fs::path> cams;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("cam_", 0) == 0 && e.path().extension() == ".txt") cams.push_back(e.path());
  }
  for (const auto& p : cams) {
    std::istringstream in(read_file(p.string()));
    try {
      scene.cameras.push_back(read_camera(in));
    } catch (const FormatError& e) {
      throw FormatError(p.string() + ": " + e.what(), e.offset());
    }
    if ("cam_" + scene.cameras.back().name() + ".txt" != p.filename().string())
      throw FormatError(p.string() + ": azimuth/elevation do not match the file name", 0);
  }
  // Generator order: azimuth-major, then elevation.
  std::sort(scene.cameras.begin(), scene.cameras.end(), [](const SceneCamera& a, const SceneCamera& b) {
    return a.azimuth_deg != b.azimuth_deg ? a.azimuth_deg < b.azimuth_deg : a.elevation_deg < b.elevation_deg;
  });
  return scene;
}

std::vector<Projection> load_renders(const std::string& dir, const Scene& scene) {
  std::vector<Projection> out;
  for (const auto& c : scene.cameras) {
    const std::string name = c.name();
    Projection p;
    p.depth = load_dpth((fs::path(dir) / ("depth_" + name + ".dpth")).string());
    p.mask = load_mask_pgm((fs::path(dir) / ("mask_" + name + ".pgm")).string());
    if (p.depth.width != c.camera.width() || p.depth.height != c.camera.height() ||
        p.mask.width != c.camera.width() || p.mask.height != c.camera.height())
      throw FormatError("render " + name + ": image size does not match its camera", 0);
    out.push_back(std::move(p));
  }
  return out;
}

SceneData load_scene_data(const std::string& dir) {
  SceneData d;
  d.scene = load_scene(dir);
  d.renders = load_renders(dir, d.scene);
  bool have_seed = false;
  for (auto& r : load_records((fs::path(dir) / "grasps.jsonl").string())) {
    if (r.source == GraspSource::kSeed) {
      d.seed_pose = r.pose;
      have_seed = true;
    } else {
      d.records.push_back(std::move(r));
    }
  }
  if (!have_seed) throw FormatError(dir + "/grasps.jsonl: no seed record", 0);
  return d;
}

std::vector<std::string> list_scene_dirs(const std::string& parent) {
  if (!fs::is_directory(parent)) throw Error("not a directory: " + parent);
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(parent))
    if (e.is_directory() && e.path().filename().string().rfind("scene_", 0) == 0)
      out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace geograsp
