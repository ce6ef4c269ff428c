#include "funcgraph/cli/io.hpp"

#include "common/json_fields.hpp"
#include "funcgraph/error.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace funcgraph::io {

using detail::Fields;
using detail::json;

static_assert(std::endian::native == std::endian::little, "depth rasters are read as native little-endian floats");

namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::IoError, path.string() + ": " + what);
}

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

std::string line_where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Calls fn(line_text, line_number) for every non-blank line.
template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line, number);
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) io_fail(path, "read failed");
  return ss.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_fail(tmp, "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) io_fail(tmp, "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    io_fail(path, "cannot replace file");
  }
}

DepthImage read_depth(const fs::path& path, int width, int height) {
  const std::string bytes = read_text(path);
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * sizeof(float);
  if (bytes.size() != expected) {
    parse_fail(path.string(), "depth raster has " + std::to_string(bytes.size()) + " bytes, expected " +
                                  std::to_string(expected) + " for " + std::to_string(width) + "x" +
                                  std::to_string(height));
  }
  DepthImage d(width, height);
  std::memcpy(d.values.data(), bytes.data(), bytes.size());
  return d;
}

void write_depth(const fs::path& path, const DepthImage& depth) {
  std::string bytes(depth.values.size() * sizeof(float), '\0');
  std::memcpy(bytes.data(), depth.values.data(), bytes.size());
  write_atomic(path, bytes);
}

MaskImage read_mask(const fs::path& path) {
  if (!fs::exists(path)) io_fail(path, "file not found");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    parse_fail(path.string(), std::string("not a readable PNG (") + image.message + ")");
  }
  if (image.format != PNG_FORMAT_GRAY) {
    png_image_free(&image);
    parse_fail(path.string(), "mask must be an 8-bit single-channel PNG");
  }
  MaskImage m;
  m.width = static_cast<int>(image.width);
  m.height = static_cast<int>(image.height);
  m.values.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, m.values.data(), 0, nullptr)) {
    parse_fail(path.string(), std::string("PNG decode failed (") + image.message + ")");
  }
  return m;
}

void write_mask(const fs::path& path, const MaskImage& mask) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.width);
  image.height = static_cast<png_uint_32>(mask.height);
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, mask.values.data(), 0, nullptr)) {
    io_fail(path, std::string("PNG encode failed (") + image.message + ")");
  }
  std::string buffer(size, '\0');
  if (!png_image_write_to_memory(&image, buffer.data(), &size, 0, mask.values.data(), 0, nullptr)) {
    io_fail(path, std::string("PNG encode failed (") + image.message + ")");
  }
  buffer.resize(size);
  write_atomic(path, buffer);
}

std::vector<Vec3> read_ply_points(const fs::path& path) {
  std::istringstream in(read_text(path));
  const std::string where = path.string();
  std::string line;
  std::size_t line_no = 0;
  const auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next() || line != "ply") parse_fail(where, "missing 'ply' magic");

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
  };
  std::vector<Element> elements;
  bool ascii = false;
  for (;;) {
    if (!next()) parse_fail(where, "header is not terminated by end_header");
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") parse_fail(where + ":" + std::to_string(line_no), "only ASCII PLY is supported");
      ascii = true;
    } else if (word == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (!ls || count < 0) parse_fail(where + ":" + std::to_string(line_no), "bad element line");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(e);
    } else if (word == "property") {
      if (elements.empty()) parse_fail(where + ":" + std::to_string(line_no), "property before element");
      std::string type;
      std::string name;
      ls >> type;
      if (type == "list") {
        std::string count_type;
        std::string item_type;
        ls >> count_type >> item_type;
      }
      ls >> name;
      elements.back().properties.push_back(type == "list" ? "" : name);
    } else if (word != "comment" && word != "obj_info") {
      parse_fail(where + ":" + std::to_string(line_no), "unexpected header line '" + word + "'");
    }
  }
  if (!ascii) parse_fail(where, "missing format line");

  std::vector<Vec3> points;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!next()) parse_fail(where, "truncated element '" + e.name + "'");
      }
      continue;
    }
    int ix = -1;
    int iy = -1;
    int iz = -1;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p] == "x") ix = static_cast<int>(p);
      if (e.properties[p] == "y") iy = static_cast<int>(p);
      if (e.properties[p] == "z") iz = static_cast<int>(p);
    }
    if (ix < 0 || iy < 0 || iz < 0) parse_fail(where, "vertex element lacks x, y, z");
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next()) parse_fail(where, "expected " + std::to_string(e.count) + " vertices, file ends early");
      std::istringstream ls(line);
      std::vector<double> values;
      double v = 0.0;
      while (ls >> v) values.push_back(v);
      if (!ls.eof() || values.size() < e.properties.size()) {
        parse_fail(where + ":" + std::to_string(line_no), "malformed vertex");
      }
      const Vec3 p(values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                   values[static_cast<std::size_t>(iz)]);
      if (!p.allFinite()) parse_fail(where + ":" + std::to_string(line_no), "non-finite vertex");
      points.push_back(p);
    }
  }
  return points;
}

std::string format_ply(const std::vector<PlyVertex>& vertices,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  const bool with_direction =
      std::any_of(vertices.begin(), vertices.end(), [](const PlyVertex& v) { return v.direction.has_value(); });
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (with_direction) out << "property double u\nproperty double v\nproperty double w\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (!edges.empty()) out << "element edge " << edges.size() << "\nproperty int vertex1\nproperty int vertex2\n";
  out << "end_header\n";
  out << std::setprecision(17);
  for (const auto& v : vertices) {
    out << v.position.x() << " " << v.position.y() << " " << v.position.z();
    if (with_direction) {
      const Vec3 d = v.direction.value_or(Vec3::Zero());
      out << " " << d.x() << " " << d.y() << " " << d.z();
    }
    out << " " << int{v.color[0]} << " " << int{v.color[1]} << " " << int{v.color[2]} << "\n";
  }
  for (const auto& [a, b] : edges) out << a << " " << b << "\n";
  return out.str();
}

Eigen::VectorXd read_embedding(const fs::path& path) {
  const json j = detail::parse_json(read_text(path), path.string());
  if (!j.is_array() || j.empty()) parse_fail(path.string(), "embedding must be a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_fail(path.string(), "/" + std::to_string(i) + ": expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  if (!v.allFinite()) parse_fail(path.string(), "embedding has non-finite entries");
  return v;
}

std::vector<MarkerDetection> read_detections(const fs::path& path) {
  std::vector<MarkerDetection> out;
  for_each_line(path, [&](const std::string& text, std::size_t line) {
    const std::string where = line_where(path, line);
    const json j = detail::parse_json(text, where);
    Fields f(j, where);
    MarkerDetection d;
    d.frame_id = static_cast<int>(f.integer("frame_id"));
    d.marker_id = static_cast<int>(f.integer("marker_id"));
    const json& corners = f.array("corners");
    if (corners.size() != 4) f.fail_at("corners", "expected 4 corners");
    for (std::size_t c = 0; c < 4; ++c) {
      const json& uv = corners[c];
      if (!uv.is_array() || uv.size() != 2 || !uv[0].is_number() || !uv[1].is_number()) {
        f.fail_at("corners/" + std::to_string(c), "expected [u, v]");
      }
      d.corners[c] = Vec2(uv[0].get<double>(), uv[1].get<double>());
      if (!d.corners[c].allFinite()) f.fail_at("corners/" + std::to_string(c), "non-finite value");
    }
    f.finish();
    out.push_back(d);
  });
  return out;
}

std::string format_detections(const std::vector<MarkerDetection>& detections) {
  std::string out;
  for (const auto& d : detections) {
    json corners = json::array();
    for (const auto& c : d.corners) corners.push_back({c.x(), c.y()});
    out += json{{"frame_id", d.frame_id}, {"marker_id", d.marker_id}, {"corners", corners}}.dump() + "\n";
  }
  return out;
}

SphereModel read_sphere(const fs::path& path) {
  const json j = detail::parse_json(read_text(path), path.string());
  Fields f(j, path.string());
  const Pose tip = f.pose("tip_offset");
  const json& markers = f.array("markers");
  std::map<int, MarkerCorners> corners;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    Fields m = f.element(markers[i], "markers", i);
    const int id = static_cast<int>(m.integer("id"));
    const json& cs = m.array("corners");
    if (cs.size() != 4) m.fail_at("corners", "expected 4 corners");
    MarkerCorners mc;
    for (std::size_t c = 0; c < 4; ++c) mc[c] = m.vec3_of(cs[c], "corners/" + std::to_string(c));
    m.finish();
    if (!corners.emplace(id, mc).second) m.fail("duplicate marker id " + std::to_string(id));
  }
  f.finish();
  try {
    return SphereModel(std::move(corners), tip);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_sphere(const SphereModel& sphere) {
  json markers = json::array();
  for (const auto& [id, corners] : sphere.markers()) {
    json cs = json::array();
    for (const auto& c : corners) cs.push_back(detail::vec_json(c));
    markers.push_back({{"id", id}, {"corners", cs}});
  }
  return json{{"tip_offset", detail::pose_json(sphere.tip_offset())}, {"markers", markers}}.dump(1) + "\n";
}

std::vector<TimedPose> read_trajectory(const fs::path& path) {
  std::vector<TimedPose> out;
  for_each_line(path, [&](const std::string& text, std::size_t line) {
    const std::string where = line_where(path, line);
    const json j = detail::parse_json(text, where);
    Fields f(j, where);
    TimedPose tp;
    tp.timestamp = f.number("t");
    tp.pose = f.pose("pose");
    f.finish();
    out.push_back(tp);
  });
  return out;
}

std::string format_trajectory(const std::vector<TimedPose>& trajectory) {
  std::string out;
  for (const auto& tp : trajectory) {
    out += json{{"t", tp.timestamp}, {"pose", detail::pose_json(tp.pose)}}.dump() + "\n";
  }
  return out;
}

std::string format_verdict(const JointVerdict& v) {
  json scores = {{"prismatic", v.scores.prismatic}};
  scores["revolute"] = std::isfinite(v.scores.revolute) ? json(v.scores.revolute) : json(nullptr);
  json j = {{"joint_type", std::string(to_string(v.joint_type))},
            {"axis",
             {{"center", detail::vec_json(v.axis.center)},
              {"direction", detail::vec_json(v.axis.direction)},
              {"range", v.axis.range}}},
            {"scores", scores},
            {"low_confidence", v.low_confidence}};
  return j.dump(2) + "\n";
}

JointVerdict read_verdict(const fs::path& path) {
  const json j = detail::parse_json(read_text(path), path.string());
  Fields f(j, path.string());
  JointVerdict v;
  const std::string type = f.text("joint_type");
  if (type == "prismatic") {
    v.joint_type = JointType::Prismatic;
  } else if (type == "revolute") {
    v.joint_type = JointType::Revolute;
  } else {
    f.fail_at("joint_type", "expected \"prismatic\" or \"revolute\"");
  }
  Fields axis = f.object("axis");
  v.axis.joint_type = v.joint_type;
  v.axis.center = axis.vec3("center");
  v.axis.direction = axis.vec3("direction");
  v.axis.range = axis.number("range");
  axis.finish();
  if (std::abs(v.axis.direction.norm() - 1.0) > 1e-9) f.fail_at("axis/direction", "direction is not unit length");
  if (!(v.axis.range >= 0.0)) f.fail_at("axis/range", "range must be >= 0");
  Fields scores = f.object("scores");
  v.scores.prismatic = scores.number("prismatic");
  v.scores.revolute = scores.number("revolute", std::numeric_limits<double>::infinity());
  scores.finish();
  v.low_confidence = f.boolean("low_confidence", false);
  f.finish();
  return v;
}

}  // namespace funcgraph::io
