#include "funcgraph/cli/manifest.hpp"

#include "common/json_fields.hpp"
#include "funcgraph/cli/io.hpp"
#include "funcgraph/error.hpp"

#include <set>

namespace funcgraph {

using detail::Fields;
using detail::json;
namespace fs = std::filesystem;

namespace {

fs::path existing(const fs::path& base, Fields& f, const std::string& key) {
  const fs::path raw = f.text(key);
  const fs::path full = raw.is_absolute() ? raw : base / raw;
  if (!fs::exists(full)) throw Error(ErrorCode::IoError, f.where() + ": " + f.path() + "/" + key + ": file not found: " + full.string());
  return full;
}

CameraIntrinsics parse_intrinsics(Fields f) {
  CameraIntrinsics k;
  k.fx = f.number("fx");
  k.fy = f.number("fy");
  k.cx = f.number("cx");
  k.cy = f.number("cy");
  k.width = static_cast<int>(f.integer("width"));
  k.height = static_cast<int>(f.integer("height"));
  f.finish();
  try {
    k.validate();
  } catch (const Error& e) {
    f.fail(e.what());
  }
  return k;
}

std::vector<FrameEntry> parse_frames(Fields& parent, const std::string& key, const fs::path& base) {
  std::vector<FrameEntry> out;
  std::set<int> ids;
  const json& arr = parent.array(key);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Fields f = parent.element(arr[i], key, i);
    FrameEntry e;
    e.id = static_cast<int>(f.integer("id"));
    e.timestamp = f.number("timestamp");
    e.intrinsics = parse_intrinsics(f.object("intrinsics"));
    e.cam_pose = f.pose("cam_pose");
    if (f.has("depth")) e.depth = existing(base, f, "depth");
    f.finish();
    if (!ids.insert(e.id).second) f.fail("duplicate frame id " + std::to_string(e.id));
    out.push_back(e);
  }
  return out;
}

json intrinsics_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

json frames_json(const std::vector<FrameEntry>& frames) {
  json arr = json::array();
  for (const auto& f : frames) {
    json j = {{"id", f.id},
              {"timestamp", f.timestamp},
              {"intrinsics", intrinsics_json(f.intrinsics)},
              {"cam_pose", detail::pose_json(f.cam_pose)}};
    if (f.depth) j["depth"] = f.depth->generic_string();
    arr.push_back(j);
  }
  return arr;
}

}  // namespace

const DemoEntry* DatasetManifest::find_demo(const std::string& id) const {
  for (const auto& d : demos) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

DatasetManifest load_manifest(const fs::path& path) {
  const json root = detail::parse_json(io::read_text(path), path.string());
  Fields f(root, path.string());
  DatasetManifest m;
  m.base_dir = path.parent_path();
  const fs::path& base = m.base_dir;

  if (f.has("frames")) m.frames = parse_frames(f, "frames", base);
  std::set<int> frame_ids;
  for (const auto& fr : m.frames) frame_ids.insert(fr.id);

  std::set<int> instance_ids;
  if (f.has("instances")) {
    const json& arr = f.array("instances");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields e = f.element(arr[i], "instances", i);
      InstanceEntry in;
      in.id = static_cast<int>(e.integer("id"));
      in.label = e.text("label");
      in.points = existing(base, e, "points");
      e.finish();
      if (!instance_ids.insert(in.id).second) e.fail("duplicate instance id " + std::to_string(in.id));
      m.instances.push_back(in);
    }
  }
  const auto check_refs = [&](Fields& e, int frame_id, int instance_id) {
    if (!frame_ids.contains(frame_id)) e.fail_at("frame_id", "unknown frame " + std::to_string(frame_id));
    if (!instance_ids.contains(instance_id)) {
      e.fail_at("instance_id", "unknown instance " + std::to_string(instance_id));
    }
  };
  if (f.has("masks")) {
    const json& arr = f.array("masks");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields e = f.element(arr[i], "masks", i);
      MaskEntry mk;
      mk.frame_id = static_cast<int>(e.integer("frame_id"));
      mk.instance_id = static_cast<int>(e.integer("instance_id"));
      mk.label = e.text("label");
      mk.score = e.number("score");
      if (!(mk.score >= 0.0 && mk.score <= 1.0)) e.fail_at("score", "expected a value in [0, 1]");
      mk.path = existing(base, e, "path");
      e.finish();
      check_refs(e, mk.frame_id, mk.instance_id);
      m.masks.push_back(mk);
    }
  }
  if (f.has("embeddings")) {
    const json& arr = f.array("embeddings");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields e = f.element(arr[i], "embeddings", i);
      EmbeddingEntry em;
      em.frame_id = static_cast<int>(e.integer("frame_id"));
      em.instance_id = static_cast<int>(e.integer("instance_id"));
      if (e.has("label")) em.label = e.text("label");
      em.path = existing(base, e, "path");
      e.finish();
      check_refs(e, em.frame_id, em.instance_id);
      m.embeddings.push_back(em);
    }
  }
  if (f.has("sphere")) m.sphere = existing(base, f, "sphere");
  if (f.has("demos")) {
    const json& arr = f.array("demos");
    std::set<std::string> demo_ids;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields e = f.element(arr[i], "demos", i);
      DemoEntry d;
      d.id = e.text("id");
      d.frames = parse_frames(e, "frames", base);
      d.detections = existing(base, e, "detections");
      e.finish();
      if (!demo_ids.insert(d.id).second) e.fail("duplicate demo id '" + d.id + "'");
      m.demos.push_back(d);
    }
  }
  f.finish();
  return m;
}

std::vector<FrameRecord> load_frames(const std::vector<FrameEntry>& entries) {
  std::vector<FrameRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    FrameRecord r;
    r.frame_id = e.id;
    r.timestamp = e.timestamp;
    r.intrinsics = e.intrinsics;
    r.cam_pose = e.cam_pose;
    if (e.depth) r.depth = io::read_depth(*e.depth, e.intrinsics.width, e.intrinsics.height);
    out.push_back(std::move(r));
  }
  return out;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["frames"] = frames_json(m.frames);
  json instances = json::array();
  for (const auto& in : m.instances) {
    instances.push_back({{"id", in.id}, {"label", in.label}, {"points", in.points.generic_string()}});
  }
  j["instances"] = instances;
  json masks = json::array();
  for (const auto& mk : m.masks) {
    masks.push_back({{"frame_id", mk.frame_id},
                     {"instance_id", mk.instance_id},
                     {"label", mk.label},
                     {"score", mk.score},
                     {"path", mk.path.generic_string()}});
  }
  j["masks"] = masks;
  json embeddings = json::array();
  for (const auto& em : m.embeddings) {
    json e = {{"frame_id", em.frame_id}, {"instance_id", em.instance_id}, {"path", em.path.generic_string()}};
    if (em.label) e["label"] = *em.label;
    embeddings.push_back(e);
  }
  j["embeddings"] = embeddings;
  if (m.sphere) j["sphere"] = m.sphere->generic_string();
  json demos = json::array();
  for (const auto& d : m.demos) {
    demos.push_back({{"id", d.id}, {"frames", frames_json(d.frames)}, {"detections", d.detections.generic_string()}});
  }
  j["demos"] = demos;
  return j.dump(2) + "\n";
}

}  // namespace funcgraph
