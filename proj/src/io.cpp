#include "csf/io.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace csf::io {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("io", "write to " + path + " failed");
}

json parse_text(const std::string& text, const std::string& path, std::size_t base_offset) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("format", path + ": parse error at byte " +
                              std::to_string(base_offset + e.byte) + ": " + e.what());
  }
}

const json& field(const json& j, const char* name, const std::string& path) {
  const auto it = j.find(name);
  if (it == j.end()) throw Error("format", path + ": missing field \"" + name + "\"");
  return *it;
}

double number_field(const json& j, const char* name, const std::string& path) {
  const json& v = field(j, name, path);
  if (!v.is_number()) throw Error("format", path + ": field \"" + name + "\" must be a number");
  return v.get<double>();
}

Vec2 point_entry(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error("format", path + ": points must be [x, y] pairs");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

PointMatrix points_field(const json& j, const char* name, const std::string& path) {
  const json& arr = field(j, name, path);
  if (!arr.is_array()) throw Error("format", path + ": \"" + name + "\" must be an array");
  PointMatrix points(2, static_cast<Eigen::Index>(arr.size()));
  Eigen::Index col = 0;
  for (const json& entry : arr) points.col(col++) = point_entry(entry, path);
  return points;
}

json points_json(const PointMatrix& points) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    arr.push_back({points(0, i), points(1, i)});
  return arr;
}

Topology topology_field(const json& j, const std::string& path) {
  const json& v = field(j, "topology", path);
  if (v == "closed") return Topology::closed;
  if (v == "open") return Topology::open;
  throw Error("format", path + ": topology must be \"closed\" or \"open\"");
}

Similarity similarity_from_json(const json& j, const std::string& path) {
  Similarity s;
  s.alpha = number_field(j, "alpha", path);
  const json& rot = field(j, "rotation", path);
  if (!rot.is_array() || rot.size() != 2 || !rot[0].is_array() || rot[0].size() != 2 ||
      !rot[1].is_array() || rot[1].size() != 2)
    throw Error("format", path + ": rotation must be a 2x2 array");
  s.rotation << rot[0][0].get<double>(), rot[0][1].get<double>(), rot[1][0].get<double>(),
      rot[1][1].get<double>();
  s.translation = point_entry(field(j, "V", path), path);
  const json& shift = field(j, "shift", path);
  if (!shift.is_number_integer())
    throw Error("format", path + ": shift must be an integer");
  s.shift = shift.get<int>();
  const json& rev = field(j, "reversed", path);
  if (!rev.is_boolean()) throw Error("format", path + ": reversed must be a boolean");
  s.reversed = rev.get<bool>();
  if (j.contains("residual")) s.residual = number_field(j, "residual", path);
  return s;
}

json similarity_to_json(const Similarity& s) {
  json j;
  j["alpha"] = s.alpha;
  j["rotation"] = {{s.rotation(0, 0), s.rotation(0, 1)}, {s.rotation(1, 0), s.rotation(1, 1)}};
  j["V"] = {s.translation.x(), s.translation.y()};
  j["shift"] = s.shift;
  j["reversed"] = s.reversed;
  j["residual"] = s.residual;
  return j;
}

}  // namespace

Curve read_curve(const std::string& path) {
  const json j = parse_text(read_file(path), path, 0);
  if (!j.is_object()) throw Error("format", path + ": expected a JSON object");
  Curve curve;
  curve.topology = topology_field(j, path);
  if (j.contains("truncated")) {
    if (!j["truncated"].is_boolean())
      throw Error("format", path + ": truncated must be a boolean");
    curve.truncated = j["truncated"].get<bool>();
  }
  curve.points = points_field(j, "points", path);
  validate(curve);
  return curve;
}

void write_curve(const Curve& curve, const std::string& path) {
  validate(curve);
  json j;
  j["topology"] = curve.closed() ? "closed" : "open";
  j["truncated"] = curve.truncated;
  j["points"] = points_json(curve.points);
  write_file(path, j.dump() + "\n");
}

FlowHistory read_history(const std::string& path) {
  const std::string text = read_file(path);
  FlowHistory history;
  Topology topology = Topology::closed;
  bool truncated = false;
  Eigen::Index count = 0;
  bool have_header = false;

  std::size_t offset = 0;
  while (offset < text.size()) {
    std::size_t line_end = text.find('\n', offset);
    if (line_end == std::string::npos) line_end = text.size();
    const std::string line = text.substr(offset, line_end - offset);
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      const json j = parse_text(line, path, offset);
      if (!have_header) {
        topology = topology_field(j, path);
        const json& c = field(j, "count", path);
        if (!c.is_number_integer() || c.get<long>() <= 0)
          throw Error("format", path + ": count must be a positive integer");
        count = c.get<Eigen::Index>();
        if (j.contains("truncated")) truncated = j["truncated"].get<bool>();
        if (j.contains("singular_time"))
          history.singular_time = number_field(j, "singular_time", path);
        if (j.contains("resample_times")) {
          for (const json& t : field(j, "resample_times", path))
            history.resample_times.push_back(t.get<double>());
        }
        have_header = true;
      } else {
        Curve slice;
        slice.topology = topology;
        slice.truncated = truncated;
        slice.points = points_field(j, "points", path);
        if (slice.size() != count)
          throw Error("format", path + ": slice at byte " + std::to_string(offset) +
                                    " has " + std::to_string(slice.size()) +
                                    " points, expected " + std::to_string(count));
        history.times.push_back(number_field(j, "t", path));
        history.slices.push_back(std::move(slice));
      }
    }
    offset = line_end + 1;
  }
  if (!have_header) throw Error("format", path + ": missing header line");
  validate(history);
  return history;
}

void write_history(const FlowHistory& history, const std::string& path) {
  validate(history);
  std::string out;
  json header;
  header["topology"] = history.slices.front().closed() ? "closed" : "open";
  header["count"] = history.slices.front().size();
  if (history.slices.front().truncated) header["truncated"] = true;
  if (history.singular_time) header["singular_time"] = *history.singular_time;
  if (!history.resample_times.empty()) header["resample_times"] = history.resample_times;
  out += header.dump() + "\n";
  for (std::size_t m = 0; m < history.size(); ++m) {
    json line;
    line["t"] = history.times[m];
    line["points"] = points_json(history.slices[m].points);
    out += line.dump() + "\n";
  }
  write_file(path, out);
}

Similarity read_similarity(const std::string& path) {
  const json j = parse_text(read_file(path), path, 0);
  if (!j.is_object()) throw Error("format", path + ": expected a JSON object");
  Similarity s = similarity_from_json(j, path);
  validate(s);
  return s;
}

void write_similarity(const Similarity& s, const std::string& path) {
  validate(s);
  write_file(path, similarity_to_json(s).dump(2) + "\n");
}

std::string splice_mode_name(SpliceMode mode) {
  switch (mode) {
    case SpliceMode::shrinking: return "shrinking";
    case SpliceMode::expanding: return "expanding";
    case SpliceMode::steady_backward: return "steady";
    case SpliceMode::steady_eternal: return "eternal";
  }
  throw Error("internal", "unknown splice mode");
}

SpliceMode parse_splice_mode(const std::string& name) {
  if (name == "shrinking") return SpliceMode::shrinking;
  if (name == "expanding") return SpliceMode::expanding;
  if (name == "steady") return SpliceMode::steady_backward;
  if (name == "eternal") return SpliceMode::steady_eternal;
  throw Error("cli", "unknown splice mode \"" + name + "\"");
}

void write_splice(const SpliceResult& splice, const std::string& history_path,
                  const std::string& sidecar_path) {
  write_history(splice.history, history_path);
  json j = similarity_to_json(splice.period);
  j.erase("residual");
  j["mode"] = splice_mode_name(splice.mode);
  j["junctions"] = splice.junction_times;
  j["junction_errors"] = splice.junction_position_errors;
  j["history"] = history_path;
  write_file(sidecar_path, j.dump(2) + "\n");
}

SpliceResult read_splice(const std::string& sidecar_path) {
  const json j = parse_text(read_file(sidecar_path), sidecar_path, 0);
  if (!j.is_object()) throw Error("format", sidecar_path + ": expected a JSON object");

  SpliceResult splice;
  splice.mode = parse_splice_mode(
      field(j, "mode", sidecar_path).get<std::string>());
  splice.period = similarity_from_json(j, sidecar_path);
  for (const json& t : field(j, "junctions", sidecar_path))
    splice.junction_times.push_back(t.get<double>());
  for (const json& e : field(j, "junction_errors", sidecar_path))
    splice.junction_position_errors.push_back(e.get<double>());
  if (splice.junction_times.size() != splice.junction_position_errors.size())
    throw Error("format", sidecar_path + ": junctions and junction_errors disagree");

  const std::string stored = field(j, "history", sidecar_path).get<std::string>();
  std::filesystem::path history_path(stored);
  if (!std::filesystem::exists(history_path)) {
    const std::filesystem::path beside =
        std::filesystem::path(sidecar_path).parent_path() / stored;
    if (std::filesystem::exists(beside)) history_path = beside;
  }
  splice.history = read_history(history_path.string());
  return splice;
}

}  // namespace csf::io
