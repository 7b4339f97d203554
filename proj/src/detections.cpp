#include "parnms/detections.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "json.hpp"

namespace pnms {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::int64_t parse_int(std::string_view field, const char* name, std::size_t line) {
  field = trim(field);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(where(line) + "field '" + name + "' is not an integer: '" + std::string(field) + "'");
  }
  return v;
}

double parse_real(std::string_view field, const char* name, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(where(line) + "field '" + name + "' is not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw InternalError("cannot format score");
  return std::string(buf.data(), ptr);
}

DetectionVector parse_csv(const std::string& text, std::size_t d_max) {
  DetectionVector out(d_max);
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view row = trim(raw);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "x,y,z,s") throw ParseError(where(line) + "expected header 'x,y,z,s'");
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 4> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= row.size(); ++i) {
      if (i == row.size() || row[i] == ',') {
        if (n == fields.size()) throw ParseError(where(line) + "expected 4 fields");
        fields[n++] = row.substr(start, i - start);
        start = i + 1;
      }
    }
    if (n != fields.size()) throw ParseError(where(line) + "expected 4 fields");

    Detection d{parse_int(fields[0], "x", line), parse_int(fields[1], "y", line),
                parse_int(fields[2], "z", line), parse_real(fields[3], "s", line)};
    if (out.count() == out.capacity()) {
      throw CapacityError(where(line) + "more than d_max=" + std::to_string(d_max) + " detections");
    }
    try {
      out.push_back(d);
    } catch (const ValidationError& e) {
      throw ValidationError(where(line) + e.what());
    }
  }
  return out;
}

std::int64_t json_int(const json& rec, const char* key, std::size_t idx) {
  auto it = rec.find(key);
  if (it == rec.end()) throw ParseError("record " + std::to_string(idx) + ": missing key '" + key + "'");
  if (!it->is_number_integer()) {
    throw ParseError("record " + std::to_string(idx) + ": '" + key + "' must be an integer");
  }
  return it->get<std::int64_t>();
}

DetectionVector parse_json(const std::string& text, std::size_t d_max) {
  DetectionVector out(d_max);
  if (trim(text).empty()) return out;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("top-level JSON value must be an array");
  if (doc.size() > d_max) {
    throw CapacityError(std::to_string(doc.size()) + " detections exceed d_max=" + std::to_string(d_max));
  }
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    if (!rec.is_object()) throw ParseError("record " + std::to_string(i) + ": expected an object");
    auto s = rec.find("s");
    if (s == rec.end() || !s->is_number()) {
      throw ParseError("record " + std::to_string(i) + ": 's' must be a number");
    }
    Detection d{json_int(rec, "x", i), json_int(rec, "y", i), json_int(rec, "z", i), s->get<double>()};
    try {
      out.push_back(d);
    } catch (const ValidationError& e) {
      throw ValidationError("record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

void validate_detection(const Detection& d) {
  if (d.x < 0 || d.y < 0) throw ValidationError("coordinates must be non-negative");
  if (d.z < 1) throw ValidationError("side length z must be >= 1");
  if (d.x > kMaxCoordinate - d.z || d.y > kMaxCoordinate - d.z) {
    throw ValidationError("coordinate overflow: x + z and y + z must not exceed " +
                          std::to_string(kMaxCoordinate));
  }
  if (!std::isfinite(d.s) || !(d.s > 0.0)) throw ValidationError("score s must be finite and > 0");
}

DetectionVector DetectionVector::from_detections(std::span<const Detection> dets, std::size_t d_max) {
  if (dets.size() > d_max) {
    throw CapacityError(std::to_string(dets.size()) + " detections exceed d_max=" + std::to_string(d_max));
  }
  DetectionVector out(d_max);
  for (const auto& d : dets) out.push_back(d);
  return out;
}

void DetectionVector::push_back(const Detection& d) {
  if (count_ == slots_.size()) {
    throw CapacityError("detection vector is full (d_max=" + std::to_string(slots_.size()) + ")");
  }
  validate_detection(d);
  slots_[count_++] = d;
}

DetectionVector DetectionVector::with_scores(std::span<const double> scores) const {
  if (scores.size() != count_) throw InternalError("score count does not match detection count");
  DetectionVector out = *this;
  for (std::size_t i = 0; i < count_; ++i) out.slots_[i].s = scores[i];
  return out;
}

Format format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? Format::json : Format::csv;
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

DetectionVector parse_detections(const std::string& text, Format format, std::size_t d_max) {
  return format == Format::csv ? parse_csv(text, d_max) : parse_json(text, d_max);
}

std::string format_detections(std::span<const Detection> dets, Format format) {
  std::string out;
  if (format == Format::csv) {
    out = "x,y,z,s\n";
    for (const auto& d : dets) {
      out += std::to_string(d.x) + ',' + std::to_string(d.y) + ',' + std::to_string(d.z) + ',' +
             format_real(d.s) + '\n';
    }
    return out;
  }
  json arr = json::array();
  for (const auto& d : dets) arr.push_back({{"x", d.x}, {"y", d.y}, {"z", d.z}, {"s", d.s}});
  return arr.dump() + "\n";
}

DetectionVector load_detections(const std::filesystem::path& path, Format format, std::size_t d_max) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_detections(buf.str(), format, d_max);
}

void store_detections(std::span<const Detection> dets, const std::filesystem::path& path, Format format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << format_detections(dets, format);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void store_result(const NmsResult& result, const std::filesystem::path& path, Format format) {
  store_detections(result.survivors, path, format);
}

}  // namespace pnms
