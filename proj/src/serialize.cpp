#include "inhibdesign/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace inhibdesign {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

using nlohmann::json;

// JSON has no inf/nan.
std::string json_number(double value) {
  return std::isfinite(value) ? format_number(value) : "null";
}

std::string json_string(const std::string& s) { return json(s).dump(); }

double number_at(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw std::invalid_argument(std::string("design document: missing numeric field \"") +
                                key + "\"");
  }
  return it->get<double>();
}

}  // namespace

std::string design_to_json(const Design& design, const DesignMetadata& meta) {
  const bool original = design.frame() == Frame::original;
  const char* k1 = original ? "S" : "x";
  const char* k2 = original ? "I" : "y";
  std::ostringstream os;
  os << "{\n  \"frame\": \"" << frame_name(design.frame()) << "\",\n  \"points\": [\n";
  for (std::size_t k = 0; k < design.size(); ++k) {
    const auto& p = design[k];
    os << "    {\"" << k1 << "\": " << format_number(p.first) << ", \"" << k2
       << "\": " << format_number(p.second) << ", \"w\": " << format_number(p.weight)
       << "}" << (k + 1 < design.size() ? "," : "") << "\n";
  }
  os << "  ]";
  if (meta.criterion) {
    os << ",\n  \"criterion\": \"" << criterion_name(*meta.criterion) << "\"";
  }
  if (meta.theta) {
    os << ",\n  \"theta\": {\"V\": " << format_number(meta.theta->v())
       << ", \"Km\": " << format_number(meta.theta->km())
       << ", \"Kic\": " << format_number(meta.theta->kic()) << "}";
  }
  if (meta.space) {
    os << ",\n  \"space\": {\"Smin\": " << format_number(meta.space->s_min())
       << ", \"Smax\": " << format_number(meta.space->s_max())
       << ", \"Imin\": " << format_number(meta.space->i_min())
       << ", \"Imax\": " << format_number(meta.space->i_max()) << "}";
  }
  if (meta.transformed_space) {
    const auto& xs = *meta.transformed_space;
    os << ",\n  \"transformed_space\": {\"xmin\": " << format_number(xs.x_min())
       << ", \"xmax\": " << format_number(xs.x_max())
       << ", \"ymin\": " << format_number(xs.y_min())
       << ", \"ymax\": " << format_number(xs.y_max()) << "}";
  }
  os << "\n}\n";
  return os.str();
}

DesignDocument design_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("design document: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("design document: expected an object");

  Frame frame = Frame::original;
  if (const auto it = doc.find("frame"); it != doc.end()) {
    if (!it->is_string()) throw std::invalid_argument("design document: \"frame\" must be a string");
    const auto name = it->get<std::string>();
    if (name == "original") {
      frame = Frame::original;
    } else if (name == "transformed") {
      frame = Frame::transformed;
    } else {
      throw std::invalid_argument("design document: unknown frame \"" + name + "\"");
    }
  }
  const auto pts = doc.find("points");
  if (pts == doc.end() || !pts->is_array() || pts->empty()) {
    throw std::invalid_argument("design document: \"points\" must be a non-empty array");
  }
  const char* k1 = frame == Frame::original ? "S" : "x";
  const char* k2 = frame == Frame::original ? "I" : "y";
  std::vector<SupportPoint> support;
  for (const auto& p : *pts) {
    if (!p.is_object()) throw std::invalid_argument("design document: each point must be an object");
    support.push_back({number_at(p, k1), number_at(p, k2), number_at(p, "w")});
  }

  DesignMetadata meta;
  if (const auto it = doc.find("criterion"); it != doc.end()) {
    if (!it->is_string()) throw std::invalid_argument("design document: \"criterion\" must be a string");
    meta.criterion = parse_criterion(it->get<std::string>());
  }
  if (const auto it = doc.find("theta"); it != doc.end()) {
    meta.theta = Theta(number_at(*it, "V"), number_at(*it, "Km"), number_at(*it, "Kic"));
  }
  if (const auto it = doc.find("space"); it != doc.end()) {
    meta.space = DesignSpace(number_at(*it, "Smin"), number_at(*it, "Smax"),
                             number_at(*it, "Imin"), number_at(*it, "Imax"));
  }
  if (const auto it = doc.find("transformed_space"); it != doc.end()) {
    meta.transformed_space = TransformedSpace(number_at(*it, "xmin"), number_at(*it, "xmax"),
                                              number_at(*it, "ymin"), number_at(*it, "ymax"));
  }
  return {Design(frame, std::move(support)), meta};
}

std::string report_to_json(const CertificateReport& report) {
  std::ostringstream os;
  os << "{\n  \"check\": " << json_string(report.check)
     << ",\n  \"max_slack\": " << json_number(report.max_slack)
     << ",\n  \"argmax\": {\"x\": " << json_number(report.argmax.x)
     << ", \"y\": " << json_number(report.argmax.y) << "}"
     << ",\n  \"support_slacks\": [";
  for (std::size_t k = 0; k < report.support_slacks.size(); ++k) {
    os << (k ? ", " : "") << json_number(report.support_slacks[k]);
  }
  os << "],\n  \"pass\": " << (report.pass ? "true" : "false")
     << ",\n  \"route\": " << json_string(std::string(route_name(report.route)))
     << ",\n  \"variance\": " << json_number(report.variance)
     << ",\n  \"note\": " << json_string(report.note) << "\n}\n";
  return os.str();
}

}  // namespace inhibdesign
