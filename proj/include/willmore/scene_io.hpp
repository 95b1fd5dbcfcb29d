#ifndef WILLMORE_SCENE_IO_HPP
#define WILLMORE_SCENE_IO_HPP

#include <algorithm>
#include <array>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "willmore/errors.hpp"
#include "willmore/scene.hpp"

namespace willmore {

namespace detail {

inline constexpr std::array<const char*, 10> kCoeffNames = {"c00", "c10", "c01", "c20", "c11",
                                                            "c02", "c30", "c21", "c12", "c03"};

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw ValidationError("scene field " + path + ": " + what);
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) field_error(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) field_error(path + "." + it.key(), "unknown key");
}

inline double number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

inline const nlohmann::json& member(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) field_error(path + "." + key, "missing");
  return obj.at(key);
}

inline Vec2 point(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) field_error(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

}  // namespace detail

/// Parses a scene document. Syntax errors report line and column, content errors the field path.
inline GraphScene parse_scene(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // The parser message carries "line L, column C".
    throw ValidationError(std::string("scene syntax error: ") + e.what());
  }
  using detail::member;
  using detail::number;
  detail::reject_unknown(doc, "scene", {"domain", "cells", "jumps"});
  GraphScene s;
  const auto& dom = member(doc, "domain", "scene");
  detail::reject_unknown(dom, "domain", {"x0", "y0", "x1", "y1"});
  s.domain = {number(member(dom, "x0", "domain"), "domain.x0"), number(member(dom, "y0", "domain"), "domain.y0"),
              number(member(dom, "x1", "domain"), "domain.x1"), number(member(dom, "y1", "domain"), "domain.y1")};

  const auto& cells = member(doc, "cells", "scene");
  if (!cells.is_array()) detail::field_error("cells", "expected an array");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::string path = "cells[" + std::to_string(k) + "]";
    detail::reject_unknown(cells[k], path, {"polygon", "coeffs"});
    Cell c;
    const auto& poly = member(cells[k], "polygon", path);
    if (!poly.is_array()) detail::field_error(path + ".polygon", "expected an array of points");
    for (std::size_t m = 0; m < poly.size(); ++m)
      c.polygon.push_back(detail::point(poly[m], path + ".polygon[" + std::to_string(m) + "]"));
    if (detail::signed_area(c.polygon) < 0.0) std::reverse(c.polygon.begin(), c.polygon.end());
    const auto& co = member(cells[k], "coeffs", path);
    if (!co.is_object()) detail::field_error(path + ".coeffs", "expected an object");
    for (auto it = co.begin(); it != co.end(); ++it) {
      const auto pos = std::find(detail::kCoeffNames.begin(), detail::kCoeffNames.end(), it.key());
      if (pos == detail::kCoeffNames.end()) detail::field_error(path + ".coeffs." + it.key(), "unknown key");
      c.u.c[pos - detail::kCoeffNames.begin()] = number(it.value(), path + ".coeffs." + it.key());
    }
    s.cells.push_back(std::move(c));
  }

  if (doc.contains("jumps")) {
    const auto& jumps = doc.at("jumps");
    if (!jumps.is_array()) detail::field_error("jumps", "expected an array");
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const std::string path = "jumps[" + std::to_string(k) + "]";
      detail::reject_unknown(jumps[k], path, {"p0", "p1", "nu"});
      s.jumps.push_back({detail::point(member(jumps[k], "p0", path), path + ".p0"),
                         detail::point(member(jumps[k], "p1", path), path + ".p1"),
                         detail::point(member(jumps[k], "nu", path), path + ".nu")});
    }
  }
  return s;
}

inline GraphScene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

inline std::string scene_to_json(const GraphScene& s) {
  nlohmann::json doc;
  doc["domain"] = {{"x0", s.domain.x0}, {"y0", s.domain.y0}, {"x1", s.domain.x1}, {"y1", s.domain.y1}};
  doc["cells"] = nlohmann::json::array();
  for (const Cell& c : s.cells) {
    nlohmann::json cell;
    cell["polygon"] = nlohmann::json::array();
    for (Vec2 p : c.polygon) cell["polygon"].push_back({p.x, p.y});
    cell["coeffs"] = nlohmann::json::object();
    for (std::size_t k = 0; k < c.u.c.size(); ++k)
      if (c.u.c[k] != 0.0) cell["coeffs"][detail::kCoeffNames[k]] = c.u.c[k];
    doc["cells"].push_back(cell);
  }
  doc["jumps"] = nlohmann::json::array();
  for (const JumpSegment& j : s.jumps)
    doc["jumps"].push_back({{"p0", {j.p0.x, j.p0.y}}, {"p1", {j.p1.x, j.p1.y}}, {"nu", {j.nu.x, j.nu.y}}});
  return doc.dump(2);
}

}  // namespace willmore

#endif  // WILLMORE_SCENE_IO_HPP
