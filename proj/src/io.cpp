#include "hbar/io.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace hbar {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path));
    out << text;
    if (!out) throw Error(fmt::format("write failed for {}", path));
  }
  std::filesystem::rename(tmp, p);
}

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw Error(fmt::format("malformed JSON at line {}, column {}", line, col));
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw Error(fmt::format("{}: expected an object", where));
  const auto it = j.find(key);
  if (it == j.end()) throw Error(fmt::format("{}: missing field '{}'", where, key));
  return *it;
}

double number(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw Error(fmt::format("{}: field '{}' must be a number", where, key));
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

long integer(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number_integer()) throw Error(fmt::format("{}: field '{}' must be an integer", where, key));
  return v.get<long>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw Error(fmt::format("{}: expected an array of numbers", where));
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(fmt::format("{}: expected an array of numbers", where));
    out.push_back(x.get<double>());
  }
  return out;
}

std::string text_field(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw Error(fmt::format("{}: field '{}' must be a string", where, key));
  return v.get<std::string>();
}

Polyline points(const json& v, const std::string& where) {
  if (!v.is_array()) throw Error(fmt::format("{}: expected an array of [x, y] pairs", where));
  Polyline out;
  for (const auto& p : v) {
    const auto xy = numbers(p, where);
    if (xy.size() != 2) throw Error(fmt::format("{}: expected an array of [x, y] pairs", where));
    out.push_back({xy[0], xy[1]});
  }
  return out;
}

}  // namespace

ComplexInput complex_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string coeffs = text_field(j, "coefficients", "complex");
  if (coeffs != "F2" && coeffs != "Novikov-F2")
    throw Error(fmt::format("complex: coefficients must be \"F2\" or \"Novikov-F2\", got \"{}\"", coeffs));
  const auto& gens = field(j, "generators", "complex");
  if (!gens.is_array()) throw Error("complex: 'generators' must be an array");
  std::map<std::string, int> index;
  std::vector<Generator> f2;
  std::vector<NovikovGenerator> nov;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string where = fmt::format("generators[{}]", i);
    const auto& g = gens[i];
    const auto& idv = field(g, "id", where);
    const std::string id = idv.is_string() ? idv.get<std::string>() : idv.dump();
    const double action = number(g, "action", where);
    if (!index.emplace(id, static_cast<int>(i)).second)
      throw Error(fmt::format("{}: duplicate generator id '{}'", where, id));
    if (coeffs == "F2") {
      std::optional<int> degree;
      if (g.contains("degree")) degree = static_cast<int>(integer(g, "degree", where));
      f2.push_back(Generator{id, action, degree});
    } else {
      nov.push_back(NovikovGenerator{id, action});
    }
  }
  const json empty = json::array();
  const auto& bd = j.contains("boundary") ? j["boundary"] : empty;
  if (!bd.is_array()) throw Error("complex: 'boundary' must be an array");
  auto lookup = [&](const json& e, const char* key, const std::string& where) {
    const auto& v = field(e, key, where);
    const std::string id = v.is_string() ? v.get<std::string>() : v.dump();
    const auto it = index.find(id);
    if (it == index.end()) throw Error(fmt::format("{}: unknown generator '{}' in '{}'", where, id, key));
    return it->second;
  };
  if (coeffs == "F2") {
    std::vector<Chain> chains(f2.size());
    for (std::size_t i = 0; i < bd.size(); ++i) {
      const std::string where = fmt::format("boundary[{}]", i);
      chains[lookup(bd[i], "from", where)].push_back(lookup(bd[i], "to", where));
    }
    FilteredComplexF2 c(std::move(f2), std::move(chains));
    c.validate();
    return c;
  }
  NovikovComplex c(std::move(nov));
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const std::string where = fmt::format("boundary[{}]", i);
    const int from = lookup(bd[i], "from", where), to = lookup(bd[i], "to", where);
    const auto ex = bd[i].contains("exponents") ? numbers(bd[i]["exponents"], where) : std::vector<double>{0.0};
    c.add_entry(static_cast<std::size_t>(from), static_cast<std::size_t>(to), NovikovScalar(ex));
  }
  c.validate();
  return c;
}

DynamicalSystem system_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string kind = text_field(j, "kind", "system");
  if (kind == "doubling") {
    return DynamicalSystem::circle_degree(j.contains("degree") ? static_cast<int>(integer(j, "degree", "system")) : 2);
  }
  if (kind == "rotation") return DynamicalSystem::rotation(number(j, "alpha", "system"));
  if (kind == "shift") {
    return DynamicalSystem::shift(j.contains("alphabet") ? static_cast<int>(integer(j, "alphabet", "system")) : 2);
  }
  if (kind == "custom_grid") {
    return DynamicalSystem::custom_circle(static_cast<int>(integer(j, "degree", "system")),
                                         numbers(field(j, "table", "system"), "system.table"));
  }
  if (kind == "linear_torus") {
    const auto& m = field(j, "matrix", "system");
    Mat2 a{};
    if (!m.is_array() || m.size() != 2) throw Error("system.matrix: expected [[a, b], [c, d]]");
    for (int r = 0; r < 2; ++r) {
      if (!m[r].is_array() || m[r].size() != 2) throw Error("system.matrix: expected [[a, b], [c, d]]");
      for (int c = 0; c < 2; ++c) {
        if (!m[r][c].is_number_integer()) throw Error("system.matrix: entries must be integers");
        a[r][c] = m[r][c].get<std::int64_t>();
      }
    }
    return DynamicalSystem::linear_torus(a);
  }
  throw Error(fmt::format("system: unknown kind \"{}\"", kind));
}

namespace {

ConvexProfile profile_from(const json& j) {
  const std::string kind = text_field(j, "kind", "profile");
  const double lo = number_or(j, "lo", 0.0, "profile"), hi = number_or(j, "hi", 1.0, "profile");
  if (kind == "power") return power_profile(number(j, "c", "profile"), number(j, "p", "profile"), lo, hi);
  if (kind == "poly") return poly_profile(numbers(field(j, "coeffs", "profile"), "profile.coeffs"), lo, hi);
  if (kind == "table") return table_profile(numbers(field(j, "slopes", "profile"), "profile.slopes"), lo, hi);
  if (kind == "poly2") {
    const auto& c = field(j, "coeffs", "profile");
    if (!c.is_array()) throw Error("profile.coeffs: expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : c) rows.push_back(numbers(r, "profile.coeffs"));
    const auto rect = numbers(field(j, "rect", "profile"), "profile.rect");
    if (rect.size() != 4) throw Error("profile.rect: expected [x0, x1, y0, y1]");
    return poly2_profile(std::move(rows), {rect[0], rect[1], rect[2], rect[3]});
  }
  throw Error(fmt::format("profile: unknown kind \"{}\"", kind));
}

EllipsoidSpec ellipsoid_from(const json& j) {
  EllipsoidSpec e{numbers(field(j, "a", "ellipsoid"), "ellipsoid.a")};
  e.validate();
  return e;
}

}  // namespace

ConvexProfile profile_from_json(const std::string& text) { return profile_from(parse(text)); }

EllipsoidSpec ellipsoid_from_json(const std::string& text) { return ellipsoid_from(parse(text)); }

Tomograph tomograph_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string kind = text_field(j, "kind", "tomograph");
  if (kind == "lines") return line_tomograph(number(j, "r", "tomograph"));
  if (kind == "translation")
    return translation_tomograph(points(field(j, "core", "tomograph"), "tomograph.core"), number(j, "r", "tomograph"));
  if (kind == "cylinder_graph") {
    return cylinder_graph_tomograph(static_cast<int>(integer(j, "d", "tomograph")), number(j, "r", "tomograph"),
                                    j.contains("segments") ? static_cast<int>(integer(j, "segments", "tomograph")) : 256);
  }
  throw Error(fmt::format("tomograph: unknown kind \"{}\"", kind));
}

ToricModel toric_model_from_json(const std::string& text) {
  const json j = parse(text);
  if (j.is_object() && !j.contains("kind") && j.contains("a")) return ellipsoid_from(j);
  const std::string kind = text_field(j, "kind", "model");
  if (kind == "ellipsoid") return ellipsoid_from(j);
  if (kind == "flat_torus") {
    LatticeBasis b;
    const auto v1 = numbers(field(j, "v1", "model"), "model.v1"), v2 = numbers(field(j, "v2", "model"), "model.v2");
    if (v1.size() != 2 || v2.size() != 2) throw Error("model: v1 and v2 must have 2 entries");
    b.v1 = {v1[0], v1[1]};
    b.v2 = {v2[0], v2[1]};
    b.validate();
    return b;
  }
  return profile_from(j);
}

}  // namespace hbar
