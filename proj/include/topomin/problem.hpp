#pragma once

// Problem files: JSON documents describing the box, the weight, the initial
// face set (explicit or generated), the constraint family, and run settings.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "topomin/solver.hpp"

namespace topomin {

using Lattice = std::vector<std::int64_t>;
using FaceRef = std::vector<Lattice>;

/// Carries every violation found, not just the first.
struct ProblemError : InvalidInput {
  std::vector<std::string> violations;
  explicit ProblemError(std::vector<std::string> v) : InvalidInput(join(v)), violations(std::move(v)) {}

  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
    return s;
  }
};

struct WeightSpec {
  double value = 1.0;
  double max = 1.0;
  std::vector<std::pair<FaceRef, double>> faces;
  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

struct InitialSpec {
  std::string generator;  // empty: explicit faces
  std::size_t axis = 0;
  std::int64_t offset = 0;
  Lattice fixed;
  std::vector<FaceRef> faces;
  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct PoolSpec {
  std::string kind = "all";  // all | box | faces
  Lattice lo, hi;
  std::vector<FaceRef> faces;
  friend bool operator==(const PoolSpec&, const PoolSpec&) = default;
};

struct ConstraintSpec {
  std::string id;
  std::string kind;  // point-pair | polygonal-loop | general-cycle
  std::vector<Lattice> vertices;
  std::vector<std::pair<std::vector<Lattice>, long long>> simplices;
  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

struct RegionSpec {
  Lattice lo, hi;
  friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

struct TargetSpec {
  std::vector<double> origin;
  std::vector<std::vector<double>> frame;
  std::string shape = "rectangle";  // rectangle | disk
  std::vector<double> lo;           // rectangle corner or disk center
  std::vector<double> hi;           // opposite corner, or {radius}
  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ProblemSpec {
  int n = 0;
  int d = 0;
  std::vector<std::size_t> box;
  double scale = 1.0;
  WeightSpec weight;
  std::optional<InitialSpec> initial;
  PoolSpec pool;
  std::vector<ConstraintSpec> constraints;
  std::optional<RegionSpec> region;
  std::optional<std::vector<FaceRef>> competitor;
  std::optional<std::vector<TargetSpec>> projection;  // exactly two targets
  std::uint64_t seed = 0;
  std::size_t budget = 10000;
  double tol = 1e-9;
  std::size_t raster = 1024;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

namespace detail {

using nlohmann::ordered_json;

class SpecReader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }

  void check_keys(const ordered_json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(where, "unknown field '" + it.key() + "'");
    }
  }

  bool is_object(const ordered_json& j, const std::string& where) {
    if (j.is_object()) return true;
    fail(where, "expected an object");
    return false;
  }

  std::optional<std::int64_t> integer(const ordered_json& j, const std::string& where) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
      double v = j.get<double>();
      if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
    }
    fail(where, "expected an integer");
    return std::nullopt;
  }

  std::optional<double> number(const ordered_json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    fail(where, "expected a number");
    return std::nullopt;
  }

  std::optional<std::string> string(const ordered_json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    fail(where, "expected a string");
    return std::nullopt;
  }

  std::vector<double> numbers(const ordered_json& j, const std::string& where, std::size_t len) {
    std::vector<double> out;
    if (!j.is_array() || j.size() != len) {
      fail(where, "expected an array of " + std::to_string(len) + " numbers");
      return out;
    }
    for (std::size_t i = 0; i < len; ++i)
      if (auto v = number(j[i], where + "[" + std::to_string(i) + "]")) out.push_back(*v);
    return out;
  }

  // lattice point inside the box
  Lattice point(const ordered_json& j, const std::string& where, const std::vector<std::size_t>& box) {
    Lattice p;
    if (!j.is_array() || j.size() != box.size()) {
      fail(where, "expected a lattice point with " + std::to_string(box.size()) + " coordinates");
      return p;
    }
    for (std::size_t i = 0; i < box.size(); ++i) {
      auto v = integer(j[i], where + "[" + std::to_string(i) + "]");
      if (!v) return {};
      if (*v < 0 || *v > static_cast<std::int64_t>(box[i])) {
        fail(where, "point leaves the box");
        return {};
      }
      p.push_back(*v);
    }
    return p;
  }

  std::vector<Lattice> points(const ordered_json& j, const std::string& where, const std::vector<std::size_t>& box) {
    std::vector<Lattice> out;
    if (!j.is_array()) {
      fail(where, "expected an array of lattice points");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], where + "[" + std::to_string(i) + "]", box));
    return out;
  }

  FaceRef face(const ordered_json& j, const std::string& where, const std::vector<std::size_t>& box, int d) {
    auto pts = points(j, where, box);
    if (j.is_array() && static_cast<int>(j.size()) != d + 1)
      fail(where, "a " + std::to_string(d) + "-face needs " + std::to_string(d + 1) + " vertices");
    return pts;
  }

  std::vector<FaceRef> faces(const ordered_json& j, const std::string& where, const std::vector<std::size_t>& box,
                             int d) {
    std::vector<FaceRef> out;
    if (!j.is_array()) {
      fail(where, "expected an array of faces");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(face(j[i], where + "[" + std::to_string(i) + "]", box, d));
    return out;
  }
};

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline std::vector<TargetSpec> two_plane_targets(const std::vector<std::size_t>& box, double scale) {
  const double c[4] = {box[0] / 2.0 * scale, box[1] / 2.0 * scale, box[2] / 2.0 * scale, box[3] / 2.0 * scale};
  TargetSpec t1{{0, 0, c[2], c[3]}, {{1, 0, 0, 0}, {0, 1, 0, 0}}, "rectangle", {0, 0}, {box[0] * scale, box[1] * scale}};
  TargetSpec t2{{c[0], c[1], 0, 0}, {{0, 0, 1, 0}, {0, 0, 0, 1}}, "rectangle", {0, 0}, {box[2] * scale, box[3] * scale}};
  return {t1, t2};
}

}  // namespace detail

/// Validated problem, or ProblemError listing every violation. Syntax errors
/// report line and column.
inline ProblemSpec parse_problem(const std::string& text) {
  using detail::ordered_json;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte);
    std::string what = e.what();
    auto pos = what.find("syntax error");
    throw ProblemError({"syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                        (pos == std::string::npos ? "" : ": " + what.substr(pos))});
  }
  detail::SpecReader r;
  ProblemSpec spec;
  if (!r.is_object(doc, "problem")) throw ProblemError(r.errors);
  r.check_keys(doc, "problem",
               {"ambient_dim", "cell_dim", "box", "scale", "weight", "initial_set", "candidate_pool", "constraints",
                "region", "competitor_set", "projection", "seed", "budget", "tol", "raster"});

  auto required = [&](const char* key) -> const ordered_json* {
    if (!doc.contains(key)) {
      r.fail("problem", std::string("missing field '") + key + "'");
      return nullptr;
    }
    return &doc[key];
  };
  bool dims_ok = false;
  if (auto* j = required("ambient_dim"))
    if (auto v = r.integer(*j, "ambient_dim")) spec.n = static_cast<int>(*v);
  if (auto* j = required("cell_dim"))
    if (auto v = r.integer(*j, "cell_dim")) spec.d = static_cast<int>(*v);
  if (spec.n < 1 || spec.n > 4) {
    r.fail("ambient_dim", "must be between 1 and 4");
  } else if (spec.d >= spec.n) {
    r.fail("cell_dim", "cell dimension must be below ambient");
  } else if (spec.d < 1) {
    r.fail("cell_dim", "cell dimension must be at least 1");
  } else {
    dims_ok = true;
  }
  if (auto* j = required("box")) {
    if (!j->is_array() || (dims_ok && j->size() != static_cast<std::size_t>(spec.n))) {
      r.fail("box", "expected one positive cell count per axis");
    } else {
      for (std::size_t i = 0; i < j->size(); ++i) {
        auto v = r.integer((*j)[i], "box[" + std::to_string(i) + "]");
        if (v && *v < 1) r.fail("box[" + std::to_string(i) + "]", "cell counts must be positive");
        spec.box.push_back(v ? static_cast<std::size_t>(std::max<std::int64_t>(*v, 1)) : 1);
      }
    }
  }
  if (doc.contains("scale"))
    if (auto v = r.number(doc["scale"], "scale")) {
      spec.scale = *v;
      if (!(*v > 0)) r.fail("scale", "must be positive");
    }
  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned() || (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      spec.seed = doc["seed"].get<std::uint64_t>();
    else
      r.fail("seed", "expected a non-negative integer");
  }
  if (doc.contains("budget"))
    if (auto v = r.integer(doc["budget"], "budget")) {
      if (*v < 0) r.fail("budget", "must be non-negative");
      spec.budget = static_cast<std::size_t>(std::max<std::int64_t>(*v, 0));
    }
  if (doc.contains("tol"))
    if (auto v = r.number(doc["tol"], "tol")) {
      spec.tol = *v;
      if (!(*v > 0)) r.fail("tol", "must be positive");
    }
  if (doc.contains("raster"))
    if (auto v = r.integer(doc["raster"], "raster")) {
      if (*v < 1) r.fail("raster", "must be positive");
      spec.raster = static_cast<std::size_t>(std::max<std::int64_t>(*v, 1));
    }

  // everything below needs a usable box
  const bool box_ok = dims_ok && spec.box.size() == static_cast<std::size_t>(spec.n);
  if (!box_ok) {
    if (r.errors.empty()) r.fail("box", "unusable");
    throw ProblemError(r.errors);
  }

  if (doc.contains("weight")) {
    const auto& w = doc["weight"];
    if (r.is_object(w, "weight")) {
      r.check_keys(w, "weight", {"value", "max", "faces"});
      if (w.contains("max"))
        if (auto v = r.number(w["max"], "weight.max")) spec.weight.max = *v;
      if (w.contains("value"))
        if (auto v = r.number(w["value"], "weight.value")) spec.weight.value = *v;
      if (spec.weight.max < 1) r.fail("weight.max", "the bound M must satisfy M >= 1");
      auto bound_check = [&](double h, const std::string& where) {
        if (!(h >= 1 && h <= spec.weight.max))
          r.fail(where, "weight value " + nlohmann::json(h).dump() + " violates the bound 1 <= h <= M (M = " +
                            nlohmann::json(spec.weight.max).dump() + ")");
      };
      bound_check(spec.weight.value, "weight.value");
      if (w.contains("faces")) {
        if (!w["faces"].is_array()) {
          r.fail("weight.faces", "expected an array");
        } else {
          for (std::size_t i = 0; i < w["faces"].size(); ++i) {
            const auto& e = w["faces"][i];
            std::string where = "weight.faces[" + std::to_string(i) + "]";
            if (!r.is_object(e, where)) continue;
            r.check_keys(e, where, {"face", "value"});
            if (!e.contains("face") || !e.contains("value")) {
              r.fail(where, "needs 'face' and 'value'");
              continue;
            }
            auto f = r.face(e["face"], where + ".face", spec.box, spec.d);
            auto v = r.number(e["value"], where + ".value");
            if (v) bound_check(*v, where + ".value");
            spec.weight.faces.emplace_back(f, v.value_or(1.0));
          }
        }
      }
    }
  }

  if (doc.contains("initial_set")) {
    const auto& j = doc["initial_set"];
    InitialSpec init;
    if (r.is_object(j, "initial_set")) {
      r.check_keys(j, "initial_set", {"generator", "axis", "offset", "fixed", "faces"});
      if (j.contains("generator")) {
        if (auto g = r.string(j["generator"], "initial_set.generator")) init.generator = *g;
        if (j.contains("axis"))
          if (auto v = r.integer(j["axis"], "initial_set.axis")) {
            if (*v < 0 || *v >= spec.n) r.fail("initial_set.axis", "axis out of range");
            init.axis = static_cast<std::size_t>(std::clamp<std::int64_t>(*v, 0, spec.n - 1));
          }
        if (j.contains("offset"))
          if (auto v = r.integer(j["offset"], "initial_set.offset")) init.offset = *v;
        if (j.contains("fixed")) init.fixed = r.point(j["fixed"], "initial_set.fixed", spec.box);
        if (init.generator == "separating-row") {
          if (spec.d != spec.n - 1) r.fail("initial_set", "separating-row needs cell dimension n-1");
          if (init.offset < 0 || init.offset > static_cast<std::int64_t>(spec.box[init.axis]))
            r.fail("initial_set.offset", "offset leaves the box");
        } else if (init.generator == "straight-path") {
          if (spec.d != 1) r.fail("initial_set", "straight-path needs cell dimension 1");
          if (init.fixed.empty() && !j.contains("fixed")) r.fail("initial_set", "straight-path needs 'fixed'");
        } else if (init.generator == "two-planes-orthogonal") {
          if (spec.n != 4 || spec.d != 2) r.fail("initial_set", "two-planes-orthogonal needs n = 4 and d = 2");
          else
            for (std::size_t i = 0; i < 4; ++i)
              if (spec.box[i] % 2 != 0) r.fail("box[" + std::to_string(i) + "]", "two-planes-orthogonal needs even cell counts");
        } else {
          r.fail("initial_set.generator", "unknown generator '" + init.generator + "'");
        }
      } else if (j.contains("faces")) {
        init.faces = r.faces(j["faces"], "initial_set.faces", spec.box, spec.d);
      } else {
        r.fail("initial_set", "needs 'generator' or 'faces'");
      }
    }
    spec.initial = init;
  }

  if (doc.contains("candidate_pool")) {
    const auto& j = doc["candidate_pool"];
    if (r.is_object(j, "candidate_pool")) {
      r.check_keys(j, "candidate_pool", {"kind", "lo", "hi", "faces"});
      if (j.contains("kind"))
        if (auto k = r.string(j["kind"], "candidate_pool.kind")) spec.pool.kind = *k;
      if (spec.pool.kind == "box") {
        if (!j.contains("lo") || !j.contains("hi")) {
          r.fail("candidate_pool", "box pool needs 'lo' and 'hi'");
        } else {
          spec.pool.lo = r.point(j["lo"], "candidate_pool.lo", spec.box);
          spec.pool.hi = r.point(j["hi"], "candidate_pool.hi", spec.box);
        }
      } else if (spec.pool.kind == "faces") {
        if (!j.contains("faces")) r.fail("candidate_pool", "faces pool needs 'faces'");
        else spec.pool.faces = r.faces(j["faces"], "candidate_pool.faces", spec.box, spec.d);
      } else if (spec.pool.kind != "all") {
        r.fail("candidate_pool.kind", "expected all, box or faces");
      }
    }
  }

  if (doc.contains("constraints")) {
    const auto& j = doc["constraints"];
    const int degree = spec.n - spec.d - 1;
    std::set<std::string> ids;
    if (!j.is_array()) r.fail("constraints", "expected an array");
    else
      for (std::size_t i = 0; i < j.size(); ++i) {
        std::string where = "constraints[" + std::to_string(i) + "]";
        const auto& c = j[i];
        if (!r.is_object(c, where)) continue;
        r.check_keys(c, where, {"id", "kind", "vertices", "simplices"});
        ConstraintSpec cs;
        if (c.contains("id")) {
          if (auto s = r.string(c["id"], where + ".id")) cs.id = *s;
        }
        if (cs.id.empty()) cs.id = "w" + std::to_string(i);
        if (!ids.insert(cs.id).second) r.fail(where + ".id", "duplicate constraint id '" + cs.id + "'");
        if (auto k = c.contains("kind") ? r.string(c["kind"], where + ".kind") : std::nullopt) cs.kind = *k;
        else if (!c.contains("kind")) r.fail(where, "missing field 'kind'");
        if (cs.kind == "point-pair" || cs.kind == "polygonal-loop") {
          int need = cs.kind == "point-pair" ? 0 : 1;
          if (degree != need)
            r.fail(where, cs.kind + " realizes a " + std::to_string(need) + "-cycle but the family needs degree " +
                              std::to_string(degree));
          if (!c.contains("vertices")) {
            r.fail(where, "missing field 'vertices'");
          } else {
            cs.vertices = r.points(c["vertices"], where + ".vertices", spec.box);
            if (cs.kind == "point-pair" && cs.vertices.size() != 2) r.fail(where, "a point pair needs exactly two vertices");
            if (cs.kind == "polygonal-loop" && cs.vertices.size() < 2) r.fail(where, "a loop needs at least two vertices");
          }
        } else if (cs.kind == "general-cycle") {
          if (!c.contains("simplices") || !c["simplices"].is_array()) {
            r.fail(where, "general-cycle needs an array 'simplices'");
          } else {
            for (std::size_t t = 0; t < c["simplices"].size(); ++t) {
              const auto& s = c["simplices"][t];
              std::string sw = where + ".simplices[" + std::to_string(t) + "]";
              if (!r.is_object(s, sw)) continue;
              r.check_keys(s, sw, {"vertices", "coef"});
              if (!s.contains("vertices")) {
                r.fail(sw, "missing field 'vertices'");
                continue;
              }
              auto vs = r.points(s["vertices"], sw + ".vertices", spec.box);
              if (static_cast<int>(vs.size()) != degree + 1)
                r.fail(sw, "simplex must have " + std::to_string(degree + 1) + " vertices");
              long long coef = 1;
              if (s.contains("coef"))
                if (auto v = r.integer(s["coef"], sw + ".coef")) coef = *v;
              cs.simplices.emplace_back(vs, coef);
            }
          }
        } else if (!cs.kind.empty()) {
          r.fail(where + ".kind", "unknown constraint kind '" + cs.kind + "'");
        }
        spec.constraints.push_back(std::move(cs));
      }
  }

  if (doc.contains("region")) {
    const auto& j = doc["region"];
    if (r.is_object(j, "region")) {
      r.check_keys(j, "region", {"lo", "hi"});
      RegionSpec reg;
      if (!j.contains("lo") || !j.contains("hi")) {
        r.fail("region", "needs 'lo' and 'hi'");
      } else {
        reg.lo = r.point(j["lo"], "region.lo", spec.box);
        reg.hi = r.point(j["hi"], "region.hi", spec.box);
        if (reg.lo.size() == reg.hi.size())
          for (std::size_t i = 0; i < reg.lo.size(); ++i)
            if (reg.lo[i] > reg.hi[i]) r.fail("region", "lo must not exceed hi");
      }
      spec.region = reg;
    }
  }

  if (doc.contains("competitor_set")) {
    const auto& j = doc["competitor_set"];
    if (r.is_object(j, "competitor_set")) {
      r.check_keys(j, "competitor_set", {"faces"});
      spec.competitor = j.contains("faces") ? r.faces(j["faces"], "competitor_set.faces", spec.box, spec.d)
                                            : std::vector<FaceRef>{};
      if (!spec.region) r.fail("competitor_set", "a competitor check needs 'region'");
    }
  }

  if (doc.contains("projection")) {
    const auto& j = doc["projection"];
    if (spec.n != 4 || spec.d != 2) r.fail("projection", "projection certificates need n = 4 and d = 2");
    if (j.is_string()) {
      if (j.get<std::string>() == "two-planes-orthogonal" && spec.n == 4)
        spec.projection = detail::two_plane_targets(spec.box, spec.scale);
      else if (j.get<std::string>() != "two-planes-orthogonal")
        r.fail("projection", "unknown shorthand '" + j.get<std::string>() + "'");
    } else if (r.is_object(j, "projection")) {
      r.check_keys(j, "projection", {"targets"});
      if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].size() != 2) {
        r.fail("projection", "needs exactly two targets");
      } else {
        std::vector<TargetSpec> targets;
        for (std::size_t i = 0; i < 2; ++i) {
          const auto& t = j["targets"][i];
          std::string where = "projection.targets[" + std::to_string(i) + "]";
          if (!r.is_object(t, where)) continue;
          r.check_keys(t, where, {"origin", "frame", "shape", "lo", "hi"});
          TargetSpec ts;
          if (t.contains("shape"))
            if (auto s = r.string(t["shape"], where + ".shape")) ts.shape = *s;
          if (ts.shape != "rectangle" && ts.shape != "disk") r.fail(where + ".shape", "expected rectangle or disk");
          ts.origin = t.contains("origin") ? r.numbers(t["origin"], where + ".origin", 4) : std::vector<double>(4, 0.0);
          if (!t.contains("frame") || !t["frame"].is_array() || t["frame"].size() != 2) {
            r.fail(where + ".frame", "expected two vectors");
          } else {
            ts.frame = {r.numbers(t["frame"][0], where + ".frame[0]", 4), r.numbers(t["frame"][1], where + ".frame[1]", 4)};
            if (ts.frame[0].size() == 4 && ts.frame[1].size() == 4) {
              try {
                Plane(Vec4(ts.frame[0].data()), Vec4(ts.frame[1].data()));
              } catch (const InvalidInput&) {
                r.fail(where + ".frame", "frame must be orthonormal");
              }
            }
          }
          ts.lo = t.contains("lo") ? r.numbers(t["lo"], where + ".lo", 2) : std::vector<double>{};
          ts.hi = t.contains("hi") ? r.numbers(t["hi"], where + ".hi", ts.shape == "disk" ? 1 : 2) : std::vector<double>{};
          if (ts.lo.empty() || ts.hi.empty()) r.fail(where, "needs 'lo' and 'hi'");
          targets.push_back(std::move(ts));
        }
        spec.projection = targets;
      }
    }
  }

  if (!r.errors.empty()) throw ProblemError(r.errors);
  return spec;
}

/// Canonical JSON text; parse_problem(serialize_problem(s)) == s.
inline std::string serialize_problem(const ProblemSpec& s) {
  using nlohmann::ordered_json;
  auto faces_json = [](const std::vector<FaceRef>& fs) {
    ordered_json a = ordered_json::array();
    for (const auto& f : fs) a.push_back(f);
    return a;
  };
  ordered_json j;
  j["ambient_dim"] = s.n;
  j["cell_dim"] = s.d;
  j["box"] = s.box;
  j["scale"] = s.scale;
  ordered_json w;
  w["value"] = s.weight.value;
  w["max"] = s.weight.max;
  if (!s.weight.faces.empty()) {
    w["faces"] = ordered_json::array();
    for (const auto& [f, v] : s.weight.faces) w["faces"].push_back({{"face", f}, {"value", v}});
  }
  j["weight"] = w;
  if (s.initial) {
    ordered_json i;
    if (!s.initial->generator.empty()) {
      i["generator"] = s.initial->generator;
      i["axis"] = s.initial->axis;
      i["offset"] = s.initial->offset;
      if (!s.initial->fixed.empty()) i["fixed"] = s.initial->fixed;
    } else {
      i["faces"] = faces_json(s.initial->faces);
    }
    j["initial_set"] = i;
  }
  ordered_json p;
  p["kind"] = s.pool.kind;
  if (s.pool.kind == "box") {
    p["lo"] = s.pool.lo;
    p["hi"] = s.pool.hi;
  }
  if (s.pool.kind == "faces") p["faces"] = faces_json(s.pool.faces);
  j["candidate_pool"] = p;
  j["constraints"] = ordered_json::array();
  for (const auto& c : s.constraints) {
    ordered_json cj;
    cj["id"] = c.id;
    cj["kind"] = c.kind;
    if (c.kind == "general-cycle") {
      cj["simplices"] = ordered_json::array();
      for (const auto& [vs, coef] : c.simplices) cj["simplices"].push_back({{"vertices", vs}, {"coef", coef}});
    } else {
      cj["vertices"] = c.vertices;
    }
    j["constraints"].push_back(cj);
  }
  if (s.region) j["region"] = {{"lo", s.region->lo}, {"hi", s.region->hi}};
  if (s.competitor) j["competitor_set"] = {{"faces", faces_json(*s.competitor)}};
  if (s.projection) {
    ordered_json t = ordered_json::array();
    for (const auto& ts : *s.projection)
      t.push_back({{"origin", ts.origin}, {"frame", ts.frame}, {"shape", ts.shape}, {"lo", ts.lo}, {"hi", ts.hi}});
    j["projection"] = {{"targets", t}};
  }
  j["seed"] = s.seed;
  j["budget"] = s.budget;
  j["tol"] = s.tol;
  j["raster"] = s.raster;
  return j.dump(2) + "\n";
}

/// The problem turned into library objects.
struct Instance {
  ComplexPtr K;
  int d = 0;
  WeightField h = WeightField::constant(1, 1);
  std::optional<FaceSet> initial;
  FaceSet pool;
  std::vector<ConstraintCycle> constraints;
  std::optional<GridRegion> region;
  std::optional<FaceSet> competitor;
  std::optional<std::pair<ProjectionTarget, ProjectionTarget>> projection;
};

inline Instance build_instance(const ProblemSpec& s) {
  auto K = build_grid_complex(static_cast<std::size_t>(s.n), s.box, s.scale);
  const auto& grid = *K->grid();
  std::vector<std::string> errors;
  auto vertex = [&](const Lattice& p) { return *grid.vertex_at(p); };
  auto face_index = [&](const FaceRef& f, const std::string& where) -> std::optional<std::size_t> {
    Simplex sx;
    for (const auto& p : f) sx.push_back(vertex(p));
    std::sort(sx.begin(), sx.end());
    if (std::adjacent_find(sx.begin(), sx.end()) == sx.end() && static_cast<int>(sx.size()) == s.d + 1)
      if (auto i = K->find(sx)) return i;
    errors.push_back(where + ": not a " + std::to_string(s.d) + "-face of the grid");
    return std::nullopt;
  };
  auto face_list = [&](const std::vector<FaceRef>& fs, const std::string& where) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (auto f = face_index(fs[i], where + "[" + std::to_string(i) + "]")) out.push_back(*f);
    return out;
  };
  auto faces_where = [&](auto pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < K->size(s.d); ++i) {
      const auto& sx = K->simplex(s.d, i);
      if (std::all_of(sx.begin(), sx.end(), [&](VertexId v) { return pred(grid.lattice_of(v)); })) out.push_back(i);
    }
    return out;
  };

  Instance in{K, s.d, WeightField::constant(1, 1), std::nullopt, FaceSet(K, s.d), {}, std::nullopt, std::nullopt, std::nullopt};
  std::map<std::size_t, double> table;
  for (std::size_t i = 0; i < s.weight.faces.size(); ++i)
    if (auto f = face_index(s.weight.faces[i].first, "weight.faces[" + std::to_string(i) + "].face"))
      table[*f] = s.weight.faces[i].second;
  in.h = table.empty() ? WeightField::constant(s.weight.value, s.weight.max)
                       : WeightField::per_face(table, s.weight.value, s.weight.max);

  if (s.initial) {
    const auto& g = *s.initial;
    std::vector<std::size_t> faces;
    if (g.generator == "separating-row") {
      faces = faces_where([&](const Lattice& p) { return p[g.axis] == g.offset; });
    } else if (g.generator == "straight-path") {
      faces = faces_where([&](const Lattice& p) {
        for (std::size_t a = 0; a < p.size(); ++a)
          if (a != g.axis && p[a] != g.fixed[a]) return false;
        return true;
      });
    } else if (g.generator == "two-planes-orthogonal") {
      const auto c = [&](std::size_t a) { return static_cast<std::int64_t>(s.box[a] / 2); };
      faces = faces_where([&](const Lattice& p) { return p[2] == c(2) && p[3] == c(3); });
      auto second = faces_where([&](const Lattice& p) { return p[0] == c(0) && p[1] == c(1); });
      faces.insert(faces.end(), second.begin(), second.end());
    } else {
      faces = face_list(g.faces, "initial_set.faces");
    }
    in.initial = FaceSet(K, s.d, faces);
  }

  if (s.pool.kind == "all") {
    in.pool = FaceSet::all(K, s.d);
  } else if (s.pool.kind == "box") {
    in.pool = FaceSet(K, s.d, faces_where([&](const Lattice& p) {
                        for (std::size_t a = 0; a < p.size(); ++a)
                          if (p[a] < s.pool.lo[a] || p[a] > s.pool.hi[a]) return false;
                        return true;
                      }));
  } else {
    in.pool = FaceSet(K, s.d, face_list(s.pool.faces, "candidate_pool.faces"));
  }

  const int degree = s.n - s.d - 1;
  for (std::size_t i = 0; i < s.constraints.size(); ++i) {
    const auto& c = s.constraints[i];
    ConstraintCycle w;
    w.id = c.id;
    if (c.kind == "point-pair") {
      w = ConstraintCycle::point_pair(c.id, vertex(c.vertices[0]), vertex(c.vertices[1]));
    } else if (c.kind == "polygonal-loop") {
      std::vector<VertexId> vs;
      for (const auto& p : c.vertices) vs.push_back(vertex(p));
      w = ConstraintCycle::loop(c.id, vs);
    } else {
      std::vector<ConstraintCycle::Term> terms;
      for (const auto& [pts, coef] : c.simplices) {
        ConstraintCycle::Term t;
        for (const auto& p : pts) t.vertices.push_back(vertex(p));
        t.coefficient = coef;
        terms.push_back(std::move(t));
      }
      w = ConstraintCycle::cycle(c.id, terms);
    }
    try {
      constraint_chain(w, K, degree);
    } catch (const RealizationError& e) {
      errors.push_back("constraints[" + std::to_string(i) + "]: " + e.what());
    }
    in.constraints.push_back(std::move(w));
  }

  if (s.region) in.region = GridRegion{s.region->lo, s.region->hi};
  if (s.competitor) in.competitor = FaceSet(K, s.d, face_list(*s.competitor, "competitor_set.faces"));
  if (s.projection) {
    auto target = [](const TargetSpec& t) {
      ProjectionTarget pt;
      pt.origin = Vec4(t.origin.data());
      pt.frame = Plane(Vec4(t.frame[0].data()), Vec4(t.frame[1].data()));
      pt.shape = t.shape == "disk" ? ProjectionTarget::Shape::disk : ProjectionTarget::Shape::rectangle;
      pt.lo = {t.lo[0], t.lo[1]};
      pt.hi = t.shape == "disk" ? Eigen::Vector2d(t.hi[0], 0) : Eigen::Vector2d(t.hi[0], t.hi[1]);
      return pt;
    };
    in.projection = std::pair{target((*s.projection)[0]), target((*s.projection)[1])};
  }
  if (!errors.empty()) throw ProblemError(errors);
  return in;
}

}  // namespace topomin
