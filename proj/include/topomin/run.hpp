#pragma once

// Command dispatch behind the CLI: homology | check | solve | lemmas | export.
// Every run yields a RunReport; exit codes are 0 ok, 2 infeasible, 1 error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "topomin/problem.hpp"

namespace topomin {

using nlohmann::ordered_json;

struct ReportVerdict {
  std::string id;
  std::string kind;
  std::string status;
  bool degenerate = false;
  std::size_t complement_rank = 0;
  friend bool operator==(const ReportVerdict&, const ReportVerdict&) = default;
};

struct RunReport {
  std::string command;
  std::vector<std::string> arguments;
  int exit_code = 0;
  std::uint64_t seed = 0;
  std::optional<double> objective;
  std::optional<Certificate> certificate;
  std::vector<ReportVerdict> verdicts;
  ordered_json details = ordered_json::object();
  std::vector<std::string> errors;
  double timing_ms = 0;

  friend bool operator==(const RunReport& a, const RunReport& b) {
    auto cert = [](const std::optional<Certificate>& c) {
      return c ? std::optional(std::pair(c->lower_bound, c->method)) : std::nullopt;
    };
    return a.command == b.command && a.arguments == b.arguments && a.exit_code == b.exit_code && a.seed == b.seed &&
           a.objective == b.objective && cert(a.certificate) == cert(b.certificate) && a.verdicts == b.verdicts &&
           a.details == b.details && a.errors == b.errors && a.timing_ms == b.timing_ms;
  }
};

inline ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["command"] = r.command;
  j["arguments"] = r.arguments;
  j["exit_code"] = r.exit_code;
  j["seed"] = r.seed;
  j["objective"] = r.objective ? ordered_json(*r.objective) : ordered_json(nullptr);
  j["certificate"] = r.certificate ? ordered_json{{"lower_bound", r.certificate->lower_bound}, {"method", r.certificate->method}}
                                   : ordered_json(nullptr);
  j["verdicts"] = ordered_json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back({{"id", v.id},
                             {"kind", v.kind},
                             {"status", v.status},
                             {"degenerate", v.degenerate},
                             {"complement_rank", v.complement_rank}});
  j["details"] = r.details;
  j["errors"] = r.errors;
  j["timing_ms"] = r.timing_ms;
  return j;
}

inline RunReport report_from_json(const ordered_json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.arguments = j.at("arguments").get<std::vector<std::string>>();
  r.exit_code = j.at("exit_code").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("objective").is_null()) r.objective = j["objective"].get<double>();
  if (!j.at("certificate").is_null())
    r.certificate = Certificate{j["certificate"].at("lower_bound").get<double>(), j["certificate"].at("method").get<std::string>()};
  for (const auto& v : j.at("verdicts"))
    r.verdicts.push_back({v.at("id").get<std::string>(), v.at("kind").get<std::string>(), v.at("status").get<std::string>(),
                          v.at("degenerate").get<bool>(), v.at("complement_rank").get<std::size_t>()});
  r.details = j.at("details");
  r.errors = j.at("errors").get<std::vector<std::string>>();
  r.timing_ms = j.at("timing_ms").get<double>();
  return r;
}

/// One key per line; the timing line is the only run-dependent one.
inline std::string render(const RunReport& r) { return to_json(r).dump(2) + "\n"; }

struct RunOptions {
  std::string command;
  std::vector<std::string> arguments;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<double> tol;
  std::optional<std::size_t> raster;
  bool exhaustive = false;
  std::optional<std::string> mesh_out;
  std::optional<std::string> csv_out;
  std::string pair = "orthogonal";  // lemmas: "orthogonal" or "theta,phi"
  std::size_t samples = 100000;
  std::size_t inject = 0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline ordered_json homology_json(const Complex& K) {
  ordered_json a = ordered_json::array();
  for (int k = 0; k <= K.dimension(); ++k) {
    auto h = homology_group(K, k);
    std::vector<std::string> torsion;
    for (const auto& t : h.torsion) torsion.push_back(to_string(t));
    a.push_back({{"degree", k}, {"rank", h.rank}, {"torsion", torsion}});
  }
  return a;
}

inline std::vector<ReportVerdict> verdicts_for(const FaceSet& F, const std::vector<ConstraintCycle>& constraints) {
  auto rep = spanning_check(F, constraints);
  std::vector<ReportVerdict> out;
  for (std::size_t i = 0; i < constraints.size(); ++i)
    out.push_back({rep.verdicts[i].id, to_string(constraints[i].kind), to_string(rep.verdicts[i].status),
                   rep.verdicts[i].degenerate, rep.complement_rank});
  return out;
}

inline ordered_json faces_json(const FaceSet& F) {
  ordered_json a = ordered_json::array();
  const auto& K = *F.complex();
  for (auto f : F.faces()) {
    ordered_json face = ordered_json::array();
    for (VertexId v : K.simplex(F.cell_dimension(), f)) face.push_back(K.grid()->lattice_of(v));
    a.push_back(face);
  }
  return a;
}

inline void write_mesh(const std::string& path, const FaceSet& F) {
  const auto& K = *F.complex();
  std::set<VertexId> used;
  for (auto f : F.faces())
    for (VertexId v : K.simplex(F.cell_dimension(), f)) used.insert(v);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << K.ambient_dimension() << ' ' << F.cell_dimension() << '\n';
  out << "vertices " << used.size() << '\n';
  for (VertexId v : used) {
    out << v;
    for (double x : K.position(v)) out << ' ' << format_double(x);
    out << '\n';
  }
  out << "faces " << F.size() << '\n';
  for (auto f : F.faces()) {
    const auto& s = K.simplex(F.cell_dimension(), f);
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const std::vector<ReportVerdict>& verdicts) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "id,kind,verdict,degenerate,complement_rank\n";
  for (const auto& v : verdicts)
    out << v.id << ',' << v.kind << ',' << v.status << ',' << (v.degenerate ? "true" : "false") << ','
        << v.complement_rank << '\n';
}

inline std::string projections_path(const std::string& csv) {
  auto dot = csv.rfind('.');
  auto slash = csv.find_last_of('/');
  std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? csv.substr(0, dot) : csv;
  return stem + "_projections.csv";
}

// Projected triangle corners in both target planes, one row per face and plane.
inline void write_projections(const std::string& path, const FaceSet& F, const ProjectionTarget& t1,
                              const ProjectionTarget& t2) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "face,plane,x1,y1,x2,y2,x3,y3\n";
  const auto& K = *F.complex();
  for (auto f : F.faces()) {
    int plane = 1;
    for (const auto* t : {&t1, &t2}) {
      out << f << ',' << plane++;
      for (VertexId v : K.simplex(2, f)) {
        auto p = K.position(v);
        auto q = t->frame.project(Vec4(p[0], p[1], p[2], p[3]) - t->origin);
        out << ',' << format_double(q.x()) << ',' << format_double(q.y());
      }
      out << '\n';
    }
  }
}

struct Solved {
  SolveResult result;
  std::optional<ProjectionBound> projection;
};

inline Solved solve_instance(const Instance& in, const ProblemSpec& spec, const RunOptions& opt, RunReport& report) {
  const double tol = spec.tol;
  Solved s{SolveResult{FaceSet(in.K, in.d)}, std::nullopt};
  if (opt.exhaustive || in.pool.size() <= kExhaustivePoolCap) {
    s.result = minimize_exhaustive(in.constraints, in.h, in.pool, tol);
  } else {
    if (!in.initial) throw InvalidInput("local search needs 'initial_set' (the pool exceeds the exhaustive cap)");
    LocalSearchOptions lo;
    lo.budget = spec.budget;
    lo.seed = spec.seed;
    lo.tol = tol;
    s.result = minimize_local(in.constraints, in.h, *in.initial, lo, in.pool);
  }
  s.result.seed = spec.seed;
  if (in.projection) {
    s.projection = projection_lower_bound(s.result.best, in.projection->first, in.projection->second, spec.raster);
    if (s.result.certificate.method == "none") s.result.certificate = {s.projection->bound, "projection"};
    report.details["projection"] = {{"area1", s.projection->area1},
                                    {"area2", s.projection->area2},
                                    {"lambda", s.projection->lambda},
                                    {"bound", s.projection->bound},
                                    {"certified_optimal",
                                     std::abs(s.result.objective - s.projection->bound) <= tol * std::max(1.0, s.result.objective)}};
  }
  report.objective = s.result.objective;
  report.certificate = s.result.certificate;
  report.verdicts = verdicts_for(s.result.best, in.constraints);
  report.details["faces"] = s.result.best.size();
  report.details["best"] = faces_json(s.result.best);
  report.details["iterations"] = s.result.iterations;
  report.details["evaluations"] = s.result.evaluations;
  report.details["accepted_moves"] = s.result.accepted_moves;
  report.details["sideways_moves"] = s.result.sideways_moves;
  return s;
}

inline PlanePair parse_pair(const std::string& text) {
  if (text == "orthogonal") return PlanePair::coordinate_orthogonal();
  auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidInput("--pair expects 'orthogonal' or 'theta,phi'");
  double theta = 0, phi = 0;
  try {
    std::size_t used = 0;
    theta = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("theta");
    std::string rest = text.substr(comma + 1);
    phi = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("phi");
  } catch (const std::exception&) {
    throw InvalidInput("--pair expects 'orthogonal' or 'theta,phi' in radians");
  }
  const double half = std::numbers::pi / 2;
  if (theta < 0 || phi < 0 || theta > half || phi > half) throw InvalidInput("--pair angles must lie in [0, pi/2]");
  return PlanePair::with_angles(std::min(theta, phi), std::max(theta, phi));
}

inline void run_lemmas(const RunOptions& opt, std::uint64_t seed, double tol, RunReport& report) {
  auto pair = parse_pair(opt.pair);
  std::vector<TwoVector> injected;
  if (opt.inject > 0) {
    if (!pair.orthogonal()) throw InvalidInput("--inject needs the orthogonal pair");
    for (std::size_t i = 0; i < opt.inject; ++i)
      injected.push_back(equality_family(pair, std::numbers::pi / 2 * static_cast<double>(i) /
                                                   static_cast<double>(std::max<std::size_t>(1, opt.inject - 1))));
  }
  auto r = verify_projection_bounds(pair, opt.samples, seed, injected);
  const bool holds = r.max_sum <= r.bound + tol;
  report.details = {{"pair", opt.pair},
                    {"alpha1", pair.alpha1},
                    {"alpha2", pair.alpha2},
                    {"bound", r.bound},
                    {"max_sum", r.max_sum},
                    {"margin", r.margin},
                    {"samples", r.samples},
                    {"injected", r.injected},
                    {"holds", holds}};
  if (!holds) {
    report.errors.push_back("sampled projection sum exceeds the bound");
    report.exit_code = 1;
  }
}

}  // namespace detail

/// Runs one command. `problem_text` may be absent only for `lemmas`.
inline RunReport run(const std::optional<std::string>& problem_text, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = opt.command;
  report.arguments = opt.arguments;
  try {
    std::optional<ProblemSpec> spec;
    if (problem_text) {
      spec = parse_problem(*problem_text);
      if (opt.seed) spec->seed = *opt.seed;
      if (opt.budget) spec->budget = *opt.budget;
      if (opt.tol) spec->tol = *opt.tol;
      if (opt.raster) spec->raster = *opt.raster;
      if (!(spec->tol > 0)) throw InvalidInput("--tol must be positive");
      if (spec->raster == 0) throw InvalidInput("--raster must be positive");
    }
    report.seed = spec ? spec->seed : opt.seed.value_or(0);

    if (opt.command == "lemmas") {
      detail::run_lemmas(opt, report.seed, spec ? spec->tol : opt.tol.value_or(1e-9), report);
    } else {
      if (!spec) throw InvalidInput("command '" + opt.command + "' needs --input");
      Instance in = build_instance(*spec);
      if (opt.command == "homology") {
        report.details["ambient"] = detail::homology_json(*in.K);
        if (in.initial) {
          auto M = complement_subcomplex(*in.initial);
          report.details["complement"] = detail::homology_json(*M);
          report.details["complement_model_cells"] = M->total_size();
          report.verdicts = detail::verdicts_for(*in.initial, in.constraints);
        }
      } else if (opt.command == "check") {
        if (!in.initial) throw InvalidInput("check needs 'initial_set'");
        report.objective = measure_Jh(*in.initial, in.h);
        report.verdicts = detail::verdicts_for(*in.initial, in.constraints);
        bool feasible = std::all_of(report.verdicts.begin(), report.verdicts.end(),
                                    [](const ReportVerdict& v) { return v.status == "pass"; });
        report.details["feasible"] = feasible;
        report.details["faces"] = in.initial->size();
        if (in.competitor) {
          auto v = competitor_check(*in.initial, *in.competitor, *in.region, in.constraints);
          ordered_json survival = ordered_json::array();
          for (const auto& [id, ok] : v.survival) survival.push_back({{"id", id}, {"survives", ok}});
          report.details["competitor"] = {{"boundary_match", v.boundary_match}, {"survival", survival}, {"overall", v.overall}};
        }
        if (!feasible) report.exit_code = 2;
      } else if (opt.command == "solve" || opt.command == "export") {
        if (opt.command == "export" && !opt.mesh_out) throw InvalidInput("export needs --mesh-out");
        auto solved = detail::solve_instance(in, *spec, opt, report);
        if (opt.mesh_out) detail::write_mesh(*opt.mesh_out, solved.result.best);
        if (opt.csv_out) {
          detail::write_csv(*opt.csv_out, report.verdicts);
          if (in.projection)
            detail::write_projections(detail::projections_path(*opt.csv_out), solved.result.best, in.projection->first,
                                      in.projection->second);
        }
      } else {
        throw InvalidInput("unknown command '" + opt.command + "'");
      }
    }
  } catch (const ProblemError& e) {
    report.errors = e.violations;
    report.exit_code = 1;
  } catch (const InfeasibleError& e) {
    report.errors.push_back(e.what());
    report.exit_code = 2;
  } catch (const std::exception& e) {
    report.errors.push_back(e.what());
    report.exit_code = 1;
  }
  report.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace topomin
