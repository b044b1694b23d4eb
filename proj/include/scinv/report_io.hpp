#pragma once

// JSON transcripts and plot data for recursion traces and learning runs.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scinv/fail.hpp"
#include "scinv/geometry.hpp"
#include "scinv/sections.hpp"

namespace scinv {

/// Largest dimension for which vertex files are written.
inline constexpr int kMaxPlotDim = 3;

inline Json trace_to_json(const std::vector<Polytope>& iterates, int iterations_to_fixpoint) {
  Json j;
  j["iterations_to_fixpoint"] = iterations_to_fixpoint;
  j["fixpoint_rows"] = iterates.empty() ? 0 : iterates.back().size();
  j["iterates"] = Json::array();
  for (const auto& p : iterates) j["iterates"].push_back(to_json(p));
  return j;
}

inline Json to_json(const ViolatedRow& v) {
  Json j;
  j["index"] = v.index;
  j["row"] = to_json(v.row);
  j["residual"] = v.residual;
  return j;
}

inline Json to_json(const FailureEvent& e) {
  Json j;
  j["iteration"] = e.iteration;
  j["trajectory"] = e.trajectory;
  j["step"] = e.step;
  j["z"] = to_json(e.z);
  j["x_next"] = to_json(e.x_next);
  j["violated_rows"] = Json::array();
  for (const auto& v : e.violated_rows) j["violated_rows"].push_back(to_json(v));
  return j;
}

inline Json to_json(const CertificationReport& r) {
  Json j;
  j["n_rollouts"] = r.n_rollouts;
  j["horizon"] = r.horizon;
  j["violations"] = r.violations;
  j["empty_sections"] = r.empty_sections;
  j["first_exit_steps"] = r.first_exit_steps;
  j["passed"] = r.passed();
  j["heuristic"] = r.heuristic;
  return j;
}

inline Json to_json(const LearnState& s) {
  Json j;
  j["seed"] = s.seed;
  j["iterations"] = s.iteration();
  j["learned_rows"] = s.learned.size();
  j["failing_trajectories"] = s.failing_trajectories;
  j["trajectories_recorded"] = s.trajectories.size();
  j["rollouts_run"] = s.rollouts_run;
  j["certified"] = s.certified;
  j["iteration_cap_reached"] = s.iteration_cap_reached;
  j["polytopes"] = Json::array();
  for (const auto& p : s.polytopes) j["polytopes"].push_back(to_json(p));
  j["projections"] = Json::array();
  for (const auto& p : s.projections) j["projections"].push_back(to_json(p));
  j["learned"] = Json::array();
  for (const auto& l : s.learned) {
    Json e;
    e["iteration"] = l.iteration;
    e["row"] = to_json(l.row);
    e["projected_row"] = to_json(l.projected);
    e["source"] = to_json(l.source);
    Json src = Json::array();
    for (const auto& [t, k] : l.window.source_indices) src.push_back({t, k});
    e["window_samples"] = src;
    j["learned"].push_back(std::move(e));
  }
  j["certifications"] = Json::array();
  for (const auto& c : s.certifications) j["certifications"].push_back(to_json(c));
  j["log"] = s.log;
  return j;
}

namespace detail {

inline void write_vertices(const std::filesystem::path& file, const Polytope& p, const std::vector<std::string>& header) {
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot write " + file.string());
  write_points_csv(out, enumerate_vertices(p), header);
}

inline std::vector<std::string> joint_header(int dim, int n_x) {
  return n_x > 0 && n_x < dim ? coordinate_names(n_x, dim - n_x) : coordinate_names(dim);
}

}  // namespace detail

/// Writes trace.json and, for dimension <= 3, iterate_<k>_vertices.csv.
/// With n_x > 0 the state projections of joint-space iterates are written to
/// iterate_<k>_projection_vertices.csv as well.
inline void emit_plot_data(const std::vector<Polytope>& iterates, int iterations_to_fixpoint,
                           const std::filesystem::path& dir, int n_x = 0) {
  std::filesystem::create_directories(dir);
  write_json((dir / "trace.json").string(), trace_to_json(iterates, iterations_to_fixpoint));
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    const Polytope& p = iterates[k];
    if (p.dim() > kMaxPlotDim) continue;
    const std::string stem = "iterate_" + std::to_string(k);
    detail::write_vertices(dir / (stem + "_vertices.csv"), p, detail::joint_header(p.dim(), n_x));
    if (n_x > 0 && n_x < p.dim()) {
      detail::write_vertices(dir / (stem + "_projection_vertices.csv"), state_projection(p, n_x),
                             coordinate_names(n_x));
    }
  }
}

/// transcript.json, polytope_<l>_vertices.csv / projection_<l>_vertices.csv
/// (dimension <= 3), trajectories.csv with trajectory ids and a failing
/// marker, and learned_rows.csv.
inline void emit_plot_data(const LearnState& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_json((dir / "transcript.json").string(), to_json(s));
  const int dim = s.polytopes.empty() ? 0 : s.polytopes.front().dim();
  const int n_x = s.n_x();
  for (std::size_t l = 0; l < s.polytopes.size(); ++l) {
    if (dim > kMaxPlotDim) break;
    detail::write_vertices(dir / ("polytope_" + std::to_string(l) + "_vertices.csv"), s.polytopes[l],
                           detail::joint_header(dim, n_x));
    detail::write_vertices(dir / ("projection_" + std::to_string(l) + "_vertices.csv"), s.projections[l],
                           coordinate_names(n_x));
  }
  {
    std::ofstream out(dir / "trajectories.csv");
    write_trajectory_csv_header(out, n_x, dim - n_x, true);
    for (std::size_t i = 0; i < s.trajectories.size(); ++i) {
      write_trajectory_csv_rows(out, s.trajectories[i], static_cast<int>(i));
    }
  }
  {
    std::ofstream out(dir / "learned_rows.csv");
    out << "iteration,trajectory,step,projected_row";
    for (int i = 1; i <= dim; ++i) out << ",a" << i;
    out << ",offset\n";
    out.precision(17);
    for (const auto& l : s.learned) {
      out << l.iteration << ',' << l.source.trajectory << ',' << l.source.step << ',' << l.projected.index;
      for (Eigen::Index i = 0; i < l.row.normal.size(); ++i) out << ',' << l.row.normal[i];
      out << ',' << l.row.offset << '\n';
    }
  }
}

/// All certification rollouts in one file, keyed by trajectory id.
inline void emit_certification_trajectories(const CertificationReport& r, int n_x, int n_u,
                                            const std::filesystem::path& file) {
  std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot write " + file.string());
  write_trajectory_csv_header(out, n_x, n_u, true);
  for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
    write_trajectory_csv_rows(out, r.trajectories[i], static_cast<int>(i));
  }
}

}  // namespace scinv
