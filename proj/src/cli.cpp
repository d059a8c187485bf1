#include "rwsm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rwsm/cheeger.hpp"
#include "rwsm/cones.hpp"
#include "rwsm/errors.hpp"
#include "rwsm/graph.hpp"
#include "rwsm/manifold.hpp"
#include "rwsm/sharp_minima.hpp"

namespace rwsm::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string graph;
  int n = 2;
  int k = 0;
  double beta = 1.0;
  double penalty_c = 0.0;
  int restarts = 20;
  int max_iters = 1000;
  int samples = 2000;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::string out;
  std::string format = "json";
};

/// Failure that maps to an exit code and a machine-readable reason.
struct CommandFailure {
  int code;
  std::string reason;
  std::string detail;
};

struct Result {
  json report;
  std::string csv;
  std::string csv_name;
  int code = kOk;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json parts_json(const SubPartition& parts) {
  json out = json::array();
  for (const auto& p : parts.parts) out.push_back(p);
  return out;
}

std::string parts_csv(const SubPartition& parts) {
  std::string csv = "vertex,part\n";
  std::vector<std::pair<int, int>> rows;
  for (std::size_t j = 0; j < parts.k(); ++j)
    for (int v : parts.parts[j]) rows.emplace_back(v, static_cast<int>(j) + 1);
  std::sort(rows.begin(), rows.end());
  for (const auto& [v, j] : rows) csv += std::to_string(v) + "," + std::to_string(j) + "\n";
  return csv;
}

json study_json(const PenaltyStudy& s) {
  json out;
  out["n"] = s.config.n;
  out["k"] = s.config.k;
  out["beta"] = s.config.beta;
  out["samples"] = s.wsm.samples_used;
  out["wsm_alpha"] = s.config.wsm_alpha;
  out["nc_alpha"] = s.config.nc_alpha;
  out["wsm_status"] = to_string(s.wsm.status);
  if (s.wsm.witness) {
    out["wsm_witness"] = {{"point", matrix_json(s.wsm.witness->point)},
                          {"value", s.wsm.witness->value},
                          {"lower", s.wsm.witness->bracket.lower},
                          {"upper", s.wsm.witness->bracket.upper}};
  }
  json dual = json::array();
  for (const auto& d : s.dual) {
    json row{{"point", matrix_json(d.point)},
             {"consistent", d.verdict.consistent},
             {"tested", d.verdict.tested}};
    if (d.verdict.witness) row["witness"] = matrix_json(*d.verdict.witness);
    if (d.verdict.refutation && d.verdict.refutation->witness) {
      const auto& w = *d.verdict.refutation->witness;
      row["refuting_sample"] = matrix_json(w.sample);
      row["quotient"] = w.quotient;
      row["scale"] = w.scale;
    }
    dual.push_back(std::move(row));
  }
  out["dual"] = std::move(dual);
  json primal{{"holds", s.primal.holds}};
  json rows = json::array();
  for (const auto& r : s.primal.rows)
    rows.push_back({{"direction", matrix_json(r.direction)},
                    {"derivative", r.derivative},
                    {"cone_distance", r.cone_distance}});
  primal["rows"] = std::move(rows);
  if (s.primal.witness) primal["witness"] = *s.primal.witness;
  out["primal"] = std::move(primal);
  return out;
}

json modulus_json(const PenaltyStudy& s) {
  json out{{"overall", s.modulus_estimate}};
  json bands = json::array();
  for (const auto& b : s.modulus_trace)
    bands.push_back({{"upper_limit", b.upper_limit}, {"samples", b.samples}, {"estimate", b.estimate}});
  out["bands"] = std::move(bands);
  return out;
}

// Reason for a failed study, or empty.
std::string study_reason(const PenaltyStudy& s) {
  if (!s.dual_consistent()) return "dual_nc_refuted";
  if (!s.primal.holds) return "primal_nc_violated";
  if (s.wsm.status == WsmStatus::kViolated) return "wsm_violated";
  return "";
}

LoadedGraph read_graph(const RunConfig& cfg, std::ostream& err) {
  if (cfg.graph.empty()) throw CommandFailure{kUsage, "usage", "--graph is required"};
  if (!std::filesystem::is_regular_file(cfg.graph))
    throw CommandFailure{kUsage, "graph_unreadable", "cannot open graph file '" + cfg.graph + "'"};
  LoadedGraph loaded = load_graph_file(cfg.graph);
  for (const auto& w : loaded.warnings) err << "warning: " << cfg.graph << ": " << w << "\n";
  if (cfg.k < 1) throw CommandFailure{kUsage, "usage", "--k must be at least 1"};
  if (cfg.k > loaded.graph.n())
    throw CommandFailure{kUsage, "usage", "--k exceeds the number of vertices"};
  return loaded;
}

json graph_json(const RunConfig& cfg, const Graph& g) {
  return json{{"path", cfg.graph}, {"n", g.n()}, {"m", g.edge_count()}};
}

Result cmd_exact(const RunConfig& cfg, std::ostream& err) {
  const LoadedGraph loaded = read_graph(cfg, err);
  const ExactCheegerResult r = exact_cheeger(loaded.graph, cfg.k, cfg.budget);
  Result res;
  res.report = json{{"command", "exact"},
                    {"graph", graph_json(cfg, loaded.graph)},
                    {"k", cfg.k},
                    {"oracle_value", r.value},
                    {"oracle_parts", parts_json(r.argmin)},
                    {"assignments_visited", r.assignments_visited}};
  res.csv = parts_csv(r.argmin);
  res.csv_name = "parts.csv";
  return res;
}

std::string trace_csv(const ClusterReport& rep) {
  std::string csv = "iter,objective,penalty,feasibility_residual\n";
  for (const auto& t : rep.trace)
    csv += std::to_string(t.iter) + "," + fmt(t.objective) + "," + fmt(t.penalty) + "," +
           fmt(t.feasibility_residual) + "\n";
  return csv;
}

Result relax_like(const RunConfig& cfg, std::ostream& err, bool full_report) {
  const LoadedGraph loaded = read_graph(cfg, err);
  const Graph& g = loaded.graph;
  if (!full_report && cfg.beta != 1.0)
    throw CommandFailure{kUsage, "usage", "the solver descends the beta = 1 penalty only"};
  if (cfg.restarts < 1) throw CommandFailure{kUsage, "usage", "--restarts must be at least 1"};
  SolverConfig sc;
  sc.penalty_c = cfg.penalty_c;
  sc.restarts = cfg.restarts;
  sc.max_iters = cfg.max_iters;
  sc.seed = cfg.seed;
  if (cfg.penalty_c > 0.0 && cfg.penalty_c < lipschitz_bound(g, cfg.k))
    err << "warning: --penalty-c is below the Lipschitz rate " << fmt(lipschitz_bound(g, cfg.k)) << "\n";
  const ClusterReport rep = solve_relaxation(g, cfg.k, sc);

  Result res;
  json& j = res.report;
  j["command"] = full_report ? "report" : "relax";
  j["graph"] = graph_json(cfg, g);
  j["k"] = cfg.k;
  j["beta"] = full_report ? cfg.beta : rep.beta;
  j["C"] = rep.penalty_c;
  j["c_hat"] = rep.c_hat;
  j["lipschitz"] = rep.lipschitz;
  j["seed"] = cfg.seed;
  j["restarts"] = cfg.restarts;
  j["best_restart"] = rep.best_restart;
  j["continuous_value"] = rep.best_continuous_value;
  j["penalized_value"] = rep.best_penalty_value;
  j["max_feasibility_residual"] = rep.max_feasibility_residual;
  j["rounded_parts"] = parts_json(rep.rounded);
  j["rounded_value"] = rep.rounded_value;
  res.csv = trace_csv(rep);
  res.csv_name = "trace.csv";

  if (full_report) {
    try {
      const ExactCheegerResult oracle = exact_cheeger(g, cfg.k, cfg.budget);
      j["oracle_value"] = oracle.value;
      j["gap"] = rep.rounded_value - oracle.value;
      if (rep.rounded_value < oracle.value - 1e-9)
        throw CommandFailure{kViolation, "rounded_below_oracle", "rounded value below the exact minimum"};
    } catch (const BudgetExceeded& e) {
      err << "warning: oracle skipped: " << e.what() << "\n";
      j["oracle_skipped"] = e.what();
    }
    if (g.n() <= 6 && cfg.k <= 3) {
      PenaltyStudyConfig pc;
      pc.n = g.n();
      pc.k = cfg.k;
      pc.beta = cfg.beta;
      pc.n_samples = cfg.samples;
      pc.seed = cfg.seed;
      const PenaltyStudy s = wsm_penalty_check(pc);
      j["modulus_estimates"] = modulus_json(s);
      j["nc_verdicts"] = study_json(s);
      // Informational here: beta >= 1 is expected to fail the conditions.
      const std::string finding = study_reason(s);
      j["study_finding"] = finding.empty() ? json(nullptr) : json(finding);
    } else {
      j["modulus_estimates"] = nullptr;
      j["nc_verdicts"] = nullptr;
    }
  }
  j["trace_csv_path"] = cfg.out.empty() ? json(nullptr) : json(res.csv_name);
  return res;
}

Result cmd_verify_lemma(const RunConfig& cfg) {
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  LemmaOptions opt;
  opt.seed = cfg.seed;
  const Point north(Manifold::sphere(3), Eigen::Vector3d(0, 0, 1));
  const LemmaReport sphere = verify_local_distance_lemma(north, geodesic_sphere_sampler(north, 24), radii, opt);
  const Point origin(Manifold::euclidean(2), Eigen::Vector2d(0, 0));
  const LemmaReport flat = verify_local_distance_lemma(origin, geodesic_sphere_sampler(origin, 24), radii, opt);
  const double flat_dev = *std::max_element(flat.worst_ratio_deviation.begin(), flat.worst_ratio_deviation.end());

  Result res;
  json& j = res.report;
  j["command"] = "verify-lemma";
  j["seed"] = cfg.seed;
  j["radii"] = radii;
  j["sphere"] = {{"worst_deviation", sphere.worst_ratio_deviation},
                 {"fitted_order", sphere.fitted_order},
                 {"fitted_coefficient", sphere.fitted_coefficient},
                 {"coefficient_bound", sphere.coefficient_bound},
                 {"within_bound", sphere.within_bound},
                 {"cubic_remainder", sphere.cubic_remainder}};
  j["euclidean"] = {{"worst_deviation", flat.worst_ratio_deviation}, {"max_deviation", flat_dev}};
  res.csv = "r,worst_deviation\n";
  for (std::size_t i = 0; i < radii.size(); ++i)
    res.csv += fmt(radii[i]) + "," + fmt(sphere.worst_ratio_deviation[i]) + "\n";
  res.csv_name = "lemma.csv";
  std::string reason;
  if (!(std::abs(sphere.fitted_order - 2.0) <= 0.3)) reason = "lemma_order_mismatch";
  else if (!sphere.within_bound) reason = "lemma_bound_exceeded";
  else if (!(flat_dev <= 1e-12)) reason = "flat_deviation_nonzero";
  if (!reason.empty()) {
    j["reason"] = reason;
    res.code = kViolation;
  }
  return res;
}

Result cmd_verify_cones(const RunConfig& cfg) {
  Result res;
  json& j = res.report;
  j["command"] = "verify-cones";
  j["seed"] = cfg.seed;
  res.csv = "fixture,check,value\n";
  res.csv_name = "cones.csv";
  std::string reason;
  RefuteSchedule schedule = RefuteSchedule::standard();
  schedule.seed = cfg.seed;

  json subdiff = json::array();
  for (const SetFixture& f : {half_plane_fixture(), stiefel_plus_arc_fixture(), full_space_fixture()}) {
    const DistSubdiffSummary s = check_dist_subdiff_identity(f, 50, schedule);
    subdiff.push_back({{"fixture", f.name},
                       {"inside_tested", s.inside_tested},
                       {"inside_refuted", s.inside_refuted},
                       {"outside_tested", s.outside_tested},
                       {"outside_refuted", s.outside_refuted},
                       {"passed", s.passed()}});
    res.csv += f.name + ",inside_refuted," + std::to_string(s.inside_refuted) + "\n";
    res.csv += f.name + ",outside_missed," + std::to_string(s.outside_tested - s.outside_refuted) + "\n";
    if (!s.passed() && reason.empty()) reason = "dist_subdiff_identity_refuted";
  }
  j["dist_subdiff"] = std::move(subdiff);

  json dirderiv = json::array();
  ContingentSchedule cs = ContingentSchedule::standard();
  cs.seed = cfg.seed;
  for (const SetFixture& f : {half_plane_fixture(), line_fixture(), full_space_fixture(),
                              stiefel_plus_arc_fixture(), parabola_fixture()}) {
    std::vector<Eigen::MatrixXd> dirs;
    for (const auto& b : tangent_basis(f.base)) {
      dirs.push_back(b);
      dirs.push_back(-b);
    }
    Rng rng = substream(cfg.seed, 0xD1);
    for (int i = 0; i < 8; ++i) dirs.push_back(random_unit_tangent(f.base, rng).vec());
    const DirDerivReport r = check_dirderiv_identity(f, dirs, cs);
    dirderiv.push_back({{"fixture", f.name}, {"directions", r.rows.size()}, {"max_residual", r.max_residual}});
    res.csv += f.name + ",dirderiv_max_residual," + fmt(r.max_residual) + "\n";
    if (!r.passed(5e-2) && reason.empty()) reason = "dirderiv_identity_residual";
  }
  j["dirderiv"] = std::move(dirderiv);

  json pattern = json::array();
  Rng prng = substream(cfg.seed, 0xCF);
  for (int i = 0; i < 10; ++i) {
    std::uniform_int_distribution<int> kd(1, 3);
    const int k = kd(prng);
    std::uniform_int_distribution<int> nd(k, 6);
    const int n = nd(prng);
    const Eigen::MatrixXd p = random_stiefel_plus(n, k, prng);
    RefuteSchedule s = schedule;
    s.seed = cfg.seed + i;
    const PatternCrossCheck c = cross_validate_pattern_cone(p, 8, s);
    pattern.push_back({{"n", n}, {"k", k}, {"point", matrix_json(p)}, {"disagreements", c.disagreements()}});
    res.csv += "pattern_" + std::to_string(i) + ",disagreements," + std::to_string(c.disagreements()) + "\n";
    if (c.disagreements() > 0 && reason.empty()) reason = "pattern_cone_disagreement";
  }
  j["pattern_cone"] = std::move(pattern);
  if (!reason.empty()) {
    j["reason"] = reason;
    res.code = kViolation;
  }
  return res;
}

Result cmd_verify_wsm(const RunConfig& cfg) {
  if (cfg.k < 1 || cfg.n < cfg.k) throw CommandFailure{kUsage, "usage", "need 1 <= --k <= --n"};
  if (cfg.n > 6 || cfg.k > 3) throw CommandFailure{kUsage, "usage", "verify-wsm supports n <= 6, k <= 3"};
  if (!(cfg.beta > 0.0)) throw CommandFailure{kUsage, "usage", "--beta must be positive"};
  PenaltyStudyConfig pc;
  pc.n = cfg.n;
  pc.k = cfg.k;
  pc.beta = cfg.beta;
  pc.n_samples = cfg.samples;
  pc.seed = cfg.seed;
  const PenaltyStudy s = wsm_penalty_check(pc);
  Result res;
  json& j = res.report;
  j["command"] = "verify-wsm";
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["beta"] = cfg.beta;
  j["seed"] = cfg.seed;
  j["modulus_estimates"] = modulus_json(s);
  j["nc_verdicts"] = study_json(s);
  res.csv = "upper_limit,samples,estimate\n";
  for (const auto& b : s.modulus_trace)
    res.csv += fmt(b.upper_limit) + "," + std::to_string(b.samples) + "," + fmt(b.estimate) + "\n";
  res.csv_name = "modulus.csv";
  const std::string reason = study_reason(s);
  if (!reason.empty()) {
    j["reason"] = reason;
    res.code = kViolation;
  }
  return res;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CommandFailure{kUsage, "output_unwritable", "cannot write '" + path.string() + "'"};
  f << text;
  if (!f) throw CommandFailure{kUsage, "output_unwritable", "cannot write '" + path.string() + "'"};
}

void emit(const RunConfig& cfg, const Result& res, std::ostream& out) {
  const std::string report = res.report.dump(2) + "\n";
  if (cfg.format == "csv" && !res.csv.empty()) {
    out << res.csv;
  } else {
    out << report;
  }
  if (cfg.out.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) throw CommandFailure{kUsage, "output_unwritable", "cannot create '" + cfg.out + "'"};
  write_file(std::filesystem::path(cfg.out) / "report.json", report);
  if (!res.csv.empty()) write_file(std::filesystem::path(cfg.out) / res.csv_name, res.csv);
}

void emit_failure(const RunConfig& cfg, const CommandFailure& f, std::ostream& err) {
  err << "error: " << f.detail << "\n";
  if (cfg.out.empty()) return;
  json report{{"command", cfg.command}, {"reason", f.reason}, {"detail", f.detail}, {"exit_code", f.code}};
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  std::ofstream file(std::filesystem::path(cfg.out) / "report.json", std::ios::binary);
  if (file) file << report.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Riemannian weak sharp minima checks and Cheeger-type graph partitioning"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "Directory for report.json and CSV output");
    sub->add_option("--format", cfg.format, "Standard output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
  };
  auto add_graph = [&](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph, "Edge-list file")->required();
    sub->add_option("--k", cfg.k, "Number of parts")->required();
    sub->add_option("--budget", cfg.budget, "Enumeration budget for the exact oracle")->capture_default_str();
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--beta", cfg.beta, "Penalty exponent")->capture_default_str();
    sub->add_option("--penalty-c", cfg.penalty_c, "Penalty weight (default 2 L c_hat)");
    sub->add_option("--restarts", cfg.restarts, "Solver restarts")->capture_default_str();
    sub->add_option("--max-iters", cfg.max_iters, "Iterations per restart")->capture_default_str();
  };

  CLI::App* exact = app.add_subcommand("exact", "Exact Cheeger-type constant by enumeration");
  add_graph(exact);
  add_common(exact);
  CLI::App* relax = app.add_subcommand("relax", "Penalized Stiefel relaxation and rounding");
  add_graph(relax);
  add_solver(relax);
  add_common(relax);
  CLI::App* lemma = app.add_subcommand("verify-lemma", "Local distance lemma on the unit 2-sphere");
  add_common(lemma);
  CLI::App* cones = app.add_subcommand("verify-cones", "Normal cone and subdifferential identities");
  add_common(cones);
  CLI::App* wsm = app.add_subcommand("verify-wsm", "Penalty exponent study on St(n,k)");
  wsm->add_option("--n", cfg.n, "Rows")->capture_default_str();
  wsm->add_option("--k", cfg.k, "Columns")->required();
  wsm->add_option("--beta", cfg.beta, "Penalty exponent")->required();
  wsm->add_option("--samples", cfg.samples, "Feasible samples")->capture_default_str();
  add_common(wsm);
  CLI::App* report = app.add_subcommand("report", "Relaxation, exact oracle and penalty study");
  add_graph(report);
  add_solver(report);
  report->add_option("--samples", cfg.samples, "Feasible samples for the penalty study")->capture_default_str();
  add_common(report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    Result res;
    if (cfg.command == "exact") res = cmd_exact(cfg, err);
    else if (cfg.command == "relax") res = relax_like(cfg, err, false);
    else if (cfg.command == "report") res = relax_like(cfg, err, true);
    else if (cfg.command == "verify-lemma") res = cmd_verify_lemma(cfg);
    else if (cfg.command == "verify-cones") res = cmd_verify_cones(cfg);
    else res = cmd_verify_wsm(cfg);
    res.report["exit_code"] = res.code;
    emit(cfg, res, out);
    if (res.code != kOk) err << "error: " << res.report.value("reason", "violation") << "\n";
    return res.code;
  } catch (const CommandFailure& f) {
    emit_failure(cfg, f, err);
    return f.code;
  } catch (const BudgetExceeded& e) {
    emit_failure(cfg, CommandFailure{kBudget, "budget_exceeded", e.what()}, err);
    return kBudget;
  } catch (const ParseError& e) {
    emit_failure(cfg, CommandFailure{kUsage, "graph_parse_error", e.what()}, err);
    return kUsage;
  } catch (const std::invalid_argument& e) {
    emit_failure(cfg, CommandFailure{kUsage, "invalid_argument", e.what()}, err);
    return kUsage;
  } catch (const std::exception& e) {
    emit_failure(cfg, CommandFailure{kUsage, "error", e.what()}, err);
    return kUsage;
  }
}

}  // namespace rwsm::cli
