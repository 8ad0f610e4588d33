#include "stabkit/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>

#include <json.hpp>

#include "stabkit/errors.hpp"
#include "stabkit/io.hpp"
#include "stabkit/linear_analysis.hpp"
#include "stabkit/openness.hpp"
#include "stabkit/verify.hpp"

namespace stabkit {

namespace {

using nlohmann::json;

json to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const std::vector<std::complex<double>>& spec) {
  json out = json::array();
  for (const auto& l : spec) out.push_back(json::array({l.real(), l.imag()}));
  return out;
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json meta(const RunConfig& cfg, const char* command) {
  return json{{"timestamp", timestamp_utc()},
              {"tool", "stabkit"},
              {"command", command},
              {"system", cfg.system.name}};
}

void write_report(const json& j, const std::string& path) {
  write_file(path.empty() ? "report.json" : path, j.dump(2) + "\n");
}

json section_json(const VectorFieldSpec& sys, const SectionTable& table) {
  json unsolved_nodes = json::array();
  for (int lex : table.unsolved) unsolved_nodes.push_back(to_json(table.grid.point(lex)));
  return json{{"complete", table.complete()},
              {"grid", table.grid.per_axis()},
              {"radius", table.grid.radius()},
              {"tol", table.tol},
              {"max_residual", check_section(sys, table)},
              {"lipschitz", table.lipschitz},
              {"unsolved_count", static_cast<int>(table.unsolved.size())},
              {"unsolved_nodes", unsolved_nodes}};
}

int numeric_failure(const std::exception& e) {
  std::cerr << "numeric failure: " << e.what() << "\n";
  return kExitNumeric;
}

}  // namespace

int run_analyze(const RunConfig& cfg, const std::string& report_path) {
  try {
    Linearization lin = linearize(cfg.system);
    auto sp = spectrum_plus(lin.A);
    HautusVerdict hv = hautus_test(lin.A, lin.B);
    RankVerdict rv = full_row_rank_test(cfg.system);
    OpennessReport ob = openness_probe(cfg.system, cfg.radius, 4 * cfg.system.state_dim,
                                       cfg.seed, cfg.solver_options());

    json checks = json::array();
    for (const auto& c : hv.checks)
      checks.push_back(json{{"eigenvalue", json::array({c.eigenvalue.real(), c.eigenvalue.imag()})},
                            {"rank", c.rank},
                            {"required", c.required}});

    json worst = json::array();
    for (std::size_t i = 0; i < ob.directions.size(); ++i)
      worst.push_back(json{{"direction", to_json(ob.directions[i])},
                           {"best", ob.best_residual[i]},
                           {"worst", ob.worst_residual[i]}});
    json scales = json::array();
    for (auto [r, rho] : ob.scales) scales.push_back(json::array({r, rho}));
    json violating = json::array();
    for (int i : ob.violating) violating.push_back(to_json(ob.directions[i]));

    json brockett{{"verdict", ob.violation ? "violation" : "no-violation-found"},
                  {"scales", scales},
                  {"attempts_per_target", ob.attempts_per_target},
                  {"unresolved", ob.unresolved},
                  {"residual_per_direction", worst},
                  {"violating_directions", violating},
                  {"note", ob.note}};
    if (ob.witness) brockett["witness"] = to_json(*ob.witness);

    json report{{"linearization", json{{"A", to_json(lin.A)}, {"B", to_json(lin.B)}}},
                {"spectrum_plus", to_json(sp)},
                {"hautus", json{{"stabilizable", hv.stabilizable}, {"checks", checks}}},
                {"rank",
                 json{{"rank", rv.rank},
                      {"full_row_rank", rv.full_row_rank},
                      {"singular_values", rv.singular_values}}},
                {"brockett", brockett},
                {"meta", meta(cfg, "analyze")}};
    write_report(report, report_path);

    std::cout << "analyze " << cfg.system.name << ": hautus="
              << (hv.stabilizable ? "stabilizable" : "not-stabilizable") << " rank=" << rv.rank
              << "/" << cfg.system.state_dim << " openness="
              << (ob.violation ? "violation" : "no-violation-found") << "\n";
    return kExitOk;
  } catch (const NumericFailure& e) {
    return numeric_failure(e);
  } catch (const NumericDomainError& e) {
    return numeric_failure(e);
  }
}

int run_section(const RunConfig& cfg, const std::string& csv_path,
                const std::string& report_path) {
  try {
    SectionTable table =
        build_section(cfg.system, cfg.radius, cfg.grid, cfg.tol, cfg.solver_options());
    write_file(csv_path.empty() ? "section.csv" : csv_path, to_csv(table));
    json report{{"section", section_json(cfg.system, table)}, {"meta", meta(cfg, "section")}};
    write_report(report, report_path);
    std::cout << "section " << cfg.system.name << ": "
              << (table.complete() ? "complete" : "incomplete") << " nodes=" << table.grid.size()
              << " unsolved=" << table.unsolved.size() << "\n";
    return table.complete() ? kExitOk : kExitObstruction;
  } catch (const NumericFailure& e) {
    return numeric_failure(e);
  } catch (const NumericDomainError& e) {
    return numeric_failure(e);
  }
}

int run_synthesize(const RunConfig& cfg, const std::string& csv_path,
                   const std::string& report_path) {
  if (cfg.system.control_dim < 1) {
    std::cerr << "synthesize requires a system with m >= 1\n";
    return kExitUsage;
  }
  try {
    FeedbackTable table = synthesize_feedback(cfg.system, cfg.target, cfg.radius, cfg.grid,
                                              cfg.tol, cfg.solver_options());
    write_file(csv_path.empty() ? "feedback.csv" : csv_path, to_csv(table));

    double max_res = 0;
    for (int lex = 0; lex < table.grid.size(); ++lex)
      if (table.solved[lex]) max_res = std::max(max_res, table.residuals[lex]);

    json synthesis{{"complete", table.complete()},
                   {"grid", table.grid.per_axis()},
                   {"radius", table.grid.radius()},
                   {"tol", table.tol},
                   {"max_residual", max_res},
                   {"unsolved_count", static_cast<int>(table.unsolved.size())}};

    // exponential-rate condition on the target: alpha1 Jacobian is the
    // inverse of the target Jacobian at 0
    Matrix JG = cfg.target.jacobian(Vector::Zero(cfg.system.state_dim));
    bool target_expo = false;
    bool target_singular = false;
    try {
      if (std::abs(JG.determinant()) < 1e-12) throw SingularAtOrigin("target Jacobian singular");
      target_expo = check_exponential_condition(JG.inverse());
    } catch (const SingularAtOrigin&) {
      target_singular = true;
    }
    synthesis["target_exponential_condition"] = target_expo;
    synthesis["target_jacobian_singular"] = target_singular;

    json report{{"synthesis", synthesis}, {"meta", meta(cfg, "synthesize")}};

    StabilityClass cls = StabilityClass::Inconclusive;
    if (table.complete()) {
      auto spec = closed_loop_spectrum(cfg.system, table, cfg.fd_step);
      report["synthesis"]["closed_loop_spectrum"] = to_json(spec);

      ClassifyOptions copt;
      copt.sim.rel_tol = cfg.rel_tol;
      copt.sim.abs_tol = cfg.abs_tol;
      StabilityReport sr = classify_stability(closed_loop_map(cfg.system, table), cfg.radius,
                                              cfg.num_initial, cfg.t_final, cfg.seed, copt);
      cls = sr.classification;
      json evidence = json::array();
      for (const auto& ev : sr.evidence)
        evidence.push_back(json{{"x0", to_json(ev.x0)},
                                {"completed", ev.completed},
                                {"final_ratio", ev.final_ratio},
                                {"max_ratio", ev.max_ratio},
                                {"slope", ev.slope},
                                {"r_squared", ev.r_squared}});
      report["stability"] = json{{"classification", std::string(to_string(cls))},
                                 {"rate", sr.rate},
                                 {"r_squared", sr.r_squared},
                                 {"evidence", evidence},
                                 {"lipschitz_estimate", sr.lipschitz_estimate},
                                 {"lipschitz_flag", sr.lipschitz_flag}};
    }
    write_report(report, report_path);

    bool ok = table.complete() &&
              (cls == StabilityClass::Exponential || cls == StabilityClass::AsymptoticOnly);
    std::cout << "synthesize " << cfg.system.name << ": "
              << (table.complete() ? "complete" : "obstruction")
              << " classification=" << to_string(cls) << "\n";
    return ok ? kExitOk : kExitObstruction;
  } catch (const NumericFailure& e) {
    return numeric_failure(e);
  } catch (const NumericDomainError& e) {
    return numeric_failure(e);
  } catch (const SingularAtOrigin& e) {
    return numeric_failure(e);
  } catch (const StepSizeUnderflow& e) {
    return numeric_failure(e);
  }
}

int run_simulate(const RunConfig& cfg, const Vector& x0, std::optional<double> t_final,
                 const std::string& csv_path) {
  double T = t_final.value_or(cfg.t_final);
  try {
    VectorMap loop{0, 0, nullptr};
    if (cfg.system.control_dim == 0) {
      loop = map_of(cfg.system);
    } else {
      FeedbackTable table = synthesize_feedback(cfg.system, cfg.target, cfg.radius, cfg.grid,
                                                cfg.tol, cfg.solver_options());
      if (!table.complete()) {
        std::cerr << "simulate: feedback synthesis failed on " << table.unsolved.size()
                  << " nodes\n";
        return kExitObstruction;
      }
      loop = closed_loop_map(cfg.system, table);
    }
    SimulateOptions sopt;
    sopt.rel_tol = cfg.rel_tol;
    sopt.abs_tol = cfg.abs_tol;
    Trajectory traj = simulate(loop, x0, T, sopt);
    write_file(csv_path.empty() ? "trajectory.csv" : csv_path, to_csv(traj));
    if (traj.truncated) {
      std::cerr << "simulate: state became non-finite, trajectory truncated\n";
      return kExitNumeric;
    }
    std::cout << "simulate " << cfg.system.name << ": t_final=" << T
              << " final_norm=" << traj.states.back().norm() << "\n";
    return kExitOk;
  } catch (const StepSizeUnderflow& e) {
    return numeric_failure(e);
  } catch (const NumericFailure& e) {
    return numeric_failure(e);
  } catch (const NumericDomainError& e) {
    return numeric_failure(e);
  }
}

}  // namespace stabkit
