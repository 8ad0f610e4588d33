#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "stabkit/errors.hpp"
#include "stabkit/runner.hpp"

namespace {

stabkit::Vector parse_x0(const std::string& text, int n) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("");
    } catch (...) {
      throw CLI::ValidationError("--x0", "invalid number '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (static_cast<int>(vals.size()) != n)
    throw CLI::ValidationError("--x0", "expected " + std::to_string(n) + " components");
  stabkit::Vector x0(n);
  for (int i = 0; i < n; ++i) x0[i] = vals[i];
  return x0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabkit: stabilizability analysis and feedback synthesis for xdot = f(x,u)"};
  app.require_subcommand(1);

  std::string config_path, out_path, report_path, x0_text;
  double t_final_flag = 0;
  bool t_final_given = false;

  auto add_common = [&](CLI::App* sub, bool with_out, bool with_report) {
    sub->add_option("config", config_path, "run configuration file")->required();
    if (with_out) sub->add_option("--out", out_path, "output CSV path");
    if (with_report) sub->add_option("--report", report_path, "report JSON path");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "linear tests and openness probe");
  add_common(analyze, false, true);

  CLI::App* section = app.add_subcommand("section", "tabulate a local section of f");
  add_common(section, true, true);

  CLI::App* synthesize = app.add_subcommand("synthesize", "solve f(x,u) = G(x) for a feedback");
  add_common(synthesize, true, true);

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the closed loop");
  add_common(simulate, true, false);
  simulate->add_option("--x0", x0_text, "initial state v1,v2,...")->required();
  simulate->add_option("--t-final", t_final_flag, "integration horizon override")
      ->each([&](const std::string&) { t_final_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return stabkit::kExitUsage;
  }

  stabkit::RunConfig cfg;
  try {
    cfg = stabkit::load_config(config_path);
  } catch (const stabkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return stabkit::kExitUsage;
  }

  try {
    if (analyze->parsed()) return stabkit::run_analyze(cfg, report_path);
    if (section->parsed()) return stabkit::run_section(cfg, out_path, report_path);
    if (synthesize->parsed()) return stabkit::run_synthesize(cfg, out_path, report_path);
    if (simulate->parsed()) {
      stabkit::Vector x0;
      try {
        x0 = parse_x0(x0_text, cfg.system.state_dim);
      } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return stabkit::kExitUsage;
      }
      std::optional<double> T;
      if (t_final_given) T = t_final_flag;
      return stabkit::run_simulate(cfg, x0, T, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stabkit::kExitNumeric;
  }
  return stabkit::kExitUsage;
}
