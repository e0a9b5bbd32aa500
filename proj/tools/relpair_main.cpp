#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "relpair/bell.hpp"
#include "relpair/config.hpp"
#include "relpair/diagram.hpp"
#include "relpair/report.hpp"
#include "relpair/scenario.hpp"

// Front end for the collapse-ordering toolkit. Every command is a pure
// function of the config file plus flags: same inputs, same bytes out,
// including the SVG. Exit codes: 0 ok, 2 config problem, 3 numerical or
// internal failure.

namespace {

using namespace relpair;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file (defaults apply if omitted)");
  cmd->add_option("--seed", flags.seed, "override the config seed");
}

Config resolve_config(const CommonFlags& flags) {
  Config cfg = flags.config_path.empty() ? Config{} : load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.policy) {
    collapse_policy_from_string(*flags.policy);
    cfg.policy = *flags.policy;
  }
  return cfg;
}

void print_report(const ordered_json& report) { std::cout << report.dump(2) << "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigError("failed while writing: " + path);
}

/// Collapse, per-frame consistency, past reach, and the optional second
/// detector: the full story for one seeded run.
int cmd_simulate(const CommonFlags& flags) {
  const Config cfg = resolve_config(flags);
  const Scenario sc = cfg.scenario();
  const LocatedEvents located = locate_events(sc);

  Rng rng(cfg.seed);
  const CollapseRecord rec = run_collapse(sc, located, rng);
  const ConsistencyReport consistency =
      frame_consistency(rec, sc, collapse_policy_from_string(cfg.policy));
  const auto reach = past_reach_report(rec, sc);

  ordered_json report = report_header("simulate", cfg);
  if (sc.wavepacket) report["derived"]["ct_d_triggered"] = located.ct_d;
  report["collapse"] = collapse_json(rec);
  report["consistency"] = consistency_json(consistency);
  report["past_reach"] = past_reach_json(reach);
  if (sc.detector_sprime)
    report["second_detector"] = second_detector_json(second_detector_check(rec, sc, rng));
  print_report(report);
  return 0;
}

int cmd_chsh(const CommonFlags& flags, const std::string& records_path, bool lhv) {
  const Config cfg = resolve_config(flags);
  const auto records = run_trials(cfg.trials, cfg.seed, cfg.seed ^ 0xD1B54A32D192ED03ull);
  const ChshEstimate estimate = merge_and_estimate(records);

  if (!records_path.empty()) {
    std::ostringstream csv;
    write_trial_records_csv(records, csv);
    write_text_file(records_path, csv.str());
  }

  ordered_json report = report_header("chsh", cfg);
  report["estimate"] = estimate_json(estimate);
  if (lhv) report["lhv_max"] = lhv_max_chsh();
  print_report(report);
  return 0;
}

int cmd_consistency(const CommonFlags& flags) {
  const Config cfg = resolve_config(flags);
  const Scenario sc = cfg.scenario();
  const LocatedEvents located = locate_events(sc);

  Rng rng(cfg.seed);
  const CollapseRecord rec = run_collapse(sc, located, rng);
  const ConsistencyReport consistency =
      frame_consistency(rec, sc, collapse_policy_from_string(cfg.policy));

  ordered_json report = report_header("consistency", cfg);
  report["collapse"] = collapse_json(rec);
  report["consistency"] = consistency_json(consistency);
  if (sc.detector_sprime)
    report["second_detector"] = second_detector_json(second_detector_check(rec, sc, rng));
  print_report(report);
  return 0;
}

int cmd_diagram(const CommonFlags& flags, const std::string& out_dir) {
  const Config cfg = resolve_config(flags);
  // Overlay frames come straight from the config; the rest frame is the
  // plain axes, not an overlay.
  const Scenario sc = cfg.scenario(false);
  const LocatedEvents located = locate_events(sc);
  const std::string svg = render_diagram(sc, located, cfg.diagram, cfg.diagram_events());

  std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir.string());
  const std::filesystem::path path = dir / cfg.diagram.file;
  write_text_file(path.string(), svg);

  ordered_json report = report_header("diagram", cfg);
  report["svg_path"] = path.string();
  report["width"] = cfg.diagram.width;
  report["height"] = cfg.diagram.height;
  report["events"] = cfg.diagram_events();
  print_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon collapse ordering: simulation, CHSH statistics, spacetime diagrams"};
  app.require_subcommand(1);

  CommonFlags sim_flags, chsh_flags, cons_flags, diag_flags;
  std::string records_path, out_dir;
  bool lhv = false;

  CLI::App* sim = app.add_subcommand("simulate", "run one seeded collapse and analyze it");
  add_common(sim, sim_flags);
  sim->add_option("--policy", sim_flags.policy,
                  "relativistic-consistent or rest-frame-line-only");

  CLI::App* chsh = app.add_subcommand("chsh", "Monte Carlo CHSH estimate on the singlet");
  add_common(chsh, chsh_flags);
  chsh->add_option("--records", records_path, "write per-trial records CSV here");
  chsh->add_flag("--lhv", lhv, "include the enumerated classical bound");

  CLI::App* cons = app.add_subcommand("consistency", "per-frame labeling check for one run");
  add_common(cons, cons_flags);
  cons->add_option("--policy", cons_flags.policy,
                   "relativistic-consistent or rest-frame-line-only");

  CLI::App* diag = app.add_subcommand("diagram", "render the spacetime diagram as SVG");
  add_common(diag, diag_flags);
  diag->add_option("--out", out_dir, "output directory (default: current)");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_flags);
    if (chsh->parsed()) return cmd_chsh(chsh_flags, records_path, lhv);
    if (cons->parsed()) return cmd_consistency(cons_flags);
    if (diag->parsed()) return cmd_diagram(diag_flags, out_dir);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
