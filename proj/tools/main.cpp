// Command-line front end: single-panel tests, rolling-window runs on CSV
// data, Monte Carlo size/power experiments, and DGP sampling.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "panelbreak/break_test.hpp"
#include "panelbreak/format.hpp"
#include "panelbreak/mc.hpp"
#include "panelbreak/series_io.hpp"
#include "panelbreak/sim.hpp"

namespace pb = panelbreak;

namespace {

void write_output(const std::string& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pb::InvalidInput("cannot open output file '" + out_path + "'");
  out << doc;
}

// --dgp accepts a config file path or an inline "key=value,key=value" string
// (a bare kind name works too).
pb::DgpSpec load_dgp(const std::string& arg) {
  std::ifstream in(arg);
  if (in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return pb::dgp_from_config(ss.str());
  }
  return pb::dgp_from_config(arg);
}

std::vector<double> parse_double_list(const std::string& arg, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(arg);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = pb::trim(part);
    if (part.empty()) continue;
    double v = 0.0;
    if (!pb::parse_double(part, v)) {
      throw pb::InvalidInput(std::string(flag) + ": bad number '" + part + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& arg, const char* flag) {
  std::vector<int> out;
  for (double v : parse_double_list(arg, flag)) out.push_back(static_cast<int>(v));
  return out;
}

struct CommonTestFlags {
  std::string input;
  std::string out;
  std::string kernel = "parzen";
  double epsilon = 0.05;
  int k = 1;
  bool monthly = false;
  bool diff = false;
  std::uint64_t seed = 0;  // reserved; the test pipeline is deterministic
};

pb::SeriesTable load_table(const CommonTestFlags& flags, bool dates) {
  pb::CsvOptions opt;
  opt.date_column = dates ? 0 : -1;
  pb::SeriesTable table = pb::read_csv(flags.input, opt);
  if (flags.monthly) table = pb::monthly_last(table);
  auto [clean, dropped] = pb::drop_missing_rows(table);
  if (dropped > 0) {
    std::cerr << "warning: dropped " << dropped << " row(s) with missing values\n";
  }
  if (flags.diff) clean = pb::first_difference(clean);
  return clean;
}

int cmd_test(const CommonTestFlags& flags, bool dates, const std::string& format) {
  const pb::SeriesTable table = load_table(flags, dates || flags.monthly);
  pb::BreakTestConfig cfg;
  cfg.epsilon = flags.epsilon;
  cfg.kernel = pb::kernel_kind_from_string(flags.kernel);
  cfg.k = flags.k;
  const pb::BreakTestResult res = pb::run_test(pb::to_panel(table), cfg);

  if (format == "csv") {
    std::string doc = "eigen_index,statistic,p_value,bandwidth,break_index\n";
    for (std::size_t i = 0; i < res.components.size(); ++i) {
      doc += std::to_string(i + 1) + "," + pb::format_double(res.components[i].statistic) +
             "," + pb::format_double(res.components[i].p_value) + "," +
             pb::format_double(res.components[i].bandwidth) + "," +
             std::to_string(res.break_index) + "\n";
    }
    write_output(doc, flags.out);
  } else {
    nlohmann::json doc;
    doc["statistic"] = res.statistic;
    doc["p_value"] = res.p_value;
    doc["epsilon"] = res.epsilon;
    doc["kernel"] = to_string(cfg.kernel);
    doc["bandwidth"] = res.bandwidth;
    doc["break_index"] = res.break_index;
    doc["k"] = res.k_tracked;
    doc["t_len"] = table.n_rows;
    doc["n_len"] = table.n_cols;
    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t i = 0; i < res.components.size(); ++i) {
      comps.push_back({{"eigen_index", i + 1},
                       {"statistic", res.components[i].statistic},
                       {"p_value", res.components[i].p_value},
                       {"bandwidth", res.components[i].bandwidth}});
    }
    doc["components"] = comps;
    write_output(doc.dump(2) + "\n", flags.out);
  }
  return 0;
}

int cmd_roll(const CommonTestFlags& flags, int window, int workers,
             const std::string& format) {
  const pb::SeriesTable table = load_table(flags, /*dates=*/true);
  pb::BreakTestConfig cfg;
  cfg.epsilon = flags.epsilon;
  cfg.kernel = pb::kernel_kind_from_string(flags.kernel);
  cfg.k = flags.k;
  const std::vector<pb::RollingResult> results =
      pb::rolling_test(table, window, cfg, workers);
  write_output(pb::emit_results(results, format == "json" ? pb::ResultFormat::json
                                                          : pb::ResultFormat::csv),
               flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structural-break tests for panel data via the largest "
               "eigenvalue of partial-sample covariance matrices"};
  app.require_subcommand(1);

  // ---- test ----
  CommonTestFlags test_flags;
  bool test_dates = false;
  std::string test_format = "json";
  CLI::App* test = app.add_subcommand("test", "test one panel for a break");
  test->add_option("--input", test_flags.input, "input CSV")->required();
  test->add_option("--epsilon", test_flags.epsilon, "trimming parameter");
  test->add_option("--kernel", test_flags.kernel, "parzen|bartlett");
  test->add_option("--k", test_flags.k, "number of leading eigenvalues");
  test->add_flag("--monthly-last", test_flags.monthly,
                 "subsample to the last row of each month (first column: dates)");
  test->add_flag("--diff", test_flags.diff, "first-difference before testing");
  test->add_flag("--dates", test_dates, "first column holds dates");
  test->add_option("--out", test_flags.out, "output path (default stdout)");
  test->add_option("--format", test_format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  test->add_option("--seed", test_flags.seed,
                   "reserved (the test pipeline is deterministic)");

  // ---- roll ----
  CommonTestFlags roll_flags;
  int roll_window = 120;
  int roll_workers = 1;
  std::string roll_format = "csv";
  CLI::App* roll = app.add_subcommand("roll", "rolling-window tests over a dated CSV");
  roll->add_option("--input", roll_flags.input, "input CSV (first column: dates)")
      ->required();
  roll->add_option("--window", roll_window, "window length in rows");
  roll->add_option("--epsilon", roll_flags.epsilon, "trimming parameter");
  roll->add_option("--kernel", roll_flags.kernel, "parzen|bartlett");
  roll->add_option("--k", roll_flags.k, "number of leading eigenvalues");
  roll->add_flag("--monthly-last", roll_flags.monthly,
                 "subsample to the last row of each month");
  roll->add_flag("--diff", roll_flags.diff, "first-difference before windowing");
  roll->add_option("--workers", roll_workers, "worker threads");
  roll->add_option("--out", roll_flags.out, "output path (default stdout)");
  roll->add_option("--format", roll_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  roll->add_option("--seed", roll_flags.seed,
                   "reserved (the pipeline is deterministic)");

  // ---- mc ----
  std::string mc_dgp = "iid";
  long mc_reps = 1000;
  std::string mc_grid;
  std::string mc_eps;
  std::string mc_levels;
  std::string mc_kernel = "parzen";
  std::string mc_ngrid;
  std::string mc_tgrid;
  std::string mc_out;
  std::string mc_format = "csv";
  std::string mc_checkpoint;
  int mc_workers = 1;
  std::uint64_t mc_seed = 0;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo size/power experiments");
  mc->add_option("--dgp", mc_dgp, "dgp config: file path, inline key=value list, "
                                  "or kind (iid|ar1|mb|lb)");
  mc->add_option("--reps", mc_reps, "replications per cell");
  mc->add_option("--grid", mc_grid, "break-size sweep for mb/lb (comma list; "
                                    "default 0,0.5,...,4)");
  mc->add_option("--epsilon", mc_eps, "trimming parameters (comma list)");
  mc->add_option("--levels", mc_levels, "nominal levels (comma list)");
  mc->add_option("--kernel", mc_kernel, "parzen|bartlett");
  mc->add_option("--n-grid", mc_ngrid, "cross-section sizes (comma list)");
  mc->add_option("--t-grid", mc_tgrid, "sample lengths (comma list)");
  mc->add_option("--workers", mc_workers, "worker threads");
  mc->add_option("--seed", mc_seed, "master seed");
  mc->add_option("--checkpoint", mc_checkpoint, "directory for per-cell resume data");
  mc->add_option("--out", mc_out, "output path (default stdout)");
  mc->add_option("--format", mc_format, "csv|json|markdown")
      ->check(CLI::IsMember({"csv", "json", "markdown"}));

  // ---- sim ----
  std::string sim_dgp = "iid";
  std::uint64_t sim_seed = 0;
  bool sim_seed_given = false;
  std::string sim_out;
  std::string sim_format = "csv";
  CLI::App* sim = app.add_subcommand("sim", "emit one simulated panel");
  sim->add_option("--dgp", sim_dgp, "dgp config (see mc --dgp)");
  sim->add_option("--seed", sim_seed, "seed override")
      ->each([&](const std::string&) { sim_seed_given = true; });
  sim->add_option("--out", sim_out, "output path (default stdout)");
  sim->add_option("--format", sim_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 0 for --help/--version, 1 for usage errors
  }

  try {
    if (test->parsed()) return cmd_test(test_flags, test_dates, test_format);
    if (roll->parsed()) {
      return cmd_roll(roll_flags, roll_window, roll_workers, roll_format);
    }
    if (mc->parsed()) {
      pb::McConfig cfg;
      cfg.dgp = load_dgp(mc_dgp);
      cfg.reps = mc_reps;
      cfg.kernel = pb::kernel_kind_from_string(mc_kernel);
      cfg.workers = mc_workers;
      cfg.master_seed = mc_seed;
      cfg.checkpoint_dir = mc_checkpoint;
      if (!mc_ngrid.empty()) cfg.n_grid = parse_int_list(mc_ngrid, "--n-grid");
      if (!mc_tgrid.empty()) cfg.t_grid = parse_int_list(mc_tgrid, "--t-grid");

      const bool power = cfg.dgp.kind == pb::DgpKind::mb ||
                         cfg.dgp.kind == pb::DgpKind::lb;
      cfg.levels = mc_levels.empty()
                       ? (power ? std::vector<double>{0.05}
                                : std::vector<double>{0.10, 0.05, 0.01})
                       : parse_double_list(mc_levels, "--levels");
      cfg.epsilons = mc_eps.empty()
                         ? (power ? std::vector<double>{0.05}
                                  : std::vector<double>{0.05, 0.10})
                         : parse_double_list(mc_eps, "--epsilon");
      std::vector<pb::McResult> results;
      if (power) {
        cfg.sweep = mc_grid.empty()
                        ? std::vector<double>{0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4}
                        : parse_double_list(mc_grid, "--grid");
        results = pb::run_power_curve(cfg);
      } else {
        results = pb::run_size_table(cfg);
      }
      const pb::TableFormat fmt = mc_format == "json"
                                      ? pb::TableFormat::json
                                      : mc_format == "markdown"
                                            ? pb::TableFormat::markdown
                                            : pb::TableFormat::csv;
      write_output(pb::emit_table(results, fmt), mc_out);
      return 0;
    }
    if (sim->parsed()) {
      pb::DgpSpec spec = load_dgp(sim_dgp);
      if (sim_seed_given) spec.seed = sim_seed;
      const pb::PanelData panel = pb::generate(spec);
      if (sim_format == "csv") {
        std::string doc;
        for (int i = 0; i < panel.n_len(); ++i) {
          doc += (i == 0 ? "x" : ",x") + std::to_string(i + 1);
        }
        doc += "\n";
        for (int t = 0; t < panel.t_len(); ++t) {
          for (int i = 0; i < panel.n_len(); ++i) {
            if (i > 0) doc += ",";
            doc += pb::format_double(panel(t, i));
          }
          doc += "\n";
        }
        write_output(doc, sim_out);
      } else {
        nlohmann::json doc;
        doc["config"] = pb::to_config(spec);
        doc["t_len"] = panel.t_len();
        doc["n_len"] = panel.n_len();
        nlohmann::json rows = nlohmann::json::array();
        for (int t = 0; t < panel.t_len(); ++t) {
          nlohmann::json row = nlohmann::json::array();
          for (int i = 0; i < panel.n_len(); ++i) row.push_back(panel(t, i));
          rows.push_back(std::move(row));
        }
        doc["values"] = rows;
        write_output(doc.dump(2) + "\n", sim_out);
      }
      return 0;
    }
  } catch (const pb::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const pb::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const pb::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
