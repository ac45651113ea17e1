#pragma once

// Monte Carlo experiments: empirical size under the null designs and
// empirical power across break-size sweeps. Each (dgp, N, T, epsilon) cell
// draws `reps` panels, runs the break test once per panel, and evaluates
// every nominal level against the same statistic draws. Replication r of a
// cell is seeded by hash(master_seed, cell id, r), so results are
// bit-identical for any worker count and any execution order, and finished
// cells can be checkpointed to disk and reused.

#include <cstdint>
#include <string>
#include <vector>

#include "panelbreak/break_test.hpp"
#include "panelbreak/sim.hpp"

namespace panelbreak {

struct McConfig {
  DgpSpec dgp;  // template; per-replication seeds replace dgp.seed
  long reps = 1000;
  std::vector<double> levels = {0.10, 0.05, 0.01};
  std::vector<double> epsilons = {0.05, 0.10};
  std::vector<double> sweep;   // break sizes (delta or big_delta) for power runs
  std::vector<int> n_grid;     // empty: use dgp.n_len
  std::vector<int> t_grid;     // empty: use dgp.t_len
  KernelKind kernel = KernelKind::parzen;
  int workers = 1;
  std::uint64_t master_seed = 0;
  std::string checkpoint_dir;  // empty: no checkpointing
};

struct McResult {
  DgpKind kind = DgpKind::iid;
  int n_len = 0;
  int t_len = 0;
  double epsilon = 0.0;
  double level = 0.0;
  double sweep_value = 0.0;  // NaN for size runs
  double rejection_rate = 0.0;
  long reps = 0;
  double mc_stderr = 0.0;
};

// Canonical cell identity string (embeds the dgp parameters, epsilon, and
// kernel); its FNV-1a hash keys the replication seeds.
std::string cell_key(const DgpSpec& dgp, double epsilon, KernelKind kernel);
std::uint64_t fnv1a64(const std::string& text);

// Per-replication seed for a cell.
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t cell_id,
                               long rep);

// The raw sup statistics for one cell, one per replication, in replication
// order. Any replication failure aborts with the cell and replication in the
// message.
std::vector<double> mc_statistics(const DgpSpec& dgp, long reps, double epsilon,
                                  KernelKind kernel, std::uint64_t master_seed,
                                  int workers);

// Size table over (n_grid x t_grid x epsilons x levels); dgp.kind must be a
// null design (iid or ar1). Rows ordered by that nesting.
std::vector<McResult> run_size_table(const McConfig& cfg);

// Power curve over (sweep x n_grid x t_grid x epsilons x levels); dgp.kind
// must be mb or lb; the sweep value replaces delta (mb) or big_delta (lb).
std::vector<McResult> run_power_curve(const McConfig& cfg);

enum class TableFormat { csv, json, markdown };

// csv/json are lossless with fixed column order; markdown renders a
// size-shaped table as (N,T) rows by (epsilon, level) columns in percent,
// and a power-shaped one as sweep rows by cell columns.
std::string emit_table(const std::vector<McResult>& results, TableFormat format);

// Reads back exactly what emit_table(csv) wrote.
std::vector<McResult> parse_mc_csv(const std::string& text);

}  // namespace panelbreak
