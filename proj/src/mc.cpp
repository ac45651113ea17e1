#include "panelbreak/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "panelbreak/counter_rng.hpp"
#include "panelbreak/format.hpp"
#include "panelbreak/parallel.hpp"

namespace panelbreak {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

std::string cell_key(const DgpSpec& dgp, double epsilon, KernelKind kernel) {
  std::string key;
  key += "kind=" + to_string(dgp.kind);
  key += ";n=" + std::to_string(dgp.n_len);
  key += ";t=" + std::to_string(dgp.t_len);
  key += ";ar=" + format_double(dgp.ar_coeff);
  key += ";theta=" + format_double(dgp.theta);
  key += ";delta=" + format_double(dgp.delta);
  key += ";bdelta=" + format_double(dgp.big_delta);
  key += ";uvar=" + std::string(dgp.unit_factor_variance ? "1" : "0");
  key += ";eps=" + format_double(epsilon);
  key += ";kernel=" + to_string(kernel);
  return key;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t cell_id,
                               long rep) {
  std::uint64_t h = mix64(master_seed + 0x9E3779B97F4A7C15ull);
  h = mix64(h ^ cell_id);
  return mix64(h + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(rep + 1));
}

std::vector<double> mc_statistics(const DgpSpec& dgp, long reps, double epsilon,
                                  KernelKind kernel, std::uint64_t master_seed,
                                  int workers) {
  if (reps < 1) {
    throw InvalidInput("mc_statistics: reps must be >= 1, got " + std::to_string(reps));
  }
  validate(dgp);
  const std::string key = cell_key(dgp, epsilon, kernel);
  const std::uint64_t cell = fnv1a64(key);
  BreakTestConfig cfg;
  cfg.epsilon = epsilon;
  cfg.kernel = kernel;
  cfg.k = 1;

  std::vector<double> stats(reps);
  parallel_for(workers, reps, [&](long r) {
    DgpSpec spec = dgp;
    spec.seed = replication_seed(master_seed, cell, r);
    try {
      stats[static_cast<std::size_t>(r)] = run_test(generate(spec), cfg).statistic;
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("mc cell [" + key + "] replication " +
                             std::to_string(r) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput("mc cell [" + key + "] replication " + std::to_string(r) +
                         ": " + e.what());
    }
  });
  return stats;
}

namespace {

std::string mc_result_fields(const McResult& r) {
  std::string line;
  line += to_string(r.kind);
  line += "," + std::to_string(r.n_len);
  line += "," + std::to_string(r.t_len);
  line += "," + format_double(r.epsilon);
  line += "," + format_double(r.level);
  line += ",";
  if (!std::isnan(r.sweep_value)) line += format_double(r.sweep_value);
  line += "," + format_double(r.rejection_rate);
  line += "," + std::to_string(r.reps);
  line += "," + format_double(r.mc_stderr);
  return line;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

McResult parse_result_fields(const std::vector<std::string>& f, std::size_t off,
                             long line) {
  McResult r;
  try {
    r.kind = dgp_kind_from_string(f[off]);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("mc table: ") + e.what(), line);
  }
  long long n = 0, t = 0, reps = 0;
  double eps = 0, level = 0, rate = 0, se = 0;
  if (!parse_long(f[off + 1], n) || !parse_long(f[off + 2], t) ||
      !parse_double(f[off + 3], eps) || !parse_double(f[off + 4], level) ||
      !parse_double(f[off + 6], rate) || !parse_long(f[off + 7], reps) ||
      !parse_double(f[off + 8], se)) {
    throw ParseError("mc table: malformed numeric field", line);
  }
  double sweep = kNan;
  if (!f[off + 5].empty() && !parse_double(f[off + 5], sweep)) {
    throw ParseError("mc table: malformed sweep field", line);
  }
  r.n_len = static_cast<int>(n);
  r.t_len = static_cast<int>(t);
  r.epsilon = eps;
  r.level = level;
  r.sweep_value = sweep;
  r.rejection_rate = rate;
  r.reps = reps;
  r.mc_stderr = se;
  return r;
}

constexpr const char* kTableHeader =
    "dgp,n,t,epsilon,level,sweep,rejection_rate,reps,mc_stderr";

// Finished (cell, level) rows persisted across runs. One CSV line per row:
// the full key (cell key + seed + reps + level), then the result columns.
// Malformed lines (e.g. a torn final write) are skipped on load.
class Checkpoint {
 public:
  explicit Checkpoint(const std::string& dir) {
    std::filesystem::create_directories(dir);
    path_ = dir + "/mc_cells.csv";
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::vector<std::string> f = split(line, ',');
      if (f.size() != 10) continue;
      try {
        rows_[f[0]] = parse_result_fields(f, 1, 0);
      } catch (const ParseError&) {
        continue;
      }
    }
  }

  bool get(const std::string& key, McResult& out) const {
    const auto it = rows_.find(key);
    if (it == rows_.end()) return false;
    out = it->second;
    return true;
  }

  void put(const std::string& key, const McResult& r) {
    rows_[key] = r;
    std::ofstream out(path_, std::ios::app);
    out << key << ',' << mc_result_fields(r) << '\n';
    out.flush();
  }

 private:
  std::string path_;
  std::map<std::string, McResult> rows_;
};

std::string level_key(const std::string& cell, std::uint64_t master_seed, long reps,
                      double level) {
  return cell + ";seed=" + std::to_string(master_seed) +
         ";reps=" + std::to_string(reps) + ";level=" + format_double(level);
}

void check_common(const McConfig& cfg) {
  if (cfg.reps < 1) {
    throw InvalidInput("mc: reps must be >= 1, got " + std::to_string(cfg.reps));
  }
  if (cfg.levels.empty()) throw InvalidInput("mc: levels must be non-empty");
  for (double a : cfg.levels) {
    if (!(a > 0.0 && a < 1.0)) {
      throw InvalidInput("mc: level must be in (0, 1), got " + format_double(a));
    }
  }
  if (cfg.epsilons.empty()) throw InvalidInput("mc: epsilons must be non-empty");
  for (double e : cfg.epsilons) {
    if (!(e >= 0.0 && e < 1.0)) {
      throw InvalidInput("mc: epsilon must be in [0, 1), got " + format_double(e));
    }
  }
}

// Runs one (dgp, epsilon) cell and appends one McResult per level; levels
// share the same statistic draws. Uses checkpointed rows when every level of
// the cell is already on disk.
void run_cell(const McConfig& cfg, const DgpSpec& dgp, double epsilon,
              double sweep_value, const std::vector<double>& quantiles,
              Checkpoint* ck, std::vector<McResult>& out) {
  const std::string cell = cell_key(dgp, epsilon, cfg.kernel);

  if (ck != nullptr) {
    std::vector<McResult> cached;
    cached.reserve(cfg.levels.size());
    bool all = true;
    for (double level : cfg.levels) {
      McResult r;
      if (ck->get(level_key(cell, cfg.master_seed, cfg.reps, level), r) &&
          r.reps == cfg.reps) {
        cached.push_back(r);
      } else {
        all = false;
        break;
      }
    }
    if (all) {
      for (McResult& r : cached) out.push_back(r);
      return;
    }
  }

  const std::vector<double> stats = mc_statistics(dgp, cfg.reps, epsilon,
                                                  cfg.kernel, cfg.master_seed,
                                                  cfg.workers);
  for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
    long hits = 0;
    for (double s : stats) {
      if (s > quantiles[li]) ++hits;
    }
    McResult r;
    r.kind = dgp.kind;
    r.n_len = dgp.n_len;
    r.t_len = dgp.t_len;
    r.epsilon = epsilon;
    r.level = cfg.levels[li];
    r.sweep_value = sweep_value;
    r.rejection_rate = static_cast<double>(hits) / static_cast<double>(cfg.reps);
    r.reps = cfg.reps;
    r.mc_stderr = std::sqrt(r.rejection_rate * (1.0 - r.rejection_rate) /
                            static_cast<double>(cfg.reps));
    if (ck != nullptr) {
      ck->put(level_key(cell, cfg.master_seed, cfg.reps, cfg.levels[li]), r);
    }
    out.push_back(r);
  }
}

std::vector<McResult> run_grid(const McConfig& cfg, bool power) {
  check_common(cfg);
  const std::vector<int> n_grid =
      cfg.n_grid.empty() ? std::vector<int>{cfg.dgp.n_len} : cfg.n_grid;
  const std::vector<int> t_grid =
      cfg.t_grid.empty() ? std::vector<int>{cfg.dgp.t_len} : cfg.t_grid;
  std::vector<double> sweep;
  if (power) {
    if (cfg.sweep.empty()) {
      throw InvalidInput("mc: power runs need a non-empty sweep grid");
    }
    sweep = cfg.sweep;
  } else {
    sweep = {kNan};
  }

  std::vector<double> quantiles;
  quantiles.reserve(cfg.levels.size());
  for (double level : cfg.levels) quantiles.push_back(kolmogorov_quantile(level));

  std::unique_ptr<Checkpoint> ck;
  if (!cfg.checkpoint_dir.empty()) ck = std::make_unique<Checkpoint>(cfg.checkpoint_dir);

  std::vector<McResult> out;
  for (double v : sweep) {
    for (int n : n_grid) {
      for (int t : t_grid) {
        DgpSpec dgp = cfg.dgp;
        dgp.n_len = n;
        dgp.t_len = t;
        if (power) {
          if (dgp.kind == DgpKind::mb) {
            dgp.delta = v;
          } else {
            dgp.big_delta = v;
          }
        }
        for (double eps : cfg.epsilons) {
          run_cell(cfg, dgp, eps, v, quantiles, ck.get(), out);
        }
      }
    }
  }
  return out;
}

std::string percent1(double rate) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f", rate * 100.0);
  return buf;
}

bool size_shaped(const std::vector<McResult>& results) {
  for (const McResult& r : results) {
    if (!std::isnan(r.sweep_value)) return false;
  }
  return true;
}

std::string markdown_size_table(const std::vector<McResult>& results) {
  // Report layout: (N, T) rows with N printed once per block, one column
  // per (epsilon, level) pair, entries in percent.
  std::vector<std::pair<int, int>> cells;
  std::vector<std::pair<double, double>> cols;
  for (const McResult& r : results) {
    const std::pair<int, int> nt{r.n_len, r.t_len};
    if (std::find(cells.begin(), cells.end(), nt) == cells.end()) cells.push_back(nt);
    const std::pair<double, double> el{r.epsilon, r.level};
    if (std::find(cols.begin(), cols.end(), el) == cols.end()) cols.push_back(el);
  }

  std::string doc = "| N | T |";
  for (const auto& [eps, level] : cols) {
    doc += " eps=" + format_double(eps) + " " + percent1(level) + "% |";
  }
  doc += "\n|---|---|";
  for (std::size_t c = 0; c < cols.size(); ++c) doc += "---|";
  doc += "\n";

  int last_n = -1;
  for (const auto& [n, t] : cells) {
    doc += "| ";
    if (n != last_n) doc += std::to_string(n);
    last_n = n;
    doc += " | " + std::to_string(t) + " |";
    for (const auto& [eps, level] : cols) {
      std::string entry;
      for (const McResult& r : results) {
        if (r.n_len == n && r.t_len == t && r.epsilon == eps && r.level == level) {
          entry = percent1(r.rejection_rate);
          break;
        }
      }
      doc += " " + entry + " |";
    }
    doc += "\n";
  }
  return doc;
}

std::string markdown_power_table(const std::vector<McResult>& results) {
  std::vector<double> sweeps;
  std::vector<std::tuple<int, int, double, double>> cols;
  for (const McResult& r : results) {
    if (std::find(sweeps.begin(), sweeps.end(), r.sweep_value) == sweeps.end()) {
      sweeps.push_back(r.sweep_value);
    }
    const std::tuple<int, int, double, double> c{r.n_len, r.t_len, r.epsilon, r.level};
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  }

  std::string doc = "| break size |";
  for (const auto& [n, t, eps, level] : cols) {
    doc += " N=" + std::to_string(n) + " T=" + std::to_string(t) +
           " eps=" + format_double(eps) + " " + percent1(level) + "% |";
  }
  doc += "\n|---|";
  for (std::size_t c = 0; c < cols.size(); ++c) doc += "---|";
  doc += "\n";

  for (double v : sweeps) {
    doc += "| " + format_double(v) + " |";
    for (const auto& [n, t, eps, level] : cols) {
      std::string entry;
      for (const McResult& r : results) {
        if (r.sweep_value == v && r.n_len == n && r.t_len == t &&
            r.epsilon == eps && r.level == level) {
          entry = percent1(r.rejection_rate);
          break;
        }
      }
      doc += " " + entry + " |";
    }
    doc += "\n";
  }
  return doc;
}

}  // namespace

std::vector<McResult> run_size_table(const McConfig& cfg) {
  if (cfg.dgp.kind != DgpKind::iid && cfg.dgp.kind != DgpKind::ar1) {
    throw InvalidInput("run_size_table: dgp kind must be iid or ar1");
  }
  return run_grid(cfg, /*power=*/false);
}

std::vector<McResult> run_power_curve(const McConfig& cfg) {
  if (cfg.dgp.kind != DgpKind::mb && cfg.dgp.kind != DgpKind::lb) {
    throw InvalidInput("run_power_curve: dgp kind must be mb or lb");
  }
  return run_grid(cfg, /*power=*/true);
}

std::string emit_table(const std::vector<McResult>& results, TableFormat format) {
  if (format == TableFormat::csv) {
    std::string doc = std::string(kTableHeader) + "\n";
    for (const McResult& r : results) doc += mc_result_fields(r) + "\n";
    return doc;
  }
  if (format == TableFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const McResult& r : results) {
      nlohmann::json row;
      row["dgp"] = to_string(r.kind);
      row["n"] = r.n_len;
      row["t"] = r.t_len;
      row["epsilon"] = r.epsilon;
      row["level"] = r.level;
      if (std::isnan(r.sweep_value)) {
        row["sweep"] = nullptr;
      } else {
        row["sweep"] = r.sweep_value;
      }
      row["rejection_rate"] = r.rejection_rate;
      row["reps"] = r.reps;
      row["mc_stderr"] = r.mc_stderr;
      arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
  }
  if (results.empty()) return "(empty table)\n";
  return size_shaped(results) ? markdown_size_table(results)
                              : markdown_power_table(results);
}

std::vector<McResult> parse_mc_csv(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("mc table: empty document", 0);
  for (std::string& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  if (lines[0] != kTableHeader) {
    throw ParseError("mc table: unexpected header '" + lines[0] + "'", 1);
  }
  std::vector<McResult> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 9) {
      throw ParseError("mc table: expected 9 fields, got " +
                       std::to_string(f.size()), static_cast<long>(i + 1));
    }
    out.push_back(parse_result_fields(f, 0, static_cast<long>(i + 1)));
  }
  return out;
}

}  // namespace panelbreak
