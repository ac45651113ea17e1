#include "panelbreak/sim.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "panelbreak/counter_rng.hpp"
#include "panelbreak/format.hpp"

namespace panelbreak {

std::string to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::iid: return "iid";
    case DgpKind::ar1: return "ar1";
    case DgpKind::mb: return "mb";
    case DgpKind::lb: return "lb";
  }
  return "iid";
}

DgpKind dgp_kind_from_string(const std::string& name) {
  if (name == "iid") return DgpKind::iid;
  if (name == "ar1") return DgpKind::ar1;
  if (name == "mb") return DgpKind::mb;
  if (name == "lb") return DgpKind::lb;
  throw InvalidInput("unknown dgp kind '" + name + "' (expected iid, ar1, mb, lb)");
}

void validate(const DgpSpec& spec) {
  if (spec.t_len < 2) {
    throw InvalidInput("DgpSpec: t_len must be >= 2, got " + std::to_string(spec.t_len));
  }
  if (spec.n_len < 1) {
    throw InvalidInput("DgpSpec: n_len must be >= 1, got " + std::to_string(spec.n_len));
  }
  if (!(std::abs(spec.ar_coeff) < 1.0)) {
    throw InvalidInput("DgpSpec: |ar_coeff| must be < 1, got " +
                       format_double(spec.ar_coeff));
  }
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) {
    throw InvalidInput("DgpSpec: delta must be >= 0, got " + format_double(spec.delta));
  }
  if (!(spec.big_delta >= 0.0) || !std::isfinite(spec.big_delta)) {
    throw InvalidInput("DgpSpec: big_delta must be >= 0, got " +
                       format_double(spec.big_delta));
  }
  if (!(spec.theta > 0.0 && spec.theta < 1.0)) {
    throw InvalidInput("DgpSpec: theta must be in (0, 1), got " +
                       format_double(spec.theta));
  }
}

namespace {

// Disjoint stream ids. Idiosyncratic unit i draws from kStreamIdioBase + i,
// so panels are nested in N: adding units never perturbs existing ones.
constexpr std::uint64_t kStreamEta = 1;
constexpr std::uint64_t kStreamScale = 2;
constexpr std::uint64_t kStreamLoading = 3;
constexpr std::uint64_t kStreamMeanShift = 4;
constexpr std::uint64_t kStreamLoadShift = 5;
constexpr std::uint64_t kStreamIdioBase = 0x100;

void fill_stream(const CounterRng& rng, std::uint64_t stream, int t_len, bool ar,
                 double rho, bool unit_var, std::vector<double>& out) {
  out.resize(t_len);
  if (!ar) {
    for (int t = 0; t < t_len; ++t) out[t] = rng.normal(stream, t);
    return;
  }
  const double denom = 1.0 - rho * rho;
  const double scale = unit_var ? std::sqrt(denom) : 1.0;
  // Initial state from the exact stationary law N(0, 1/(1 - rho^2)).
  double state = rng.normal(stream, 0) / std::sqrt(denom);
  out[0] = scale * state;
  for (int t = 1; t < t_len; ++t) {
    state = rho * state + rng.normal(stream, t);
    out[t] = scale * state;
  }
}

}  // namespace

std::vector<double> common_factor(const DgpSpec& spec) {
  validate(spec);
  CounterRng rng(spec.seed);
  std::vector<double> eta;
  fill_stream(rng, kStreamEta, spec.t_len, spec.kind != DgpKind::iid,
              spec.ar_coeff, spec.unit_factor_variance, eta);
  return eta;
}

PanelData generate(const DgpSpec& spec) {
  validate(spec);
  const int t_len = spec.t_len;
  const int n = spec.n_len;
  const CounterRng rng(spec.seed);
  const bool ar = spec.kind != DgpKind::iid;
  const bool mb = spec.kind == DgpKind::mb;
  const bool lb = spec.kind == DgpKind::lb;

  std::vector<double> eta;
  fill_stream(rng, kStreamEta, t_len, ar, spec.ar_coeff,
              spec.unit_factor_variance, eta);

  // Post-break regime starts at 1-based row t* = floor(T * theta).
  const int t_star = static_cast<int>(std::floor(spec.theta * t_len));

  std::vector<double> values(static_cast<std::size_t>(t_len) * n);
  std::vector<double> idio(t_len);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t ui = static_cast<std::uint64_t>(i);
    const double s_i = rng.uniform(kStreamScale, ui, 0.8, 1.2);
    const double gamma_i = rng.normal(kStreamLoading, ui);
    const double delta_i =
        mb ? rng.uniform(kStreamMeanShift, ui, -spec.delta, spec.delta) : 0.0;
    const double psi_i = lb ? spec.big_delta * rng.normal(kStreamLoadShift, ui) : 0.0;
    fill_stream(rng, kStreamIdioBase + ui, t_len, ar, spec.ar_coeff,
                spec.unit_factor_variance, idio);
    for (int t = 0; t < t_len; ++t) {
      const bool post = t + 1 >= t_star;
      const double loading = lb && post ? gamma_i + psi_i : gamma_i;
      double v = loading * eta[t] + s_i * idio[t];
      if (mb && post) v = delta_i + v;
      values[static_cast<std::size_t>(t) * n + i] = v;
    }
  }
  return PanelData(t_len, n, std::move(values));
}

PanelData gen_null(const DgpSpec& spec) {
  if (spec.kind != DgpKind::iid && spec.kind != DgpKind::ar1) {
    throw InvalidInput("gen_null: kind must be iid or ar1");
  }
  return generate(spec);
}

PanelData gen_mean_break(const DgpSpec& spec) {
  if (spec.kind != DgpKind::mb) throw InvalidInput("gen_mean_break: kind must be mb");
  return generate(spec);
}

PanelData gen_loading_break(const DgpSpec& spec) {
  if (spec.kind != DgpKind::lb) throw InvalidInput("gen_loading_break: kind must be lb");
  return generate(spec);
}

std::string to_config(const DgpSpec& spec) {
  std::string out;
  out += "kind=" + to_string(spec.kind) + "\n";
  out += "t_len=" + std::to_string(spec.t_len) + "\n";
  out += "n_len=" + std::to_string(spec.n_len) + "\n";
  out += "ar_coeff=" + format_double(spec.ar_coeff) + "\n";
  out += "delta=" + format_double(spec.delta) + "\n";
  out += "big_delta=" + format_double(spec.big_delta) + "\n";
  out += "theta=" + format_double(spec.theta) + "\n";
  out += "seed=" + std::to_string(spec.seed) + "\n";
  out += std::string("unit_factor_variance=") + (spec.unit_factor_variance ? "1" : "0") +
         "\n";
  return out;
}

namespace {

void apply_config_pair(DgpSpec& spec, const std::string& key,
                       const std::string& value, long line) {
  const auto bad_value = [&](const char* what) {
    throw ParseError("dgp config: " + std::string(what) + " for key '" + key +
                     "': '" + value + "'", line);
  };
  if (key == "kind") {
    try {
      spec.kind = dgp_kind_from_string(value);
    } catch (const InvalidInput& e) {
      throw ParseError(std::string("dgp config: ") + e.what(), line);
    }
    return;
  }
  if (key == "t_len" || key == "n_len") {
    long long v = 0;
    if (!parse_long(value, v)) bad_value("bad integer");
    (key == "t_len" ? spec.t_len : spec.n_len) = static_cast<int>(v);
    return;
  }
  if (key == "seed") {
    unsigned long long v = 0;
    if (!parse_uint64(value, v)) bad_value("bad integer");
    spec.seed = v;
    return;
  }
  if (key == "ar_coeff" || key == "delta" || key == "big_delta" || key == "theta") {
    double v = 0.0;
    if (!parse_double(value, v)) bad_value("bad number");
    if (key == "ar_coeff") spec.ar_coeff = v;
    else if (key == "delta") spec.delta = v;
    else if (key == "big_delta") spec.big_delta = v;
    else spec.theta = v;
    return;
  }
  if (key == "unit_factor_variance") {
    if (value == "1" || value == "true") spec.unit_factor_variance = true;
    else if (value == "0" || value == "false") spec.unit_factor_variance = false;
    else bad_value("bad boolean");
    return;
  }
  throw ParseError("dgp config: unknown key '" + key + "'", line);
}

}  // namespace

DgpSpec dgp_from_config(const std::string& text) {
  DgpSpec spec;
  long line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string raw_line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line;

    // Inline form: comma-separated pairs on one line.
    std::size_t start = 0;
    while (start <= raw_line.size()) {
      std::size_t comma = raw_line.find(',', start);
      if (comma == std::string::npos) comma = raw_line.size();
      const std::string part = trim(raw_line.substr(start, comma - start));
      start = comma + 1;
      if (part.empty() || part[0] == '#') continue;
      const std::size_t eq = part.find('=');
      if (eq == std::string::npos) {
        // A bare token is shorthand for the dgp kind.
        try {
          spec.kind = dgp_kind_from_string(part);
        } catch (const InvalidInput& e) {
          throw ParseError(std::string("dgp config: ") + e.what(), line);
        }
        continue;
      }
      apply_config_pair(spec, trim(part.substr(0, eq)), trim(part.substr(eq + 1)),
                        line);
    }
  }
  return spec;
}

}  // namespace panelbreak
