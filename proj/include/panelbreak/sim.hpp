#pragma once

// Data-generating processes for the simulation studies: a single common
// factor eta_t loading on N units through gamma_i, plus scaled idiosyncratic
// noise, with optional one-time breaks in the means (MB) or in the loadings
// (LB) at t* = floor(T * theta).
//
//   iid:  eta_t and the idiosyncratic innovations are standard normal.
//   ar1:  eta_t and each idiosyncratic series are AR(1) with coefficient
//         ar_coeff and standard-normal innovations, started from the exact
//         stationary law. By default the stationary variance is the
//         resulting 1/(1 - rho^2); set unit_factor_variance to rescale the
//         streams to unit stationary variance instead.
//   mb:   the ar1 design plus delta_i * 1{t >= t*}, delta_i ~ U(-delta, delta).
//   lb:   the ar1 design with loadings gamma_i + psi_i * 1{t >= t*},
//         psi_i ~ N(0, big_delta^2).
//
// All draws are counter-based on disjoint streams, so a panel is a pure
// function of its spec, mb/lb with a zero break size are bit-identical to
// the ar1 null, and growing N or T extends a panel without changing the
// existing entries.

#include <cstdint>
#include <string>
#include <vector>

#include "panelbreak/panel.hpp"

namespace panelbreak {

enum class DgpKind { iid, ar1, mb, lb };

std::string to_string(DgpKind kind);
DgpKind dgp_kind_from_string(const std::string& name);

struct DgpSpec {
  DgpKind kind = DgpKind::iid;
  int t_len = 200;
  int n_len = 10;
  double ar_coeff = 0.5;
  double delta = 0.0;      // mean-break half-width (mb)
  double big_delta = 0.0;  // loading-break standard deviation (lb)
  double theta = 0.5;      // break fraction, t* = floor(T * theta)
  std::uint64_t seed = 0;
  bool unit_factor_variance = false;
};

// Throws InvalidInput unless T >= 2, N >= 1, |ar_coeff| < 1, delta >= 0,
// big_delta >= 0, 0 < theta < 1 (all finite).
void validate(const DgpSpec& spec);

PanelData gen_null(const DgpSpec& spec);           // kind iid or ar1
PanelData gen_mean_break(const DgpSpec& spec);     // kind mb
PanelData gen_loading_break(const DgpSpec& spec);  // kind lb
PanelData generate(const DgpSpec& spec);           // dispatch on kind

// The common-factor stream eta the panel would use (for diagnostics/tests).
std::vector<double> common_factor(const DgpSpec& spec);

// Plain-text key=value serialization (one pair per line; inline form with
// commas is accepted by the parser). Unknown keys and malformed values are
// ParseErrors. Missing keys keep their defaults.
std::string to_config(const DgpSpec& spec);
DgpSpec dgp_from_config(const std::string& text);

}  // namespace panelbreak
