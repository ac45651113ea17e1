#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "panelbreak/errors.hpp"

namespace panelbreak {

// A T x N panel: row t is the cross-sectional observation vector at time t.
// Values are validated finite at construction; labels, when present, must be
// strictly increasing (ISO dates compare correctly as strings) with one label
// per row. Single-row panels are allowed; operations that need a longer
// sample enforce their own minimum T.
class PanelData {
 public:
  PanelData(int t_len, int n_len, std::vector<double> row_major,
            std::vector<std::string> labels = {});

  int t_len() const { return t_len_; }
  int n_len() const { return n_len_; }

  double operator()(int t, int i) const {
    return values_[static_cast<std::size_t>(t) * n_len_ + i];
  }

  std::span<const double> row(int t) const {
    return {values_.data() + static_cast<std::size_t>(t) * n_len_,
            static_cast<std::size_t>(n_len_)};
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  int t_len_;
  int n_len_;
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

}  // namespace panelbreak
