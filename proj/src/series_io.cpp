#include "panelbreak/series_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "panelbreak/format.hpp"
#include "panelbreak/parallel.hpp"

namespace panelbreak {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool all_digits(const std::string& s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  const std::string y = s.substr(0, 4), m = s.substr(5, 2), d = s.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return false;
  const int month = std::stoi(m), day = std::stoi(d);
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delim, pos);
    if (next == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
}

}  // namespace

SeriesTable read_csv_text(const std::string& text, const CsvOptions& options) {
  std::vector<std::string> lines;
  {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      std::string line = text.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      if (nl == text.size()) break;
      pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) throw ParseError("csv: empty input", 1);

  // Strip a UTF-8 byte-order mark from the header line.
  if (lines[0].rfind("\xEF\xBB\xBF", 0) == 0) lines[0] = lines[0].substr(3);

  const std::vector<std::string> header = split_fields(lines[0], options.delimiter);
  const int n_fields = static_cast<int>(header.size());
  const int date_col = options.date_column;
  if (date_col >= n_fields) {
    throw ParseError("csv: date column index " + std::to_string(date_col) +
                     " out of range for " + std::to_string(n_fields) + " columns", 1);
  }

  SeriesTable table;
  table.n_cols = date_col >= 0 ? n_fields - 1 : n_fields;
  if (table.n_cols < 1) throw ParseError("csv: no value columns", 1);
  for (int c = 0; c < n_fields; ++c) {
    if (c != date_col) table.names.push_back(trim(header[c]));
  }

  const auto is_missing = [&](const std::string& cell) {
    return std::find(options.na_markers.begin(), options.na_markers.end(), cell) !=
           options.na_markers.end();
  };

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li + 1);
    if (lines[li].empty()) throw ParseError("csv: blank row", line_no);
    const std::vector<std::string> fields = split_fields(lines[li], options.delimiter);
    if (static_cast<int>(fields.size()) != n_fields) {
      throw ParseError("csv: expected " + std::to_string(n_fields) +
                       " fields, got " + std::to_string(fields.size()), line_no);
    }
    for (int c = 0; c < n_fields; ++c) {
      const std::string cell = trim(fields[c]);
      if (c == date_col) {
        if (!valid_iso_date(cell)) {
          throw ParseError("csv: bad date '" + cell + "' (expected YYYY-MM-DD)",
                           line_no);
        }
        if (!table.dates.empty()) {
          if (cell == table.dates.back()) {
            throw ParseError("csv: duplicate date '" + cell + "'", line_no);
          }
          if (cell < table.dates.back()) {
            throw ParseError("csv: dates not strictly increasing at '" + cell + "'",
                             line_no);
          }
        }
        table.dates.push_back(cell);
      } else if (is_missing(cell)) {
        table.values.push_back(kNan);
      } else {
        double v = 0.0;
        if (!parse_double(cell, v)) {
          throw ParseError("csv: bad number '" + cell + "'", line_no);
        }
        table.values.push_back(v);
      }
    }
    ++table.n_rows;
  }
  if (table.n_rows == 0) throw ParseError("csv: no data rows", 1);
  return table;
}

SeriesTable read_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("csv: cannot open '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_csv_text(buf.str(), options);
}

SeriesTable monthly_last(const SeriesTable& t) {
  if (!t.has_dates()) throw InvalidInput("monthly_last: table has no date column");
  SeriesTable out;
  out.names = t.names;
  out.n_cols = t.n_cols;
  for (int r = 0; r < t.n_rows; ++r) {
    // Dates are strictly increasing, so a month's rows are consecutive;
    // keep a row when the next row starts a different month.
    const bool last_of_month =
        r + 1 == t.n_rows ||
        t.dates[r].substr(0, 7) != t.dates[r + 1].substr(0, 7);
    if (!last_of_month) continue;
    out.dates.push_back(t.dates[r]);
    for (int c = 0; c < t.n_cols; ++c) out.values.push_back(t.at(r, c));
    ++out.n_rows;
  }
  return out;
}

SeriesTable first_difference(const SeriesTable& t) {
  if (t.n_rows < 2) {
    throw InvalidInput("first_difference: needs at least 2 rows, got " +
                       std::to_string(t.n_rows));
  }
  for (double v : t.values) {
    if (std::isnan(v)) {
      throw InvalidInput("first_difference: missing values present");
    }
  }
  SeriesTable out;
  out.names = t.names;
  out.n_cols = t.n_cols;
  out.n_rows = t.n_rows - 1;
  if (t.has_dates()) {
    out.dates.assign(t.dates.begin() + 1, t.dates.end());
  }
  out.values.reserve(static_cast<std::size_t>(out.n_rows) * out.n_cols);
  for (int r = 1; r < t.n_rows; ++r) {
    for (int c = 0; c < t.n_cols; ++c) {
      out.values.push_back(t.at(r, c) - t.at(r - 1, c));
    }
  }
  return out;
}

std::pair<SeriesTable, int> drop_missing_rows(const SeriesTable& t) {
  SeriesTable out;
  out.names = t.names;
  out.n_cols = t.n_cols;
  int dropped = 0;
  for (int r = 0; r < t.n_rows; ++r) {
    bool missing = false;
    for (int c = 0; c < t.n_cols; ++c) {
      if (std::isnan(t.at(r, c))) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++dropped;
      continue;
    }
    if (t.has_dates()) out.dates.push_back(t.dates[r]);
    for (int c = 0; c < t.n_cols; ++c) out.values.push_back(t.at(r, c));
    ++out.n_rows;
  }
  return {std::move(out), dropped};
}

PanelData to_panel(const SeriesTable& t) {
  return PanelData(t.n_rows, t.n_cols, t.values, t.dates);
}

std::vector<RollingResult> rolling_test(const SeriesTable& t, int window,
                                        const BreakTestConfig& cfg, int workers) {
  if (window < 16) {
    throw InvalidInput("rolling_test: window must be >= 16, got " +
                       std::to_string(window));
  }
  if (window > t.n_rows) {
    throw InvalidInput("rolling_test: window " + std::to_string(window) +
                       " exceeds row count " + std::to_string(t.n_rows));
  }
  for (double v : t.values) {
    if (std::isnan(v)) {
      throw InvalidInput("rolling_test: missing values present; drop or fill first");
    }
  }

  const long n_windows = t.n_rows - window + 1;
  std::vector<RollingResult> out(n_windows);
  parallel_for(workers, n_windows, [&](long w) {
    const int start = static_cast<int>(w);
    const int end = start + window - 1;  // inclusive
    std::vector<double> block(t.values.begin() +
                                  static_cast<std::size_t>(start) * t.n_cols,
                              t.values.begin() +
                                  static_cast<std::size_t>(end + 1) * t.n_cols);
    RollingResult& slot = out[w];
    slot.window_end =
        t.has_dates() ? t.dates[end] : std::to_string(end + 1);
    slot.window_len = window;
    try {
      const BreakTestResult res =
          run_test(PanelData(window, t.n_cols, std::move(block)), cfg);
      slot.statistic = res.statistic;
      slot.p_value = res.p_value;
    } catch (const NumericalFailure& e) {
      slot.statistic = kNan;
      slot.p_value = kNan;
      slot.error = e.what();
    }
  });
  return out;
}

std::string emit_results(const std::vector<RollingResult>& results,
                         ResultFormat format) {
  if (format == ResultFormat::csv) {
    std::string doc = "window_end,statistic,p_value\n";
    for (const RollingResult& r : results) {
      doc += r.window_end;
      doc += ',';
      if (r.error.empty()) doc += format_double(r.statistic);
      doc += ',';
      if (r.error.empty()) doc += format_double(r.p_value);
      doc += '\n';
    }
    return doc;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const RollingResult& r : results) {
    nlohmann::json row;
    row["window_end"] = r.window_end;
    if (r.error.empty()) {
      row["statistic"] = r.statistic;
      row["p_value"] = r.p_value;
    } else {
      row["statistic"] = nullptr;
      row["p_value"] = nullptr;
      row["error"] = r.error;
    }
    row["window_len"] = r.window_len;
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

}  // namespace panelbreak
