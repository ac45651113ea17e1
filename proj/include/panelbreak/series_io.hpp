#pragma once

// CSV ingestion and the rolling-window pipeline for real data: parse, reduce
// daily rows to the last observation of each calendar month, drop rows with
// missing cells, first-difference, then run the break test on every
// length-`window` block at stride one.

#include <string>
#include <utility>
#include <vector>

#include "panelbreak/break_test.hpp"
#include "panelbreak/panel.hpp"

namespace panelbreak {

// Rectangular numeric table, optionally keyed by strictly increasing ISO
// dates. NaN marks a missing cell.
struct SeriesTable {
  std::vector<std::string> dates;  // empty when the table has no date column
  std::vector<std::string> names;  // value column names
  std::vector<double> values;      // rows x cols, row-major
  int n_rows = 0;
  int n_cols = 0;

  bool has_dates() const { return !dates.empty(); }
  double at(int r, int c) const {
    return values[static_cast<std::size_t>(r) * n_cols + c];
  }
};

struct CsvOptions {
  char delimiter = ',';
  int date_column = 0;  // column index holding dates; -1 for a numeric-only table
  std::vector<std::string> na_markers = {"",    "NA", "NaN", "nan", "N/A",
                                         "#N/A", "ND", "null", "."};
};

// Parses CSV text: header row required, the delimiter must split every row
// into the same field count, dates must be valid ISO (YYYY-MM-DD) and
// strictly increasing. Cells matching a missing-value marker become NaN;
// anything else must parse as a number. Throws ParseError with the 1-based
// line number. A UTF-8 byte-order mark and CRLF endings are tolerated.
SeriesTable read_csv_text(const std::string& text, const CsvOptions& options = {});

// read_csv_text over a file's contents; unreadable path is a ParseError.
SeriesTable read_csv(const std::string& path, const CsvOptions& options = {});

// Keeps the last row of each calendar month. Requires a date column.
SeriesTable monthly_last(const SeriesTable& t);

// Row t becomes X_{t+1} - X_t, dated at the later date. Requires at least
// two rows and no missing cells.
SeriesTable first_difference(const SeriesTable& t);

// Removes rows containing any missing cell; second element is the count of
// dropped rows.
std::pair<SeriesTable, int> drop_missing_rows(const SeriesTable& t);

// Converts a clean (no missing) table to a panel, carrying dates as labels.
PanelData to_panel(const SeriesTable& t);

struct RollingResult {
  std::string window_end;
  double statistic = 0.0;
  double p_value = 1.0;
  int window_len = 0;
  std::string error;  // non-empty when this window's test failed
};

// Runs run_test on every window of `window` consecutive rows, stride 1:
// rows - window + 1 results, ordered by window end. A window's numerical
// failure is recorded in its slot and the run continues. The table must be
// clean (no missing values) and window must be in [16, rows].
std::vector<RollingResult> rolling_test(const SeriesTable& t, int window,
                                        const BreakTestConfig& cfg = {},
                                        int workers = 1);

enum class ResultFormat { csv, json };

// CSV columns: window_end, statistic, p_value (stable order; failed windows
// leave the numeric fields empty). JSON carries window_len and the error
// message as well.
std::string emit_results(const std::vector<RollingResult>& results,
                         ResultFormat format);

}  // namespace panelbreak
