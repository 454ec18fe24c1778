#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clara/analytics/records.hpp"
#include "clara/analytics/stats.hpp"

namespace clara::analytics {

/// "<.05" below 0.05, otherwise two decimals; "–" when absent.
std::string render_p(std::optional<double> p);
/// Two decimals, or "–".
std::string render_number(std::optional<double> v);

/// A published Table 1 cell. `p` is empty when the paper prints "<.05".
struct PublishedCell {
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> p;

  bool below_05() const { return !p; }
};

struct ReferenceRow {
  std::string label;
  int lo = 1;
  int hi = 7;
  bool composite = false;
  std::optional<PublishedCell> parent;
  std::optional<PublishedCell> child;
};

/// The published satisfaction and attitude table.
const std::vector<ReferenceRow>& reference_table1();

struct RatingsInput {
  std::string label;
  int lo = 1;
  int hi = 7;
  bool composite = false;
  std::optional<DescriptiveStats> parent;
  std::optional<DescriptiveStats> child;
};

struct Table1Cell {
  DescriptiveStats stats;
  std::optional<TTestResult> test;  // empty when the sample is degenerate
};

struct Table1Row {
  std::string label;
  int lo = 1;
  int hi = 7;
  bool composite = false;
  std::optional<Table1Cell> parent;
  std::optional<Table1Cell> child;
};

struct Table1 {
  std::vector<Table1Row> rows;
};

/// One-sample t-tests of every cell against its scale midpoint.
Table1 build_table1(const std::vector<RatingsInput>& rows);

/// Published (M, SD) with an assumed n per respondent.
Table1 table1_from_reference(std::size_t n_parent = 17, std::size_t n_child = 8);

/// Ratings from the post wave: every Likert instrument other than attitude and
/// intent, one row per item, grouped by respondent.
Table1 table1_from_records(const std::vector<Record>& post, const std::map<std::string, ArmAssignment>& arms,
                           const InstrumentSet& instruments);

struct CellCheck {
  std::string label;
  Respondent respondent = Respondent::parent;
  std::string published_p;
  double computed_p = 0.0;
  bool matched = false;
};

struct ReproductionReport {
  std::size_t n_parent = 17;
  std::size_t n_child = 8;
  double tolerance = 0.03;
  std::vector<CellCheck> cells;

  std::size_t testable() const { return cells.size(); }
  std::size_t matched() const;
  std::vector<CellCheck> discrepancies() const;
};

/// Compares computed p-values with every published cell: within `tolerance`
/// for numeric p, same side of 0.05 for "<.05".
ReproductionReport check_table1(std::size_t n_parent = 17, std::size_t n_child = 8, double tolerance = 0.03);

struct PublishedDelta {
  Measure measure;
  Arm arm;
  Respondent respondent;
  double mean;
  double sd;
};

/// Published pre-post change cells; cells printed as "–" are absent.
const std::vector<PublishedDelta>& reference_table2();

std::string_view measure_label(Measure m);

std::string render_table1_text(const Table1& t);
nlohmann::ordered_json table1_json(const Table1& t);
std::string render_table2_text(const DeltaReport& r);
nlohmann::ordered_json table2_json(const DeltaReport& r);
std::string render_discrepancies_text(const ReproductionReport& r);
nlohmann::ordered_json discrepancies_json(const ReproductionReport& r);
nlohmann::ordered_json exclusions_json(const std::vector<Exclusion>& e);

}  // namespace clara::analytics
