#include "clara/analytics/tables.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "clara/analytics/scoring.hpp"
#include "clara/error.hpp"

namespace clara::analytics {

namespace {

constexpr const char* kDash = "–";

using ojson = nlohmann::ordered_json;

std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++w;
  return w;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  auto w = display_width(s);
  if (w >= width) return s;
  std::string fill(width - w, ' ');
  return left ? s + fill : fill + s;
}

/// Plain-text grid; first column left-aligned, the rest right-aligned.
std::string grid(const std::vector<std::vector<std::string>>& header, const std::vector<std::vector<std::string>>& body) {
  std::vector<std::size_t> widths;
  auto measure = [&](const std::vector<std::string>& row) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], display_width(row[i]));
  };
  for (const auto& r : header) measure(r);
  for (const auto& r : body) measure(r);
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      if (i) out += "  ";
      out += pad(i < row.size() ? row[i] : "", widths[i], i == 0);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    os << out << '\n';
  };
  std::size_t total = 0;
  for (auto w : widths) total += w;
  total += widths.empty() ? 0 : 2 * (widths.size() - 1);
  for (const auto& r : header) line(r);
  os << std::string(total, '-') << '\n';
  for (const auto& r : body) line(r);
  return os.str();
}

std::string scale_text(int lo, int hi) { return "(" + std::to_string(lo) + "-" + std::to_string(hi) + ")"; }

ojson cell_json(const std::optional<Table1Cell>& c) {
  if (!c) return ojson();
  ojson j;
  j["mean"] = c->stats.mean;
  j["sd"] = c->stats.sd;
  j["n"] = c->stats.n;
  if (c->test) {
    j["t"] = c->test->t;
    j["df"] = c->test->df;
    j["p"] = c->test->p;
    j["midpoint"] = c->test->mu0;
  } else {
    j["t"] = ojson();
    j["df"] = ojson();
    j["p"] = ojson();
    j["midpoint"] = ojson();
  }
  j["p_text"] = render_p(c->test ? std::optional(c->test->p) : std::nullopt);
  return j;
}

Table1Cell make_cell(const DescriptiveStats& s, int lo, int hi) {
  Table1Cell c{s, std::nullopt};
  try {
    c.test = one_sample_t(s, scale_midpoint(lo, hi));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSample) throw;
  }
  return c;
}

}  // namespace

std::string render_p(std::optional<double> p) {
  if (!p) return kDash;
  if (*p < 0.05) return "<.05";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *p);
  return buf;
}

std::string render_number(std::optional<double> v) {
  if (!v) return kDash;
  char buf[32];
  double x = *v;
  if (std::fabs(x) < 0.005) x = 0.0;
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

const std::vector<ReferenceRow>& reference_table1() {
  static const std::vector<ReferenceRow> rows = [] {
    auto cell = [](double m, double sd, std::optional<double> p) { return std::optional(PublishedCell{m, sd, p}); };
    const std::optional<double> lt;
    const std::optional<PublishedCell> none;
    return std::vector<ReferenceRow>{
        {"How easy was it to use the app?", 1, 7, false, cell(6.82, 0.39, lt), cell(6.50, 0.53, lt)},
        {"How satisfied are you with the animated character?", 1, 7, false, cell(5.59, 1.77, lt), cell(5.13, 2.23, 0.20)},
        {"How natural was your conversation with the animated character?", 1, 7, false, cell(4.88, 2.20, 0.12),
         cell(4.63, 2.33, 0.47)},
        {"How much do you feel the animated character cares about you?", 1, 7, false, cell(4.41, 2.55, 0.52),
         cell(5.13, 1.46, 0.07)},
        {"How would you characterize your relationship with the animated character?", 1, 7, false,
         cell(3.35, 2.42, 0.29), cell(3.75, 2.55, 0.79)},
        {"How much do you trust the animated character?", 1, 7, false, cell(3.94, 2.44, 0.92), cell(4.00, 2.39, 1.00)},
        {"How much would you like to continue working with the animated character?", 1, 7, false,
         cell(5.24, 1.89, lt), cell(4.75, 2.31, 0.39)},
        {"How much did you like the animated character?", 1, 7, false, cell(5.35, 2.00, lt), cell(4.50, 2.67, 0.61)},
        {"The animated character was a good way for my child to learn about HPV.", 1, 7, false, cell(6.25, 1.04, lt),
         none},
        {"The animated character changed my attitude about HPV vaccination.", 1, 5, false, cell(3.71, 1.05, lt),
         cell(2.75, 1.39, 0.63)},
        {"I learned a lot about HPV from the animated character.", 1, 5, false, cell(4.71, 0.47, lt),
         cell(3.25, 1.58, 0.69)},
        {"My child enjoyed interacting with the animated character.", 1, 5, false, cell(3.71, 1.70, 0.31), none},
        {"I felt actively involved in the decision-making process.", 1, 5, true, none, cell(3.60, 0.52, lt)},
        {"Learning about HPV from the animated character(s) is fun.", 0, 3, true, none, cell(2.09, 0.92, 0.11)},
    };
  }();
  return rows;
}

Table1 build_table1(const std::vector<RatingsInput>& rows) {
  Table1 t;
  for (const auto& in : rows) {
    Table1Row r{in.label, in.lo, in.hi, in.composite, std::nullopt, std::nullopt};
    if (in.parent) r.parent = make_cell(*in.parent, in.lo, in.hi);
    if (in.child) r.child = make_cell(*in.child, in.lo, in.hi);
    t.rows.push_back(std::move(r));
  }
  return t;
}

Table1 table1_from_reference(std::size_t n_parent, std::size_t n_child) {
  std::vector<RatingsInput> in;
  for (const auto& row : reference_table1()) {
    RatingsInput r{row.label, row.lo, row.hi, row.composite, std::nullopt, std::nullopt};
    if (row.parent) r.parent = DescriptiveStats{row.parent->mean, row.parent->sd, n_parent};
    if (row.child) r.child = DescriptiveStats{row.child->mean, row.child->sd, n_child};
    in.push_back(std::move(r));
  }
  return build_table1(in);
}

Table1 table1_from_records(const std::vector<Record>& post, const std::map<std::string, ArmAssignment>& arms,
                           const InstrumentSet& instruments) {
  std::vector<RatingsInput> in;
  for (const auto& spec : instruments.likert) {
    if (spec.instrument == "attitude" || spec.instrument == "intent") continue;
    std::map<Respondent, std::vector<double>> values;
    for (const auto& r : post) {
      if (r.wave != Wave::post || r.instrument != spec.instrument || r.item != spec.item) continue;
      auto arm = arms.find(r.participant);
      if (arm == arms.end()) continue;
      int v = 0;
      try {
        v = std::stoi(r.value);
      } catch (const std::exception&) {
        continue;
      }
      if (v < spec.lo || v > spec.hi) continue;
      values[arm->second.respondent].push_back(spec.reverse ? reverse_score(v, spec.lo, spec.hi) : v);
    }
    RatingsInput row{spec.instrument + "/" + spec.item, spec.lo, spec.hi, false, std::nullopt, std::nullopt};
    if (!values[Respondent::parent].empty()) row.parent = describe(values[Respondent::parent]);
    if (!values[Respondent::child].empty()) row.child = describe(values[Respondent::child]);
    in.push_back(std::move(row));
  }
  return build_table1(in);
}

std::size_t ReproductionReport::matched() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.matched;
  return n;
}

std::vector<CellCheck> ReproductionReport::discrepancies() const {
  std::vector<CellCheck> out;
  for (const auto& c : cells)
    if (!c.matched) out.push_back(c);
  return out;
}

ReproductionReport check_table1(std::size_t n_parent, std::size_t n_child, double tolerance) {
  ReproductionReport rep;
  rep.n_parent = n_parent;
  rep.n_child = n_child;
  rep.tolerance = tolerance;
  for (const auto& row : reference_table1()) {
    for (auto who : kAllRespondents) {
      const auto& pub = who == Respondent::parent ? row.parent : row.child;
      if (!pub) continue;
      auto n = who == Respondent::parent ? n_parent : n_child;
      auto t = one_sample_t({pub->mean, pub->sd, n}, scale_midpoint(row.lo, row.hi));
      CellCheck c;
      c.label = row.label;
      c.respondent = who;
      c.computed_p = t.p;
      if (pub->below_05()) {
        c.published_p = "<.05";
        c.matched = t.p < 0.05;
      } else {
        c.published_p = render_p(pub->p);
        c.matched = std::fabs(t.p - *pub->p) <= tolerance + 1e-12;
      }
      rep.cells.push_back(std::move(c));
    }
  }
  return rep;
}

const std::vector<PublishedDelta>& reference_table2() {
  using M = Measure;
  using A = Arm;
  using R = Respondent;
  static const std::vector<PublishedDelta> cells{
      {M::knowledge, A::CONTROL, R::parent, 0.75, 1.89}, {M::knowledge, A::PARENT, R::parent, 3.00, 3.20},
      {M::knowledge, A::CHILD, R::parent, 2.25, 1.83},   {M::attitude, A::CONTROL, R::parent, -0.29, 1.09},
      {M::attitude, A::CONTROL, R::child, 0.40, 0.43},   {M::attitude, A::PARENT, R::parent, 0.10, 1.00},
      {M::attitude, A::PARENT, R::child, -0.16, 0.68},   {M::attitude, A::CHILD, R::parent, -0.43, 1.50},
      {M::attitude, A::CHILD, R::child, 0.30, 0.71},     {M::intent, A::CONTROL, R::parent, 0.00, 1.41},
      {M::intent, A::CONTROL, R::child, 0.25, 1.26},     {M::intent, A::PARENT, R::parent, 0.44, 0.53},
      {M::intent, A::PARENT, R::child, 0.33, 1.12},      {M::intent, A::CHILD, R::parent, 1.00, 1.07},
      {M::intent, A::CHILD, R::child, 1.25, 1.28},
  };
  return cells;
}

std::string_view measure_label(Measure m) {
  switch (m) {
    case Measure::knowledge:
      return "HPV Knowledge";
    case Measure::attitude:
      return "HPV Attitude";
    case Measure::intent:
      return "HPV Vaccine Intent";
  }
  return "?";
}

std::string render_table1_text(const Table1& t) {
  std::vector<std::vector<std::string>> header{{"", "Parent", "", "", "Child", "", ""},
                                               {"Item", "Mean", "SD", "p", "Mean", "SD", "p"}};
  std::vector<std::vector<std::string>> body;
  bool any_composite = false;
  for (const auto& r : t.rows) {
    std::vector<std::string> line{r.label + " " + scale_text(r.lo, r.hi) + (r.composite ? " +" : "")};
    any_composite |= r.composite;
    for (const auto* c : {&r.parent, &r.child}) {
      if (!*c) {
        line.insert(line.end(), {kDash, kDash, kDash});
        continue;
      }
      line.push_back(render_number((*c)->stats.mean));
      line.push_back(render_number((*c)->stats.sd));
      line.push_back(render_p((*c)->test ? std::optional((*c)->test->p) : std::nullopt));
    }
    body.push_back(std::move(line));
  }
  auto out = grid(header, body);
  if (any_composite) out += "+ Composite measure derived from multiple survey items.\n";
  return out;
}

nlohmann::ordered_json table1_json(const Table1& t) {
  ojson j;
  j["columns"] = {"item", "parent_mean", "parent_sd", "parent_p", "child_mean", "child_sd", "child_p"};
  j["rows"] = ojson::array();
  for (const auto& r : t.rows) {
    ojson row;
    row["label"] = r.label;
    row["scale"] = {r.lo, r.hi};
    row["composite"] = r.composite;
    row["parent"] = cell_json(r.parent);
    row["child"] = cell_json(r.child);
    j["rows"].push_back(std::move(row));
  }
  return j;
}

std::string render_table2_text(const DeltaReport& r) {
  std::vector<std::vector<std::string>> header{{""}, {""}, {"Measure"}};
  for (auto arm : kAllArms) {
    header[0].insert(header[0].end(), {std::string(to_string(arm)), "", "", ""});
    header[1].insert(header[1].end(), {"Parent Δ", "", "Child Δ", ""});
    header[2].insert(header[2].end(), {"M", "SD", "M", "SD"});
  }
  std::vector<std::vector<std::string>> body;
  for (auto m : kAllMeasures) {
    std::vector<std::string> line{std::string(measure_label(m))};
    for (auto arm : kAllArms)
      for (auto who : kAllRespondents) {
        const auto& o = r.at(m, arm, who);
        line.push_back(render_number(o.delta ? std::optional(o.delta->mean) : std::nullopt));
        line.push_back(render_number(o.delta ? std::optional(o.delta->sd) : std::nullopt));
      }
    body.push_back(std::move(line));
  }
  return grid(header, body);
}

nlohmann::ordered_json table2_json(const DeltaReport& r) {
  ojson j;
  j["arms"] = ojson::array();
  for (auto a : kAllArms) j["arms"].push_back(to_string(a));
  j["respondents"] = {"parent", "child"};
  j["rows"] = ojson::array();
  for (auto m : kAllMeasures) {
    ojson row;
    row["measure"] = to_string(m);
    row["label"] = measure_label(m);
    row["cells"] = ojson::array();
    for (auto arm : kAllArms)
      for (auto who : kAllRespondents) {
        const auto& o = r.at(m, arm, who);
        ojson c;
        c["arm"] = to_string(arm);
        c["respondent"] = to_string(who);
        c["n"] = o.delta ? o.delta->n : 0;
        c["mean"] = o.delta ? ojson(o.delta->mean) : ojson();
        c["sd"] = o.delta ? ojson(o.delta->sd) : ojson();
        c["mean_text"] = render_number(o.delta ? std::optional(o.delta->mean) : std::nullopt);
        c["sd_text"] = render_number(o.delta ? std::optional(o.delta->sd) : std::nullopt);
        row["cells"].push_back(std::move(c));
      }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

std::string render_discrepancies_text(const ReproductionReport& r) {
  std::ostringstream os;
  os << "assumed n: parent " << r.n_parent << ", child " << r.n_child << "; tolerance " << r.tolerance << "\n";
  os << "reproduced " << r.matched() << " of " << r.testable() << " published p-values\n";
  auto d = r.discrepancies();
  if (d.empty()) {
    os << "no discrepancies\n";
    return os.str();
  }
  std::vector<std::vector<std::string>> body;
  for (const auto& c : d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", c.computed_p);
    body.push_back({c.label, std::string(to_string(c.respondent)), c.published_p, buf});
  }
  os << grid({{"Item", "Respondent", "Published p", "Computed p"}}, body);
  return os.str();
}

nlohmann::ordered_json discrepancies_json(const ReproductionReport& r) {
  ojson j;
  j["n_parent"] = r.n_parent;
  j["n_child"] = r.n_child;
  j["tolerance"] = r.tolerance;
  j["testable"] = r.testable();
  j["matched"] = r.matched();
  j["discrepancies"] = ojson::array();
  for (const auto& c : r.discrepancies())
    j["discrepancies"].push_back({{"label", c.label},
                                  {"respondent", to_string(c.respondent)},
                                  {"published_p", c.published_p},
                                  {"computed_p", c.computed_p}});
  return j;
}

nlohmann::ordered_json exclusions_json(const std::vector<Exclusion>& e) {
  ojson arr = ojson::array();
  for (const auto& x : e)
    arr.push_back({{"participant", x.participant},
                   {"measure", x.measure ? ojson(to_string(*x.measure)) : ojson()},
                   {"reason", x.reason}});
  return arr;
}

}  // namespace clara::analytics
