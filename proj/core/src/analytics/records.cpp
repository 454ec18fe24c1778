#include "clara/analytics/records.hpp"

#include <algorithm>
#include <charconv>
#include <memory>
#include <sstream>

#include "../text_util.hpp"
#include "clara/analytics/scoring.hpp"
#include "clara/error.hpp"

namespace clara::analytics {

using detail::split;
using detail::trim;

std::string_view to_string(Wave w) { return w == Wave::pre ? "pre" : "post"; }
std::string_view to_string(Respondent r) { return r == Respondent::parent ? "parent" : "child"; }

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::knowledge:
      return "knowledge";
    case Measure::attitude:
      return "attitude";
    case Measure::intent:
      return "intent";
  }
  return "?";
}

std::optional<Wave> parse_wave(std::string_view s) {
  if (s == "pre") return Wave::pre;
  if (s == "post") return Wave::post;
  return std::nullopt;
}

std::optional<Respondent> parse_respondent(std::string_view s) {
  if (s == "parent") return Respondent::parent;
  if (s == "child" || s == "adolescent") return Respondent::child;
  return std::nullopt;
}

namespace {

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::InvalidRecord, "line " + std::to_string(line) + ": " + msg);
}

/// Data rows of a comma-separated document after checking its header.
std::vector<std::pair<std::size_t, std::vector<std::string>>> rows(std::string_view text,
                                                                   const std::vector<std::string>& header) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  std::size_t line_no = 0;
  bool seen_header = false;
  for (auto& raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    for (auto& c : split(line, ',')) cells.emplace_back(trim(c));
    if (!seen_header) {
      if (cells != header) bad(line_no, "expected header '" + detail::join(header, ",") + "'");
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size())
      bad(line_no, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
    out.emplace_back(line_no, std::move(cells));
  }
  if (!seen_header) throw Error(ErrorCode::InvalidRecord, "missing header '" + detail::join(header, ",") + "'");
  return out;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no" || s.empty()) return false;
  return std::nullopt;
}

}  // namespace

std::vector<Record> parse_records_csv(std::string_view text) {
  std::vector<Record> out;
  for (auto& [line, c] : rows(text, {"participant", "wave", "instrument", "item", "value"})) {
    auto wave = parse_wave(c[1]);
    if (!wave) bad(line, "wave must be pre or post, got '" + c[1] + "'");
    if (c[0].empty()) bad(line, "empty participant id");
    out.push_back({c[0], *wave, c[2], c[3], c[4], line});
  }
  return out;
}

std::string records_csv(const std::vector<Record>& records) {
  std::ostringstream os;
  os << "participant,wave,instrument,item,value\n";
  for (const auto& r : records)
    os << r.participant << ',' << to_string(r.wave) << ',' << r.instrument << ',' << r.item << ',' << r.value << '\n';
  return os.str();
}

std::map<std::string, ArmAssignment> parse_arms_csv(std::string_view text) {
  std::map<std::string, ArmAssignment> out;
  for (auto& [line, c] : rows(text, {"participant", "dyad", "arm", "respondent"})) {
    auto arm = parse_arm(c[2]);
    if (!arm) bad(line, "arm must be CONTROL, PARENT or CHILD, got '" + c[2] + "'");
    auto resp = parse_respondent(c[3]);
    if (!resp) bad(line, "respondent must be parent or child, got '" + c[3] + "'");
    if (!out.emplace(c[0], ArmAssignment{c[0], c[1], *arm, *resp}).second) bad(line, "duplicate participant '" + c[0] + "'");
  }
  return out;
}

std::string arms_csv(const std::map<std::string, ArmAssignment>& arms) {
  std::ostringstream os;
  os << "participant,dyad,arm,respondent\n";
  for (const auto& [id, a] : arms)
    os << id << ',' << a.dyad << ',' << to_string(a.arm) << ',' << to_string(a.respondent) << '\n';
  return os.str();
}

const ItemSpec* InstrumentSet::find(std::string_view instrument, std::string_view item) const {
  for (const auto& s : likert)
    if (s.instrument == instrument && s.item == item) return &s;
  return nullptr;
}

InstrumentSet default_instruments(const std::vector<std::pair<std::string, bool>>& key) {
  InstrumentSet set;
  for (const auto& [tag, truth] : key) {
    set.knowledge_items.push_back(tag);
    set.knowledge_key.push_back(truth);
  }
  for (int i = 1; i <= 7; ++i) set.likert.push_back({"attitude", "a" + std::to_string(i), 1, 5, false});
  set.likert.push_back({"intent", "i1", 1, 5, false});
  return set;
}

InstrumentSet parse_instruments_csv(std::string_view text) {
  InstrumentSet set;
  for (auto& [line, c] : rows(text, {"instrument", "item", "lo", "hi", "reverse", "key"})) {
    if (c[0] == "knowledge") {
      auto k = to_bool(c[5]);
      if (!k || c[5].empty()) bad(line, "knowledge rows need key true or false");
      set.knowledge_items.push_back(c[1]);
      set.knowledge_key.push_back(*k);
      continue;
    }
    auto lo = to_int(c[2]);
    auto hi = to_int(c[3]);
    auto rev = to_bool(c[4]);
    if (!lo || !hi || *lo >= *hi) bad(line, "invalid scale bounds");
    if (!rev) bad(line, "reverse must be true or false");
    if (set.find(c[0], c[1])) bad(line, "duplicate item '" + c[0] + "/" + c[1] + "'");
    set.likert.push_back({c[0], c[1], *lo, *hi, *rev});
  }
  return set;
}

std::optional<double> ParticipantScores::get(Measure m) const {
  switch (m) {
    case Measure::knowledge:
      return knowledge;
    case Measure::attitude:
      return attitude;
    case Measure::intent:
      return intent;
  }
  return std::nullopt;
}

void ParticipantScores::set(Measure m, double v) {
  switch (m) {
    case Measure::knowledge:
      knowledge = v;
      break;
    case Measure::attitude:
      attitude = v;
      break;
    case Measure::intent:
      intent = v;
      break;
  }
}

std::map<std::string, ParticipantScores> score_wave(const std::vector<Record>& records, Wave wave,
                                                    const InstrumentSet& ins, std::vector<Exclusion>* exclusions) {
  struct Raw {
    std::map<std::string, std::string> knowledge;
    std::map<std::string, std::vector<LikertItem>> likert;
    std::set<std::string> seen;
  };
  std::map<std::string, Raw> raw;
  std::map<std::string, std::set<Measure>> broken;
  auto exclude = [&](const std::string& p, std::optional<Measure> m, std::string why) {
    if (m) broken[p].insert(*m);
    if (exclusions) exclusions->push_back({p, m, std::move(why)});
  };
  for (const auto& r : records) {
    if (r.wave != wave) continue;
    auto& pr = raw[r.participant];
    if (!pr.seen.insert(r.instrument + "/" + r.item).second) {
      exclude(r.participant, std::nullopt, "duplicate item " + r.instrument + "/" + r.item + " at line " + std::to_string(r.line));
      continue;
    }
    if (r.instrument == "knowledge") {
      pr.knowledge[r.item] = r.value;
      continue;
    }
    const auto* spec = ins.find(r.instrument, r.item);
    if (!spec) continue;
    auto v = to_int(r.value);
    if (!v) {
      exclude(r.participant, r.instrument == "attitude" ? std::optional(Measure::attitude)
                             : r.instrument == "intent" ? std::optional(Measure::intent)
                                                        : std::nullopt,
              "non-integer value '" + r.value + "' at line " + std::to_string(r.line));
      continue;
    }
    pr.likert[r.instrument].push_back({r.item, *v, spec->lo, spec->hi});
  }

  std::map<std::string, ParticipantScores> out;
  for (auto& [p, pr] : raw) {
    ParticipantScores s;
    if (!pr.knowledge.empty()) {
      std::vector<KnowledgeAnswer> answers;
      std::string problem;
      for (const auto& item : ins.knowledge_items) {
        auto it = pr.knowledge.find(item);
        if (it == pr.knowledge.end()) {
          problem = "missing knowledge item '" + item + "'";
          break;
        }
        auto a = parse_knowledge_answer(it->second);
        if (!a) {
          problem = "invalid knowledge answer '" + it->second + "'";
          break;
        }
        answers.push_back(*a);
      }
      if (problem.empty() && pr.knowledge.size() != ins.knowledge_items.size()) problem = "unknown knowledge item";
      if (problem.empty()) {
        try {
          auto key = std::make_unique<bool[]>(ins.knowledge_key.size());
          std::copy(ins.knowledge_key.begin(), ins.knowledge_key.end(), key.get());
          s.knowledge = score_knowledge(answers, {key.get(), ins.knowledge_key.size()}).count;
        } catch (const Error& e) {
          problem = e.what();
        }
      }
      if (!problem.empty()) exclude(p, Measure::knowledge, problem);
    }
    for (auto m : {Measure::attitude, Measure::intent}) {
      auto it = pr.likert.find(std::string(to_string(m)));
      if (it == pr.likert.end() || broken[p].count(m)) continue;
      std::set<std::string> rev;
      for (const auto& item : it->second)
        if (ins.find(to_string(m), item.id)->reverse) rev.insert(item.id);
      try {
        s.set(m, score_likert(it->second, rev).mean);
      } catch (const Error& e) {
        exclude(p, m, e.what());
      }
    }
    if (broken[p].count(Measure::knowledge)) s.knowledge.reset();
    out.emplace(p, s);
  }
  return out;
}

const DeltaOutcome& DeltaReport::at(Measure m, Arm a, Respondent r) const {
  for (const auto& o : outcomes)
    if (o.measure == m && o.arm == a && o.respondent == r) return o;
  throw Error(ErrorCode::InvalidArgument, "no such delta group");
}

DeltaReport compute_deltas(const std::map<std::string, ParticipantScores>& pre,
                           const std::map<std::string, ParticipantScores>& post,
                           const std::map<std::string, ArmAssignment>& arms) {
  DeltaReport rep;
  std::map<std::tuple<Measure, Arm, Respondent>, std::vector<double>> groups;
  std::map<std::tuple<Measure, Arm, Respondent>, std::vector<std::string>> members;
  std::set<std::string> ids;
  for (const auto& [id, _] : pre) ids.insert(id);
  for (const auto& [id, _] : post) ids.insert(id);
  for (const auto& id : ids) {
    auto arm = arms.find(id);
    if (arm == arms.end()) {
      rep.exclusions.push_back({id, std::nullopt, "participant not in arm file"});
      continue;
    }
    auto a = pre.find(id);
    auto b = post.find(id);
    if (a == pre.end() || b == post.end()) {
      rep.exclusions.push_back({id, std::nullopt, a == pre.end() ? "missing pre wave" : "missing post wave"});
      continue;
    }
    for (auto m : kAllMeasures) {
      auto x = a->second.get(m);
      auto y = b->second.get(m);
      if (!x && !y) continue;
      if (!x || !y) {
        rep.exclusions.push_back({id, m, !x ? "missing pre score" : "missing post score"});
        continue;
      }
      auto key = std::make_tuple(m, arm->second.arm, arm->second.respondent);
      groups[key].push_back(*y - *x);
      members[key].push_back(id);
    }
  }
  for (auto m : kAllMeasures)
    for (auto arm : kAllArms)
      for (auto r : kAllRespondents) {
        DeltaOutcome o{m, arm, r, std::nullopt, {}};
        auto key = std::make_tuple(m, arm, r);
        if (auto it = groups.find(key); it != groups.end()) {
          o.delta = describe(it->second);
          o.participants = members[key];
        }
        rep.outcomes.push_back(std::move(o));
      }
  return rep;
}

DeltaReport compute_deltas(const std::vector<Record>& pre, const std::vector<Record>& post,
                           const std::map<std::string, ArmAssignment>& arms, const InstrumentSet& ins) {
  std::vector<Exclusion> excl;
  auto a = score_wave(pre, Wave::pre, ins, &excl);
  auto b = score_wave(post, Wave::post, ins, &excl);
  auto rep = compute_deltas(a, b, arms);
  rep.exclusions.insert(rep.exclusions.begin(), excl.begin(), excl.end());
  return rep;
}

}  // namespace clara::analytics
