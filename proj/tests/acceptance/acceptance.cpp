// One line per primary acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clara/analytics/scoring.hpp"
#include "clara/analytics/tables.hpp"
#include "clara/dyad/service.hpp"
#include "clara/flows/routing.hpp"
#include "clara/game/forest.hpp"
#include "support.hpp"

using namespace clara;
namespace ct = clara::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, const std::function<Outcome()>& fn) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  auto ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %8.1f ms  %s\n", o.pass ? "PASS" : "FAIL", name, ms, o.detail.c_str());
  std::fflush(stdout);
}

double elapsed_s(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome table1_reproduction() {
  auto t0 = Clock::now();
  auto rep = analytics::check_table1(17, 8, 0.03);
  auto secs = elapsed_s(t0);
  bool flagged = false;
  for (const auto& d : rep.discrepancies())
    if (d.label.rfind("My child enjoyed interacting", 0) == 0 && d.respondent == analytics::Respondent::parent)
      flagged = true;
  std::ostringstream os;
  os << rep.matched() << "/" << rep.testable() << " cells reproduced, discrepant row "
     << (flagged ? "reported" : "missing") << ", " << secs << " s";
  bool pass = rep.testable() >= 21 && rep.testable() - rep.matched() <= 1 && flagged && secs < 1.0;
  return {pass, os.str()};
}

Outcome t_numerics() {
  auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t points = 0;
  for (int df = 1; df <= 50; ++df) {
    for (int k = -200; k <= 200; ++k) {
      double t = k * 0.05;
      double got = analytics::student_t_two_sided_p(t, df);
      double want = ct::t_two_sided_p_oracle(t, df);
      worst = std::max(worst, std::fabs(got - want));
      ++points;
    }
  }
  auto secs = elapsed_s(t0);
  std::ostringstream os;
  os << points << " points, max |Δp| = " << worst << ", " << secs << " s";
  return {points >= 2000 && worst <= 1e-6 && secs < 10.0, os.str()};
}

Outcome table2_pipeline() {
  auto dir = ct::data_dir() / "table2";
  auto pre = analytics::parse_records_csv(ct::slurp(dir / "pre.csv"));
  auto post = analytics::parse_records_csv(ct::slurp(dir / "post.csv"));
  auto arms = analytics::parse_arms_csv(ct::slurp(dir / "arms.csv"));
  auto ins = analytics::parse_instruments_csv(ct::slurp(dir / "instruments.csv"));
  auto rep = analytics::compute_deltas(pre, post, arms, ins);
  auto expected = nlohmann::json::parse(ct::slurp(dir / "expected.json"));
  std::size_t exact = 0, printed = 0;
  for (const auto& e : expected) {
    auto m = e.at("measure").get<std::string>() == "knowledge" ? analytics::Measure::knowledge
             : e.at("measure").get<std::string>() == "attitude" ? analytics::Measure::attitude
                                                                 : analytics::Measure::intent;
    auto arm = *parse_arm(e.at("arm").get<std::string>());
    auto resp = *analytics::parse_respondent(e.at("respondent").get<std::string>());
    const auto& cell = rep.at(m, arm, resp);
    if (!cell.delta) continue;
    double want = double(e.at("mean_num").get<long>()) / e.at("mean_den").get<long>();
    if (std::fabs(cell.delta->mean - want) < 1e-12 && cell.delta->n == e.at("n").get<std::size_t>()) ++exact;
    if (analytics::render_number(cell.delta->mean) == analytics::render_number(e.at("published_mean").get<double>()))
      ++printed;
  }
  // Table layout: three measure rows, six M/SD column pairs, child knowledge absent.
  auto text = analytics::render_table2_text(rep);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::vector<std::string> expect_rows;
  for (auto m : analytics::kAllMeasures) {
    std::string row(analytics::measure_label(m));
    for (auto arm : kAllArms)
      for (auto r : analytics::kAllRespondents) {
        const analytics::PublishedDelta* pub = nullptr;
        for (const auto& p : analytics::reference_table2())
          if (p.measure == m && p.arm == arm && p.respondent == r) pub = &p;
        row += "|" + (pub ? analytics::render_number(pub->mean) + "|" + analytics::render_number(pub->sd)
                          : std::string("–|–"));
      }
    expect_rows.push_back(row);
  }
  std::size_t layout = 0;
  for (const auto& want : expect_rows) {
    for (const auto& l : lines) {
      std::istringstream ws(l);
      std::vector<std::string> words;
      for (std::string w; ws >> w;) words.push_back(w);
      if (words.size() < 12) continue;
      std::string label;
      for (std::size_t i = 0; i + 12 < words.size(); ++i) label += (label.empty() ? "" : " ") + words[i];
      std::string row = label;
      for (std::size_t i = words.size() - 12; i < words.size(); ++i) row += "|" + words[i];
      if (row == want) ++layout;
    }
  }
  std::ostringstream os;
  os << exact << "/15 cells equal constructed means, " << printed << "/15 print as published, " << layout
     << "/3 rows match published layout, " << rep.exclusions.size() << " exclusions";
  return {exact == 15 && printed == 15 && layout == 3 && rep.exclusions.empty(), os.str()};
}

Outcome determinism() {
  std::size_t same = 0, total = 0;
  for (auto aud : {Audience::parent, Audience::adolescent}) {
    auto walker = ct::fixture_engine(aud);
    std::mt19937_64 rng(aud == Audience::parent ? 11 : 12);
    for (int i = 0; i < 100; ++i) {
      std::uint64_t seed = rng();
      auto choices = ct::random_walk(walker, aud, seed, rng);
      auto a = ct::fixture_engine(aud).replay(aud, ct::default_bindings(aud), seed, choices);
      auto b = ct::bundle().engine_for(aud).replay(aud, ct::default_bindings(aud), seed, choices);
      ++total;
      if (engine::transcript_jsonl(a.transcript, false) == engine::transcript_jsonl(b.transcript, false) &&
          a.equivalent(b))
        ++same;
    }
  }
  std::ostringstream os;
  os << same << "/" << total << " sequences replay byte-identically";
  return {same == total && total == 200, os.str()};
}

Outcome routing_matrix() {
  using flows::CoachingVariant;
  using flows::PhaseBody;
  std::size_t ok = 0, cases = 0;
  for (auto aud : {Audience::parent, Audience::adolescent})
    for (auto stage : kAllStages)
      for (bool opt : {false, true}) {
        PhaseBody body = stage == StageOfChange::Precontemplation ? PhaseBody::mi
                         : aud == Audience::adolescent && stage == StageOfChange::Contemplation && opt
                             ? PhaseBody::game
                             : PhaseBody::education;
        bool ready = stage >= StageOfChange::Preparation;
        CoachingVariant coach = aud == Audience::parent
                                    ? (ready ? CoachingVariant::parent_ready_informational
                                             : CoachingVariant::parent_hesitant_exploratory)
                                    : (ready ? CoachingVariant::adolescent_ready_express
                                             : CoachingVariant::adolescent_unsure_voice);
        ++cases;
        if (flows::select_phase_body(aud, stage, opt) == body && flows::select_coaching(aud, stage) == coach) ++ok;
      }
  std::ostringstream os;
  os << ok << "/" << cases << " cases agree with the decision tables";
  return {ok == cases && cases == 20, os.str()};
}

Outcome content_parity() {
  std::set<std::string> registry;
  for (const auto& f : ct::bundle().facts) registry.insert(f.tag);
  std::ostringstream os;
  bool pass = true;
  std::set<std::set<std::string>> all;
  for (auto aud : {Audience::parent, Audience::adolescent}) {
    auto ex = ct::explore(ct::bundle().engine_for(aud), aud, ct::default_bindings(aud));
    os << to_string(aud) << ": " << ex.nodes << " states, " << ex.complete << " complete, "
       << ex.complete_tag_sets.size() << " distinct tag set(s); ";
    if (ex.complete == 0) pass = false;
    all.insert(ex.complete_tag_sets.begin(), ex.complete_tag_sets.end());
  }
  pass = pass && all.size() == 1 && *all.begin() == registry;
  os << (pass ? "every complete path presents all " : "parity broken; registry has ") << registry.size() << " facts";
  return {pass, os.str()};
}

std::set<std::string> oracle_frontier(const game::Forest& forest, const std::set<std::string>& unlocked) {
  std::set<std::string> out;
  for (const auto& a : forest.areas)
    if (unlocked.count(a.id))
      for (const auto& x : a.exits)
        if (!unlocked.count(x)) out.insert(x);
  return out;
}

engine::SessionState play_game_correctly(const engine::Engine& eng, std::uint64_t seed) {
  const auto& forest = *ct::bundle().forest;
  auto aud = Audience::adolescent;
  // welcome, permission, no doses, unsure intent (Contemplation), take the forest game
  std::vector<std::size_t> prefix{0, 0, 0, 2, 0};
  auto s = eng.replay(aud, ct::default_bindings(aud), seed, prefix);
  std::mt19937_64 rng(seed);
  for (int guard = 0; guard < 200 && !s.finished && s.current.network == "game"; ++guard) {
    auto step = eng.current_step(s);
    std::size_t pick = 0;
    if (step.riddle) pick = forest.find(step.riddle->area)->riddle->correct;
    else pick = std::uniform_int_distribution<std::size_t>(0, step.choices.size() - 1)(rng);
    s = eng.advance(s, pick);
  }
  return s;
}

Outcome game_gate() {
  const auto& forest = *ct::bundle().forest;
  std::mt19937_64 rng(2024);
  std::size_t violations = 0, unlocks = 0, attempts = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    auto p = game::start_game(forest, game::kAllRoles[seq % 5]);
    for (int k = 0; k < 40; ++k) {
      const auto& area = forest.areas[std::uniform_int_distribution<std::size_t>(0, forest.areas.size() - 1)(rng)];
      std::size_t opts = area.riddle ? area.riddle->options.size() : 3;
      std::size_t answer = std::uniform_int_distribution<std::size_t>(0, opts)(rng);
      auto frontier = oracle_frontier(forest, p.unlocked);
      ++attempts;
      game::GameProgress next;
      try {
        next = game::attempt_riddle(p, forest, area.id, answer);
      } catch (const Error&) {
        continue;
      }
      std::set<std::string> gained;
      for (const auto& u : next.unlocked)
        if (!p.unlocked.count(u)) gained.insert(u);
      bool legit = area.riddle && frontier.count(area.id) && answer == area.riddle->correct;
      if (!gained.empty() && (!legit || gained != std::set<std::string>{area.id})) ++violations;
      if (legit && gained.empty()) ++violations;
      for (const auto& u : p.unlocked)
        if (!next.unlocked.count(u)) ++violations;
      unlocks += gained.size();
      p = std::move(next);
    }
  }
  auto eng = ct::bundle().engine_for(Audience::adolescent);
  auto s = play_game_correctly(eng, 5);
  std::set<std::string> riddle_tags;
  for (const auto& a : forest.areas)
    if (a.riddle) riddle_tags.insert(a.riddle->tag);
  std::size_t mastered = 0;
  for (const auto& t : riddle_tags)
    if (auto it = s.facts.find(t); it != s.facts.end() && it->second == engine::FactStatus::mastered) ++mastered;
  bool complete = s.game && game::game_completion_summary(*s.game, forest).complete;
  std::ostringstream os;
  os << attempts << " adversarial attempts, " << unlocks << " legitimate unlocks, " << violations
     << " violations; fixture game mastered " << mastered << "/" << riddle_tags.size() << " facts";
  return {violations == 0 && riddle_tags.size() == 10 && mastered == 10 && complete, os.str()};
}

/// Complete (non-exit) choice sequences for one audience, generated with session seed 7.
std::vector<std::vector<std::size_t>> finishing_walks(Audience aud, std::size_t count, std::uint64_t seed) {
  auto eng = ct::bundle().engine_for(aud);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> out;
  while (out.size() < count) {
    auto c = ct::random_walk(eng, aud, 7, rng, 2000);
    auto s = eng.replay(aud, ct::default_bindings(aud), 7, c);
    if (s.finished && !eng.script().find_state(s.current)->exit) out.push_back(std::move(c));
  }
  return out;
}

std::shared_ptr<const flows::Bundle> shared_bundle() {
  static auto b = std::make_shared<const flows::Bundle>(ct::bundle());
  return b;
}

dyad::ServiceOptions service_options(std::shared_ptr<dyad::Transport> transport = {}) {
  dyad::ServiceOptions o;
  o.bundle = shared_bundle();
  o.transport = std::move(transport);
  o.clock = [] { return engine::Clock::time_point(std::chrono::seconds(1714555800)); };
  o.seed_source = [] { return std::uint64_t{7}; };
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

void drive(dyad::DyadService& svc, const std::string& session, const std::vector<std::size_t>& choices) {
  for (auto c : choices) svc.choose(session, c);
}

Outcome report_integrity() {
  auto parent_walks = finishing_walks(Audience::parent, 12, 1);
  auto teen_walks = finishing_walks(Audience::adolescent, 12, 2);
  std::vector<std::pair<std::string, std::string>> menu;
  for (const auto& [topic, texts] : flows::question_menu())
    for (const auto& t : texts) menu.emplace_back(topic, t);

  std::mt19937_64 rng(99);
  std::size_t trials = 0, dup_or_missing = 0, order_bad = 0, idem_bad = 0, reports_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto inbox = std::make_shared<dyad::InboxTransport>();
    dyad::DyadService svc(service_options(inbox));
    auto d = svc.create_dyad(Arm::CHILD, "2024-06-01", "clinic-7");
    auto ps = svc.start_session(d.id, Audience::parent, ct::default_bindings(Audience::parent)).session_id;
    auto as = svc.start_session(d.id, Audience::adolescent, ct::default_bindings(Audience::adolescent)).session_id;
    drive(svc, ps, parent_walks[rng() % parent_walks.size()]);
    drive(svc, as, teen_walks[rng() % teen_walks.size()]);
    ++trials;

    auto check_order = [&](const dyad::ClinicReport& r) {
      ++reports_seen;
      bool parent_seen = false;
      for (const auto& q : r.questions) {
        if (q.author == Audience::parent) parent_seen = true;
        else if (parent_seen) {
          ++order_bad;
          return;
        }
      }
    };
    for (int op = 0; op < 25; ++op) {
      switch (rng() % 4) {
        case 0:
        case 1: {
          const auto& [topic, text] = menu[rng() % menu.size()];
          svc.flag_question(d.id, rng() % 2 ? Audience::parent : Audience::adolescent, topic, text);
          break;
        }
        case 2:
          check_order(svc.compile_report(d.id));
          break;
        case 3: {
          int mode = static_cast<int>(rng() % 4);
          if (mode == 1) inbox->fail_next(static_cast<int>(rng() % 6));
          if (mode == 2) inbox->drop_ack_next(1 + static_cast<int>(rng() % 2));
          try {
            auto r1 = svc.transmit_report(d.id);
            auto docs = inbox->documents().size();
            auto r2 = svc.transmit_report(d.id);
            auto grown = inbox->documents().size() - docs;
            if (r2.sequence == r1.sequence ? !(r1 == r2) || grown != 0 : r2.sequence != r1.sequence + 1 || grown != 1)
              ++idem_bad;
          } catch (const dyad::DeliveryError&) {
          }
          break;
        }
      }
    }
    inbox->fail_next(0);
    inbox->drop_ack_next(0);
    for (int k = 0; k < 2; ++k) svc.transmit_report(d.id);
    auto reports = svc.reports(d.id);
    auto receipts = svc.receipts(d.id);
    std::map<std::string, int> occurrences;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      check_order(reports[i]);
      if (i >= receipts.size()) continue;
      for (const auto& q : reports[i].questions)
        ++occurrences[std::string(to_string(q.author)) + "|" + q.topic + "|" + q.text];
    }
    for (const auto& q : svc.questions(d.id)) {
      auto key = std::string(to_string(q.author)) + "|" + q.topic + "|" + q.text;
      if (occurrences[key] != 1) ++dup_or_missing;
      occurrences.erase(key);
    }
    for (const auto& [k, n] : occurrences)
      if (n != 0) ++dup_or_missing;
    auto docs = inbox->documents();
    if (docs.size() != receipts.size()) ++idem_bad;
    for (const auto& r : receipts) {
      auto it = docs.find(r.idempotency_key);
      if (it == docs.end()) {
        ++idem_bad;
        continue;
      }
      auto stored = dyad::report_from_json(nlohmann::json::parse(it->second));
      if (dyad::report_hash(stored) != r.report_hash) ++idem_bad;
    }
  }
  std::ostringstream os;
  os << trials << " interleavings, " << reports_seen << " reports checked; " << dup_or_missing
     << " duplicate/missing questions, " << order_bad << " ordering faults, " << idem_bad << " idempotency faults";
  return {dup_or_missing == 0 && order_bad == 0 && idem_bad == 0 && trials == 60, os.str()};
}

Outcome arm_enforcement() {
  dyad::DyadService svc(service_options());
  std::size_t ok = 0, cases = 0;
  std::ostringstream os;
  for (auto arm : kAllArms) {
    os << to_string(arm) << ":";
    for (auto role : {Audience::parent, Audience::adolescent}) {
      auto d = svc.create_dyad(arm, "2024-06-01", "clinic-1");
      bool expected = arm == Arm::CHILD || (arm == Arm::PARENT && role == Audience::parent);
      bool allowed = true;
      try {
        svc.start_session(d.id, role, ct::default_bindings(role));
      } catch (const Error& e) {
        allowed = false;
        if (e.code() != ErrorCode::ArmViolation) allowed = true;
      }
      ++cases;
      if (allowed == expected) ++ok;
      os << " " << to_string(role) << (allowed ? "=yes" : "=no");
    }
    os << "; ";
  }
  os << ok << "/" << cases << " match";
  return {ok == cases && cases == 6, os.str()};
}

Outcome knowledge_totality() {
  auto keyv = ct::bundle().answer_key();
  bool key[10];
  for (int i = 0; i < 10; ++i) key[i] = keyv[static_cast<std::size_t>(i)];
  std::size_t agree = 0, total = 0;
  std::vector<analytics::KnowledgeAnswer> answers(10);
  for (int code = 0; code < 59049; ++code) {
    int c = code;
    for (int i = 0; i < 10; ++i, c /= 3) answers[static_cast<std::size_t>(i)] = static_cast<analytics::KnowledgeAnswer>(c % 3);
    int oracle = 0;
    for (int i = 0; i < 10; ++i)
      oracle += answers[static_cast<std::size_t>(i)] == (key[i] ? analytics::KnowledgeAnswer::answer_true : analytics::KnowledgeAnswer::answer_false);
    auto s = analytics::score_knowledge(answers, std::span<const bool>(key, 10));
    ++total;
    if (s.count == oracle && std::fabs(s.proportion - oracle / 10.0) < 1e-12) ++agree;
  }
  std::ostringstream os;
  os << agree << "/" << total << " answer vectors agree with the counting oracle";
  return {agree == total && total == 59049, os.str()};
}

struct Op {
  enum Kind { choose, flag, compile } kind;
  Audience who;
  std::size_t index = 0;
  std::string topic, text;
};

Outcome crash_recovery() {
  auto pw = finishing_walks(Audience::parent, 1, 31)[0];
  auto aw = finishing_walks(Audience::adolescent, 1, 32)[0];
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  std::mt19937_64 rng(5);
  while (i < pw.size() || j < aw.size()) {
    bool take_parent = j >= aw.size() || (i < pw.size() && rng() % 2);
    if (take_parent) ops.push_back({Op::choose, Audience::parent, pw[i++], {}, {}});
    else ops.push_back({Op::choose, Audience::adolescent, aw[j++], {}, {}});
  }
  ops.push_back({Op::flag, Audience::parent, 0, "safety", flows::question_menu().at("safety").front()});
  ops.push_back({Op::flag, Audience::adolescent, 0, "efficacy", flows::question_menu().at("efficacy").front()});
  ops.push_back({Op::compile, Audience::parent, 0, {}, {}});

  struct Ids {
    std::string dyad, parent, teen;
  };
  auto setup = [](dyad::DyadService& svc) {
    auto d = svc.create_dyad(Arm::CHILD, "2024-06-01", "clinic-3");
    Ids ids{d.id, {}, {}};
    ids.parent = svc.start_session(d.id, Audience::parent, ct::default_bindings(Audience::parent)).session_id;
    ids.teen = svc.start_session(d.id, Audience::adolescent, ct::default_bindings(Audience::adolescent)).session_id;
    return ids;
  };
  auto apply = [](dyad::DyadService& svc, const Ids& ids, const Op& op) {
    switch (op.kind) {
      case Op::choose:
        svc.choose(op.who == Audience::parent ? ids.parent : ids.teen, op.index);
        break;
      case Op::flag:
        svc.flag_question(ids.dyad, op.who, op.topic, op.text);
        break;
      case Op::compile:
        svc.compile_report(ids.dyad);
        break;
    }
  };

  dyad::DyadService golden(service_options());
  auto gids = setup(golden);
  for (const auto& op : ops) apply(golden, gids, op);
  auto golden_snapshot = golden.snapshot().dump();
  auto golden_parent = engine::transcript_jsonl(golden.session(gids.parent).transcript, false);
  auto golden_teen = engine::transcript_jsonl(golden.session(gids.teen).transcript, false);

  auto dir = std::filesystem::temp_directory_path() / ("clara_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::size_t kills = 0, equal = 0;
  for (std::size_t cut = 0; cut <= ops.size(); cut += std::max<std::size_t>(1, ops.size() / 12)) {
    auto path = dir / ("log_" + std::to_string(cut) + ".jsonl");
    std::filesystem::remove(path);
    auto opts = service_options();
    opts.storage_path = path;
    Ids ids;
    {
      dyad::DyadService first(opts);
      ids = setup(first);
      for (std::size_t k = 0; k < cut; ++k) apply(first, ids, ops[k]);
    }
    {
      std::ofstream torn(path, std::ios::app | std::ios::binary);
      torn << R"({"kind":"choice","session":"S0001","ind)";
    }
    ++kills;
    dyad::DyadService second(opts);
    for (std::size_t k = cut; k < ops.size(); ++k) apply(second, ids, ops[k]);
    bool same = second.snapshot().dump() == golden_snapshot &&
                engine::transcript_jsonl(second.session(ids.parent).transcript, false) == golden_parent &&
                engine::transcript_jsonl(second.session(ids.teen).transcript, false) == golden_teen;
    if (same) ++equal;
  }
  std::filesystem::remove_all(dir);
  std::ostringstream os;
  os << equal << "/" << kills << " kill points recover to the golden run (" << ops.size() << " operations)";
  return {equal == kills && kills >= 10, os.str()};
}

}  // namespace

int main() {
  run("table1-reproduction", table1_reproduction);
  run("t-distribution-numerics", t_numerics);
  run("table2-pipeline", table2_pipeline);
  run("determinism", determinism);
  run("routing-matrix", routing_matrix);
  run("content-parity", content_parity);
  run("game-gate-soundness", game_gate);
  run("report-integrity", report_integrity);
  run("arm-enforcement", arm_enforcement);
  run("knowledge-scoring-totality", knowledge_totality);
  run("crash-recovery", crash_recovery);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
