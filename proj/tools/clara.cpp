#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "clara/analytics/tables.hpp"
#include "clara/dyad/config.hpp"
#include "clara/dyad/http_api.hpp"
#include "clara/dyad/service.hpp"
#include "clara/flows/bundle.hpp"
#include "clara/flows/routing.hpp"

namespace fs = std::filesystem;
using namespace clara;

namespace {

dyad::ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

Audience audience_arg(const std::string& s) {
  auto a = parse_audience(s);
  if (!a || *a == Audience::both) throw CLI::ValidationError("--audience", "must be parent or adolescent");
  return *a;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  out << text;
}

int run_validate(const std::string& file, const std::string& audience, bool json, const std::string& bundle_arg) {
  fs::path path(file);
  const auto dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  try {
    if (path.extension() == ".clara-game") {
      auto forest = game::parse_forest(flows::read_file(path));
      std::vector<std::string> registry;
      if (fs::exists(dir / "facts.tsv"))
        for (const auto& f : flows::parse_facts_tsv(flows::read_file(dir / "facts.tsv"))) registry.push_back(f.tag);
      auto problems = game::check_forest(forest, registry);
      if (json) {
        nlohmann::ordered_json j{{"ok", problems.empty()}, {"problems", problems}};
        std::cout << j.dump(2) << '\n';
      } else if (problems.empty()) {
        std::cout << "ok: no issues\n";
      } else {
        for (const auto& p : problems) std::cout << "error: " << p << '\n';
      }
      return problems.empty() ? 0 : 1;
    }
    auto script = script::parse_script(flows::read_file(path), flows::directory_resolver(dir));
    script::ValidationOptions opts;
    auto functions = flows::builtin_functions();
    opts.functions = &functions;
    if (!audience.empty()) opts.audience = audience_arg(audience);
    fs::path bundle_dir = bundle_arg.empty() ? dir : fs::path(bundle_arg);
    if (fs::exists(bundle_dir / "forest.clara-game")) {
      auto forest = game::parse_forest(flows::read_file(bundle_dir / "forest.clara-game"));
      for (const auto& a : forest.areas)
        if (a.riddle) opts.riddle_tags[a.id] = a.riddle->tag;
    }
    auto report = script::validate_script(script, opts);
    if (json) std::cout << script::to_json(report).dump(2) << '\n';
    else std::cout << script::to_text(report);
    return report.has_errors() ? 1 : 0;
  } catch (const ParseError& e) {
    if (json) {
      nlohmann::ordered_json j{{"ok", false},
                               {"parse_error",
                                {{"code", to_string(e.code())}, {"line", e.line()}, {"column", e.column()}, {"detail", e.detail()}}}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cerr << file << ":" << e.line() << ":" << e.column() << ": " << to_string(e.code()) << ": " << e.detail()
                << '\n';
    }
    return 2;
  }
}

int run_analyze(const std::string& pre, const std::string& post, const std::string& arms, const std::string& out,
                const std::string& instruments_file, const std::string& bundle_arg) {
  auto pre_records = analytics::parse_records_csv(flows::read_file(pre));
  auto post_records = analytics::parse_records_csv(flows::read_file(post));
  auto arm_map = analytics::parse_arms_csv(flows::read_file(arms));
  analytics::InstrumentSet ins;
  if (!instruments_file.empty()) {
    ins = analytics::parse_instruments_csv(flows::read_file(instruments_file));
  } else {
    auto dir = bundle_arg.empty() ? flows::default_bundle_dir() : fs::path(bundle_arg);
    std::vector<std::pair<std::string, bool>> key;
    for (const auto& f : flows::parse_facts_tsv(flows::read_file(dir / "facts.tsv"))) key.emplace_back(f.tag, f.truth);
    ins = analytics::default_instruments(key);
  }
  fs::create_directories(out);
  auto deltas = analytics::compute_deltas(pre_records, post_records, arm_map, ins);
  write_file(fs::path(out) / "table2.txt", analytics::render_table2_text(deltas));
  write_file(fs::path(out) / "table2.json", analytics::table2_json(deltas).dump(2) + "\n");
  write_file(fs::path(out) / "exclusions.json", analytics::exclusions_json(deltas.exclusions).dump(2) + "\n");
  auto ratings = analytics::table1_from_records(post_records, arm_map, ins);
  if (!ratings.rows.empty()) {
    write_file(fs::path(out) / "table1.txt", analytics::render_table1_text(ratings));
    write_file(fs::path(out) / "table1.json", analytics::table1_json(ratings).dump(2) + "\n");
  }
  auto reference = analytics::table1_from_reference();
  write_file(fs::path(out) / "table1_reference.txt", analytics::render_table1_text(reference));
  write_file(fs::path(out) / "table1_reference.json", analytics::table1_json(reference).dump(2) + "\n");
  auto check = analytics::check_table1();
  write_file(fs::path(out) / "discrepancies.txt", analytics::render_discrepancies_text(check));
  write_file(fs::path(out) / "discrepancies.json", analytics::discrepancies_json(check).dump(2) + "\n");
  std::cout << analytics::render_table2_text(deltas);
  std::cout << deltas.exclusions.size() << " exclusion(s); outputs written to " << out << '\n';
  return 0;
}

int run_play(const std::string& audience, std::uint64_t seed, const std::vector<std::size_t>& choices,
             const std::vector<std::string>& binds, bool timestamps, const std::string& bundle_arg) {
  auto bundle = flows::load_bundle(bundle_arg.empty() ? flows::default_bundle_dir() : fs::path(bundle_arg));
  auto aud = audience_arg(audience);
  engine::Bindings bindings;
  for (const auto& b : binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--bind", "expected name=value");
    bindings[b.substr(0, eq)] = b.substr(eq + 1);
  }
  auto eng = bundle.engine_for(aud);
  auto s = eng.replay(aud, bindings, seed, choices);
  std::cout << engine::transcript_jsonl(s.transcript, timestamps);
  if (s.finished) {
    std::cerr << "session finished\n";
  } else {
    std::cerr << "next choices:\n";
    for (const auto& c : eng.current_step(s).choices) std::cerr << "  " << c.index << ": " << c.label << '\n';
  }
  return 0;
}

int run_serve(dyad::ServiceConfig cfg) {
  dyad::ServiceOptions opts;
  auto dir = cfg.bundle_dir.empty() ? flows::default_bundle_dir() : cfg.bundle_dir;
  opts.bundle = std::make_shared<flows::Bundle>(flows::load_bundle(dir));
  opts.storage_path = cfg.storage_path;
  if (!cfg.clinic_endpoint.empty()) opts.transport = dyad::make_transport(cfg.clinic_endpoint);
  dyad::DyadService service(std::move(opts));
  dyad::ApiServer server(service, cfg.api_token);
  auto [host, port] = dyad::parse_bind_address(cfg.bind_address);
  int bound = server.bind(host, port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "clara listening on " << host << ":" << bound << " (bundle " << dir.string() << ", "
            << service.log_size() << " log records replayed)\n";
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clara: dialogue scripts, dyad service and study analytics"};
  app.require_subcommand(1);
  std::string bundle;
  app.add_option("--bundle", bundle, "Content bundle directory");

  auto* validate = app.add_subcommand("validate", "Parse and statically check a script or forest file");
  std::string v_file, v_audience;
  bool v_json = false;
  validate->add_option("file", v_file, "Script (.clara) or forest (.clara-game) file")->required()->check(CLI::ExistingFile);
  validate->add_option("--audience", v_audience, "Fix the audience during guard analysis")
      ->check(CLI::IsMember({"parent", "adolescent"}));
  validate->add_flag("--json", v_json, "Machine-readable report");

  auto* analyze = app.add_subcommand("analyze", "Score pre/post records and emit study tables");
  std::string a_pre, a_post, a_arms, a_out, a_instruments;
  analyze->add_option("--pre", a_pre, "Pre-wave records")->required()->check(CLI::ExistingFile);
  analyze->add_option("--post", a_post, "Post-wave records")->required()->check(CLI::ExistingFile);
  analyze->add_option("--arms", a_arms, "Arm assignments")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", a_out, "Output directory")->required();
  analyze->add_option("--instruments", a_instruments, "Instrument definitions")->check(CLI::ExistingFile);

  auto* play = app.add_subcommand("play", "Replay a choice sequence and print the transcript");
  std::string p_audience = "parent";
  std::uint64_t p_seed = 1;
  std::vector<std::size_t> p_choices;
  std::vector<std::string> p_binds;
  bool p_ts = false;
  play->add_option("--audience", p_audience)->check(CLI::IsMember({"parent", "adolescent"}));
  play->add_option("--seed", p_seed);
  play->add_option("--choices", p_choices, "Choice indices")->delimiter(',');
  play->add_option("--bind", p_binds, "Slot binding name=value");
  play->add_flag("--timestamps", p_ts, "Include event timestamps");

  auto* serve = app.add_subcommand("serve", "Run the dyad HTTP service");
  auto cfg = dyad::load_config();
  serve->add_option("--bind-address", cfg.bind_address, "host:port (CLARA_BIND_ADDRESS)");
  serve->add_option("--storage", cfg.storage_path, "Event log path (CLARA_STORAGE_PATH)");
  serve->add_option("--endpoint", cfg.clinic_endpoint, "Clinic endpoint URL (CLARA_CLINIC_ENDPOINT)");
  serve->add_option("--token", cfg.api_token, "Bearer token (CLARA_API_TOKEN)");

  auto* table1 = app.add_subcommand("table1", "Reproduce the published rating table from its means and SDs");
  std::size_t n_parent = 17, n_child = 8;
  bool t_json = false;
  table1->add_option("--n-parent", n_parent);
  table1->add_option("--n-child", n_child);
  table1->add_flag("--json", t_json);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*validate) return run_validate(v_file, v_audience, v_json, bundle);
    if (*analyze) return run_analyze(a_pre, a_post, a_arms, a_out, a_instruments, bundle);
    if (*play) return run_play(p_audience, p_seed, p_choices, p_binds, p_ts, bundle);
    if (*serve) {
      if (!bundle.empty()) cfg.bundle_dir = bundle;
      return run_serve(cfg);
    }
    if (*table1) {
      auto t = analytics::table1_from_reference(n_parent, n_child);
      auto check = analytics::check_table1(n_parent, n_child);
      if (t_json) {
        nlohmann::ordered_json j{{"table", analytics::table1_json(t)}, {"reproduction", analytics::discrepancies_json(check)}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << analytics::render_table1_text(t) << '\n' << analytics::render_discrepancies_text(check);
      }
      return 0;
    }
  } catch (const ReplayError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
