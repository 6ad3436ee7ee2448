// covert: analytic queries, Monte Carlo runs, figure sweeps, redundancy
// optimisation and an end-to-end coded transfer demo for covert mobile
// message passing over relays on a complete graph.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covert/analytic.hpp"
#include "covert/codec.hpp"
#include "covert/config.hpp"
#include "covert/demo.hpp"
#include "covert/optimizer.hpp"
#include "covert/params.hpp"
#include "covert/simcore.hpp"
#include "covert/sweep.hpp"

namespace {

using covert::DelayModel;
using covert::ParameterError;
using covert::SystemParams;
using nlohmann::ordered_json;
namespace analytic = covert::analytic;
namespace sim = covert::sim;
namespace sweep = covert::sweep;
namespace opt = covert::opt;

struct Options {
  SystemParams::Raw raw;
  std::string model = "1";
  std::string walk = "iid";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  bool json = false;
  std::string preset;
  std::string config;
  std::string k_list, n_list, r_list;
  bool no_sim = false;
  std::string transcript;
  std::uint64_t transcript_trials = 1;
  std::string message;
  std::string message_file;
  std::int64_t r_max = 60;
};

void add_param_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--s", o.raw.s, "vertices of the complete graph")->capture_default_str();
  cmd->add_option("--r", o.raw.r, "number of relays")->capture_default_str();
  cmd->add_option("--m", o.raw.m, "message length in bits")->capture_default_str();
  cmd->add_option("--k", o.raw.k, "data chunks")->capture_default_str();
  cmd->add_option("--n", o.raw.n, "coded chunks")->capture_default_str();
  cmd->add_option("--lambda", o.raw.lambda, "transmission tail rate")->capture_default_str();
  cmd->add_option("--w", o.raw.w, "warden arrival window U(0, w)")->capture_default_str();
  cmd->add_option("--model", o.model, "delay model")->check(CLI::IsMember({"1", "2"}))->capture_default_str();
  cmd->add_option("--config", o.config, "flat key = value file; explicit flags override it");
  cmd->add_flag("--json", o.json, "print a JSON object instead of text/CSV");
}

void add_sim_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--walk", o.walk, "walk model")->check(CLI::IsMember({"iid", "noselfloop"}))->capture_default_str();
  cmd->add_option("--trials", o.trials, "Monte Carlo trials")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--out", o.out, "write CSV to this path instead of stdout");
}

void take_last(CLI::App* cmd) {
  for (auto* opt : cmd->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write output file '" + path + "'");
  file << text;
  if (!file) throw std::runtime_error("failed writing output file '" + path + "'");
}

ordered_json params_json(const SystemParams& p) {
  return ordered_json{{"s", p.s()}, {"r", p.r()}, {"m", p.m()}, {"k", p.k()},
                      {"n", p.n()}, {"lambda", p.lambda()}, {"w", p.w()}};
}

void check_trials(const Options& o) {
  if (o.trials == 0) throw CLI::ValidationError("--trials", "must be >= 1");
}

// ---------------------------------------------------------------------------

int cmd_analytic(const Options& o) {
  const auto p = SystemParams::make(o.raw);
  const auto model = covert::parse_delay_model(o.model);
  const double pd = analytic::detection_probability(p);
  const double pc = analytic::covertness_probability(p);
  const double dis = analytic::expected_dissemination(p, model);
  const double col = analytic::expected_collection(p, model);
  const double tot = analytic::expected_total(p, model);
  if (o.json) {
    ordered_json j;
    j["model"] = model == DelayModel::Model1 ? 1 : 2;
    j["params"] = params_json(p);
    j["chunk_length"] = p.chunk_length();
    j["p_d"] = pd;
    j["p_c"] = pc;
    j["expected_dissemination"] = dis;
    j["expected_collection"] = col;
    j["expected_total"] = tot;
    if (model == DelayModel::Model2 && p.k() <= p.r())
      j["optimal_n"] = analytic::optimal_n_m2(p.r(), p.k());
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "model      " << covert::to_string(model) << '\n'
            << "params     s=" << p.s() << " r=" << p.r() << " m=" << sweep::format_double(p.m())
            << " k=" << p.k() << " n=" << p.n() << " lambda=" << sweep::format_double(p.lambda())
            << " w=" << sweep::format_double(p.w()) << '\n'
            << "chunk len  " << sweep::format_double(p.chunk_length()) << '\n'
            << "P_d        " << sweep::format_double(pd) << '\n'
            << "P_c        " << sweep::format_double(pc) << '\n'
            << "E[T_dis]   " << sweep::format_double(dis) << '\n'
            << "E[T_col]   " << sweep::format_double(col) << '\n'
            << "E[T_tot]   " << sweep::format_double(tot) << '\n';
  if (model == DelayModel::Model2)
    std::cout << "optimal n  " << analytic::optimal_n_m2(p.r(), p.k()) << '\n';
  return 0;
}

int cmd_simulate(const Options& o) {
  check_trials(o);
  const auto p = SystemParams::make(o.raw);
  const auto model = covert::parse_delay_model(o.model);
  const auto walk = sim::parse_walk_model(o.walk);
  const auto row = sweep::make_row(p, model, walk, o.trials, o.seed, o.threads);

  if (!o.transcript.empty()) {
    std::ofstream log(o.transcript, std::ios::binary);
    if (!log) throw std::runtime_error("cannot write transcript '" + o.transcript + "'");
    const sim::EventSink sink = [&](const sim::Event& e) {
      ordered_json j{{"trial_index", e.trial_index}, {"event_type", sim::to_string(e.type)},
                     {"time", e.time}, {"vertex", e.vertex}, {"chunk_index", e.chunk_index}};
      log << j.dump() << '\n';
    };
    const auto count = std::min(o.transcript_trials, o.trials);
    for (std::uint64_t i = 0; i < count; ++i) sim::replay_trial(p, model, walk, o.seed, i, sink);
  }

  if (o.json) {
    auto j = sweep::to_json(row);
    j["walk"] = sim::to_string(walk);
    write_output(o.out, j.dump(2) + "\n");
  } else {
    write_output(o.out, sweep::to_csv({row}));
  }
  return 0;
}

int cmd_sweep(const Options& o, const CLI::App& cmd) {
  sweep::SweepSpec spec;
  if (!o.preset.empty()) {
    spec = sweep::preset(o.preset);
  } else {
    spec.base = o.raw;
    spec.model = covert::parse_delay_model(o.model);
  }
  // explicit flags refine a preset
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--s")) spec.base.s = o.raw.s;
  if (given("--r")) spec.base.r = o.raw.r;
  if (given("--m")) spec.base.m = o.raw.m;
  if (given("--k")) spec.base.k = o.raw.k;
  if (given("--lambda")) spec.base.lambda = o.raw.lambda;
  if (given("--w")) spec.base.w = o.raw.w;
  if (given("--model")) spec.model = covert::parse_delay_model(o.model);
  if (given("--n")) spec.n_values = {o.raw.n};
  if (given("--k") && o.k_list.empty()) spec.k_values = {o.raw.k};
  if (given("--r") && o.r_list.empty()) spec.r_values.clear();
  if (!o.k_list.empty()) spec.k_values = sweep::parse_int_list(o.k_list);
  if (!o.n_list.empty()) spec.n_values = sweep::parse_int_list(o.n_list);
  if (!o.r_list.empty()) spec.r_values = sweep::parse_int_list(o.r_list);
  spec.walk = sim::parse_walk_model(o.walk);
  spec.trials = o.trials;
  spec.seed = o.seed;
  spec.threads = o.threads;
  spec.simulate = !o.no_sim;
  if (spec.simulate) check_trials(o);

  const auto rows = sweep::run_sweep(spec);
  if (o.json) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) arr.push_back(sweep::to_json(row));
    write_output(o.out, arr.dump(2) + "\n");
  } else {
    write_output(o.out, sweep::to_csv(rows));
  }
  return 0;
}

int cmd_optimize(const Options& o, const CLI::App& cmd) {
  const auto model = covert::parse_delay_model(o.model);
  // the base point only fixes s, r, m, lambda, w; pin k = n = 1 so any r is valid
  auto raw = o.raw;
  raw.k = 1;
  raw.n = 1;
  const auto base = SystemParams::make(raw);

  auto range_of = [&](const std::string& list, opt::IntRange fallback) {
    if (list.empty()) return fallback;
    const auto values = sweep::parse_int_list(list);
    return opt::IntRange{*std::min_element(values.begin(), values.end()),
                         *std::max_element(values.begin(), values.end())};
  };
  opt::IntRange k_range{1, base.r()};
  if (cmd.count("--k")) k_range = {o.raw.k, o.raw.k};
  k_range = range_of(o.k_list, k_range);
  opt::IntRange n_range{1, base.r()};
  if (cmd.count("--n")) n_range = {o.raw.n, o.raw.n};
  n_range = range_of(o.n_list, n_range);

  auto grid = opt::grid_evaluate(base, k_range, n_range, model);
  const auto frontier = opt::pareto_frontier(grid);
  std::optional<opt::OptimalNReport> report;
  if (model == DelayModel::Model2) report = opt::verify_optimal_n(o.r_max);

  if (!o.out.empty()) {
    std::string csv = "k,n,p_c,total_model1,total_model2,on_frontier\n";
    for (const auto& pt : grid) {
      const bool on = std::any_of(frontier.begin(), frontier.end(), [&](const auto& f) {
        return f.k == pt.k && f.n == pt.n;
      });
      csv += std::to_string(pt.k) + ',' + std::to_string(pt.n) + ',' + sweep::format_double(pt.p_c) +
             ',' + sweep::format_double(pt.total_model1) + ',' +
             sweep::format_double(pt.total_model2) + ',' + (on ? "1" : "0") + '\n';
    }
    write_output(o.out, csv);
  }

  const auto best_delay = *std::min_element(grid.begin(), grid.end(), [](const auto& a, const auto& b) {
    return a.delay() < b.delay();
  });

  if (o.json) {
    ordered_json j;
    j["model"] = model == DelayModel::Model1 ? 1 : 2;
    j["grid_points"] = grid.size();
    j["min_delay"] = {{"k", best_delay.k}, {"n", best_delay.n}, {"expected_total", best_delay.delay()}};
    ordered_json f = ordered_json::array();
    for (const auto& pt : frontier)
      f.push_back({{"k", pt.k}, {"n", pt.n}, {"p_c", pt.p_c}, {"expected_total", pt.delay()}});
    j["frontier"] = f;
    if (report) {
      ordered_json mism = ordered_json::array();
      for (const auto& m : report->mismatches)
        mism.push_back({{"r", m.r}, {"k", m.k}, {"closed_form", m.closed_form}, {"exhaustive", m.exhaustive}});
      j["optimal_n_check"] = {{"r_max", report->r_max}, {"cases", report->cases},
                              {"ties", report->ties}, {"mismatches", mism}};
    }
    std::cout << j.dump(2) << '\n';
    return report && !report->mismatches.empty() ? 1 : 0;
  }

  std::cout << "model " << covert::to_string(model) << ", " << grid.size() << " grid points, "
            << frontier.size() << " on the covertness/delay frontier\n";
  std::cout << "min delay at k=" << best_delay.k << " n=" << best_delay.n << " (E[T_tot]="
            << sweep::format_double(best_delay.delay()) << ")\n\n";
  std::cout << "    k     n  P_c                     E[T_tot]\n";
  for (const auto& pt : frontier) {
    char line[128];
    std::snprintf(line, sizeof line, "%5lld %5lld  %-22s  %s\n", static_cast<long long>(pt.k),
                  static_cast<long long>(pt.n), sweep::format_double(pt.p_c).c_str(),
                  sweep::format_double(pt.delay()).c_str());
    std::cout << line;
  }
  if (report) {
    std::cout << "\nverify_optimal_n r_max=" << report->r_max << ": " << report->cases << " cases, "
              << report->ties << " ties, " << report->mismatches.size() << " mismatches\n";
    for (const auto& m : report->mismatches)
      std::cout << "  mismatch r=" << m.r << " k=" << m.k << " closed=" << m.closed_form
                << " scan=" << m.exhaustive << '\n';
    return report->mismatches.empty() ? 0 : 1;
  }
  return 0;
}

std::string printable(const covert::codec::Bytes& bytes) {
  const bool text = std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t c) {
    return c == '\n' || c == '\t' || (c >= 0x20 && c < 0x7f);
  });
  if (text) return std::string(bytes.begin(), bytes.end());
  return "<" + std::to_string(bytes.size()) + " bytes of binary data>";
}

int cmd_demo(const Options& o) {
  const auto p = SystemParams::make(o.raw);
  const auto model = covert::parse_delay_model(o.model);
  const auto walk = sim::parse_walk_model(o.walk);

  covert::codec::Bytes message;
  if (!o.message_file.empty()) {
    std::ifstream in(o.message_file, std::ios::binary);
    if (!in) throw ParameterError("cannot read message file '" + o.message_file + "'");
    message.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    message.assign(o.message.begin(), o.message.end());
  }
  if (message.empty()) throw ParameterError("message must be non-empty (--message or --message-file)");

  const auto result = covert::demo::run(message, p, model, walk, o.seed);
  const auto& t = result.outcome;
  const bool match = result.recovered == message;

  if (o.json) {
    ordered_json j;
    j["params"] = params_json(p);
    j["model"] = model == DelayModel::Model1 ? 1 : 2;
    j["seed"] = o.seed;
    j["message_bytes"] = message.size();
    j["chunk_bytes"] = result.encoded.chunk_length();
    ordered_json idx = ordered_json::array();
    for (const auto& c : result.collected) idx.push_back(c.index);
    j["collected_chunks"] = idx;
    j["dissemination_time"] = t.dissemination_time;
    j["collection_time"] = t.collection_time;
    j["total_time"] = t.total_time;
    j["transmissions"] = t.transmissions;
    j["detections"] = t.detections;
    j["verdict"] = t.detected ? "detected" : "undetected";
    j["recovered_matches"] = match;
    std::cout << j.dump(2) << '\n';
    return match ? 0 : 3;
  }

  std::cout << "message: " << message.size() << " bytes, split into k=" << p.k()
            << " chunks of " << result.encoded.chunk_length() << " bytes, coded into n=" << p.n()
            << '\n';
  std::cout << "relays: " << p.r() << " on a complete graph of " << p.s() << " vertices\n\n";
  // event times restart at zero when Bob starts collecting
  bool collecting = false;
  std::cout << "dissemination (Alice)\n";
  for (const auto& e : result.events) {
    if (e.type == sim::EventType::Visit) continue;
    if (e.type == sim::EventType::Retrieve && !collecting) {
      collecting = true;
      std::cout << "collection (Bob)\n";
    }
    std::cout << "  t=" << sweep::format_double(e.time) << "  " << sim::to_string(e.type)
              << " chunk " << e.chunk_index << " at vertex " << e.vertex << '\n';
  }
  std::cout << "\ndissemination: " << sweep::format_double(t.dissemination_time) << " ("
            << t.dissemination_steps << " visits)\n"
            << "collection:    " << sweep::format_double(t.collection_time) << " ("
            << t.collection_steps << " visits)\n"
            << "total:         " << sweep::format_double(t.total_time) << '\n'
            << "transmissions: " << t.transmissions << ", detections: " << t.detections << '\n'
            << "verdict:       " << (t.detected ? "detected" : "undetected") << '\n'
            << "collected chunks:";
  for (const auto& c : result.collected) std::cout << ' ' << c.index;
  std::cout << "\nrecovered:     " << printable(result.recovered) << '\n'
            << "match:         " << (match ? "yes" : "NO") << '\n';
  return match ? 0 : 3;
}

// Splices `--config <path>` entries in front of the user's flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    else continue;
    const auto extra = covert::config::to_args(covert::config::load(path));
    // subcommand is the first positional token
    std::size_t insert_at = 1;
    while (insert_at < args.size() && args[insert_at].rfind("-", 0) == 0) ++insert_at;
    if (insert_at < args.size()) ++insert_at;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(), extra.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert mobile message passing: analysis, simulation and tradeoff exploration"};
  app.require_subcommand(1);
  Options o;

  auto* analytic_cmd = app.add_subcommand("analytic", "closed-form detection, covertness and delays");
  add_param_flags(analytic_cmd, o);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run at one parameter point");
  add_param_flags(simulate_cmd, o);
  add_sim_flags(simulate_cmd, o);
  simulate_cmd->add_option("--transcript", o.transcript, "write a JSONL event log of the first trials");
  simulate_cmd->add_option("--transcript-trials", o.transcript_trials, "trials to log")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter grid to CSV, theory next to simulation");
  add_param_flags(sweep_cmd, o);
  add_sim_flags(sweep_cmd, o);
  sweep_cmd->add_option("--preset", o.preset, "figure preset")->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  sweep_cmd->add_option("--k-list", o.k_list, "k values, e.g. 1-5 or 1,3,5");
  sweep_cmd->add_option("--n-list", o.n_list, "n values (default: every n in [k, r])");
  sweep_cmd->add_option("--r-list", o.r_list, "r values");
  sweep_cmd->add_flag("--no-sim", o.no_sim, "theory columns only");

  auto* optimize_cmd = app.add_subcommand("optimize", "covertness/delay frontier over (k, n)");
  add_param_flags(optimize_cmd, o);
  optimize_cmd->add_option("--out", o.out, "write the evaluated grid as CSV");
  optimize_cmd->add_option("--k-list", o.k_list, "k range, e.g. 1-5");
  optimize_cmd->add_option("--n-list", o.n_list, "n range, e.g. 1-10");
  optimize_cmd->add_option("--r-max", o.r_max, "largest r for the Model 2 optimal-n check")->capture_default_str();

  auto* demo_cmd = app.add_subcommand("demo", "encode, relay and decode a real message once");
  add_param_flags(demo_cmd, o);
  demo_cmd->add_option("--walk", o.walk, "walk model")->check(CLI::IsMember({"iid", "noselfloop"}));
  demo_cmd->add_option("--seed", o.seed, "seed")->capture_default_str();
  demo_cmd->add_option("--message", o.message, "literal message");
  demo_cmd->add_option("--message-file", o.message_file, "read the message from a file");

  for (auto* cmd : {analytic_cmd, simulate_cmd, sweep_cmd, optimize_cmd, demo_cmd}) take_last(cmd);

  try {
    auto args = expand_config(argc, argv);
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*analytic_cmd) return cmd_analytic(o);
    if (*simulate_cmd) return cmd_simulate(o);
    if (*sweep_cmd) return cmd_sweep(o, *sweep_cmd);
    if (*optimize_cmd) return cmd_optimize(o, *optimize_cmd);
    if (*demo_cmd) return cmd_demo(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
