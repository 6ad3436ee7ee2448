#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "covert/analytic.hpp"
#include "covert/params.hpp"
#include "covert/simcore.hpp"

namespace covert::sweep {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

/// Parses "3", "1-5", "1,2,10-15" into the listed integers, in order.
inline std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  auto number = [&](std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw ParameterError("bad integer '" + std::string(s) + "' in list '" + std::string(text) + "'");
    return v;
  };
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    const auto dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(number(item));
    } else {
      const auto lo = number(item.substr(0, dash));
      const auto hi = number(item.substr(dash + 1));
      if (hi < lo) throw ParameterError("empty range '" + std::string(item) + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw ParameterError("trailing comma in integer list");
  }
  if (out.empty()) throw ParameterError("empty integer list");
  return out;
}

struct SweepSpec {
  SystemParams::Raw base;
  DelayModel model = DelayModel::Model1;
  sim::WalkModel walk = sim::WalkModel::IidUniform;
  std::vector<std::int64_t> k_values;  // empty: base.k
  std::vector<std::int64_t> n_values;  // empty: every n in [k, r]
  std::vector<std::int64_t> r_values;  // empty: base.r
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  bool simulate = true;
  unsigned threads = 0;
};

struct SweepRow {
  DelayModel model = DelayModel::Model1;
  std::int64_t s = 0, r = 0;
  double m = 0.0;
  std::int64_t k = 0, n = 0;
  double lambda = 0.0, w = 0.0;
  std::uint64_t trials = 0, seed = 0;
  double theory_dis = 0.0, theory_col = 0.0, theory_tot = 0.0;
  std::optional<double> sim_dis_mean, sim_col_mean, sim_tot_mean, sim_tot_stderr;
  double p_d = 0.0, p_c = 0.0;
  std::optional<double> empirical_p_c;
};

inline constexpr std::string_view kCsvHeader =
    "model,s,r,m,k,n,lambda,w,trials,seed,theory_dis,theory_col,theory_tot,"
    "sim_dis_mean,sim_col_mean,sim_tot_mean,sim_tot_stderr,p_d,p_c,empirical_p_c";

/// Grid points of the spec in r-major, then k, then n order. Combinations
/// with k > n or n > r are skipped; an empty result is an error.
inline std::vector<SystemParams> expand(const SweepSpec& spec) {
  const auto rs = spec.r_values.empty() ? std::vector<std::int64_t>{spec.base.r} : spec.r_values;
  const auto ks = spec.k_values.empty() ? std::vector<std::int64_t>{spec.base.k} : spec.k_values;
  std::vector<SystemParams> grid;
  for (auto r : rs)
    for (auto k : ks) {
      std::vector<std::int64_t> ns = spec.n_values;
      if (ns.empty())
        for (auto n = k; n <= r; ++n) ns.push_back(n);
      for (auto n : ns) {
        if (k > n || n > r) continue;
        auto raw = spec.base;
        raw.r = r;
        raw.k = k;
        raw.n = n;
        grid.push_back(SystemParams::make(raw));
      }
    }
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  return grid;
}

inline SweepRow theory_row(const SystemParams& p, DelayModel model) {
  SweepRow row;
  row.model = model;
  row.s = p.s();
  row.r = p.r();
  row.m = p.m();
  row.k = p.k();
  row.n = p.n();
  row.lambda = p.lambda();
  row.w = p.w();
  row.theory_dis = analytic::expected_dissemination(p, model);
  row.theory_col = analytic::expected_collection(p, model);
  row.theory_tot = analytic::expected_total(p, model);
  row.p_d = analytic::detection_probability(p);
  row.p_c = analytic::covertness_probability(p);
  return row;
}

inline void attach_simulation(SweepRow& row, const sim::MonteCarloSummary& mc) {
  row.trials = mc.trials;
  row.seed = mc.seed;
  row.sim_dis_mean = mc.dissemination_mean;
  row.sim_col_mean = mc.collection_mean;
  row.sim_tot_mean = mc.total_mean;
  row.sim_tot_stderr = mc.total_stderr;
  row.empirical_p_c = mc.empirical_covertness();
}

inline SweepRow make_row(const SystemParams& p, DelayModel model, sim::WalkModel walk,
                         std::optional<std::uint64_t> trials, std::uint64_t seed,
                         unsigned threads = 0) {
  SweepRow row = theory_row(p, model);
  row.seed = seed;
  if (trials) attach_simulation(row, sim::run_monte_carlo(p, model, walk, *trials, seed, threads));
  return row;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.simulate && spec.trials == 0) throw ParameterError("trials must be >= 1");
  const auto grid = expand(spec);  // validates everything before simulating
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& p : grid)
    rows.push_back(make_row(p, spec.model, spec.walk,
                            spec.simulate ? std::optional(spec.trials) : std::nullopt, spec.seed,
                            spec.threads));
  return rows;
}

inline std::string csv_line(const SweepRow& row) {
  std::string out;
  auto put = [&](const std::string& field) {
    if (!out.empty()) out += ',';
    out += field;
  };
  auto opt = [&](const std::optional<double>& v) { put(v ? format_double(*v) : std::string()); };
  put(std::string(to_string(row.model)));
  put(std::to_string(row.s));
  put(std::to_string(row.r));
  put(format_double(row.m));
  put(std::to_string(row.k));
  put(std::to_string(row.n));
  put(format_double(row.lambda));
  put(format_double(row.w));
  put(std::to_string(row.trials));
  put(std::to_string(row.seed));
  put(format_double(row.theory_dis));
  put(format_double(row.theory_col));
  put(format_double(row.theory_tot));
  opt(row.sim_dis_mean);
  opt(row.sim_col_mean);
  opt(row.sim_tot_mean);
  opt(row.sim_tot_stderr);
  put(format_double(row.p_d));
  put(format_double(row.p_c));
  opt(row.empirical_p_c);
  return out;
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& row : rows) {
    out += csv_line(row);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const SweepRow& row) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["model"] = row.model == DelayModel::Model1 ? 1 : 2;
  j["s"] = row.s;
  j["r"] = row.r;
  j["m"] = row.m;
  j["k"] = row.k;
  j["n"] = row.n;
  j["lambda"] = row.lambda;
  j["w"] = row.w;
  j["trials"] = row.trials;
  j["seed"] = row.seed;
  j["theory_dis"] = row.theory_dis;
  j["theory_col"] = row.theory_col;
  j["theory_tot"] = row.theory_tot;
  j["sim_dis_mean"] = opt(row.sim_dis_mean);
  j["sim_col_mean"] = opt(row.sim_col_mean);
  j["sim_tot_mean"] = opt(row.sim_tot_mean);
  j["sim_tot_stderr"] = opt(row.sim_tot_stderr);
  j["p_d"] = row.p_d;
  j["p_c"] = row.p_c;
  j["empirical_p_c"] = opt(row.empirical_p_c);
  return j;
}

// Figure presets: complete graph of 50 vertices, lambda = 1, m = 10, w = 50.
inline SweepSpec preset(std::string_view name) {
  SweepSpec spec;
  spec.base = SystemParams::Raw{50, 10, 10.0, 3, 5, 1.0, 50.0};
  if (name == "fig1") {
    // covertness vs k for n in {1, 2, 3, 10, 15}; r = 15 so every n fits
    spec.base.r = 15;
    spec.k_values = parse_int_list("1-20");
    spec.n_values = {1, 2, 3, 10, 15};
  } else if (name == "fig2") {
    spec.k_values = {3};
    spec.r_values = {5, 10, 15, 20};
  } else if (name == "fig3") {
    spec.k_values = parse_int_list("1-5");
  } else if (name == "fig4") {
    spec.model = DelayModel::Model2;
    spec.k_values = parse_int_list("1-5");
  } else {
    throw ParameterError("unknown preset '" + std::string(name) + "' (fig1, fig2, fig3, fig4)");
  }
  return spec;
}

}  // namespace covert::sweep
