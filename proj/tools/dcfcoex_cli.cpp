// dcfcoex: command-line driver for the analytic model, the simulator and the
// sweep harness.
//
// Exit codes: 0 ok, 1 invalid configuration, 2 solver did not converge,
// 3 file I/O failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcfcoex/dcfcoex.hpp"

namespace fs = std::filesystem;
using namespace dcfcoex;

namespace {

struct Options {
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
  std::string format = "csv";
  bool trace = false;
  int runs = 10;
  double sim_time_s = 0.0;  // 0: default per subcommand
  std::string variable = "N";
  std::vector<std::int64_t> values;
  unsigned workers = 0;
};

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const Options& o, const std::string& name) {
  const fs::path p = fs::path(o.output_dir) / name;
  std::ofstream out(p);
  if (!out) throw IoFailure("cannot write " + p.string());
  return out;
}

void prepare_output_dir(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.output_dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + o.output_dir + ": " + ec.message());
}

// Scenario file (or defaults), then overrides, then validation. The result is
// written next to the outputs so every subcommand records what it ran.
ValidatedScenario resolve_scenario(const Options& o) {
  ScenarioConfig c = default_scenario();
  if (!o.scenario_path.empty()) {
    try {
      c = load_scenario(o.scenario_path);
    } catch (const ScenarioIoError& e) {
      throw IoFailure(e.what());
    }
  }
  c = apply_overrides(std::move(c), o.overrides);
  auto v = validate(std::move(c));
  prepare_output_dir(o);
  try {
    save_scenario(v.config(), (fs::path(o.output_dir) / "scenario.resolved.json").string());
  } catch (const ScenarioIoError& e) {
    throw IoFailure(e.what());
  }
  return v;
}

double ms(Micros d) { return static_cast<double>(d.count()) / 1000.0; }

void print_scenario(const ValidatedScenario& v) {
  const auto& in = v.interference();
  std::printf("interference: F=%.3f ms, T=%.3f ms, phase=%.3f ms\n", ms(in.on_F), ms(in.off_T), ms(in.phase));
  for (std::size_t i = 0; i < v.classes().size(); ++i) {
    const auto& c = v.classes()[i];
    std::printf("class %zu: n=%d, X=%.3f ms, P=%lld bits\n", i, c.count_n, ms(c.airtime_X),
                static_cast<long long>(c.payload_P));
  }
  if (v.txop().enabled()) std::printf("txop limit: %.3f ms\n", ms(v.txop().limit));
}

int cmd_model(const Options& o) {
  const auto v = resolve_scenario(o);
  print_scenario(v);
  auto out = open_output(o, "model.csv");
  out.precision(12);
  if (v.txop().enabled()) {
    const auto r = throughput_txop(v);
    std::printf("tau=%.6f p=%.6f E[slot]=%.4f ms (%ld iterations)\n", r.tau, r.p, r.expected_slot_us / 1000.0,
                r.iterations);
    out << "class,tau,p,expected_slot_us,k,k_star,throughput_bps\n";
    for (std::size_t i = 0; i < 2; ++i) {
      std::printf("class %zu: k=%d k*=%.1f S=%.4f Mb/s\n", i, r.frames_per_grant_k[i], r.tail_frames_k_star[i],
                  r.per_class_bps[i] / 1e6);
      out << i << ',' << r.tau << ',' << r.p << ',' << r.expected_slot_us << ',' << r.frames_per_grant_k[i] << ','
          << r.tail_frames_k_star[i] << ',' << r.per_class_bps[i] << '\n';
    }
    return 0;
  }
  const auto sol = solve_fixed_point(v);
  const auto s = throughput(sol, v);
  std::printf("E[slot]=%.4f ms (%ld iterations, residual %.2e)\n", sol.expected_slot_us / 1000.0, sol.iterations,
              sol.residual);
  out << "class,tau,p,expected_slot_us,throughput_bps\n";
  for (std::size_t i = 0; i < 2; ++i) {
    std::printf("class %zu: tau=%.6f p=%.6f S=%.4f Mb/s\n", i, sol.tau[i], sol.p[i], s.per_class_bps[i] / 1e6);
    out << i << ',' << sol.tau[i] << ',' << sol.p[i] << ',' << sol.expected_slot_us << ',' << s.per_class_bps[i]
        << '\n';
  }
  return 0;
}

Micros sim_time_or(const Options& o, Micros fallback) {
  return o.sim_time_s > 0 ? Micros{static_cast<std::int64_t>(o.sim_time_s * 1e6)} : fallback;
}

int cmd_simulate(const Options& o) {
  const auto v = resolve_scenario(o);
  print_scenario(v);
  const Micros sim_time = sim_time_or(o, default_sim_time(v.interference()));
  std::vector<TraceRecord> trace;
  const auto r = simulate(v, o.seed, sim_time, o.trace ? &trace : nullptr);
  std::printf("seed %llu (%s), simulated %.3f ms\n", static_cast<unsigned long long>(r.seed), r.rng.c_str(),
              ms(r.sim_time));
  auto out = open_output(o, "simulate.csv");
  out.precision(12);
  out << "class,throughput_bps,attempts,successes,wifi_collisions,lte_collisions,drops,mean_p,tau_hat\n";
  for (std::size_t i = 0; i < r.per_class.size(); ++i) {
    const auto& c = r.per_class[i];
    std::printf("class %zu: S=%.4f Mb/s attempts=%llu p=%.4f (lte %llu, wifi %llu) drops=%llu\n", i,
                c.throughput_bps / 1e6, static_cast<unsigned long long>(c.attempts), c.mean_p(),
                static_cast<unsigned long long>(c.lte_collisions), static_cast<unsigned long long>(c.wifi_collisions),
                static_cast<unsigned long long>(c.drops));
    out << i << ',' << c.throughput_bps << ',' << c.attempts << ',' << c.successes << ',' << c.wifi_collisions << ','
        << c.lte_collisions << ',' << c.drops << ',' << c.mean_p() << ',' << c.tau_hat() << '\n';
  }
  auto hist = open_output(o, "offsets.csv");
  write_offset_csv(hist, offset_histogram(r));
  if (o.trace) {
    auto t = open_output(o, "trace.csv");
    write_trace_csv(t, trace);
  }
  return 0;
}

void write_sweep_outputs(const Options& o, const SweepResult& r, const std::string& stem, const std::string& title) {
  auto csv = open_output(o, stem + ".csv");
  write_sweep_csv(csv, r);
  if (o.format == "svg+csv") {
    auto svg = open_output(o, stem + ".svg");
    write_sweep_svg(svg, r, title);
  }
}

void print_sweep(const SweepResult& r) {
  std::printf("%8s %5s %12s %12s %10s %8s\n", to_string(r.variable), "class", "model Mb/s", "sim Mb/s", "ci95", "err %");
  for (const auto& row : r.rows) {
    const double shown = r.variable == SweepVariable::off_period_T ? static_cast<double>(row.value) / 1000.0
                                                                   : static_cast<double>(row.value);
    std::printf("%8g %5d %12.4f %12.4f %10.4f %8.2f\n", shown, row.class_id, row.model_bps / 1e6,
                row.sim_mean_bps / 1e6, row.sim_ci95_bps.value_or(0.0) / 1e6, row.pct_error);
  }
}

int cmd_sweep(const Options& o) {
  const auto v = resolve_scenario(o);
  SweepSpec spec;
  spec.base = v.config();
  if (o.variable == "N") {
    spec.variable = SweepVariable::station_count_N;
  } else if (o.variable == "T") {
    spec.variable = SweepVariable::off_period_T;
  } else {
    throw InvalidParameter("variable", "must be N or T");
  }
  spec.values = o.values;
  if (spec.values.empty()) {
    if (spec.variable == SweepVariable::station_count_N)
      for (int n = 2; n <= 50; n += 2) spec.values.push_back(n);
    else
      spec.values = {10000, 20000, 30000, 40000, 50000};
  }
  spec.runs_per_point = o.runs;
  if (o.sim_time_s > 0) spec.sim_time_per_run = sim_time_or(o, Micros{0});
  spec.seed_base = o.seed;
  spec.workers = o.workers;
  const auto r = run_sweep(spec);
  print_sweep(r);
  if (spec.variable == SweepVariable::off_period_T) std::printf("(T in ms)\n");
  write_sweep_outputs(o, r, "sweep", "throughput vs " + o.variable);
  return 0;
}

int cmd_validate(const Options& o) {
  const auto v = resolve_scenario(o);
  ModelValidationSpec spec;
  spec.base = v.config();
  spec.runs_per_point = o.runs;
  if (o.sim_time_s > 0) spec.sim_time_per_run = sim_time_or(o, Micros{0});
  spec.seed_base = o.seed;
  spec.workers = o.workers;
  const auto r = validate_model(spec);
  for (const auto& [t, err] : r.max_error_by_T) std::printf("T=%g ms: max error %.2f%%\n", t / 1000.0, err);
  std::printf("%s: max error %.2f%% (threshold %.0f%%)\n", r.passed ? "PASS" : "FAIL", r.max_error, r.threshold);
  auto out = open_output(o, "validate.csv");
  out << "T_us,max_pct_error\n";
  for (const auto& [t, err] : r.max_error_by_T) out << t << ',' << err << '\n';
  for (std::size_t i = 0; i < r.sweeps.size(); ++i) {
    auto csv = open_output(o, "validate_T" + std::to_string(spec.off_periods_us[i]) + ".csv");
    write_sweep_csv(csv, r.sweeps[i]);
  }
  return 0;
}

int cmd_figures(const Options& o) {
  const auto v = resolve_scenario(o);
  const ScenarioConfig base = v.config();
  const auto sim_time = [&](Micros fallback) { return o.sim_time_s > 0 ? std::optional(sim_time_or(o, fallback)) : std::nullopt; };

  // fig1: single-rate populations of 30 stations, T = F = 1000 slots.
  const Micros t1{1000 * base.dcf.slot_sigma.count()};
  for (const auto& [name, x] : {std::pair{"6mbps", kAirtime6Mbps}, std::pair{"54mbps", kAirtime54Mbps}}) {
    ScenarioConfig c = base;
    c.classes = {ClassSpec{30, x, kPayload1500B}};
    c.txop.limit = Micros{0};
    c.interference = InterferencePattern{t1, t1, Micros{0}};
    const auto r = simulate(validate(c), o.seed, sim_time(Micros{0}).value_or(Micros{60'000'000}));
    const auto hist = offset_histogram(r);
    auto csv = open_output(o, std::string("fig1_") + name + ".csv");
    write_offset_csv(csv, hist);
    if (o.format == "svg+csv") {
      auto svg = open_output(o, std::string("fig1_") + name + ".svg");
      write_offset_svg(svg, hist[0], std::string("collision probability vs offset, 30 stations at ") + name);
    }
    std::printf("fig1 %s: %llu attempts\n", name, static_cast<unsigned long long>(r.per_class[0].attempts));
  }

  std::vector<std::int64_t> ns;
  for (int n = 2; n <= 50; n += 2) ns.push_back(n);

  SweepSpec a;
  a.base = base;
  a.base.txop.limit = Micros{0};
  a.base.interference = InterferencePattern{Micros{40000}, Micros{40000}, Micros{0}};
  a.values = ns;
  a.runs_per_point = o.runs;
  a.sim_time_per_run = sim_time(Micros{0});
  a.seed_base = o.seed;
  a.workers = o.workers;
  const auto fig2a = run_sweep(a);
  write_sweep_outputs(o, fig2a, "fig2a", "per-class throughput vs N, T = F = 40 ms");
  std::printf("fig2a done\n");

  SweepSpec b = a;
  b.base = with_split_population(a.base, 30);
  b.variable = SweepVariable::off_period_T;
  b.values = {10000, 20000, 30000, 40000, 50000};
  const auto fig2b = run_sweep(b);
  write_sweep_outputs(o, fig2b, "fig2b", "per-class throughput vs T = F, N = 30");
  std::printf("fig2b done\n");

  ScenarioConfig c = a.base;
  c.txop.limit = c.classes[1].airtime_X;
  const auto fig2c = txop_comparison(c, ns, o.runs, o.seed, o.workers, sim_time(Micros{0}));
  write_sweep_outputs(o, fig2c, "fig2c", "per-class throughput vs N with uniform TXOP limit");
  std::printf("fig2c done\n");
  return 0;
}

// Innermost exception of a nested chain.
std::exception_ptr innermost(std::exception_ptr p) {
  while (true) {
    try {
      std::rethrow_exception(p);
    } catch (const std::nested_exception& n) {
      if (!n.nested_ptr()) return p;
      p = n.nested_ptr();
    } catch (...) {
      return p;
    }
  }
}

int report_error(std::exception_ptr p) {
  try {
    std::rethrow_exception(innermost(p));
  } catch (const InvalidParameter& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 1;
  } catch (const InvalidDuration& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 1;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "model did not converge: %s\n", e.what());
    return 2;
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WiFi DCF throughput under periodic ON/OFF interference"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario_path, "scenario JSON file (defaults to built-in parameters)");
    sub->add_option("--override", o.overrides, "override a field, e.g. interference.off_T=20000 (repeatable)")
        ->take_all();
    sub->add_option("--output-dir", o.output_dir, "where CSV/SVG/JSON outputs go");
    sub->add_option("--seed", o.seed, "simulation seed (sweeps: seed of run 0)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "svg+csv"}));
  };
  auto repeated = [&](CLI::App* sub) {
    sub->add_option("--runs", o.runs, "independent runs per point")->check(CLI::PositiveNumber);
    sub->add_option("--sim-time", o.sim_time_s, "simulated seconds per run (default 500 interference periods)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  };

  auto* model = app.add_subcommand("model", "solve the analytic model");
  common(model);
  auto* sim = app.add_subcommand("simulate", "run one simulation");
  common(sim);
  sim->add_option("--sim-time", o.sim_time_s, "simulated seconds (default 500 interference periods)")
      ->check(CLI::PositiveNumber);
  sim->add_flag("--trace", o.trace, "write the channel event trace to trace.csv");
  auto* sweep = app.add_subcommand("sweep", "model and simulation over N or T");
  common(sweep);
  repeated(sweep);
  sweep->add_option("--variable", o.variable, "N (station count) or T (OFF period, F tracks T)")
      ->check(CLI::IsMember({"N", "T"}));
  sweep->add_option("--values", o.values, "sweep values (T in microseconds)")->delimiter(',');
  auto* val = app.add_subcommand("validate", "model-vs-simulation error for T in {20, 40, 80} ms");
  common(val);
  repeated(val);
  auto* figs = app.add_subcommand("figures", "regenerate the offset histograms and the three sweeps");
  common(figs);
  repeated(figs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*model) return cmd_model(o);
    if (*sim) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    if (*val) return cmd_validate(o);
    if (*figs) return cmd_figures(o);
  } catch (...) {
    return report_error(std::current_exception());
  }
  return 0;
}
