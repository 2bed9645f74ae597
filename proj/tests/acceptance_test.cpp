// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dcfcoex/dcfcoex.hpp"

using namespace dcfcoex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string mbps(double bps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", bps / 1e6);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

ScenarioConfig two_stations(long off_us, long on_us) {
  auto c = default_scenario();
  c.interference.off_T = Micros{off_us};
  c.interference.on_F = Micros{on_us};
  return c;
}

// Mean per-class throughput over `runs` seeds.
std::vector<double> mean_throughput(const ScenarioConfig& c, int runs, Micros sim_time) {
  const auto v = validate(c);
  std::vector<std::vector<double>> per_run(static_cast<std::size_t>(runs));
  detail::parallel_for(per_run.size(), 0,
                       [&](std::size_t r) { per_run[r] = simulated_throughput(v, 1 + r, sim_time); });
  std::vector<double> out(v.classes().size(), 0.0);
  for (const auto& r : per_run)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += r[k] / runs;
  return out;
}

Outcome table_one() {
  struct Cell {
    const char* name;
    ScenarioConfig config;
    double high, low;
  };
  const Cell cells[] = {
      {"no LTE", two_stations(40000, 0), 4.6e6, 4.0e6},
      {"T=5ms", two_stations(5000, 5000), 4.0e6, 1.3e6},
      {"T=40ms", two_stations(40000, 40000), 2.4e6, 1.9e6},
  };
  Outcome o{true, {}};
  for (const auto& cell : cells) {
    const auto s = mean_throughput(cell.config, 20, Micros{60'000'000});
    const double e0 = percentage_error(s[0], cell.high), e1 = percentage_error(s[1], cell.low);
    o.pass = o.pass && e0 <= 15.0 && e1 <= 15.0;
    o.detail += std::string(cell.name) + " " + mbps(s[0]) + "/" + mbps(s[1]) + " (target " + mbps(cell.high) + "/" +
                mbps(cell.low) + ", dev " + pct(e0) + "/" + pct(e1) + "); ";
  }
  return o;
}

Outcome model_error() {
  ModelValidationSpec spec;
  const auto r = validate_model(spec);
  Outcome o{true, {}};
  for (const auto& [t, err] : r.max_error_by_T) {
    const double bound = t == 20000 ? 12.0 : 9.0;
    o.pass = o.pass && err < bound;
    o.detail += "T=" + std::to_string(t / 1000) + "ms max " + pct(err) + " (< " + pct(bound) + "); ";
  }
  for (const auto& sweep : r.sweeps) {
    for (const auto& row : sweep.rows) {
      if (row.class_id == 0) o.detail += "\n    ";
      o.detail += "N=" + std::to_string(row.value) + " c" + std::to_string(row.class_id) + " " + pct(row.pct_error) + " ";
    }
  }
  return o;
}

Outcome dead_window() {
  Outcome o{true, {}};
  std::uint64_t most = 0;
  for (long t : {5000L, 9000L, 20000L}) {
    auto c = with_split_population(two_stations(t, t), 30);
    const auto r = simulate(validate(c), 7, Micros{400'000'000});
    for (std::size_t k = 0; k < r.per_class.size(); ++k) {
      const auto& cl = r.per_class[k];
      most = std::max(most, cl.dead_window_attempts);
      o.pass = o.pass && cl.dead_window_collisions == cl.dead_window_attempts;
      o.detail += "T=" + std::to_string(t) + "us c" + std::to_string(k) + " " + std::to_string(cl.dead_window_collisions) +
                  "/" + std::to_string(cl.dead_window_attempts) + "; ";
    }
  }
  o.pass = o.pass && most >= 10000;
  return o;
}

Outcome clustering() {
  auto c = default_scenario();
  c.classes = {ClassSpec{30, kAirtime6Mbps, kPayload1500B}};
  c.interference = InterferencePattern{Micros{9000}, Micros{9000}, Micros{0}};
  const auto r = simulate(validate(c), 1, Micros{60'000'000});
  const auto h = offset_histogram(r)[0];
  int gaps = 0;
  std::int64_t first_gap = -1;
  std::size_t prev_full = h.size();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i].attempts < 100) continue;
    if (prev_full < h.size()) {
      for (std::size_t k = prev_full + 1; k < i; ++k) {
        if (h[k].attempts == 0) {
          ++gaps;
          if (first_gap < 0) first_gap = h[k].offset_us;
          break;
        }
      }
    }
    prev_full = i;
  }
  return {gaps > 0, std::to_string(gaps) + " empty gaps between populated bins, first at offset " +
                        std::to_string(first_gap) + "us"};
}

Outcome convergence() {
  const std::vector<std::int64_t> ts{10000, 20000, 30000, 40000, 50000};
  SweepSpec spec;
  spec.base = with_split_population(default_scenario(), 30);
  spec.variable = SweepVariable::off_period_T;
  spec.values = ts;
  spec.runs_per_point = 20;
  spec.sim_time_per_run = Micros{60'000'000};
  const auto r = run_sweep(spec);
  Outcome o{true, "model gap:"};
  double prev_m = 2.0, prev_s = 2.0;
  std::string sim = " sim gap:";
  for (auto t : ts) {
    const auto& hi = r.at(t, 0);
    const auto& lo = r.at(t, 1);
    const double gm = (hi.model_bps - lo.model_bps) / hi.model_bps;
    const double gs = (hi.sim_mean_bps - lo.sim_mean_bps) / hi.sim_mean_bps;
    o.pass = o.pass && gm < prev_m && gs < prev_s;
    prev_m = gm;
    prev_s = gs;
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.4f", gm);
    o.detail += buf;
    std::snprintf(buf, sizeof buf, " %.4f", gs);
    sim += buf;
  }
  o.detail += sim;
  return o;
}

Outcome txop_unfairness() {
  auto base = default_scenario();
  base.txop.limit = kAirtime6Mbps;
  std::vector<std::int64_t> ns;
  for (int n = 2; n <= 50; n += 2) ns.push_back(n);
  const auto r = txop_comparison(base, ns, 10, 1, 0, Micros{40'000'000});
  const auto report = throughput_txop(validate(with_split_population(base, 10)));
  Outcome o{report.frames_per_grant_k[0] == 6 && report.frames_per_grant_k[1] == 1, {}};
  int model_bad = 0, sim_bad = 0;
  double min_ratio = 1e9;
  for (auto n : ns) {
    const auto& hi = r.at(n, 0);
    const auto& lo = r.at(n, 1);
    model_bad += hi.model_bps <= lo.model_bps;
    sim_bad += hi.sim_mean_bps <= lo.sim_mean_bps;
    min_ratio = std::min(min_ratio, hi.sim_mean_bps / lo.sim_mean_bps);
  }
  o.pass = o.pass && model_bad == 0 && sim_bad == 0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", min_ratio);
  o.detail = "k=" + std::to_string(report.frames_per_grant_k[0]) + "/" + std::to_string(report.frames_per_grant_k[1]) +
             ", N where high<=low: model " + std::to_string(model_bad) + ", sim " + std::to_string(sim_bad) +
             ", min sim high/low " + buf;
  return o;
}

Outcome properties() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const DcfParams dcf;

  double prev = 2.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = tau_of_p(i / 1000.0, dcf);
    check(t < prev, "tau(p) monotone");
    prev = t;
  }
  for (long t : {5000L, 20000L, 40000L, 80000L}) {
    for (int n : {2, 10, 30, 50}) {
      const auto v = validate(with_split_population(two_stations(t, t), n));
      const auto sol = solve_fixed_point(v);
      check(sol.residual <= 1e-9, "fixed-point residual");
      for (std::size_t k = 0; k < 2; ++k) {
        const double floor = static_cast<double>(v.classes()[k].airtime_X.count()) / static_cast<double>(t);
        check(sol.p[k] >= floor, "p_i >= X_i/T");
      }
      const auto probs = slot_type_probabilities(sol.tau, {n / 2, n / 2});
      check(std::abs(probs[0] + probs[1] + probs[2] - 1.0) <= 1e-12, "E[slot] partition");
    }
  }

  const auto v = validate(with_split_population(two_stations(9000, 9000), 20));
  const auto a = simulate(v, 3, Micros{10'000'000});
  check(a == simulate(v, 3, Micros{10'000'000}), "simulator determinism");
  for (const auto& s : a.per_station)
    check(s.attempts == s.successes + s.wifi_collisions + s.lte_collisions, "simulator conservation");
  check(a.idle_us + a.busy_us + a.on_us == a.sim_time.count(), "time accounting");

  std::string taus;
  for (int n : {2, 5, 10}) {
    auto c = two_stations(40000, 0);
    c.classes = {ClassSpec{n, kAirtime54Mbps, kPayload1500B}};
    const auto hv = validate(c);
    const double hat = simulate(hv, 21, Micros{120'000'000}).per_class[0].tau_hat();
    const double classic = classic_fixed_point(n, dcf);
    const double dev = std::abs(hat / classic - 1.0) * 100.0;
    check(dev <= 3.0, "homogeneous tau n=" + std::to_string(n));
    taus += " n=" + std::to_string(n) + " " + pct(dev);
  }
  std::string detail = "tau-hat deviation:" + taus;
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

Outcome single_station() {
  auto c = two_stations(40000, 0);
  c.classes = {ClassSpec{1, kAirtime54Mbps, kPayload1500B}};
  const auto r = simulate(validate(c), 1, Micros{120'000'000});
  const double expected = 12000.0 / ((326.0 + 15.0 / 2.0 * 9.0) * 1e-6);
  const double dev = std::abs(r.per_class[0].throughput_bps / expected - 1.0) * 100.0;
  return {dev < 1.0, "sim " + mbps(r.per_class[0].throughput_bps) + " vs " + mbps(expected) + " Mb/s (" + pct(dev) + ")"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 two-station throughput table", table_one},
      {"2 model vs simulation error", model_error},
      {"3 deterministic collision window", dead_window},
      {"4 attempt clustering after ON", clustering},
      {"5 class gap shrinks with T", convergence},
      {"6 TXOP keeps the fast class ahead", txop_unfairness},
      {"7 property checks", properties},
      {"8 single-station closed form", single_station},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s  %s  [%.1fs]  %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
