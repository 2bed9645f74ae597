#ifndef DCFCOEX_HARNESS_HPP_
#define DCFCOEX_HARNESS_HPP_

// Sweeps over station count or OFF period that run the analytic model and
// repeated simulations side by side.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dcfcoex/analytic.hpp"
#include "dcfcoex/scenario.hpp"
#include "dcfcoex/simulator.hpp"
#include "dcfcoex/stats.hpp"

namespace dcfcoex {

enum class SweepVariable { station_count_N, off_period_T };

inline const char* to_string(SweepVariable v) {
  return v == SweepVariable::station_count_N ? "N" : "T_us";
}

/// Per-class throughput estimate of one run; the default runs the simulator.
using ThroughputEstimator =
    std::function<std::vector<double>(const ValidatedScenario&, std::uint64_t seed, Micros sim_time)>;

inline std::vector<double> simulated_throughput(const ValidatedScenario& s, std::uint64_t seed, Micros sim_time) {
  const auto report = simulate(s, seed, sim_time);
  std::vector<double> out;
  for (const auto& c : report.per_class) out.push_back(c.throughput_bps);
  return out;
}

struct SweepSpec {
  ScenarioConfig base;
  SweepVariable variable = SweepVariable::station_count_N;
  std::vector<std::int64_t> values;
  int runs_per_point = 10;
  /// Defaults to 500 interference periods per run.
  std::optional<Micros> sim_time_per_run;
  std::uint64_t seed_base = 1;
  /// When sweeping T, keep F = T.
  bool on_tracks_off = true;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;
  ThroughputEstimator estimator = simulated_throughput;
};

struct SweepRow {
  std::int64_t value = 0;
  int class_id = 0;
  double model_bps = 0.0;
  double sim_mean_bps = 0.0;
  std::optional<double> sim_ci95_bps;
  double pct_error = 0.0;
  std::vector<double> run_bps;
};

struct SweepResult {
  SweepVariable variable = SweepVariable::station_count_N;
  std::vector<SweepRow> rows;

  const SweepRow& at(std::int64_t value, int class_id) const {
    for (const auto& r : rows)
      if (r.value == value && r.class_id == class_id) return r;
    throw std::out_of_range("no sweep row for value " + std::to_string(value));
  }
};

/// Failure at one sweep point; the original exception is nested.
class SweepPointError : public std::runtime_error {
 public:
  SweepPointError(std::int64_t value, const std::string& what)
      : std::runtime_error("sweep point " + std::to_string(value) + ": " + what), value_(value) {}
  std::int64_t value() const noexcept { return value_; }

 private:
  std::int64_t value_;
};

inline Micros default_sim_time(const InterferencePattern& p) { return Micros{500 * p.period().count()}; }

inline ScenarioConfig scenario_at(const SweepSpec& spec, std::int64_t value) {
  ScenarioConfig c = spec.base;
  if (spec.variable == SweepVariable::station_count_N) {
    c = with_split_population(std::move(c), static_cast<int>(value));
  } else {
    c.interference.off_T = Micros{value};
    if (spec.on_tracks_off) c.interference.on_F = Micros{value};
  }
  return c;
}

/// Analytic per-class throughput; TXOP scenarios use the uniform-tau model.
inline ClassPair<double> model_throughput(const ValidatedScenario& s) {
  if (s.txop().enabled()) return throughput_txop(s).per_class_bps;
  return throughput(solve_fixed_point(s), s).per_class_bps;
}

inline void check_sweep_spec(const SweepSpec& spec) {
  if (spec.values.empty()) throw InvalidParameter("values", "sweep needs at least one value");
  if (!std::is_sorted(spec.values.begin(), spec.values.end()) ||
      std::adjacent_find(spec.values.begin(), spec.values.end()) != spec.values.end())
    throw InvalidParameter("values", "must be strictly increasing");
  if (spec.runs_per_point < 1) throw InvalidParameter("runs_per_point", "must be >= 1");
  if (spec.variable == SweepVariable::station_count_N) {
    for (auto n : spec.values)
      if (n < 2 || n % 2 != 0) throw InvalidParameter("values", "station counts must be even and >= 2");
  }
}

namespace detail {

// Runs jobs on a bounded pool; each job writes only its own slot.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
}

}  // namespace detail

inline SweepResult run_sweep(const SweepSpec& spec) {
  check_sweep_spec(spec);
  const std::size_t points = spec.values.size();
  const auto runs = static_cast<std::size_t>(spec.runs_per_point);

  std::vector<std::optional<ValidatedScenario>> scenarios(points);
  std::vector<ClassPair<double>> model(points);
  for (std::size_t i = 0; i < points; ++i) {
    try {
      scenarios[i] = validate(scenario_at(spec, spec.values[i]));
      model[i] = model_throughput(*scenarios[i]);
    } catch (const std::exception& e) {
      std::throw_with_nested(SweepPointError(spec.values[i], e.what()));
    }
  }

  std::vector<std::vector<double>> per_run(points * runs);
  std::vector<std::exception_ptr> errors(points * runs);
  detail::parallel_for(points * runs, spec.workers, [&](std::size_t job) {
    const auto& s = *scenarios[job / runs];
    const Micros sim_time = spec.sim_time_per_run.value_or(default_sim_time(s.interference()));
    try {
      per_run[job] = spec.estimator(s, spec.seed_base + job % runs, sim_time);
    } catch (...) {
      errors[job] = std::current_exception();
    }
  });

  SweepResult result;
  result.variable = spec.variable;
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t r = 0; r < runs; ++r) {
      if (!errors[i * runs + r]) continue;
      try {
        std::rethrow_exception(errors[i * runs + r]);
      } catch (const std::exception& e) {
        std::throw_with_nested(SweepPointError(spec.values[i], e.what()));
      }
    }
    for (int c = 0; c < 2; ++c) {
      SweepRow row;
      row.value = spec.values[i];
      row.class_id = c;
      row.model_bps = model[i][static_cast<std::size_t>(c)];
      for (std::size_t r = 0; r < runs; ++r) row.run_bps.push_back(per_run[i * runs + r].at(static_cast<std::size_t>(c)));
      row.sim_mean_bps = mean(row.run_bps);
      row.sim_ci95_bps = ci95_half_width(row.run_bps);
      row.pct_error = percentage_error(row.model_bps, row.sim_mean_bps);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

struct ModelValidation {
  /// Largest per-class error over the station counts, keyed by T in microseconds.
  std::map<std::int64_t, double> max_error_by_T;
  double max_error = 0.0;
  double threshold = 9.0;
  bool passed = false;
  std::vector<SweepResult> sweeps;
};

struct ModelValidationSpec {
  ScenarioConfig base = default_scenario();
  std::vector<std::int64_t> off_periods_us{20000, 40000, 80000};
  std::vector<std::int64_t> station_counts{2, 10, 30, 50};
  int runs_per_point = 10;
  std::optional<Micros> sim_time_per_run;
  std::uint64_t seed_base = 1;
  double threshold = 9.0;
  unsigned workers = 0;
  ThroughputEstimator estimator = simulated_throughput;
};

/// Model-vs-simulation percentage error over N for each T (with F = T).
inline ModelValidation validate_model(const ModelValidationSpec& spec) {
  for (const auto& c : spec.base.classes)
    if (c.count_n < 1) throw InvalidParameter("classes", "both classes must be populated");
  ModelValidation out;
  out.threshold = spec.threshold;
  for (auto t : spec.off_periods_us) {
    SweepSpec sweep;
    sweep.base = spec.base;
    sweep.base.interference.off_T = Micros{t};
    sweep.base.interference.on_F = Micros{t};
    sweep.values = spec.station_counts;
    sweep.runs_per_point = spec.runs_per_point;
    sweep.sim_time_per_run = spec.sim_time_per_run;
    sweep.seed_base = spec.seed_base;
    sweep.workers = spec.workers;
    sweep.estimator = spec.estimator;
    auto res = run_sweep(sweep);
    double worst = 0.0;
    for (const auto& r : res.rows) worst = std::max(worst, r.pct_error);
    out.max_error_by_T[t] = worst;
    out.max_error = std::max(out.max_error, worst);
    out.sweeps.push_back(std::move(res));
  }
  out.passed = out.max_error < spec.threshold;
  return out;
}

/// N sweep with a uniform TXOP limit, which must equal the longer airtime.
inline SweepResult txop_comparison(const ScenarioConfig& base, std::vector<std::int64_t> station_counts,
                                   int runs_per_point = 10, std::uint64_t seed_base = 1, unsigned workers = 0,
                                   std::optional<Micros> sim_time_per_run = std::nullopt) {
  const auto v = validate(base);
  if (v.classes().size() != 2) throw InvalidParameter("classes", "TXOP comparison needs two classes");
  if (v.txop().limit != v.classes()[1].airtime_X)
    throw InvalidParameter("txop.limit", "TXOP comparison expects the limit to equal the longer airtime");
  SweepSpec spec;
  spec.base = base;
  spec.values = std::move(station_counts);
  spec.runs_per_point = runs_per_point;
  spec.seed_base = seed_base;
  spec.workers = workers;
  spec.sim_time_per_run = sim_time_per_run;
  return run_sweep(spec);
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "variable,value,class,model_bps,sim_mean_bps,ci95_bps,pct_error\n";
  out << std::setprecision(10);
  for (const auto& row : r.rows) {
    out << to_string(r.variable) << ',' << row.value << ',' << row.class_id << ',' << row.model_bps << ','
        << row.sim_mean_bps << ',';
    if (row.sim_ci95_bps) out << *row.sim_ci95_bps;
    out << ',' << row.pct_error << '\n';
  }
}

inline void write_offset_csv(std::ostream& out, const std::vector<std::vector<OffsetBin>>& hist) {
  out << "class,offset_us,attempts,collisions,probability\n";
  out << std::setprecision(10);
  for (std::size_t c = 0; c < hist.size(); ++c) {
    for (const auto& b : hist[c]) {
      out << c << ',' << b.offset_us << ',' << b.attempts << ',' << b.collisions << ',';
      if (b.probability) out << *b.probability;
      out << '\n';
    }
  }
}

}  // namespace dcfcoex

#endif  // DCFCOEX_HARNESS_HPP_
