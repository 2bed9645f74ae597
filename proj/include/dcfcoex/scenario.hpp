#ifndef DCFCOEX_SCENARIO_HPP_
#define DCFCOEX_SCENARIO_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcfcoex {

/// All channel timing is carried in integer microseconds.
using Micros = std::chrono::microseconds;

inline constexpr double to_seconds(Micros d) { return static_cast<double>(d.count()) * 1e-6; }

class InvalidParameter : public std::invalid_argument {
 public:
  InvalidParameter(std::string field, const std::string& reason)
      : std::invalid_argument(field + ": " + reason), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A class airtime that does not fit in the OFF period: the class could never
/// complete a frame before the next interference burst.
class XExceedsT : public InvalidParameter {
 public:
  XExceedsT(std::size_t class_index, Micros airtime, Micros off)
      : InvalidParameter("classes[" + std::to_string(class_index) + "].airtime_X",
                         "airtime " + std::to_string(airtime.count()) +
                             " us is not shorter than off_T " + std::to_string(off.count()) +
                             " us") {}
};

struct DcfParams {
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit_R = 7;
  Micros slot_sigma{9};
  /// Extra wait of a collider beyond its own exchange airtime before it resumes.
  Micros ack_timeout{16};
  Micros difs{34};

  bool operator==(const DcfParams&) const = default;
};

struct ClassSpec {
  int count_n = 1;
  /// Full channel occupancy of one successful exchange (data, SIFS, ACK, DIFS).
  Micros airtime_X{326};
  std::int64_t payload_P = 12000;  // bits

  bool operator==(const ClassSpec&) const = default;
};

/// Periodic ON/OFF interferer. Each period of length off_T + on_F starts at
/// `phase` with the OFF part: [phase, phase + T) idle, [phase + T, phase + T + F) ON.
struct InterferencePattern {
  Micros on_F{40000};
  Micros off_T{40000};
  Micros phase{0};

  Micros period() const { return on_F + off_T; }
  double duty_cycle() const {
    return static_cast<double>(on_F.count()) / static_cast<double>(period().count());
  }

  bool operator==(const InterferencePattern&) const = default;
};

struct TxopPolicy {
  Micros limit{0};  // zero disables TXOP bursting

  bool enabled() const { return limit.count() > 0; }
  bool operator==(const TxopPolicy&) const = default;
};

struct ScenarioConfig {
  DcfParams dcf;
  std::vector<ClassSpec> classes;
  InterferencePattern interference;
  TxopPolicy txop;

  int total_stations() const {
    int n = 0;
    for (const auto& c : classes) n += c.count_n;
    return n;
  }

  bool operator==(const ScenarioConfig&) const = default;
};

/// A scenario that passed validate(): every invariant holds and classes are
/// sorted by ascending airtime. Only validate() can produce one.
class ValidatedScenario {
 public:
  const ScenarioConfig& config() const noexcept { return config_; }
  const DcfParams& dcf() const noexcept { return config_.dcf; }
  const std::vector<ClassSpec>& classes() const noexcept { return config_.classes; }
  const InterferencePattern& interference() const noexcept { return config_.interference; }
  const TxopPolicy& txop() const noexcept { return config_.txop; }

  bool operator==(const ValidatedScenario&) const = default;

 private:
  explicit ValidatedScenario(ScenarioConfig c) : config_(std::move(c)) {}
  friend ValidatedScenario validate(ScenarioConfig config);

  ScenarioConfig config_;
};

inline ValidatedScenario validate(ScenarioConfig config) {
  const auto& d = config.dcf;
  if (d.cw_min < 1) throw InvalidParameter("dcf.cw_min", "must be >= 1");
  if (d.cw_max < d.cw_min) throw InvalidParameter("dcf.cw_max", "must be >= cw_min");
  const unsigned w = static_cast<unsigned>(d.cw_min) + 1u;
  if ((w & (w - 1u)) != 0u) throw InvalidParameter("dcf.cw_min", "cw_min + 1 must be a power of two");
  if (d.retry_limit_R < 0) throw InvalidParameter("dcf.retry_limit_R", "must be >= 0");
  if (d.retry_limit_R > 62) throw InvalidParameter("dcf.retry_limit_R", "must be <= 62");
  if (d.slot_sigma.count() <= 0) throw InvalidParameter("dcf.slot_sigma", "must be > 0");
  if (d.ack_timeout.count() < 0) throw InvalidParameter("dcf.ack_timeout", "must be >= 0");
  if (d.difs.count() < 0) throw InvalidParameter("dcf.difs", "must be >= 0");

  const auto& in = config.interference;
  if (in.on_F.count() < 0) throw InvalidParameter("interference.on_F", "must be >= 0");
  if (in.off_T.count() <= 0) throw InvalidParameter("interference.off_T", "must be > 0");
  if (in.phase.count() < 0) throw InvalidParameter("interference.phase", "must be >= 0");
  if (d.difs >= in.off_T) throw InvalidParameter("dcf.difs", "must be shorter than off_T");

  if (config.classes.empty()) throw InvalidParameter("classes", "at least one class is required");
  for (std::size_t i = 0; i < config.classes.size(); ++i) {
    const auto& c = config.classes[i];
    const std::string prefix = "classes[" + std::to_string(i) + "].";
    if (c.count_n < 0) throw InvalidParameter(prefix + "count_n", "must be >= 0");
    if (c.airtime_X.count() <= 0) throw InvalidParameter(prefix + "airtime_X", "must be > 0");
    if (c.payload_P <= 0) throw InvalidParameter(prefix + "payload_P", "must be > 0");
    if (c.airtime_X >= in.off_T) throw XExceedsT(i, c.airtime_X, in.off_T);
  }
  if (config.total_stations() < 1) throw InvalidParameter("classes", "no stations in any class");

  if (config.txop.limit.count() < 0) throw InvalidParameter("txop.limit", "must be >= 0");
  if (config.txop.limit > in.off_T) throw InvalidParameter("txop.limit", "must not exceed off_T");

  std::stable_sort(config.classes.begin(), config.classes.end(),
                   [](const ClassSpec& a, const ClassSpec& b) { return a.airtime_X < b.airtime_X; });
  return ValidatedScenario(std::move(config));
}

inline ValidatedScenario validate(const ValidatedScenario& v) { return v; }

/// 1500-byte frames at 54 Mb/s (24 Mb/s control rate) and at 6 Mb/s.
inline constexpr Micros kAirtime54Mbps{326};
inline constexpr Micros kAirtime6Mbps{2158};
inline constexpr std::int64_t kPayload1500B = 1500 * 8;

/// Reference configuration: one 54 Mb/s and one 6 Mb/s station, 50% duty
/// cycle with 40 ms ON and 40 ms OFF, TXOP disabled.
inline ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.dcf = DcfParams{};
  c.classes = {ClassSpec{1, kAirtime54Mbps, kPayload1500B}, ClassSpec{1, kAirtime6Mbps, kPayload1500B}};
  c.interference = InterferencePattern{Micros{40000}, Micros{40000}, Micros{0}};
  c.txop = TxopPolicy{Micros{0}};
  return c;
}

/// Two equally sized classes (N/2 each) on top of `base`.
inline ScenarioConfig with_split_population(ScenarioConfig base, int total_n) {
  if (base.classes.size() != 2) throw InvalidParameter("classes", "population split needs exactly two classes");
  if (total_n < 2 || total_n % 2 != 0) throw InvalidParameter("N", "must be even and >= 2");
  base.classes[0].count_n = total_n / 2;
  base.classes[1].count_n = total_n / 2;
  return base;
}

}  // namespace dcfcoex

#endif  // DCFCOEX_SCENARIO_HPP_
