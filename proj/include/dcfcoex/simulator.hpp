#ifndef DCFCOEX_SIMULATOR_HPP_
#define DCFCOEX_SIMULATOR_HPP_

// Slot-level Monte-Carlo model of saturated DCF stations sharing the channel
// with a periodic ON/OFF interferer.
//
// Time runs in integer microseconds. Each idle period anchors a slot grid at
// the instant the channel became idle; a station joins the grid at the first
// slot boundary after its own ready_at and transmits when its counter expires.
// Stations on the same boundary collide. Transmissions never start inside an
// ON period but may start before one and run into it, which corrupts them.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcfcoex/analytic.hpp"
#include "dcfcoex/rng.hpp"
#include "dcfcoex/scenario.hpp"

namespace dcfcoex {

class InvalidDuration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ChannelEvent { idle, success, wifi_collision, lte_collision, on_period };

inline const char* to_string(ChannelEvent e) {
  switch (e) {
    case ChannelEvent::idle: return "idle";
    case ChannelEvent::success: return "success";
    case ChannelEvent::wifi_collision: return "wifi_collision";
    case ChannelEvent::lte_collision: return "lte_collision";
    case ChannelEvent::on_period: return "on_period";
  }
  return "unknown";
}

struct TraceRecord {
  std::int64_t t_start = 0;
  std::int64_t duration = 0;
  ChannelEvent type = ChannelEvent::idle;
  std::vector<int> stations;
  /// Frames delivered, for success records.
  int frames = 0;
};

inline void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << "t_start_us,duration_us,type,stations,frames\n";
  for (const auto& r : trace) {
    out << r.t_start << ',' << r.duration << ',' << to_string(r.type) << ',';
    for (std::size_t i = 0; i < r.stations.size(); ++i) out << (i ? ";" : "") << r.stations[i];
    out << ',' << r.frames << '\n';
  }
}

struct StationStats {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::uint64_t wifi_collisions = 0;
  std::uint64_t lte_collisions = 0;
  std::uint64_t drops = 0;
  std::uint64_t delivered_frames = 0;
  std::uint64_t delivered_bits = 0;
  /// Idle slots in which the backoff counter was decremented.
  std::uint64_t backoff_slots = 0;

  bool operator==(const StationStats&) const = default;
};

struct StationState {
  int class_id = 0;
  int backoff_counter = 0;
  int stage = 0;  // also the retry count of the head-of-line frame
  std::int64_t ready_at = 0;
  StationStats stats;
};

struct OffsetBins {
  std::vector<std::uint64_t> attempts;
  std::vector<std::uint64_t> collisions;

  bool operator==(const OffsetBins&) const = default;
};

struct ClassReport {
  std::uint64_t delivered_bits = 0;
  double throughput_bps = 0.0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::uint64_t wifi_collisions = 0;
  std::uint64_t lte_collisions = 0;
  std::uint64_t drops = 0;
  std::uint64_t backoff_slots = 0;
  /// Attempts starting at an offset in (T - X_i, T) and how many of them failed.
  std::uint64_t dead_window_attempts = 0;
  std::uint64_t dead_window_collisions = 0;
  OffsetBins offsets;

  std::uint64_t collisions() const { return wifi_collisions + lte_collisions; }
  double mean_p() const { return attempts ? static_cast<double>(collisions()) / static_cast<double>(attempts) : 0.0; }
  double tau_hat() const {
    const auto opportunities = attempts + backoff_slots;
    return opportunities ? static_cast<double>(attempts) / static_cast<double>(opportunities) : 0.0;
  }

  bool operator==(const ClassReport&) const = default;
};

struct SimReport {
  std::vector<ClassReport> per_class;
  std::vector<StationStats> per_station;
  Micros sim_time{0};
  std::uint64_t seed = 0;
  std::string rng = Philox4x32::kName;
  Micros bin_width{0};
  Micros off_T{0};
  std::int64_t idle_us = 0;
  std::int64_t busy_us = 0;
  std::int64_t on_us = 0;

  bool operator==(const SimReport&) const = default;
};

/// Geometry of the periodic interferer in integer microseconds.
class InterferenceClock {
 public:
  explicit InterferenceClock(const InterferencePattern& p)
      : on_(p.on_F.count()), off_(p.off_T.count()), period_(p.period().count()), phase_(p.phase.count()) {}

  bool active() const { return on_ > 0; }
  std::int64_t offset(std::int64_t t) const { return ((t - phase_) % period_ + period_) % period_; }
  std::int64_t cycle_start(std::int64_t t) const { return t - offset(t); }
  bool in_on(std::int64_t t) const { return active() && offset(t) >= off_; }
  /// Start of the ON burst closing the cycle that contains t.
  std::int64_t on_start(std::int64_t t) const { return cycle_start(t) + off_; }
  std::int64_t on_end(std::int64_t t) const { return cycle_start(t) + period_; }

  bool overlaps(std::int64_t start, std::int64_t airtime) const {
    if (!active()) return false;
    return in_on(start) || start + airtime > on_start(start);
  }

  /// Measure of [start, end) covered by ON bursts.
  std::int64_t on_overlap(std::int64_t start, std::int64_t end) const {
    if (!active() || end <= start) return 0;
    std::int64_t total = 0;
    for (std::int64_t cs = cycle_start(start); cs < end; cs += period_) {
      const std::int64_t a = std::max(start, cs + off_);
      const std::int64_t b = std::min(end, cs + period_);
      if (b > a) total += b - a;
    }
    return total;
  }

  std::int64_t on() const { return on_; }
  std::int64_t off() const { return off_; }

 private:
  std::int64_t on_;
  std::int64_t off_;
  std::int64_t period_;
  std::int64_t phase_;
};

/// True iff [t_start, t_start + airtime) intersects an ON burst.
inline bool overlaps_interference(Micros t_start, Micros airtime, const InterferencePattern& pattern) {
  return InterferenceClock(pattern).overlaps(t_start.count(), airtime.count());
}

/// Uniform backoff draw on [0, CW_stage].
inline int draw_backoff(int stage, const DcfParams& dcf, Philox4x32& rng) {
  return static_cast<int>(rng.uniform_inclusive(static_cast<std::uint32_t>(cw_at_stage(stage, dcf))));
}

class Simulator {
 public:
  struct RoundOutcome {
    std::int64_t next_now = 0;
    /// Channel events of the round; only filled when recording is enabled.
    std::span<const TraceRecord> events;
  };

  Simulator(const ValidatedScenario& scenario, std::uint64_t seed)
      : scenario_(scenario),
        clock_(scenario.interference()),
        sigma_(scenario.dcf().slot_sigma.count()),
        ack_timeout_(scenario.dcf().ack_timeout.count()),
        difs_(scenario.dcf().difs.count()),
        seed_(seed) {
    const auto& cls = scenario.classes();
    for (std::size_t c = 0; c < cls.size(); ++c) {
      for (int k = 0; k < cls[c].count_n; ++k) {
        StationState s;
        s.class_id = static_cast<int>(c);
        rngs_.emplace_back(seed, stations_.size());
        s.backoff_counter = draw_backoff(0, scenario.dcf(), rngs_.back());
        stations_.push_back(s);
      }
      airtime_.push_back(cls[c].airtime_X.count());
      payload_.push_back(cls[c].payload_P);
      frames_.push_back(scenario.txop().enabled() ? frames_per_txop(scenario.txop().limit, cls[c].airtime_X) : 1);
    }
    const auto bins = static_cast<std::size_t>((clock_.off() + sigma_ - 1) / sigma_);
    classes_.resize(cls.size());
    for (auto& c : classes_) {
      c.offsets.attempts.assign(bins, 0);
      c.offsets.collisions.assign(bins, 0);
    }
    if (clock_.in_on(0)) {
      on_us_ += clock_.on_end(0);
      idle_us_ += difs_;
      now_ = clock_.on_end(0) + difs_;
    }
  }

  std::int64_t now() const { return now_; }
  std::span<StationState> stations() { return stations_; }
  std::span<const StationState> stations() const { return stations_; }
  void set_recording(bool on) { recording_ = on; }

  /// Runs contention from the current idle instant until the next channel
  /// event (a transmission or the next ON burst) and returns the new idle
  /// instant.
  RoundOutcome resolve_contention_round() {
    events_.clear();
    const std::int64_t e = now_;
    const std::int64_t next_on = clock_.active() ? clock_.on_start(e) : std::numeric_limits<std::int64_t>::max();

    // Grid index at which each station joins contention, and its firing slot.
    std::int64_t first = std::numeric_limits<std::int64_t>::max();
    join_.resize(stations_.size());
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      const auto& s = stations_[i];
      join_[i] = s.ready_at <= e ? 0 : (s.ready_at - e + sigma_ - 1) / sigma_;
      first = std::min(first, join_[i] + s.backoff_counter);
    }
    const std::int64_t t_tx = e + first * sigma_;

    if (t_tx >= next_on) {
      const std::int64_t slots_before_on = (next_on - e + sigma_ - 1) / sigma_;
      freeze_all(slots_before_on);
      record(e, next_on - e, ChannelEvent::idle, {});
      record(next_on, clock_.on(), ChannelEvent::on_period, {});
      idle_us_ += next_on - e + difs_;
      on_us_ += clock_.on();
      now_ = next_on + clock_.on() + difs_;
      return {now_, events_};
    }

    transmitters_.clear();
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      if (join_[i] + stations_[i].backoff_counter == first) transmitters_.push_back(static_cast<int>(i));
    }
    freeze_all(first);
    if (t_tx > e) record(e, t_tx - e, ChannelEvent::idle, {});
    idle_us_ += t_tx - e;

    std::int64_t duration = 0;
    if (transmitters_.size() == 1) {
      duration = transmit_alone(transmitters_.front(), t_tx);
    } else {
      duration = transmit_colliding(t_tx);
    }

    const std::int64_t busy_end = t_tx + duration;
    const std::int64_t overlap = clock_.on_overlap(t_tx, busy_end);
    busy_us_ += duration - overlap;
    on_us_ += overlap;
    if (clock_.in_on(busy_end)) {
      const std::int64_t on_end = clock_.on_end(busy_end);
      record(busy_end, on_end - busy_end, ChannelEvent::on_period, {});
      on_us_ += on_end - busy_end;
      idle_us_ += difs_;
      now_ = on_end + difs_;
    } else {
      now_ = busy_end;
    }
    return {now_, events_};
  }

  SimReport run(Micros sim_time, std::vector<TraceRecord>* trace = nullptr) {
    if (sim_time.count() <= 0) throw InvalidDuration("sim_time must be positive");
    recording_ = trace != nullptr;
    while (now_ < sim_time.count()) {
      const auto out = resolve_contention_round();
      if (trace) trace->insert(trace->end(), out.events.begin(), out.events.end());
    }
    return report();
  }

  /// Snapshot of the counters up to the current idle instant.
  SimReport report() const {
    SimReport r;
    r.sim_time = Micros{now_};
    r.seed = seed_;
    r.bin_width = Micros{sigma_};
    r.off_T = Micros{clock_.off()};
    r.idle_us = idle_us_;
    r.busy_us = busy_us_;
    r.on_us = on_us_;
    r.per_class = classes_;
    for (const auto& s : stations_) {
      r.per_station.push_back(s.stats);
      auto& c = r.per_class[static_cast<std::size_t>(s.class_id)];
      c.delivered_bits += s.stats.delivered_bits;
      c.attempts += s.stats.attempts;
      c.successes += s.stats.successes;
      c.wifi_collisions += s.stats.wifi_collisions;
      c.lte_collisions += s.stats.lte_collisions;
      c.drops += s.stats.drops;
      c.backoff_slots += s.stats.backoff_slots;
    }
    for (auto& c : r.per_class) {
      c.throughput_bps = now_ > 0 ? static_cast<double>(c.delivered_bits) / to_seconds(r.sim_time) : 0.0;
    }
    return r;
  }

 private:
  // Every station that joined the grid before slot `elapsed` counts down the
  // idle slots it saw.
  void freeze_all(std::int64_t elapsed) {
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      const std::int64_t seen = elapsed - join_[i];
      if (seen <= 0) continue;
      auto& s = stations_[i];
      const auto dec = static_cast<int>(std::min<std::int64_t>(seen, s.backoff_counter));
      s.backoff_counter -= dec;
      s.stats.backoff_slots += static_cast<std::uint64_t>(dec);
    }
  }

  void note_attempt(int id, std::int64_t t, bool failed) {
    auto& s = stations_[static_cast<std::size_t>(id)];
    ++s.stats.attempts;
    auto& c = classes_[static_cast<std::size_t>(s.class_id)];
    const std::int64_t off = clock_.offset(t) % clock_.off();
    const auto bin = static_cast<std::size_t>(off / sigma_);
    ++c.offsets.attempts[bin];
    if (failed) ++c.offsets.collisions[bin];
    if (clock_.active() && off > clock_.off() - airtime_[static_cast<std::size_t>(s.class_id)]) {
      ++c.dead_window_attempts;
      if (failed) ++c.dead_window_collisions;
    }
  }

  void succeed(int id, std::int64_t busy_end) {
    auto& s = stations_[static_cast<std::size_t>(id)];
    ++s.stats.successes;
    s.stage = 0;
    s.backoff_counter = draw_backoff(0, scenario_.dcf(), rngs_[static_cast<std::size_t>(id)]);
    s.ready_at = busy_end;
  }

  void fail(int id, std::int64_t t_tx, bool interference) {
    auto& s = stations_[static_cast<std::size_t>(id)];
    ++(interference ? s.stats.lte_collisions : s.stats.wifi_collisions);
    s.ready_at = t_tx + airtime_[static_cast<std::size_t>(s.class_id)] + ack_timeout_;
    if (++s.stage > scenario_.dcf().retry_limit_R) {
      ++s.stats.drops;
      s.stage = 0;
    }
    s.backoff_counter = draw_backoff(s.stage, scenario_.dcf(), rngs_[static_cast<std::size_t>(id)]);
  }

  std::int64_t transmit_alone(int id, std::int64_t t_tx) {
    auto& s = stations_[static_cast<std::size_t>(id)];
    const auto cls = static_cast<std::size_t>(s.class_id);
    const std::int64_t x = airtime_[cls];
    if (clock_.overlaps(t_tx, x)) {
      note_attempt(id, t_tx, true);
      fail(id, t_tx, true);
      record(t_tx, x, ChannelEvent::lte_collision, {id});
      return x;
    }
    note_attempt(id, t_tx, false);
    // TXOP burst: frames go back to back, each acknowledged on its own; the
    // first one that runs into an ON burst is lost and ends the burst.
    int delivered = 1;
    int sent = 1;
    while (sent < frames_[cls]) {
      ++sent;
      if (clock_.overlaps(t_tx + (sent - 1) * x, x)) break;
      ++delivered;
    }
    s.stats.delivered_frames += static_cast<std::uint64_t>(delivered);
    s.stats.delivered_bits += static_cast<std::uint64_t>(delivered * payload_[cls]);
    const std::int64_t duration = sent * x;
    succeed(id, t_tx + duration);
    if (recording_) {
      record(t_tx, duration, ChannelEvent::success, {id});
      events_.back().frames = delivered;
    }
    return duration;
  }

  std::int64_t transmit_colliding(std::int64_t t_tx) {
    std::int64_t duration = 0;
    bool any_interference = false;
    for (int id : transmitters_) {
      const std::int64_t x = airtime_[static_cast<std::size_t>(stations_[static_cast<std::size_t>(id)].class_id)];
      duration = std::max(duration, x);
      const bool hit = clock_.overlaps(t_tx, x);
      any_interference = any_interference || hit;
      note_attempt(id, t_tx, true);
      fail(id, t_tx, hit);
    }
    record(t_tx, duration, any_interference ? ChannelEvent::lte_collision : ChannelEvent::wifi_collision,
           transmitters_);
    return duration;
  }

  void record(std::int64_t t, std::int64_t d, ChannelEvent type, std::vector<int> ids) {
    if (!recording_) return;
    events_.push_back(TraceRecord{t, d, type, std::move(ids), 0});
  }

  ValidatedScenario scenario_;
  InterferenceClock clock_;
  std::int64_t sigma_;
  std::int64_t ack_timeout_;
  std::int64_t difs_;
  std::uint64_t seed_;

  std::vector<StationState> stations_;
  std::vector<Philox4x32> rngs_;
  std::vector<std::int64_t> airtime_;
  std::vector<std::int64_t> payload_;
  std::vector<int> frames_;
  std::vector<ClassReport> classes_;

  std::int64_t now_ = 0;
  std::int64_t idle_us_ = 0;
  std::int64_t busy_us_ = 0;
  std::int64_t on_us_ = 0;

  bool recording_ = true;
  std::vector<TraceRecord> events_;
  std::vector<std::int64_t> join_;
  std::vector<int> transmitters_;
};

inline SimReport simulate(const ValidatedScenario& scenario, std::uint64_t seed, Micros sim_time,
                          std::vector<TraceRecord>* trace = nullptr) {
  if (sim_time.count() <= 0) throw InvalidDuration("sim_time must be positive");
  Simulator sim(scenario, seed);
  return sim.run(sim_time, trace);
}

struct OffsetBin {
  std::int64_t offset_us = 0;
  std::uint64_t attempts = 0;
  std::uint64_t collisions = 0;
  /// collisions / attempts; empty when the bin saw no attempts.
  std::optional<double> probability;
};

/// Conditional collision probability against the offset from the start of
/// the OFF period, regrouped into `bins` equal bins over [0, T).
inline std::vector<std::vector<OffsetBin>> offset_histogram(const SimReport& report, int bins) {
  if (bins < 1) throw InvalidParameter("bins", "must be >= 1");
  const std::int64_t t = report.off_T.count();
  const std::int64_t width = report.bin_width.count();
  std::vector<std::vector<OffsetBin>> out;
  for (const auto& c : report.per_class) {
    std::vector<OffsetBin> h(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) h[static_cast<std::size_t>(b)].offset_us = t * b / bins;
    for (std::size_t raw = 0; raw < c.offsets.attempts.size(); ++raw) {
      const std::int64_t off = static_cast<std::int64_t>(raw) * width;
      const auto b = static_cast<std::size_t>(std::min<std::int64_t>(off * bins / t, bins - 1));
      h[b].attempts += c.offsets.attempts[raw];
      h[b].collisions += c.offsets.collisions[raw];
    }
    for (auto& bin : h) {
      if (bin.attempts > 0) bin.probability = static_cast<double>(bin.collisions) / static_cast<double>(bin.attempts);
    }
    out.push_back(std::move(h));
  }
  return out;
}

/// Native per-slot histogram (bin width sigma).
inline std::vector<std::vector<OffsetBin>> offset_histogram(const SimReport& report) {
  const auto slots = report.per_class.empty() ? 0 : report.per_class.front().offsets.attempts.size();
  const std::int64_t width = report.bin_width.count();
  std::vector<std::vector<OffsetBin>> out;
  for (const auto& c : report.per_class) {
    std::vector<OffsetBin> h(slots);
    for (std::size_t b = 0; b < slots; ++b) {
      h[b].offset_us = static_cast<std::int64_t>(b) * width;
      h[b].attempts = c.offsets.attempts[b];
      h[b].collisions = c.offsets.collisions[b];
      if (h[b].attempts > 0)
        h[b].probability = static_cast<double>(h[b].collisions) / static_cast<double>(h[b].attempts);
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace dcfcoex

#endif  // DCFCOEX_SIMULATOR_HPP_
