#ifndef DCFCOEX_ANALYTIC_HPP_
#define DCFCOEX_ANALYTIC_HPP_

// Persistent-DCF fixed-point model for two station classes that share the
// channel with a periodic interferer. Each class sees two time zones in the
// OFF period: T - X_i where only Wi-Fi contention can collide, and a final X_i
// where every attempt runs into the next ON burst.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "dcfcoex/scenario.hpp"

namespace dcfcoex {

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(long iterations, double residual)
      : std::runtime_error("fixed point did not converge after " + std::to_string(iterations) +
                           " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  long iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  long iterations_;
  double residual_;
};

template <typename T>
using ClassPair = std::array<T, 2>;

struct SolverOptions {
  double damping = 0.5;
  double tolerance = 1e-9;
  long max_iterations = 100000;
};

struct FixedPointSolution {
  ClassPair<double> tau{};
  ClassPair<double> p{};
  double expected_slot_us = 0.0;
  long iterations = 0;
  double residual = 0.0;
};

struct ThroughputReport {
  ClassPair<double> per_class_bps{};
  ClassPair<double> per_class_airtime_fraction{};
  ClassPair<double> grants_G{};
};

/// Per-class throughput with a uniform TXOP limit. `main` is the part
/// delivered by grants won in [0, T - TXOP], `tail` the partial burst of the
/// last grant before the ON period.
struct TxopThroughputReport : ThroughputReport {
  double tau = 0.0;
  double p = 0.0;
  double expected_slot_us = 0.0;
  ClassPair<int> frames_per_grant_k{};
  ClassPair<double> tail_frames_k_star{};
  ClassPair<double> main_airtime_fraction{};
  ClassPair<double> tail_airtime_fraction{};
  long iterations = 0;
  double residual = 0.0;
};

/// Contention window at backoff stage j (0-based): min(2^j (CW_min + 1) - 1, CW_max).
inline int cw_at_stage(int j, const DcfParams& dcf) {
  if (j < 0) throw InvalidParameter("stage", "must be >= 0");
  const std::int64_t base = static_cast<std::int64_t>(dcf.cw_min) + 1;
  std::int64_t w = base;
  for (int s = 0; s < j && w - 1 < dcf.cw_max; ++s) w *= 2;
  return static_cast<int>(std::min<std::int64_t>(w - 1, dcf.cw_max));
}

/// Per-slot access probability of a saturated station with conditional
/// collision probability p and R retries.
///
/// The normalisation (1 - p) / (1 - p^{R+1}) is evaluated as 1 / sum_j p^j,
/// which is exact and stays finite at p = 1, where it yields the limit
/// (1 + sum_j CW_j / (2 (R + 1)))^{-1}.
inline double tau_of_p(double p, const DcfParams& dcf) {
  p = std::clamp(p, 0.0, 1.0);
  double geometric = 0.0;
  double weighted = 0.0;
  double pj = 1.0;
  for (int j = 0; j <= dcf.retry_limit_R; ++j) {
    geometric += pj;
    weighted += pj * cw_at_stage(j, dcf) / 2.0;
    pj *= p;
  }
  return 1.0 / (1.0 + weighted / geometric);
}

/// Conditional collision probability of a class-i station: contention
/// collisions over T - X_i plus certain failure over the last X_i.
inline double collision_prob(double tau_self, double tau_other, int n_self, int n_other, Micros x_self,
                             Micros off_t) {
  const double x = static_cast<double>(x_self.count());
  const double t = static_cast<double>(off_t.count());
  if (x >= t) return 1.0;
  const double idle_others =
      std::pow(1.0 - tau_self, std::max(n_self - 1, 0)) * std::pow(1.0 - tau_other, n_other);
  return (t - x) / t * (1.0 - idle_others) + x / t;
}

/// Probabilities of the three slot types {idle, class-1 only, any class 2}.
inline std::array<double, 3> slot_type_probabilities(ClassPair<double> tau, ClassPair<int> n) {
  const double idle1 = std::pow(1.0 - tau[0], n[0]);
  const double idle2 = std::pow(1.0 - tau[1], n[1]);
  return {idle1 * idle2, (1.0 - idle1) * idle2, 1.0 - idle2};
}

/// Mean contention-slot length. A slot holding any transmission of the class
/// with the longer airtime lasts that airtime; ordering is handled here so
/// callers may pass the classes in either order.
inline double expected_slot(ClassPair<double> tau, ClassPair<int> n, ClassPair<double> x_us, double sigma_us) {
  if (x_us[0] > x_us[1]) {
    std::swap(tau[0], tau[1]);
    std::swap(n[0], n[1]);
    std::swap(x_us[0], x_us[1]);
  }
  const auto probs = slot_type_probabilities(tau, n);
  return sigma_us * probs[0] + x_us[0] * probs[1] + x_us[1] * probs[2];
}

namespace detail {

inline void require_two_populated_classes(const ValidatedScenario& s) {
  if (s.classes().size() != 2) throw InvalidParameter("classes", "the analytic model needs exactly two classes");
  for (std::size_t i = 0; i < 2; ++i) {
    if (s.classes()[i].count_n < 1)
      throw InvalidParameter("classes[" + std::to_string(i) + "].count_n", "the analytic model needs n_i >= 1");
  }
}

inline ClassPair<double> collision_pair(ClassPair<double> tau, ClassPair<int> n, ClassPair<Micros> x, Micros t) {
  return {collision_prob(tau[0], tau[1], n[0], n[1], x[0], t), collision_prob(tau[1], tau[0], n[1], n[0], x[1], t)};
}

}  // namespace detail

/// Solves tau_i = f(p_i), p_i = g(tau_i, tau_-i) by damped successive substitution.
inline FixedPointSolution solve_fixed_point(const ValidatedScenario& scenario, const SolverOptions& opt = {}) {
  detail::require_two_populated_classes(scenario);
  const auto& cls = scenario.classes();
  const auto& dcf = scenario.dcf();
  const Micros t = scenario.interference().off_T;
  const ClassPair<int> n{cls[0].count_n, cls[1].count_n};
  const ClassPair<Micros> x{cls[0].airtime_X, cls[1].airtime_X};

  const double start = tau_of_p(0.0, dcf);
  ClassPair<double> tau{start, start};
  double residual = 1.0;
  long it = 0;
  for (; it < opt.max_iterations; ++it) {
    const auto p = detail::collision_pair(tau, n, x, t);
    const ClassPair<double> target{tau_of_p(p[0], dcf), tau_of_p(p[1], dcf)};
    residual = std::max(std::abs(target[0] - tau[0]), std::abs(target[1] - tau[1]));
    if (residual <= opt.tolerance) break;
    for (std::size_t i = 0; i < 2; ++i) tau[i] = (1.0 - opt.damping) * tau[i] + opt.damping * target[i];
  }
  if (residual > opt.tolerance) throw NonConvergence(it, residual);

  FixedPointSolution sol;
  sol.tau = tau;
  sol.p = detail::collision_pair(tau, n, x, t);
  sol.expected_slot_us = expected_slot(tau, n, {static_cast<double>(x[0].count()), static_cast<double>(x[1].count())},
                                       static_cast<double>(dcf.slot_sigma.count()));
  sol.iterations = it;
  sol.residual = residual;
  return sol;
}

inline ThroughputReport throughput(const FixedPointSolution& sol, const ValidatedScenario& scenario) {
  detail::require_two_populated_classes(scenario);
  const auto& cls = scenario.classes();
  const double t = static_cast<double>(scenario.interference().off_T.count());
  const double cycle = static_cast<double>(scenario.interference().period().count());

  ThroughputReport r;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t o = 1 - i;
    const double x = static_cast<double>(cls[i].airtime_X.count());
    const double grants = (t - x) / sol.expected_slot_us;
    const double success = cls[i].count_n * sol.tau[i] * std::pow(1.0 - sol.tau[i], cls[i].count_n - 1) *
                           std::pow(1.0 - sol.tau[o], cls[o].count_n);
    r.grants_G[i] = grants;
    r.per_class_bps[i] = grants * success * static_cast<double>(cls[i].payload_P) / cycle * 1e6;
    r.per_class_airtime_fraction[i] = grants * success * x / cycle;
  }
  return r;
}

/// Frames of airtime x that fit in one TXOP; at least one frame is always sent.
inline int frames_per_txop(Micros limit, Micros x) {
  return std::max<int>(1, static_cast<int>(limit.count() / x.count()));
}

/// Throughput under a uniform TXOP limit. All N stations share one access
/// probability tau because the limit equalises their contention windows; the
/// deterministic-collision window becomes the TXOP limit itself.
inline TxopThroughputReport throughput_txop(const ValidatedScenario& scenario, const SolverOptions& opt = {}) {
  detail::require_two_populated_classes(scenario);
  const Micros limit = scenario.txop().limit;
  if (limit.count() <= 0) throw InvalidParameter("txop.limit", "TXOP throughput needs a positive limit");
  const auto& cls = scenario.classes();
  const auto& dcf = scenario.dcf();
  const auto& in = scenario.interference();
  const int n_total = cls[0].count_n + cls[1].count_n;

  double tau = tau_of_p(0.0, dcf);
  double residual = 1.0;
  long it = 0;
  for (; it < opt.max_iterations; ++it) {
    const double target = tau_of_p(collision_prob(tau, 0.0, n_total, 0, limit, in.off_T), dcf);
    residual = std::abs(target - tau);
    if (residual <= opt.tolerance) break;
    tau = (1.0 - opt.damping) * tau + opt.damping * target;
  }
  if (residual > opt.tolerance) throw NonConvergence(it, residual);

  TxopThroughputReport r;
  r.tau = tau;
  r.p = collision_prob(tau, 0.0, n_total, 0, limit, in.off_T);
  r.iterations = it;
  r.residual = residual;

  ClassPair<double> burst{};
  for (std::size_t i = 0; i < 2; ++i) {
    r.frames_per_grant_k[i] = frames_per_txop(limit, cls[i].airtime_X);
    r.tail_frames_k_star[i] = (r.frames_per_grant_k[i] - 1) / 2.0;
    burst[i] = r.frames_per_grant_k[i] * static_cast<double>(cls[i].airtime_X.count());
  }
  r.expected_slot_us = expected_slot({tau, tau}, {cls[0].count_n, cls[1].count_n}, burst,
                                     static_cast<double>(dcf.slot_sigma.count()));

  const double t = static_cast<double>(in.off_T.count());
  const double cycle = static_cast<double>(in.period().count());
  const double grants = (t - static_cast<double>(limit.count())) / r.expected_slot_us;
  const double single = tau * std::pow(1.0 - tau, n_total - 1);
  const double busy = 1.0 - std::pow(1.0 - tau, n_total);
  for (std::size_t i = 0; i < 2; ++i) {
    const double x = static_cast<double>(cls[i].airtime_X.count());
    const double bits = static_cast<double>(cls[i].payload_P);
    const double main_share = grants * cls[i].count_n * single;
    const double tail_share = cls[i].count_n * single / busy;
    const double k = r.frames_per_grant_k[i];
    const double k_star = r.tail_frames_k_star[i];
    r.grants_G[i] = grants;
    r.main_airtime_fraction[i] = main_share * k * x / cycle;
    r.tail_airtime_fraction[i] = tail_share * k_star * x / cycle;
    r.per_class_airtime_fraction[i] = r.main_airtime_fraction[i] + r.tail_airtime_fraction[i];
    r.per_class_bps[i] = (main_share * k * bits + tail_share * k_star * bits) / cycle * 1e6;
  }
  return r;
}

/// Single-class, interference-free fixed point tau = f(1 - (1 - tau)^{n-1}),
/// solved by bisection (the residual is strictly increasing in tau).
inline double classic_fixed_point(int n, const DcfParams& dcf) {
  if (n < 1) throw InvalidParameter("n", "must be >= 1");
  auto h = [&](double tau) { return tau - tau_of_p(1.0 - std::pow(1.0 - tau, n - 1), dcf); };
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dcfcoex

#endif  // DCFCOEX_ANALYTIC_HPP_
