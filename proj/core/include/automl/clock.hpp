#pragma once

#include <atomic>
#include <chrono>

namespace automl {

// Time source threaded through everything whose control flow depends on
// elapsed time (search budgets, timing metrics, meta-training budgets).
//
// Two implementations:
//  - WallClock: monotonic wall time; charge() is a no-op, so measured
//    durations are real durations.
//  - SimulatedClock: virtual time that only moves when charge()d. Learners
//    charge an analytic cost per fit/predict, which makes every timing
//    metric and every budget decision a pure function of the inputs. This
//    is what makes meta-training byte-for-byte reproducible.
class Clock {
 public:
  virtual ~Clock() = default;

  // Seconds since an arbitrary epoch. Monotone non-decreasing.
  virtual double now() const = 0;

  // Account for `seconds` of modeled work. Real clocks ignore this.
  virtual void charge(double seconds) { (void)seconds; }

  virtual bool simulated() const { return false; }
};

class WallClock final : public Clock {
 public:
  double now() const override {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
};

// Thread-safe: workers charging concurrently never lose an update.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(double start = 0.0) : t_(start) {}

  double now() const override { return t_.load(std::memory_order_relaxed); }

  void charge(double seconds) override {
    if (seconds <= 0) return;
    double cur = t_.load(std::memory_order_relaxed);
    while (!t_.compare_exchange_weak(cur, cur + seconds,
                                     std::memory_order_relaxed)) {
    }
  }

  void set(double t) { t_.store(t, std::memory_order_relaxed); }
  bool simulated() const override { return true; }

 private:
  std::atomic<double> t_;
};

}  // namespace automl
