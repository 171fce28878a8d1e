#include "tailreg/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>

#include "tailreg/errors.hpp"
#include "tailreg/rng.hpp"

namespace tailreg::harness {
namespace {

// Owns one replication's mutable state; reused across replications by a
// single worker.
class Replicator {
 public:
  explicit Replicator(const ExperimentConfig& config)
      : config_(config),
        checkpoints_(config.effective_checkpoints()),
        arm_count_(config.arms.size()),
        optimal_(config.optimal_arm()),
        state_(arm_count_),
        counts_(checkpoints_.size() * arm_count_, 0),
        regret_(checkpoints_.size(), 0),
        final_means_(arm_count_, 0.0) {
    if (const auto* ucb = std::get_if<KlUcbPolicy>(&config.policy)) {
      kl_ucb_.emplace(ucb->divergence);
    } else {
      ts_variance_ = std::get<ThompsonPolicy>(config.policy).variance;
    }
    log_completed_.resize(static_cast<std::size_t>(config.horizon) + 1, 0.0);
    for (std::int64_t t = 2; t <= config.horizon; ++t) {
      log_completed_[static_cast<std::size_t>(t)] = std::log(static_cast<double>(t - 1));
    }
    arms_.reserve(arm_count_);
    streams_.reserve(arm_count_);
  }

  void run(std::int64_t replication) {
    const auto seed = config_.seed;
    const auto rep = static_cast<std::uint64_t>(replication);
    state_.reset();
    streams_.clear();
    arms_.clear();
    for (std::size_t k = 0; k < arm_count_; ++k) {
      streams_.push_back(rng::Stream::derive(seed, rep, k));
    }
    for (std::size_t k = 0; k < arm_count_; ++k) {
      arms_.emplace_back(config_.arms[k], streams_[k]);
    }
    rng::Stream policy_stream = rng::Stream::derive(seed, rep, arm_count_);

    const auto arms = static_cast<std::int64_t>(arm_count_);
    std::size_t next_checkpoint = 0;
    for (std::int64_t t = 1; t <= config_.horizon; ++t) {
      std::size_t arm;
      if (t <= arms) {
        arm = static_cast<std::size_t>(t - 1);
      } else if (kl_ucb_) {
        arm = argmax_index(log_completed_[static_cast<std::size_t>(t)]);
      } else {
        arm = policy::ts_gaussian_select(state_, ts_variance_, t, policy_stream);
      }
      const double reward = arms_[arm].next_reward(streams_[arm]);
      state_.update(arm, reward);
      if (t == checkpoints_[next_checkpoint]) {
        record(next_checkpoint);
        if (++next_checkpoint == checkpoints_.size()) break;
      }
    }
    for (std::size_t k = 0; k < arm_count_; ++k) final_means_[k] = state_.mean(k);
  }

  const std::vector<std::int64_t>& checkpoints() const { return checkpoints_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const std::vector<std::int64_t>& regret() const { return regret_; }
  const std::vector<double>& final_means() const { return final_means_; }

 private:
  std::size_t argmax_index(double log_t) const {
    std::size_t best = 0;
    double best_index = kl_ucb_->index(state_.mean(0), state_.count(0), log_t);
    for (std::size_t k = 1; k < arm_count_; ++k) {
      const double idx = kl_ucb_->index(state_.mean(k), state_.count(k), log_t);
      if (idx > best_index) {
        best_index = idx;
        best = k;
      }
    }
    return best;
  }

  void record(std::size_t checkpoint) {
    std::int64_t regret = 0;
    for (std::size_t k = 0; k < arm_count_; ++k) {
      const std::int64_t n = state_.count(k);
      counts_[checkpoint * arm_count_ + k] = n;
      if (k != optimal_) regret += n;
    }
    regret_[checkpoint] = regret;
  }

  const ExperimentConfig& config_;
  std::vector<std::int64_t> checkpoints_;
  std::size_t arm_count_;
  std::size_t optimal_;
  policy::PolicyState state_;
  std::optional<policy::KlUcb> kl_ucb_;
  double ts_variance_ = 1.0;
  std::vector<double> log_completed_;
  std::vector<rng::Stream> streams_;
  std::vector<envproc::ArmState> arms_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> regret_;
  std::vector<double> final_means_;
};

HitTable empty_table(const ExperimentConfig& config) {
  HitTable table;
  table.checkpoint_times = config.effective_checkpoints();
  table.per_checkpoint = config.thresholds.values.size();
  for (auto horizon : table.checkpoint_times) {
    for (std::size_t i = 0; i < table.per_checkpoint; ++i) {
      table.thresholds.push_back(config.threshold(i, horizon));
    }
  }
  table.hits.assign(table.thresholds.size(), 0);
  table.reps = config.replications;
  return table;
}

void accumulate(const ExperimentConfig& config, const HitTable& table,
                const std::vector<std::int64_t>& regret,
                std::vector<std::int64_t>& hits) {
  for (std::size_t c = 0; c < regret.size(); ++c) {
    for (std::size_t i = 0; i < table.per_checkpoint; ++i) {
      const std::size_t slot = c * table.per_checkpoint + i;
      if (event_occurs(config.event, regret[c], table.thresholds[slot])) ++hits[slot];
    }
  }
}

RunResult snapshot(const Replicator& replicator, std::int64_t replication,
                   std::size_t arms) {
  RunResult result;
  result.replication = replication;
  result.arms = arms;
  result.checkpoint_times = replicator.checkpoints();
  result.counts = replicator.counts();
  result.regret = replicator.regret();
  result.final_means = replicator.final_means();
  return result;
}

// Exceptions must not cross an OpenMP construct; workers park the first one
// here and skip their remaining iterations.
class FailureSink {
 public:
  template <class Body>
  void guard(Body&& body) {
    if (failed()) return;
    try {
      body();
    } catch (...) {
#pragma omp critical(tailreg_failure_sink)
      if (!error_) error_ = std::current_exception();
      failed_.store(true, std::memory_order_relaxed);
    }
  }

  bool failed() const noexcept { return failed_.load(std::memory_order_relaxed); }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::atomic<bool> failed_{false};
  std::exception_ptr error_;
};

[[noreturn]] void usage(const std::string& what) { throw UsageError(what); }

}  // namespace

void ExperimentConfig::validate() const {
  if (arms.size() < 2) usage("config: at least two arms are required");
  if (horizon < 1) usage("config: horizon must be >= 1");
  if (replications < 1) usage("config: replications must be >= 1");
  if (workers < 1) usage("config: workers must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > horizon) {
      usage("config: checkpoints must lie in [1, horizon]");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      usage("config: checkpoints must be strictly increasing");
    }
  }
  if (thresholds.values.empty()) usage("config: threshold grid is empty");
  for (double x : thresholds.values) {
    if (thresholds.fractional) {
      if (!(x > 0.0 && x <= 1.0)) usage("config: threshold fractions must lie in (0, 1]");
    } else if (!(x >= 1.0 && x <= static_cast<double>(horizon))) {
      usage("config: thresholds must lie in [1, horizon]");
    }
  }
  if (const auto* ts = std::get_if<ThompsonPolicy>(&policy);
      ts && !(ts->variance > 0.0)) {
    usage("config: Thompson sampling variance must be positive");
  }
}

std::vector<std::int64_t> ExperimentConfig::effective_checkpoints() const {
  if (checkpoints.empty()) return {horizon};
  return checkpoints;
}

double ExperimentConfig::threshold(std::size_t index, std::int64_t horizon_at) const {
  const double v = thresholds.values.at(index);
  return thresholds.fractional ? v * static_cast<double>(horizon_at) : v;
}

std::size_t ExperimentConfig::optimal_arm() const {
  std::size_t best = 0;
  double best_mean = envproc::long_run_mean(arms.at(0));
  for (std::size_t k = 1; k < arms.size(); ++k) {
    const double m = envproc::long_run_mean(arms[k]);
    if (m > best_mean) {
      best_mean = m;
      best = k;
    }
  }
  return best;
}

bool event_occurs(EventKind event, std::int64_t regret, double threshold) {
  const auto n = static_cast<double>(regret);
  return event == EventKind::AtLeast ? n >= threshold : n > threshold;
}

RunResult run_replication(const ExperimentConfig& config, std::int64_t replication) {
  config.validate();
  Replicator replicator(config);
  replicator.run(replication);
  return snapshot(replicator, replication, config.arms.size());
}

HitTable count_hits_serial(const ExperimentConfig& config) {
  config.validate();
  HitTable table = empty_table(config);
  Replicator replicator(config);
  for (std::int64_t r = 0; r < config.replications; ++r) {
    replicator.run(r);
    accumulate(config, table, replicator.regret(), table.hits);
  }
  return table;
}

HitTable count_hits(const ExperimentConfig& config) {
  config.validate();
  HitTable table = empty_table(config);
  FailureSink failure;
#pragma omp parallel num_threads(config.workers)
  {
    std::optional<Replicator> replicator;
    failure.guard([&] { replicator.emplace(config); });
    std::vector<std::int64_t> local(table.hits.size(), 0);
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < config.replications; ++r) {
      if (failure.failed()) continue;
      failure.guard([&] {
        replicator->run(r);
        accumulate(config, table, replicator->regret(), local);
      });
    }
#pragma omp critical(tailreg_hit_reduce)
    for (std::size_t i = 0; i < local.size(); ++i) table.hits[i] += local[i];
  }
  failure.rethrow();
  return table;
}

std::vector<RunResult> run_all(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunResult> results(static_cast<std::size_t>(config.replications));
  FailureSink failure;
#pragma omp parallel num_threads(config.workers)
  {
    std::optional<Replicator> replicator;
    failure.guard([&] { replicator.emplace(config); });
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t r = 0; r < config.replications; ++r) {
      if (failure.failed()) continue;
      failure.guard([&] {
        replicator->run(r);
        results[static_cast<std::size_t>(r)] =
            snapshot(*replicator, r, config.arms.size());
      });
    }
  }
  failure.rethrow();
  return results;
}

}  // namespace tailreg::harness
