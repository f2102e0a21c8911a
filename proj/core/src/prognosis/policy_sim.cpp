// Copyright 2026 The Vendguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vendguard/prognosis/policy_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <deque>
#include <limits>

#include "vendguard/error.hpp"
#include "vendguard/rng.hpp"

namespace vendguard::prognosis {

void MaintenancePolicy::validate() const {
  if (kind == PolicyKind::kTimeBased && !(interval_days > 0.0)) {
    fail(Errc::kInvalidArgument, "time-based interval must be > 0 days");
  }
  if (kind == PolicyKind::kPredictive && !(threshold > 0.0 && threshold < 1.0)) {
    fail(Errc::kInvalidArgument, "predictive threshold must be in (0, 1)");
  }
  if (lead_seconds <= 0) fail(Errc::kInvalidArgument, "lead time must be positive");
  if (smoothing == 0) fail(Errc::kInvalidArgument, "smoothing must be >= 1 window");
  if (cooldown_seconds < 0) fail(Errc::kInvalidArgument, "cooldown must be >= 0");
}

std::string MaintenancePolicy::describe() const {
  char buf[64];
  switch (kind) {
    case PolicyKind::kTimeBased:
      std::snprintf(buf, sizeof(buf), "time:%g", interval_days);
      return buf;
    case PolicyKind::kPredictive:
      std::snprintf(buf, sizeof(buf), "predictive:%g:%g", threshold,
                    static_cast<double>(lead_seconds) / kSecondsPerHour);
      return buf;
    case PolicyKind::kOracle:
      return "oracle";
  }
  return "unknown";
}

namespace {

double parse_number(std::string_view text, std::string_view spec) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    fail(Errc::kInvalidArgument, "bad number in policy '" + std::string(spec) + "'");
  }
  return v;
}

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t c = s.find(':', begin);
    parts.push_back(s.substr(begin, c == std::string_view::npos ? std::string_view::npos : c - begin));
    if (c == std::string_view::npos) return parts;
    begin = c + 1;
  }
}

}  // namespace

MaintenancePolicy MaintenancePolicy::parse(std::string_view spec) {
  const auto parts = split_colon(spec);
  MaintenancePolicy p;
  if (parts[0] == "time" && parts.size() == 2) {
    p.kind = PolicyKind::kTimeBased;
    p.interval_days = parse_number(parts[1], spec);
  } else if (parts[0] == "predictive" && (parts.size() == 2 || parts.size() == 3)) {
    p.kind = PolicyKind::kPredictive;
    p.threshold = parse_number(parts[1], spec);
    if (parts.size() == 3) {
      p.lead_seconds = static_cast<std::int64_t>(std::llround(parse_number(parts[2], spec) * kSecondsPerHour));
    }
  } else if (parts[0] == "oracle" && parts.size() == 1) {
    p.kind = PolicyKind::kOracle;
  } else {
    fail(Errc::kInvalidArgument, "unknown policy '" + std::string(spec) +
                                     "' (expected time:DAYS, predictive:THRESHOLD[:LEAD_HOURS] or oracle)");
  }
  p.validate();
  return p;
}

void RepairModel::validate() const {
  if (preemptive_hours < 0.0 || reactive_hours < 0.0 || dispatch_latency_hours < 0.0 || jitter_hours < 0.0) {
    fail(Errc::kInvalidArgument, "repair durations must be >= 0");
  }
}

std::string_view to_string(VisitReason r) {
  switch (r) {
    case VisitReason::kScheduled: return "scheduled";
    case VisitReason::kAlert: return "alert";
    case VisitReason::kReactive: return "reactive";
  }
  return "unknown";
}

std::string_view to_string(VisitOutcome o) {
  switch (o) {
    case VisitOutcome::kPrevented: return "prevented";
    case VisitOutcome::kNoFaultFound: return "no_fault_found";
    case VisitOutcome::kRepair: return "repair";
  }
  return "unknown";
}

namespace {

constexpr Timestamp kNever = std::numeric_limits<Timestamp>::min();

Timestamp hours_to_seconds(double h) {
  return static_cast<Timestamp>(std::llround(h * static_cast<double>(kSecondsPerHour)));
}

class MachineReplay {
 public:
  MachineReplay(const MachineTrace& trace, const MaintenancePolicy& policy, const RepairModel& repair,
                Rng& rng, std::vector<PolicyEvent>& log)
      : trace_(trace), policy_(policy), repair_(repair), rng_(rng), log_(log), events_(trace.events) {
    std::sort(events_.begin(), events_.end(),
              [](const FaultEvent& a, const FaultEvent& b) { return a.failure_time < b.failure_time; });
  }

  void run() {
    if (policy_.kind == PolicyKind::kTimeBased) {
      const double step = policy_.interval_days * static_cast<double>(kSecondsPerDay);
      for (int k = 1;; ++k) {
        const Timestamp v = trace_.start + static_cast<Timestamp>(std::llround(step * k));
        if (v > trace_.end) break;
        realize_until(v);
        visit(v, VisitReason::kScheduled);
      }
    } else {
      std::deque<double> history;
      for (const ReplayWindow& w : trace_.windows) {
        if (realize_until(w.end_time)) history.clear();
        if (w.end_time <= void_until_) continue;
        bool trigger = false;
        if (policy_.kind == PolicyKind::kOracle) {
          trigger = w.label == 1;
        } else {
          history.push_back(w.probability);
          if (history.size() > policy_.smoothing) history.pop_front();
          double sum = 0.0;
          for (double p : history) sum += p;
          trigger = sum / static_cast<double>(history.size()) >= policy_.threshold;
        }
        if (!trigger || w.end_time < cooldown_until_) continue;
        visit(w.end_time, VisitReason::kAlert);
        history.clear();
      }
    }
    realize_until(std::numeric_limits<Timestamp>::max());
  }

 private:
  double jittered(double hours) {
    if (repair_.jitter_hours <= 0.0) return hours;
    return std::max(0.0, hours + rng_.uniform(-repair_.jitter_hours, repair_.jitter_hours));
  }

  // Realizes every pending failure at or before t. Returns true if any.
  bool realize_until(Timestamp t) {
    bool any = false;
    while (next_ < events_.size() && events_[next_].failure_time <= t) {
      const FaultEvent& e = events_[next_++];
      const double hours = jittered(repair_.dispatch_latency_hours + repair_.reactive_hours);
      log_.push_back({trace_.machine_id, e.failure_time, VisitReason::kReactive, VisitOutcome::kRepair,
                      hours, e.failure_time});
      void_until_ = std::max({void_until_, e.failure_time + hours_to_seconds(hours), e.repair_time});
      any = true;
    }
    return any;
  }

  void visit(Timestamp v, VisitReason reason) {
    if (next_ < events_.size() && events_[next_].failure_time > v &&
        events_[next_].failure_time <= v + policy_.lead_seconds) {
      const FaultEvent& e = events_[next_++];
      const double hours = jittered(repair_.preemptive_hours);
      log_.push_back({trace_.machine_id, v, reason, VisitOutcome::kPrevented, hours, e.failure_time});
      // Telemetry after the visit still shows the fault as simulated; skip it.
      void_until_ = std::max({void_until_, v + hours_to_seconds(hours), e.repair_time});
      return;
    }
    log_.push_back({trace_.machine_id, v, reason, VisitOutcome::kNoFaultFound, 0.0, std::nullopt});
    cooldown_until_ = v + policy_.cooldown_seconds;
  }

  const MachineTrace& trace_;
  const MaintenancePolicy& policy_;
  const RepairModel& repair_;
  Rng& rng_;
  std::vector<PolicyEvent>& log_;
  std::vector<FaultEvent> events_;
  std::size_t next_ = 0;
  Timestamp void_until_ = kNever;
  Timestamp cooldown_until_ = kNever;
};

void add_open_loop(const MachineTrace& trace, const MaintenancePolicy& policy, learn::Confusion& c) {
  std::deque<double> history;
  for (const ReplayWindow& w : trace.windows) {
    bool predicted = false;
    if (policy.kind == PolicyKind::kOracle) {
      predicted = w.label == 1;
    } else {
      history.push_back(w.probability);
      if (history.size() > policy.smoothing) history.pop_front();
      double sum = 0.0;
      for (double p : history) sum += p;
      predicted = sum / static_cast<double>(history.size()) >= policy.threshold;
    }
    if (w.label == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
}

}  // namespace

PolicyRun run_policy_sim(const std::vector<MachineTrace>& traces, const MaintenancePolicy& policy,
                         const RepairModel& repair, std::uint64_t seed) {
  policy.validate();
  repair.validate();
  PolicyRun run;
  run.policy = policy;
  Rng rng(seed);
  if (policy.kind != PolicyKind::kTimeBased) run.windows = learn::Confusion{};
  for (const MachineTrace& trace : traces) {
    if (trace.end < trace.start) fail(Errc::kInvalidArgument, "trace ends before it starts");
    for (std::size_t i = 1; i < trace.windows.size(); ++i) {
      if (trace.windows[i].end_time <= trace.windows[i - 1].end_time) {
        fail(Errc::kInvalidArgument, "trace windows of " + trace.machine_id + " are not chronological");
      }
    }
    run.observation.push_back({trace.machine_id, trace.start, trace.end});
    MachineReplay(trace, policy, repair, rng, run.log).run();
    if (run.windows) add_open_loop(trace, policy, *run.windows);
  }
  return run;
}

}  // namespace vendguard::prognosis
