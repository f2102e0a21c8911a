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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vendguard/error.hpp"
#include "vendguard/prognosis/alerts.hpp"
#include "vendguard/prognosis/failure_curve.hpp"
#include "vendguard/prognosis/inventory.hpp"
#include "vendguard/prognosis/kpi.hpp"
#include "vendguard/prognosis/policy_sim.hpp"

using namespace vendguard;
using namespace vendguard::prognosis;

namespace {

constexpr Timestamp kDay = kSecondsPerDay;

learn::FeatureStats unit_stats() {
  learn::FeatureStats s;
  s.mean.fill(0.0);
  s.stddev.fill(1.0);
  s.missing_mean = 0.0;
  s.missing_stddev = 0.1;
  return s;
}

std::vector<ScoredWindow> scored(std::initializer_list<double> probabilities) {
  std::vector<ScoredWindow> out;
  Timestamp t = 1000;
  for (double p : probabilities) {
    ScoredWindow w;
    w.vector.machine_id = "M001";
    w.vector.window_end_time = t;
    w.vector.label = 1;
    w.probability = p;
    out.push_back(w);
    t += 300;
  }
  return out;
}

MachineTrace quiet_trace(const std::string& id, int days) {
  MachineTrace t;
  t.machine_id = id;
  t.start = 0;
  t.end = days * kDay;
  for (Timestamp e = 600; e <= t.end; e += 600) t.windows.push_back({e, 0.01, 0});
  return t;
}

// Faults every 20 days; the six hours before each failure are labelled and
// scored high.
MachineTrace faulty_trace(const std::string& id, double fault_score, double noise_score) {
  MachineTrace t = quiet_trace(id, 180);
  for (Timestamp f = 20 * kDay; f < t.end; f += 20 * kDay) {
    t.events.push_back({id, f, f + 6 * 3600, FaultKind::kHeaterFailure});
  }
  for (auto& w : t.windows) {
    for (const auto& e : t.events) {
      if (w.end_time < e.failure_time && w.end_time >= e.failure_time - 6 * 3600) {
        w.label = 1;
        w.probability = fault_score;
      }
    }
    if (w.label == 0 && w.end_time % (7 * kDay) < 1800) w.probability = noise_score;
  }
  return t;
}

}  // namespace

TEST(FailureCurve, ClosedForms) {
  EXPECT_EQ(failure_probability(0.1, 0.0), 0.0);
  EXPECT_NEAR(failure_probability(0.1, std::log(2.0) / 0.1), 0.5, 1e-15);
  EXPECT_GE(failure_probability(1.0, 40.0), 1.0 - 1e-17);
  double prev = 0.0;
  for (double t = 0.0; t < 100.0; t += 0.37) {
    const double p = failure_probability(0.07, t);
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(FailureCurve, FitTwoPointsClosedForm) {
  const std::vector<double> t = {1.0, 2.0};
  const std::vector<double> p = {1.0 - std::exp(-0.2), 1.0 - std::exp(-0.4)};
  EXPECT_NEAR(fit_lambda(t, p).lambda, 0.2, 1e-12);
}

TEST(FailureCurve, FitRecoversExactAndNoisyRates) {
  std::mt19937_64 gen(5);
  for (double lambda = 0.01; lambda <= 2.0; lambda += 0.0995) {
    std::vector<double> t, p;
    for (int i = 1; i <= 30; ++i) {
      t.push_back(0.1 * i);
      p.push_back(1.0 - std::exp(-lambda * 0.1 * i));
    }
    const auto c = fit_lambda(t, p);
    EXPECT_LT(std::abs(c.lambda - lambda), 1e-9) << lambda;
    EXPECT_LT(c.rmse, 1e-12);
    EXPECT_EQ(c.t_start, 0.1);
    EXPECT_EQ(c.t_end, 3.0);
  }
  std::normal_distribution<double> noise(0.0, 0.01);
  double err = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    std::vector<double> t, p;
    for (int i = 1; i <= 20; ++i) {
      t.push_back(i);
      p.push_back(std::clamp(1.0 - std::exp(-0.15 * i) + noise(gen), 0.0, 1.0));
    }
    err += std::abs(fit_lambda(t, p).lambda - 0.15) / 0.15;
  }
  EXPECT_LT(err / 100, 0.05);
}

TEST(FailureCurve, FitErrors) {
  const std::vector<double> t = {1.0, 2.0};
  EXPECT_THROW(fit_lambda(t, std::vector<double>{0.0, 0.0}), Error);
  EXPECT_THROW(fit_lambda(t, std::vector<double>{0.1, 1.5}), Error);
  EXPECT_THROW(fit_lambda(std::vector<double>{-1.0, 2.0}, std::vector<double>{0.1, 0.2}), Error);
  // p = 1 is clamped rather than producing an infinite rate.
  EXPECT_TRUE(std::isfinite(fit_lambda(t, std::vector<double>{1.0, 1.0}).lambda));
}

TEST(FailureCurve, SampledPointsStartAtOriginAndSaturate) {
  FailureCurve c;
  c.lambda = 0.1;
  const auto pts = sample_curve(c, 100.0, 50);
  ASSERT_EQ(pts.size(), 51u);
  EXPECT_EQ(pts.front().t_days, 0.0);
  EXPECT_EQ(pts.front().probability, 0.0);
  EXPECT_EQ(pts.back().t_days, 100.0);
  EXPECT_GT(pts.back().probability, 0.9999);
}

TEST(Alerts, PriorityBoundaries) {
  EXPECT_EQ(assign_priority(0.95), Priority::kHigh);
  EXPECT_EQ(assign_priority(0.90), Priority::kHigh);
  EXPECT_EQ(assign_priority(0.75), Priority::kMedium);
  EXPECT_EQ(assign_priority(0.70), Priority::kMedium);
  EXPECT_EQ(assign_priority(0.5), Priority::kLow);
  EXPECT_THROW(assign_priority(0.49), Error);
  Priority prev = Priority::kLow;
  for (double c = 0.5; c <= 1.0; c += 0.001) {
    const Priority p = assign_priority(c);
    EXPECT_LE(static_cast<int>(p), static_cast<int>(prev));
    prev = p;
  }
}

TEST(Alerts, SmoothedThreshold) {
  const auto stats = unit_stats();
  auto w = scored({0.2, 0.91, 0.91, 0.91});
  const auto a = make_alert("M001", w, stats);
  ASSERT_TRUE(a.has_value());
  EXPECT_NEAR(a->confidence, 0.91, 1e-12);
  EXPECT_EQ(a->priority, Priority::kHigh);
  EXPECT_EQ(a->feedback, Feedback::kPending);
  EXPECT_EQ(a->windows.size(), 3u);
  EXPECT_FALSE(make_alert("M001", scored({0.49, 0.49, 0.49}), stats).has_value());
  EXPECT_FALSE(make_alert("M001", scored({0.9, 0.3, 0.2}), stats).has_value());
  EXPECT_NEAR(smoothed_probability(w, 3), 0.91, 1e-12);
  EXPECT_NEAR(smoothed_probability(w, 10), (0.2 + 3 * 0.91) / 4, 1e-12);
}

TEST(Alerts, AttributionFollowsLargestDeviation) {
  const auto stats = unit_stats();
  std::vector<prep::FeatureVector> v(3);
  for (auto& f : v) f.features[prep::kTempMean] = 5.0;
  EXPECT_EQ(attribute_fault(v, stats), FaultType::kHeaterFailure);
  for (auto& f : v) f.features[prep::kVibRms] = 7.0;
  EXPECT_EQ(attribute_fault(v, stats), FaultType::kMotorImbalance);
  for (auto& f : v) f.missing_fraction = 0.9;
  EXPECT_EQ(attribute_fault(v, stats), FaultType::kSensorDropout);
  std::vector<prep::FeatureVector> calm(3);
  for (auto& f : calm) f.features[prep::kTempMean] = 1.0;
  EXPECT_EQ(attribute_fault(calm, stats), FaultType::kUnknown);
  EXPECT_FALSE(recommended_action(FaultType::kHeaterFailure).empty());
}

TEST(Alerts, FeedbackTransitionsAndLabels) {
  vg_test::TempDir dir("alerts");
  auto a = make_alert("M001", scored({0.8, 0.8, 0.8}), unit_stats());
  ASSERT_TRUE(a);
  auto b = make_alert("M002", scored({0.6, 0.6, 0.6}), unit_stats());
  ASSERT_TRUE(b);
  b->id = a->id + "x";
  b->machine_id = "M002";
  {
    AlertStore store(dir.path());
    EXPECT_TRUE(store.add(*a));
    EXPECT_FALSE(store.add(*a));
    EXPECT_TRUE(store.add(*b));
    EXPECT_EQ(store.apply_feedback(a->id, Feedback::kConfirmed).feedback, Feedback::kConfirmed);
    try {
      store.apply_feedback(a->id, Feedback::kRejected);
      FAIL() << "second verdict accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInvalidTransition);
    }
    try {
      store.apply_feedback("nope", Feedback::kRejected);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kNotFound);
    }
    EXPECT_THROW(store.apply_feedback(b->id, Feedback::kPending), Error);
    const auto labels = read_feedback_labels(store.labels_path());
    ASSERT_EQ(labels.size(), 3u);
    for (const auto& l : labels) EXPECT_EQ(l.label, 1);
    EXPECT_EQ(store.list(Feedback::kPending).size(), 1u);
  }
  AlertStore replayed(dir.path());
  EXPECT_EQ(replayed.size(), 2u);
  EXPECT_EQ(replayed.get(a->id)->feedback, Feedback::kConfirmed);
  EXPECT_EQ(replayed.apply_feedback(b->id, Feedback::kRejected).feedback, Feedback::kRejected);
  const auto labels = read_feedback_labels(replayed.labels_path());
  ASSERT_EQ(labels.size(), 6u);
  EXPECT_EQ(labels.back().label, 0);
  EXPECT_EQ(alert_from_json(alert_to_json(*a)), *a);
}

TEST(PolicySim, QuietFleetTimeBased) {
  std::vector<MachineTrace> fleet;
  for (int m = 0; m < 3; ++m) fleet.push_back(quiet_trace("M00" + std::to_string(m), 180));
  const auto run = run_policy_sim(fleet, MaintenancePolicy::parse("time:14"));
  const auto k = compute_kpis(run);
  EXPECT_EQ(k.dispatches, 3u * (180 / 14));
  EXPECT_EQ(k.no_fault_found, k.dispatches);
  EXPECT_EQ(k.unplanned_downtime_hours, 0.0);
  EXPECT_FALSE(k.mtbf_days.has_value());
  EXPECT_FALSE(k.tpr.has_value());
}

TEST(PolicySim, OracleAndConservation) {
  std::vector<MachineTrace> fleet = {faulty_trace("M000", 0.95, 0.8), faulty_trace("M001", 0.6, 0.1)};
  std::size_t faults = 0;
  for (const auto& t : fleet) faults += t.events.size();
  const auto oracle = compute_kpis(run_policy_sim(fleet, MaintenancePolicy::parse("oracle")));
  EXPECT_EQ(oracle.unplanned_downtime_hours, 0.0);
  EXPECT_EQ(oracle.tpr.value(), 1.0);
  EXPECT_EQ(oracle.fpr.value(), 0.0);
  for (const std::string spec : {"time:14", "time:3", "predictive:0.7", "predictive:0.5:12", "oracle"}) {
    const auto run = run_policy_sim(fleet, MaintenancePolicy::parse(spec));
    const auto k = compute_kpis(run);
    EXPECT_EQ(k.prevented + k.failures, faults) << spec;
    double downtime = 0.0;
    for (const auto& e : run.log) {
      if (e.outcome == VisitOutcome::kRepair) downtime += e.repair_hours;
    }
    EXPECT_EQ(k.unplanned_downtime_hours, downtime);
    EXPECT_LE(oracle.unplanned_downtime_hours, k.unplanned_downtime_hours) << spec;
    if (k.tpr) {
      EXPECT_GE(*k.tpr, 0.0);
      EXPECT_LE(*k.tpr, 1.0);
    }
  }
  const auto a = run_policy_sim(fleet, MaintenancePolicy::parse("predictive:0.7"), {}, 3);
  const auto b = run_policy_sim(fleet, MaintenancePolicy::parse("predictive:0.7"), {}, 3);
  EXPECT_EQ(a.log, b.log);
}

TEST(PolicySim, ParseAndValidate) {
  EXPECT_EQ(MaintenancePolicy::parse("time:14").describe(), "time:14");
  EXPECT_EQ(MaintenancePolicy::parse("predictive:0.7").describe(), "predictive:0.7:24");
  EXPECT_EQ(MaintenancePolicy::parse("predictive:0.7:6").lead_seconds, 6 * 3600);
  EXPECT_EQ(MaintenancePolicy::parse("oracle").kind, PolicyKind::kOracle);
  for (const char* bad : {"time", "time:0", "predictive:1.5", "magic", "time:x", "oracle:1"}) {
    EXPECT_THROW(MaintenancePolicy::parse(bad), Error) << bad;
  }
}

TEST(Kpi, MtbfAndMttrExamples) {
  PolicyRun run;
  run.observation.push_back({"M000", 0, 180 * kDay});
  for (int d : {10, 20, 40}) {
    run.log.push_back({"M000", d * kDay, VisitReason::kReactive, VisitOutcome::kRepair, 2.0, d * kDay});
  }
  EXPECT_NEAR(compute_kpis(run).mtbf_days.value(), 40.0 / 3.0, 1e-12);
  PolicyRun repairs;
  repairs.observation.push_back({"M000", 0, kDay});
  repairs.log.push_back({"M000", 100, VisitReason::kReactive, VisitOutcome::kRepair, 2.0, 100});
  repairs.log.push_back({"M000", 200, VisitReason::kAlert, VisitOutcome::kPrevented, 1.0, 300});
  const auto k = compute_kpis(repairs);
  EXPECT_EQ(k.mttr_hours.value(), 1.5);
  EXPECT_EQ(k.unplanned_downtime_hours, 2.0);
  EXPECT_EQ(k.dispatches, 2u);
}

TEST(Kpi, ComparisonAndCanonicalJson) {
  KpiReport base, pred;
  base.unplanned_downtime_hours = 100;
  base.dispatches = 40;
  base.no_fault_found = 20;
  pred.unplanned_downtime_hours = 68;
  pred.dispatches = 30;
  pred.no_fault_found = 5;
  const auto c = compare_kpis(pred, base);
  EXPECT_NEAR(c.downtime_reduction, 0.32, 1e-12);
  EXPECT_NEAR(c.dispatch_reduction, 0.25, 1e-12);
  EXPECT_NEAR(c.no_fault_found_reduction, 0.75, 1e-12);
  EXPECT_EQ(kpi_to_json(c, "abc"), kpi_to_json(c, "abc"));
  EXPECT_NE(kpi_to_json(c, "abc").find("\"abc\""), std::string::npos);
}

TEST(Inventory, ConstantRateAndZero) {
  const std::vector<double> ten(14, 10.0);
  const auto e = estimate_stock_depletion(std::span(ten).first(0), 50.0);
  EXPECT_FALSE(e.days_to_empty.has_value());
  EXPECT_EQ(e.rate_per_day, 0.0);
  const std::vector<double> one_day = {0.0};
  const auto none = estimate_stock_depletion(one_day, 50.0);
  EXPECT_EQ(none.stock, 50.0);
  EXPECT_FALSE(none.days_to_empty.has_value());
  const std::vector<double> week(7, 10.0);
  const auto w = estimate_stock_depletion(week, 120.0);
  EXPECT_EQ(w.rate_per_day, 10.0);
  EXPECT_EQ(w.stock, 50.0);
  EXPECT_EQ(w.days_to_empty.value(), 5.0);
  EXPECT_EQ(estimate_stock_depletion(ten, 50.0).stock, 0.0);
  EXPECT_THROW(estimate_stock_depletion(std::vector<double>{-1.0}, 10.0), Error);
}

TEST(Inventory, DailyTotalsMatchLinearScan) {
  MachineSeries s;
  s.machine_id = "M000";
  s.cadence = 10;
  s.resize(3 * 8640 + 17);
  std::mt19937_64 gen(4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.interactions[i] = gen() % 50 == 0 ? 1.0 : 0.0;
    if (gen() % 100 == 0) s.interactions[i] = std::nan("");
  }
  std::vector<double> expect(4, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isnan(s.interactions[i])) expect[i / 8640] += s.interactions[i];
  }
  EXPECT_EQ(daily_dispenses(s), expect);
  const auto inv = estimate_machine_inventory(s, 500.0);
  ASSERT_EQ(inv.size(), 4u);
  double total = 0;
  for (double d : expect) total += d;
  EXPECT_NEAR(inv[0].stock, std::max(0.0, 500.0 - total * kCategoryShare[0]), 1e-9);
}
