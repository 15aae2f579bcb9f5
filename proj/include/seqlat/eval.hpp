#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqlat/model.hpp"

namespace seqlat::eval {

using Predictions = std::vector<Label>;

inline constexpr double kNeverFlag = std::numeric_limits<double>::infinity();
inline constexpr double kAlwaysFlag = -std::numeric_limits<double>::infinity();

/// Anomalous iff score >= threshold.
Predictions predict_at_threshold(std::span<const double> scores, double threshold);

/// Anomalous is the positive class. Throws InputError on length mismatch.
ConfusionCounts confusion(std::span<const Label> labels, std::span<const Label> predictions);

/// Accuracy, precision, recall, F1, FPR = FP/(FP+TN) and FDR = FP/(TP+FP).
/// A metric is undefined when its denominator is zero.
ClassicalMetrics classical_metrics(const ConfusionCounts& c);

/// Every point of every sequence, in dataset order.
struct PooledScores {
  std::vector<double> scores;
  std::vector<Label> labels;
};
PooledScores pool(const Dataset& ds, const std::vector<ScoreSeries>& scores);

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct CurveOptions {
  /// 0 enumerates every distinct score; q > 0 uses q score quantiles.
  std::size_t quantiles = 0;
};

/// (FPR, recall) points as the threshold decreases, starting at (0,0) and
/// ending at (1,1). Throws InputError for single-class input.
std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const Label> labels,
                                  CurveOptions options = {});
/// (recall, precision) points, one per threshold, as the threshold decreases.
std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const Label> labels,
                                 CurveOptions options = {});
/// Trapezoid area under the given points (in the order given).
double auc(std::span<const CurvePoint> curve);

/// Picks the smallest threshold whose empirical FPR on the calibration
/// points stays within a budget. Candidates are the distinct observed
/// scores plus the never-flag sentinel. Sorting happens once so a sweep
/// over many budgets stays cheap.
class ThresholdCalibrator {
 public:
  ThresholdCalibrator(std::span<const double> scores, std::span<const Label> labels);

  Calibration calibrate(double target_fpr) const;

 private:
  std::vector<double> candidates_;     // ascending, distinct, ends with +inf
  std::vector<double> normal_scores_;  // ascending
  std::uint64_t point_count_ = 0;
};

Calibration calibrate_threshold(std::span<const double> scores, std::span<const Label> labels, double target_fpr);

/// First anomalous-labeled point predicted anomalous. Predictions on the
/// normal prefix never count as a detection. Throws InputError for
/// pure-normal sequences.
SequenceOutcome sequence_outcome(const Sequence& seq, std::span<const Label> predictions);

struct Aggregate {
  Metric sdr;
  Metric al_points;
  Metric al_seconds;
};

/// SDR over all outcomes; AL averaged over detected sequences only.
Aggregate aggregate(std::span<const SequenceOutcome> outcomes);

/// Where the decision threshold comes from: a held-out labeled set with its
/// scores, or (when both pointers are null) the evaluated data itself.
struct CalibrationSource {
  const Dataset* data = nullptr;
  const std::vector<ScoreSeries>* scores = nullptr;

  static CalibrationSource in_sample() { return {}; }
  static CalibrationSource held_out(const Dataset& d, const std::vector<ScoreSeries>& s) { return {&d, &s}; }
  bool is_in_sample() const { return data == nullptr; }
};

/// Applies a fixed calibration to the dataset: pooled classical metrics,
/// per-sequence outcomes, SDR/AL and the per-kind breakdown.
EvalReport evaluate_at(const Dataset& ds, const std::vector<ScoreSeries>& scores, const Calibration& calibration,
                       std::size_t workers = 1);

EvalReport evaluate(const Dataset& ds, const std::vector<ScoreSeries>& scores, double target_fpr,
                    const CalibrationSource& source, std::size_t workers = 1);

struct FprGrid {
  std::vector<double> values;

  /// Strictly increasing values in (0,1); throws InputError otherwise.
  void validate() const;

  static FprGrid log_spaced(double lo, double hi, std::size_t count);
  /// 0.0001 to 0.2, 20 log-spaced points.
  static FprGrid standard();
  /// "lo:hi:logN", "lo:hi:linN" or a comma-separated list.
  static FprGrid parse(const std::string& spec);
};

TradeoffCurve latency_fpr_sweep(const Dataset& ds, const std::vector<ScoreSeries>& scores, const FprGrid& grid,
                                const CalibrationSource& source, std::size_t workers = 1);

struct LatencyInversion {
  bool detectable = false;
  double threshold = kNeverFlag;
  Metric implied_fpr;  // over the sequence's normal points
  std::optional<std::uint64_t> actual_latency_points;
};

/// The largest threshold that still detects within `target_latency_points`
/// of injection, with the FPR it implies and the latency it really yields.
LatencyInversion fpr_for_target_latency(const Sequence& seq, const ScoreSeries& scores,
                                        std::uint64_t target_latency_points);

}  // namespace seqlat::eval
