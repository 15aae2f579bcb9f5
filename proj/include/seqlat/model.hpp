#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seqlat {

enum class Label : std::uint8_t { Normal = 0, Anomalous = 1 };

/// A metric whose denominator may be zero. std::nullopt is the undefined
/// sentinel and is rendered as "NaN" in every output format.
using Metric = std::optional<double>;

struct DataPoint {
  double timestamp = 0.0;  // seconds since the dataset epoch
  std::vector<double> features;
  Label label = Label::Normal;
  std::optional<std::string> kind;  // anomaly kind, only on anomalous points

  bool anomalous() const { return label == Label::Anomalous; }
  bool operator==(const DataPoint&) const = default;
};

/// One attack/error episode: a normal prefix followed by an anomalous
/// suffix. A sequence without anomalous points is a pure-normal sequence.
struct Sequence {
  std::string id;
  std::vector<DataPoint> points;

  /// Index of the first anomalous point, if any.
  std::optional<std::size_t> injection_index() const;
  /// Kind of the injection point; empty for pure-normal sequences.
  std::optional<std::string> kind() const;
  std::size_t size() const { return points.size(); }
  std::vector<Label> labels() const;

  bool operator==(const Sequence&) const = default;
};

struct Dataset {
  std::vector<Sequence> sequences;
  std::size_t arity = 0;
  std::vector<std::string> feature_names;  // empty means f0..f{arity-1}
  std::optional<double> epoch;

  std::size_t point_count() const;
  std::size_t anomalous_point_count() const;
  const Sequence* find(const std::string& id) const;
  /// Feature names, falling back to the f0..f{arity-1} defaults.
  std::vector<std::string> column_names() const;
};

struct ScoreSeries {
  std::string sequence_id;
  std::vector<double> scores;  // higher means more anomalous
};

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct SequenceOutcome {
  std::string sequence_id;
  bool detected = false;
  std::optional<std::size_t> detection_index;
  std::optional<std::uint64_t> latency_points;
  std::optional<double> latency_seconds;

  bool operator==(const SequenceOutcome&) const = default;
};

struct Calibration {
  double threshold = 0.0;  // +inf is the never-flag sentinel
  double target_fpr = 0.0;
  double achieved_fpr = 0.0;
  std::uint64_t calibration_point_count = 0;
  bool in_sample = false;

  bool operator==(const Calibration&) const = default;
};

struct ClassicalMetrics {
  Metric accuracy;
  Metric precision;
  Metric recall;
  Metric f1;
  Metric fpr;  // FP / (FP + TN)
  Metric fdr;  // FP / (TP + FP)

  bool operator==(const ClassicalMetrics&) const = default;
};

struct KindBreakdown {
  ConfusionCounts counts;
  std::uint64_t sequences = 0;
  Metric recall;
  Metric f1;
  Metric sdr;
  Metric al_points;
  Metric al_seconds;

  bool operator==(const KindBreakdown&) const = default;
};

struct EvalReport {
  Calibration calibration;
  ConfusionCounts counts;
  ClassicalMetrics metrics;
  Metric sdr;  // undefined only when there are no anomalous sequences
  Metric al_points;
  Metric al_seconds;
  std::vector<SequenceOutcome> outcomes;  // anomalous sequences, dataset order
  std::map<std::string, KindBreakdown> per_kind;
};

struct TradeoffPoint {
  double target_fpr = 0.0;
  double threshold = 0.0;
  double achieved_fpr = 0.0;
  Metric sdr;
  Metric al_points;
  Metric al_seconds;
  Metric recall;
  Metric precision;

  bool operator==(const TradeoffPoint&) const = default;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;  // target_fpr strictly increasing
};

struct ValidationResult {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

/// Checks the normal*-anomalous* shape, timestamp order and kind tagging.
/// Violations are reported, never thrown. Anomalous-only sequences and kind
/// changes inside the anomalous suffix are warnings.
ValidationResult validate_sequence(const Sequence& seq);

/// validate_sequence over every sequence plus arity and id uniqueness.
/// Messages are prefixed with the sequence id.
ValidationResult validate_dataset(const Dataset& ds);

}  // namespace seqlat
