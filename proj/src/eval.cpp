#include "seqlat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "seqlat/error.hpp"
#include "seqlat/parallel.hpp"
#include "seqlat/text.hpp"

namespace seqlat::eval {
namespace {

Metric ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

/// Scores in dataset order, validated against the sequences they describe.
std::vector<const ScoreSeries*> align(const Dataset& ds, const std::vector<ScoreSeries>& scores) {
  std::unordered_map<std::string, const ScoreSeries*> by_id;
  for (const auto& s : scores) by_id.emplace(s.sequence_id, &s);
  std::vector<const ScoreSeries*> out;
  out.reserve(ds.sequences.size());
  for (const auto& seq : ds.sequences) {
    auto it = by_id.find(seq.id);
    if (it == by_id.end()) throw InputError("no scores for sequence " + seq.id);
    if (it->second->scores.size() != seq.size()) {
      throw InputError("sequence " + seq.id + " has " + std::to_string(it->second->scores.size()) +
                       " scores, expected " + std::to_string(seq.size()));
    }
    out.push_back(it->second);
  }
  return out;
}

struct Sweep {
  std::vector<std::size_t> order;  // indices by descending score
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
};

Sweep prepare_sweep(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw InputError("scores and labels differ in length");
  Sweep s;
  s.order.resize(scores.size());
  std::iota(s.order.begin(), s.order.end(), 0);
  std::stable_sort(s.order.begin(), s.order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  for (auto l : labels) (l == Label::Anomalous ? s.positives : s.negatives)++;
  return s;
}

/// Thresholds kept in quantile mode; empty means keep all.
std::vector<double> quantile_thresholds(std::span<const double> scores, std::size_t q) {
  if (q == 0 || scores.empty()) return {};
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (std::size_t k = 0; k <= q; ++k) out.push_back(sorted[k * (sorted.size() - 1) / q]);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Visits (threshold, tp, fp) after each group of tied scores, descending.
template <typename Visit>
void walk_thresholds(std::span<const double> scores, std::span<const Label> labels, const Sweep& sw,
                     const std::vector<double>& keep, Visit&& visit) {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t k = 0; k < sw.order.size(); ++k) {
    const auto i = sw.order[k];
    (labels[i] == Label::Anomalous ? tp : fp)++;
    const bool group_end = k + 1 == sw.order.size() || scores[sw.order[k + 1]] != scores[i];
    if (!group_end) continue;
    const bool last = k + 1 == sw.order.size();
    if (last || keep.empty() || std::binary_search(keep.begin(), keep.end(), scores[i])) visit(scores[i], tp, fp);
  }
}

}  // namespace

Predictions predict_at_threshold(std::span<const double> scores, double threshold) {
  Predictions out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s >= threshold ? Label::Anomalous : Label::Normal);
  return out;
}

ConfusionCounts confusion(std::span<const Label> labels, std::span<const Label> predictions) {
  if (labels.size() != predictions.size()) {
    throw InputError("confusion: " + std::to_string(labels.size()) + " labels vs " +
                     std::to_string(predictions.size()) + " predictions");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth = labels[i] == Label::Anomalous;
    const bool flagged = predictions[i] == Label::Anomalous;
    if (truth && flagged) ++c.tp;
    else if (truth) ++c.fn;
    else if (flagged) ++c.fp;
    else ++c.tn;
  }
  return c;
}

ClassicalMetrics classical_metrics(const ConfusionCounts& c) {
  ClassicalMetrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.fdr = ratio(c.fp, c.tp + c.fp);
  return m;
}

PooledScores pool(const Dataset& ds, const std::vector<ScoreSeries>& scores) {
  const auto aligned = align(ds, scores);
  PooledScores p;
  p.scores.reserve(ds.point_count());
  p.labels.reserve(ds.point_count());
  for (std::size_t k = 0; k < ds.sequences.size(); ++k) {
    p.scores.insert(p.scores.end(), aligned[k]->scores.begin(), aligned[k]->scores.end());
    for (const auto& pt : ds.sequences[k].points) p.labels.push_back(pt.label);
  }
  return p;
}

std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const Label> labels,
                                  CurveOptions options) {
  const auto sw = prepare_sweep(scores, labels);
  if (sw.positives == 0 || sw.negatives == 0) throw InputError("ROC needs both normal and anomalous points");
  std::vector<CurvePoint> out{{kNeverFlag, 0.0, 0.0}};
  const auto pos = static_cast<double>(sw.positives);
  const auto neg = static_cast<double>(sw.negatives);
  walk_thresholds(scores, labels, sw, quantile_thresholds(scores, options.quantiles),
                  [&](double t, std::uint64_t tp, std::uint64_t fp) {
                    out.push_back({t, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
                  });
  return out;
}

std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const Label> labels,
                                 CurveOptions options) {
  const auto sw = prepare_sweep(scores, labels);
  if (sw.positives == 0) throw InputError("PR curve needs anomalous points");
  std::vector<CurvePoint> out;
  const auto pos = static_cast<double>(sw.positives);
  walk_thresholds(scores, labels, sw, quantile_thresholds(scores, options.quantiles),
                  [&](double t, std::uint64_t tp, std::uint64_t fp) {
                    out.push_back({t, static_cast<double>(tp) / pos,
                                   static_cast<double>(tp) / static_cast<double>(tp + fp)});
                  });
  return out;
}

double auc(std::span<const CurvePoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].x - curve[i - 1].x) * (curve[i].y + curve[i - 1].y) / 2.0;
  }
  return area;
}

ThresholdCalibrator::ThresholdCalibrator(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw InputError("calibration scores and labels differ in length");
  point_count_ = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == Label::Normal) normal_scores_.push_back(scores[i]);
  }
  if (normal_scores_.empty()) throw InputError("calibration set has no normal points");
  std::sort(normal_scores_.begin(), normal_scores_.end());
  candidates_.assign(scores.begin(), scores.end());
  std::sort(candidates_.begin(), candidates_.end());
  candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
  candidates_.push_back(kNeverFlag);
}

Calibration ThresholdCalibrator::calibrate(double target_fpr) const {
  if (!(target_fpr >= 0.0 && target_fpr <= 1.0)) throw InputError("target FPR must lie in [0,1]");
  const auto n = static_cast<double>(normal_scores_.size());
  auto fpr_at = [&](double tau) {
    const auto below = std::lower_bound(normal_scores_.begin(), normal_scores_.end(), tau) - normal_scores_.begin();
    return static_cast<double>(normal_scores_.size() - static_cast<std::size_t>(below)) / n;
  };
  // FPR is non-increasing in the threshold, so the admissible candidates
  // form a suffix; binary search for its start.
  const auto first = std::partition_point(candidates_.begin(), candidates_.end(),
                                          [&](double tau) { return !(fpr_at(tau) <= target_fpr); });
  Calibration c;
  c.threshold = *first;  // the sentinel always qualifies
  c.target_fpr = target_fpr;
  c.achieved_fpr = fpr_at(c.threshold);
  c.calibration_point_count = point_count_;
  return c;
}

Calibration calibrate_threshold(std::span<const double> scores, std::span<const Label> labels, double target_fpr) {
  return ThresholdCalibrator(scores, labels).calibrate(target_fpr);
}

SequenceOutcome sequence_outcome(const Sequence& seq, std::span<const Label> predictions) {
  if (predictions.size() != seq.size()) {
    throw InputError("sequence " + seq.id + ": " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(seq.size()) + " points");
  }
  const auto inj = seq.injection_index();
  if (!inj) throw InputError("sequence " + seq.id + " has no anomalous points");
  SequenceOutcome o;
  o.sequence_id = seq.id;
  for (std::size_t i = *inj; i < seq.size(); ++i) {
    if (predictions[i] == Label::Anomalous) {
      o.detected = true;
      o.detection_index = i;
      o.latency_points = i - *inj;
      o.latency_seconds = seq.points[i].timestamp - seq.points[*inj].timestamp;
      break;
    }
  }
  return o;
}

Aggregate aggregate(std::span<const SequenceOutcome> outcomes) {
  Aggregate a;
  if (outcomes.empty()) return a;
  std::uint64_t detected = 0;
  double sum_points = 0.0;
  double sum_seconds = 0.0;
  for (const auto& o : outcomes) {
    if (!o.detected) continue;
    ++detected;
    sum_points += static_cast<double>(*o.latency_points);
    sum_seconds += *o.latency_seconds;
  }
  a.sdr = static_cast<double>(detected) / static_cast<double>(outcomes.size());
  if (detected > 0) {
    a.al_points = sum_points / static_cast<double>(detected);
    a.al_seconds = sum_seconds / static_cast<double>(detected);
  }
  return a;
}

EvalReport evaluate_at(const Dataset& ds, const std::vector<ScoreSeries>& scores, const Calibration& calibration,
                       std::size_t workers) {
  const auto aligned = align(ds, scores);
  struct PerSequence {
    ConfusionCounts counts;
    std::optional<SequenceOutcome> outcome;
  };
  const auto per_seq = parallel_map<PerSequence>(ds.sequences.size(), workers, [&](std::size_t k) {
    const auto& seq = ds.sequences[k];
    const auto preds = predict_at_threshold(aligned[k]->scores, calibration.threshold);
    PerSequence r;
    r.counts = confusion(seq.labels(), preds);
    if (seq.injection_index()) r.outcome = sequence_outcome(seq, preds);
    return r;
  });

  EvalReport rep;
  rep.calibration = calibration;
  struct KindAccumulator {
    ConfusionCounts counts;
    std::vector<SequenceOutcome> outcomes;
  };
  std::map<std::string, KindAccumulator> kinds;
  for (std::size_t k = 0; k < per_seq.size(); ++k) {
    rep.counts += per_seq[k].counts;
    if (!per_seq[k].outcome) continue;
    rep.outcomes.push_back(*per_seq[k].outcome);
    auto& acc = kinds[ds.sequences[k].kind().value_or("")];
    acc.counts += per_seq[k].counts;
    acc.outcomes.push_back(*per_seq[k].outcome);
  }
  rep.metrics = classical_metrics(rep.counts);
  const auto agg = aggregate(rep.outcomes);
  rep.sdr = agg.sdr;
  rep.al_points = agg.al_points;
  rep.al_seconds = agg.al_seconds;
  for (const auto& [kind, acc] : kinds) {
    const auto m = classical_metrics(acc.counts);
    const auto ka = aggregate(acc.outcomes);
    rep.per_kind[kind] = KindBreakdown{acc.counts, acc.outcomes.size(), m.recall, m.f1, ka.sdr, ka.al_points,
                                       ka.al_seconds};
  }
  return rep;
}

namespace {

ThresholdCalibrator make_calibrator(const Dataset& ds, const std::vector<ScoreSeries>& scores,
                                    const CalibrationSource& source) {
  const auto pooled = source.is_in_sample() ? pool(ds, scores) : pool(*source.data, *source.scores);
  return ThresholdCalibrator(pooled.scores, pooled.labels);
}

}  // namespace

EvalReport evaluate(const Dataset& ds, const std::vector<ScoreSeries>& scores, double target_fpr,
                    const CalibrationSource& source, std::size_t workers) {
  auto calibration = make_calibrator(ds, scores, source).calibrate(target_fpr);
  calibration.in_sample = source.is_in_sample();
  return evaluate_at(ds, scores, calibration, workers);
}

void FprGrid::validate() const {
  if (values.empty()) throw InputError("FPR grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) throw InputError("FPR grid values must lie in (0,1)");
    if (i > 0 && !(values[i] > values[i - 1])) throw InputError("FPR grid must be strictly increasing");
  }
}

FprGrid FprGrid::log_spaced(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw InputError("log grid needs 0 < lo < hi and at least 2 points");
  FprGrid g;
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g.values.push_back(std::exp(std::log(lo) + step * static_cast<double>(k)));
  g.values.front() = lo;
  g.values.back() = hi;
  g.validate();
  return g;
}

FprGrid FprGrid::standard() { return log_spaced(0.0001, 0.2, 20); }

FprGrid FprGrid::parse(const std::string& spec) {
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
      auto pos = spec.find(':', start);
      parts.emplace_back(std::string_view(spec).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (parts.size() != 3) throw InputError("FPR grid must look like lo:hi:logN, lo:hi:linN or a list");
    auto lo = text::parse_real(parts[0]);
    auto hi = text::parse_real(parts[1]);
    const auto kind = parts[2].substr(0, 3);
    auto count = text::parse_integer(parts[2].substr(std::min<std::size_t>(3, parts[2].size())));
    if (!lo || !hi || !count || *count < 2 || (kind != "log" && kind != "lin")) {
      throw InputError("invalid FPR grid '" + spec + "'");
    }
    if (kind == "log") return log_spaced(*lo, *hi, static_cast<std::size_t>(*count));
    FprGrid g;
    for (long long k = 0; k < *count; ++k) {
      g.values.push_back(*lo + (*hi - *lo) * static_cast<double>(k) / static_cast<double>(*count - 1));
    }
    g.values.back() = *hi;
    g.validate();
    return g;
  }
  FprGrid g;
  for (auto f : text::split_fields(spec)) {
    auto v = text::parse_real(f);
    if (!v) throw InputError("invalid FPR grid value '" + std::string(f) + "'");
    g.values.push_back(*v);
  }
  g.validate();
  return g;
}

TradeoffCurve latency_fpr_sweep(const Dataset& ds, const std::vector<ScoreSeries>& scores, const FprGrid& grid,
                                const CalibrationSource& source, std::size_t workers) {
  grid.validate();
  const auto calibrator = make_calibrator(ds, scores, source);
  TradeoffCurve curve;
  curve.points = parallel_map<TradeoffPoint>(grid.values.size(), workers, [&](std::size_t i) {
    auto cal = calibrator.calibrate(grid.values[i]);
    cal.in_sample = source.is_in_sample();
    const auto rep = evaluate_at(ds, scores, cal);
    return TradeoffPoint{cal.target_fpr, cal.threshold,       cal.achieved_fpr,          rep.sdr,
                         rep.al_points,  rep.al_seconds,      rep.metrics.recall,        rep.metrics.precision};
  });
  return curve;
}

LatencyInversion fpr_for_target_latency(const Sequence& seq, const ScoreSeries& scores,
                                        std::uint64_t target_latency_points) {
  if (scores.scores.size() != seq.size()) throw InputError("scores not aligned with sequence " + seq.id);
  const auto inj = seq.injection_index();
  if (!inj) throw InputError("sequence " + seq.id + " has no anomalous points");
  const auto last = std::min<std::uint64_t>(*inj + target_latency_points, seq.size() - 1);
  double tau = kAlwaysFlag;
  for (std::size_t i = *inj; i <= last; ++i) tau = std::max(tau, scores.scores[i]);

  LatencyInversion r;
  if (!(tau > 0.0)) return r;
  r.detectable = true;
  r.threshold = tau;
  std::uint64_t normals = 0;
  std::uint64_t flagged = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.points[i].anomalous()) continue;
    ++normals;
    flagged += scores.scores[i] >= tau ? 1 : 0;
  }
  r.implied_fpr = ratio(flagged, normals);
  for (std::size_t i = *inj; i <= last; ++i) {
    if (scores.scores[i] >= tau) {
      r.actual_latency_points = i - *inj;
      break;
    }
  }
  return r;
}

}  // namespace seqlat::eval
