#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqlat/model.hpp"

namespace seqlat::synth {

struct Range {
  std::size_t lo = 0;
  std::size_t hi = 0;  // inclusive

  /// "n" or "lo:hi".
  static Range parse(const std::string& text);
};

struct SynthConfig {
  std::size_t n_sequences = 100;
  Range normal_len{20, 40};
  Range anomalous_len{15, 30};
  std::size_t arity = 8;
  std::size_t affected_features = 8;
  double shift = 6.0;  // mean shift in standard deviations
  Range delay{0, 0};   // manifestation delay in points
  double visibility = 1.0;
  std::uint64_t seed = 0;
  std::string kind = "shift";

  /// Throws InputError for empty ranges, shift < 0, visibility outside
  /// (0,1] or affected_features > arity.
  void validate() const;
};

struct GroundTruth {
  std::string sequence_id;
  std::size_t injection_index = 0;
  std::size_t delay_points = 0;
  std::optional<std::size_t> manifestation_index;  // absent when delay >= anomalous length
  std::vector<bool> shifted;                        // per point: mean shift applied
};

struct SynthResult {
  Dataset dataset;
  std::vector<GroundTruth> truth;
};

/// Gaussian sequences whose anomalous suffix carries a mean shift that only
/// starts `delay` points after injection, and then only on a
/// visibility-fraction of points. Labels cover the whole suffix.
SynthResult generate(const SynthConfig& cfg, std::size_t workers = 1);

/// Scores 1 on points that actually carry the shift, 0 elsewhere.
std::vector<ScoreSeries> manifestation_oracle(const SynthResult& result);

/// `seq_id,manifestation_index,delay_points`; unmanifested rows leave the
/// index empty.
std::string render_ground_truth(const std::vector<GroundTruth>& truth);

}  // namespace seqlat::synth
