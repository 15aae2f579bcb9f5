#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "seqlat/model.hpp"

namespace seqlat::detect {

/// Lower bound applied to fitted standard deviations.
inline constexpr double kSigmaFloor = 1e-9;

/// punctual: per-point z-scores, blind to ordering.
/// delta: z-scores of [x_t ; x_t - x_{t-1}], sensitive to ordering.
/// window: z-score of the mean of the last `window_size` points.
enum class Mode { Punctual, Delta, Window };

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

struct BaselineModel {
  Mode mode = Mode::Punctual;
  std::size_t window_size = 10;
  std::size_t fitted_arity = 0;
  std::vector<double> mean;    // length fitted_arity, or 2*fitted_arity for delta
  std::vector<double> stddev;  // population sd, floored at kSigmaFloor
  std::vector<std::string> warnings;
};

/// Fits per-feature mean and population standard deviation on the
/// normal-labeled points of `train`.
BaselineModel fit_baseline(const Dataset& train, Mode mode, std::size_t window_size = 10);

ScoreSeries score_sequence(const BaselineModel& model, const Sequence& seq);
std::vector<ScoreSeries> score_dataset(const BaselineModel& model, const Dataset& ds, std::size_t workers = 1);

/// Label indicator: 1 on anomalous points, 0 on normal points.
ScoreSeries oracle_scores(const Sequence& seq);

/// Score-CSV: header `seq_id,t,score`. Returns one series per dataset
/// sequence, in dataset order, after checking full alignment.
std::vector<ScoreSeries> load_scores(const std::string& path, const Dataset& ds);
std::vector<ScoreSeries> parse_scores(const std::vector<std::string>& lines, const Dataset& ds,
                                      const std::string& source = "<memory>");
std::string render_scores(const Dataset& ds, const std::vector<ScoreSeries>& scores);

}  // namespace seqlat::detect
