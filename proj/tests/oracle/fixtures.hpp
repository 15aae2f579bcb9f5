#pragma once

#include <string>
#include <vector>

#include "seqlat/model.hpp"

namespace seqlat::testing {

struct ScoredDataset {
  Dataset dataset;
  std::vector<ScoreSeries> scores;
};

inline void append_scored(ScoredDataset& out, const std::string& id, std::size_t normal, std::size_t anomalous,
                          const std::vector<std::pair<std::size_t, double>>& bumps, const std::string& kind) {
  Sequence s{id, {}};
  ScoreSeries sc{id, {}};
  for (std::size_t i = 0; i < normal + anomalous; ++i) {
    DataPoint p;
    p.timestamp = static_cast<double>(i);
    p.features = {0.0};
    if (i >= normal) {
      p.label = Label::Anomalous;
      p.kind = kind;
    }
    s.points.push_back(p);
    sc.scores.push_back(0.0);
  }
  for (auto [index, score] : bumps) sc.scores[index] = score;
  out.dataset.sequences.push_back(std::move(s));
  out.scores.push_back(std::move(sc));
}

/// Two anomalous sequences plus normal traffic, 100 normal points in total.
///   A: injection at 2, score 0.9 at index 3          -> latency 1 for tau <= 0.9
///   B: injection at 2, score 0.5 at index 52         -> latency 50 for tau <= 0.5
///   N: 96 normal points, one scoring 0.7             -> FPR(tau in (0.7,0.9]) = 0,
///                                                       FPR(tau in (0,0.7]) = 0.01
/// In-sample calibration therefore picks tau = 0.9 for any budget below 0.01
/// (AL 1, SDR 0.5) and tau = 0.5 from 0.01 upward (AL (1+50)/2 = 25.5, SDR 1).
inline ScoredDataset spike_fixture() {
  ScoredDataset f;
  f.dataset.arity = 1;
  append_scored(f, "A", 2, 4, {{3, 0.9}}, "mflood");
  append_scored(f, "B", 2, 51, {{52, 0.5}}, "mflood");
  append_scored(f, "N", 96, 0, {{10, 0.7}}, "");
  return f;
}

/// Confidence profile after injection: [0.15, 0.3, 0.25, 0.2], preceded by
/// three normal points scoring below every anomalous score but one.
inline ScoredDataset inversion_fixture() {
  ScoredDataset f;
  f.dataset.arity = 1;
  append_scored(f, "fig1", 3, 4, {{0, 0.1}, {1, 0.12}, {2, 0.05}, {3, 0.15}, {4, 0.3}, {5, 0.25}, {6, 0.2}}, "err");
  return f;
}

}  // namespace seqlat::testing
