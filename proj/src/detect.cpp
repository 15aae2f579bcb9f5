#include "seqlat/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "seqlat/error.hpp"
#include "seqlat/parallel.hpp"
#include "seqlat/text.hpp"

namespace seqlat::detect {
namespace {

/// Feature vector the model's statistics are defined over.
std::vector<double> model_input(Mode mode, const Sequence& seq, std::size_t i) {
  const auto& x = seq.points[i].features;
  if (mode != Mode::Delta) return x;
  std::vector<double> v(x);
  v.reserve(2 * x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    v.push_back(i == 0 ? 0.0 : x[j] - seq.points[i - 1].features[j]);
  }
  return v;
}

double max_z(const std::vector<double>& x, const BaselineModel& m, double scale = 1.0) {
  double best = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    best = std::max(best, std::abs(x[j] - m.mean[j]) / (m.stddev[j] / scale));
  }
  return best;
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "punctual") return Mode::Punctual;
  if (name == "delta") return Mode::Delta;
  if (name == "window") return Mode::Window;
  throw InputError("unknown model '" + std::string(name) + "' (expected punctual, delta or window)");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Punctual: return "punctual";
    case Mode::Delta: return "delta";
    case Mode::Window: return "window";
  }
  return "?";
}

BaselineModel fit_baseline(const Dataset& train, Mode mode, std::size_t window_size) {
  if (mode == Mode::Window && window_size == 0) throw InputError("window size must be >= 1");
  BaselineModel m;
  m.mode = mode;
  m.window_size = window_size;
  m.fitted_arity = train.arity;
  const std::size_t dim = mode == Mode::Delta ? 2 * train.arity : train.arity;

  std::vector<std::vector<double>> rows;
  for (const auto& s : train.sequences) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (!s.points[i].anomalous()) rows.push_back(model_input(mode, s, i));
    }
  }
  if (rows.empty()) throw InputError("no normal points in training data");
  if (rows.size() < 2) throw InputError("training data needs at least 2 normal points");

  const auto n = static_cast<double>(rows.size());
  m.mean.assign(dim, 0.0);
  m.stddev.assign(dim, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) m.mean[j] += r[j];
  }
  for (auto& mu : m.mean) mu /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) m.stddev[j] += (r[j] - m.mean[j]) * (r[j] - m.mean[j]);
  }
  for (std::size_t j = 0; j < dim; ++j) {
    m.stddev[j] = std::sqrt(m.stddev[j] / n);
    if (m.stddev[j] < kSigmaFloor) {
      m.stddev[j] = kSigmaFloor;
      m.warnings.push_back("feature " + std::to_string(j) + " is constant on normal data; sigma clamped");
    }
  }
  return m;
}

ScoreSeries score_sequence(const BaselineModel& model, const Sequence& seq) {
  ScoreSeries out{seq.id, {}};
  out.scores.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.points[i].features.size() != model.fitted_arity) {
      throw InputError("sequence " + seq.id + ": arity " + std::to_string(seq.points[i].features.size()) +
                       " does not match model arity " + std::to_string(model.fitted_arity));
    }
    if (model.mode != Mode::Window) {
      out.scores.push_back(max_z(model_input(model.mode, seq, i), model));
      continue;
    }
    const auto w = model.window_size;
    if (i + 1 < w) {
      out.scores.push_back(0.0);
      continue;
    }
    std::vector<double> avg(model.fitted_arity, 0.0);
    for (std::size_t k = i + 1 - w; k <= i; ++k) {
      for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += seq.points[k].features[j];
    }
    for (auto& a : avg) a /= static_cast<double>(w);
    out.scores.push_back(max_z(avg, model, std::sqrt(static_cast<double>(w))));
  }
  return out;
}

std::vector<ScoreSeries> score_dataset(const BaselineModel& model, const Dataset& ds, std::size_t workers) {
  return parallel_map<ScoreSeries>(ds.sequences.size(), workers,
                                   [&](std::size_t i) { return score_sequence(model, ds.sequences[i]); });
}

ScoreSeries oracle_scores(const Sequence& seq) {
  ScoreSeries out{seq.id, {}};
  out.scores.reserve(seq.size());
  for (const auto& p : seq.points) out.scores.push_back(p.anomalous() ? 1.0 : 0.0);
  return out;
}

std::vector<ScoreSeries> parse_scores(const std::vector<std::string>& lines, const Dataset& ds,
                                      const std::string& source) {
  if (lines.empty() || lines.front() != "seq_id,t,score") {
    throw InputError(source + ": line 1: expected header seq_id,t,score");
  }
  struct Row {
    double t;
    double score;
    std::size_t line;
  };
  std::map<std::string, std::vector<Row>> rows;
  for (const auto& s : ds.sequences) rows[s.id];
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto line = i + 1;
    const auto where = source + ": line " + std::to_string(line) + ": ";
    const auto f = text::split_fields(lines[i]);
    if (f.size() != 3) throw InputError(where + "expected 3 fields, got " + std::to_string(f.size()));
    auto it = rows.find(std::string(f[0]));
    if (it == rows.end()) throw InputError(where + "unknown seq_id '" + std::string(f[0]) + "'");
    auto t = text::parse_real(f[1]);
    if (!t || !std::isfinite(*t)) throw InputError(where + "non-numeric timestamp");
    auto score = text::parse_real(f[2]);
    if (!score) throw InputError(where + "non-numeric score");
    if (!std::isfinite(*score)) throw InputError(where + "non-finite score");
    it->second.push_back({*t, *score, line});
  }

  std::vector<ScoreSeries> out;
  out.reserve(ds.sequences.size());
  for (const auto& s : ds.sequences) {
    auto& r = rows[s.id];
    if (r.size() != s.size()) {
      throw InputError(source + ": sequence " + s.id + " has " + std::to_string(r.size()) + " scores, expected " +
                       std::to_string(s.size()));
    }
    std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    ScoreSeries series{s.id, {}};
    series.scores.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (text::format_time(r[i].t) != text::format_time(s.points[i].timestamp)) {
        throw InputError(source + ": line " + std::to_string(r[i].line) + ": sequence " + s.id + " has no point at t=" +
                         text::format_time(r[i].t));
      }
      series.scores.push_back(r[i].score);
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<ScoreSeries> load_scores(const std::string& path, const Dataset& ds) {
  return parse_scores(text::read_lines(path), ds, path);
}

std::string render_scores(const Dataset& ds, const std::vector<ScoreSeries>& scores) {
  if (scores.size() != ds.sequences.size()) throw InputError("score series count does not match dataset");
  std::ostringstream out;
  out << "seq_id,t,score\n";
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const auto& s = ds.sequences[k];
    if (scores[k].sequence_id != s.id || scores[k].scores.size() != s.size()) {
      throw InputError("score series for " + s.id + " is not aligned");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.id << ',' << text::format_time(s.points[i].timestamp) << ',' << text::format_real(scores[k].scores[i])
          << '\n';
    }
  }
  return out.str();
}

}  // namespace seqlat::detect
