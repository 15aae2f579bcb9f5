#include "seqlat/synth.hpp"

#include <cstdio>
#include <sstream>

#include "seqlat/error.hpp"
#include "seqlat/parallel.hpp"
#include "seqlat/rng.hpp"
#include "seqlat/text.hpp"

namespace seqlat::synth {

Range Range::parse(const std::string& s) {
  const auto colon = s.find(':');
  auto lo = text::parse_integer(std::string_view(s).substr(0, colon));
  auto hi = colon == std::string::npos ? lo : text::parse_integer(std::string_view(s).substr(colon + 1));
  if (!lo || !hi || *lo < 0 || *hi < *lo) throw InputError("invalid range '" + s + "' (expected n or lo:hi)");
  return Range{static_cast<std::size_t>(*lo), static_cast<std::size_t>(*hi)};
}

void SynthConfig::validate() const {
  if (n_sequences == 0) throw InputError("n_sequences must be positive");
  for (const Range* r : {&normal_len, &anomalous_len, &delay}) {
    if (r->hi < r->lo) throw InputError("empty range");
  }
  if (anomalous_len.lo == 0) throw InputError("anomalous length must be at least 1");
  if (arity == 0) throw InputError("arity must be positive");
  if (affected_features > arity) throw InputError("affected_features exceeds arity");
  if (!(shift >= 0.0)) throw InputError("shift must be >= 0");
  if (!(visibility > 0.0 && visibility <= 1.0)) throw InputError("visibility must lie in (0,1]");
  if (kind.empty()) throw InputError("kind must be non-empty");
}

namespace {

struct Generated {
  Sequence sequence;
  GroundTruth truth;
};

std::string sequence_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn%05zu", index);
  return buf;
}

Generated generate_one(const SynthConfig& cfg, std::size_t index) {
  Rng rng(derive_seed(cfg.seed, index));
  const auto n_normal = static_cast<std::size_t>(rng.between(cfg.normal_len.lo, cfg.normal_len.hi));
  const auto n_anom = static_cast<std::size_t>(rng.between(cfg.anomalous_len.lo, cfg.anomalous_len.hi));
  const auto delay = static_cast<std::size_t>(rng.between(cfg.delay.lo, cfg.delay.hi));

  Generated g;
  g.sequence.id = sequence_id(index);
  g.truth.sequence_id = g.sequence.id;
  g.truth.injection_index = n_normal;
  g.truth.delay_points = delay;
  if (delay < n_anom) g.truth.manifestation_index = n_normal + delay;

  const auto total = n_normal + n_anom;
  g.sequence.points.reserve(total);
  g.truth.shifted.assign(total, false);
  for (std::size_t i = 0; i < total; ++i) {
    DataPoint p;
    p.timestamp = static_cast<double>(i);
    p.features.resize(cfg.arity);
    for (auto& f : p.features) f = rng.gaussian();
    if (i >= n_normal) {
      p.label = Label::Anomalous;
      p.kind = cfg.kind;
      if (i >= n_normal + delay && rng.bernoulli(cfg.visibility)) {
        g.truth.shifted[i] = true;
        for (std::size_t j = 0; j < cfg.affected_features; ++j) p.features[j] += cfg.shift;
      }
    }
    g.sequence.points.push_back(std::move(p));
  }
  return g;
}

}  // namespace

SynthResult generate(const SynthConfig& cfg, std::size_t workers) {
  cfg.validate();
  auto parts = parallel_map<Generated>(cfg.n_sequences, workers, [&](std::size_t i) { return generate_one(cfg, i); });
  SynthResult r;
  r.dataset.arity = cfg.arity;
  r.dataset.sequences.reserve(parts.size());
  r.truth.reserve(parts.size());
  for (auto& g : parts) {
    r.dataset.sequences.push_back(std::move(g.sequence));
    r.truth.push_back(std::move(g.truth));
  }
  return r;
}

std::vector<ScoreSeries> manifestation_oracle(const SynthResult& result) {
  std::vector<ScoreSeries> out;
  out.reserve(result.truth.size());
  for (const auto& t : result.truth) {
    ScoreSeries s{t.sequence_id, {}};
    for (bool shifted : t.shifted) s.scores.push_back(shifted ? 1.0 : 0.0);
    out.push_back(std::move(s));
  }
  return out;
}

std::string render_ground_truth(const std::vector<GroundTruth>& truth) {
  std::ostringstream out;
  out << "seq_id,manifestation_index,delay_points\n";
  for (const auto& t : truth) {
    out << t.sequence_id << ',';
    if (t.manifestation_index) out << *t.manifestation_index;
    out << ',' << t.delay_points << '\n';
  }
  return out.str();
}

}  // namespace seqlat::synth
