#include "seqlat/ingest.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "seqlat/error.hpp"
#include "seqlat/rng.hpp"
#include "seqlat/text.hpp"

namespace seqlat::ingest {
namespace {

struct Header {
  std::size_t arity = 0;
  std::vector<std::string> feature_names;
};

Header parse_header(const std::vector<std::string>& lines, const std::vector<std::string>& leading,
                    const std::string& source) {
  if (lines.empty()) throw InputError(source + ": no data rows");
  const auto fields = text::split_fields(lines.front());
  if (fields.size() < leading.size()) {
    throw InputError(source + ": line 1: header must start with " + leading.front());
  }
  for (std::size_t i = 0; i < leading.size(); ++i) {
    if (fields[i] != leading[i]) {
      throw InputError(source + ": line 1: expected column '" + leading[i] + "', found '" +
                       std::string(fields[i]) + "'");
    }
  }
  Header h;
  for (std::size_t i = leading.size(); i < fields.size(); ++i) h.feature_names.emplace_back(fields[i]);
  h.arity = h.feature_names.size();
  return h;
}

std::string at_line(const std::string& source, std::size_t line) {
  return source + ": line " + std::to_string(line) + ": ";
}

/// Parses `t,label,kind,features...` starting at fields[offset].
DataPoint parse_point(const std::vector<std::string_view>& fields, std::size_t offset, std::size_t arity,
                      const std::string& source, std::size_t line) {
  if (fields.size() != offset + 3 + arity) {
    throw InputError(at_line(source, line) + "expected " + std::to_string(offset + 3 + arity) +
                     " fields, got " + std::to_string(fields.size()));
  }
  DataPoint p;
  auto t = text::parse_real(fields[offset]);
  if (!t || !std::isfinite(*t)) throw InputError(at_line(source, line) + "non-numeric timestamp");
  if (*t < 0) throw InputError(at_line(source, line) + "negative timestamp");
  p.timestamp = *t;

  const auto label = fields[offset + 1];
  if (label == "0") {
    p.label = Label::Normal;
  } else if (label == "1") {
    p.label = Label::Anomalous;
  } else {
    throw InputError(source + ": invalid label at line " + std::to_string(line));
  }
  const auto kind = fields[offset + 2];
  if (p.anomalous()) {
    if (kind.empty()) throw InputError(at_line(source, line) + "anomalous row without kind");
    p.kind = std::string(kind);
  } else if (!kind.empty()) {
    throw InputError(at_line(source, line) + "normal row with kind '" + std::string(kind) + "'");
  }

  p.features.reserve(arity);
  for (std::size_t j = 0; j < arity; ++j) {
    auto v = text::parse_real(fields[offset + 3 + j]);
    if (!v || !std::isfinite(*v)) {
      throw InputError(at_line(source, line) + "non-numeric feature in column " + std::to_string(offset + 4 + j));
    }
    p.features.push_back(*v);
  }
  return p;
}

void append_point(std::ostringstream& out, const DataPoint& p) {
  out << text::format_time(p.timestamp) << ',' << (p.anomalous() ? '1' : '0') << ',' << p.kind.value_or("");
  for (double f : p.features) out << ',' << text::format_real(f);
  out << '\n';
}

Dataset with_sequences(const Dataset& like, std::vector<Sequence> sequences) {
  Dataset out;
  out.sequences = std::move(sequences);
  out.arity = like.arity;
  out.feature_names = like.feature_names;
  out.epoch = like.epoch;
  return out;
}

}  // namespace

Dataset parse_dataset(const std::vector<std::string>& lines, const std::string& source) {
  const auto header = parse_header(lines, {"seq_id", "t", "label", "kind"}, source);
  Dataset ds;
  ds.arity = header.arity;
  ds.feature_names = header.feature_names;

  std::set<std::string> closed;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto line = i + 1;
    const auto fields = text::split_fields(lines[i]);
    const std::string id(fields.front());
    if (id.empty()) throw InputError(at_line(source, line) + "empty seq_id");
    auto point = parse_point(fields, 1, ds.arity, source, line);
    if (ds.sequences.empty() || ds.sequences.back().id != id) {
      if (!ds.sequences.empty()) closed.insert(ds.sequences.back().id);
      if (closed.count(id)) {
        throw InputError(at_line(source, line) + "rows of sequence " + id + " are not contiguous");
      }
      ds.sequences.push_back(Sequence{id, {}});
    }
    ds.sequences.back().points.push_back(std::move(point));
  }
  if (ds.sequences.empty()) throw InputError(source + ": no data rows");

  for (const auto& s : ds.sequences) {
    auto v = validate_sequence(s);
    if (!v.ok()) throw InputError(source + ": sequence " + s.id + ": " + v.violations.front());
  }
  return ds;
}

Dataset load_dataset(const std::string& path) { return parse_dataset(text::read_lines(path), path); }

std::string render_dataset(const Dataset& ds) {
  std::ostringstream out;
  out << "seq_id,t,label,kind";
  for (const auto& name : ds.column_names()) out << ',' << name;
  out << '\n';
  for (const auto& s : ds.sequences) {
    for (const auto& p : s.points) {
      out << s.id << ',';
      append_point(out, p);
    }
  }
  return out.str();
}

Stream parse_stream(const std::vector<std::string>& lines, const std::string& source) {
  const auto header = parse_header(lines, {"t", "label", "kind"}, source);
  Stream st;
  st.arity = header.arity;
  st.feature_names = header.feature_names;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto line = i + 1;
    auto p = parse_point(text::split_fields(lines[i]), 0, st.arity, source, line);
    if (!st.points.empty() && !(p.timestamp > st.points.back().timestamp)) {
      throw InputError(at_line(source, line) + "timestamp not increasing");
    }
    st.points.push_back(std::move(p));
  }
  if (st.points.empty()) throw InputError(source + ": no data rows");
  return st;
}

Stream load_stream(const std::string& path) { return parse_stream(text::read_lines(path), path); }

SegmentResult segment_stream(const Stream& stream, const std::string& id_prefix) {
  SegmentResult r;
  r.dataset.arity = stream.arity;
  r.dataset.feature_names = stream.feature_names;
  auto& seqs = r.dataset.sequences;
  for (std::size_t i = 0; i < stream.points.size(); ++i) {
    const auto& p = stream.points[i];
    const bool cut = i > 0 && !p.anomalous() && stream.points[i - 1].anomalous();
    if (i == 0 || cut) seqs.push_back(Sequence{id_prefix + std::to_string(seqs.size()), {}});
    seqs.back().points.push_back(p);
  }
  for (const auto& s : seqs) {
    for (auto& w : validate_sequence(s).warnings) r.warnings.push_back(s.id + ": " + w);
  }
  return r;
}

Stream flatten(const Dataset& ds) {
  Stream st;
  st.arity = ds.arity;
  st.feature_names = ds.feature_names;
  for (const auto& s : ds.sequences) st.points.insert(st.points.end(), s.points.begin(), s.points.end());
  return st;
}

Dataset shuffle_sequences(const Dataset& ds, std::uint64_t seed) {
  std::vector<Sequence> seqs = ds.sequences;
  Rng rng(seed);
  for (std::size_t i = seqs.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(seqs[i - 1], seqs[j]);
  }
  return with_sequences(ds, std::move(seqs));
}

void SplitSpec::validate() const {
  for (double f : {train_fraction, test_fraction, validation_fraction}) {
    if (!(f > 0.0 && f < 1.0)) throw InputError("split fractions must lie in (0,1)");
  }
  if (std::abs(train_fraction + test_fraction + validation_fraction - 1.0) > 1e-9) {
    throw InputError("split fractions must sum to 1");
  }
}

Split split_dataset(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  const auto n = ds.sequences.size();
  if (n < 3) throw InputError("split needs at least 3 sequences, got " + std::to_string(n));
  const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(n)));
  const auto hint = "; use a larger dataset";
  if (n_test == 0) throw InputError("test split empty" + std::string(hint));
  if (n_val == 0) throw InputError("validation split empty" + std::string(hint));
  if (n_test + n_val >= n) throw InputError("train split empty" + std::string(hint));

  const auto shuffled = shuffle_sequences(ds, spec.seed);
  const auto& s = shuffled.sequences;
  const auto n_train = n - n_test - n_val;
  Split out;
  out.train = with_sequences(ds, {s.begin(), s.begin() + n_train});
  out.test = with_sequences(ds, {s.begin() + n_train, s.begin() + n_train + n_test});
  out.validation = with_sequences(ds, {s.begin() + n_train + n_test, s.end()});
  return out;
}

Dataset augment_replicate(const Dataset& ds, int copies) {
  if (copies < 1) throw InputError("augment copies must be >= 1, got " + std::to_string(copies));
  std::vector<Sequence> seqs;
  seqs.reserve(ds.sequences.size());
  for (const auto& s : ds.sequences) {
    Sequence out{s.id, {}};
    out.points.reserve(s.points.size());
    for (const auto& p : s.points) {
      out.points.push_back(p);
      if (p.anomalous()) out.points.insert(out.points.end(), static_cast<std::size_t>(copies), p);
    }
    if (!out.points.empty()) {
      const double t0 = s.points.front().timestamp;
      for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].timestamp = t0 + static_cast<double>(i);
    }
    seqs.push_back(std::move(out));
  }
  return with_sequences(ds, std::move(seqs));
}

DownsampleResult downsample(const Dataset& ds, DownsampleRule rule) {
  if (rule.period == 0 || rule.drop_offset >= rule.period) throw InputError("invalid downsample rule");
  DownsampleResult r;
  std::vector<Sequence> seqs;
  for (const auto& s : ds.sequences) {
    Sequence out{s.id, {}};
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i % rule.period != rule.drop_offset) out.points.push_back(s.points[i]);
    }
    if (out.points.empty()) {
      r.warnings.push_back(s.id + ": no points left after downsampling; sequence dropped");
      continue;
    }
    seqs.push_back(std::move(out));
  }
  r.dataset = with_sequences(ds, std::move(seqs));
  return r;
}

}  // namespace seqlat::ingest
