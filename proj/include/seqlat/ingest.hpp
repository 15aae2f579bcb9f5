#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqlat/model.hpp"

namespace seqlat::ingest {

/// Sequence-CSV: header `seq_id,t,label,kind,<feature columns...>`, rows
/// grouped by seq_id and time-ordered within a group.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(const std::vector<std::string>& lines, const std::string& source = "<memory>");
std::string render_dataset(const Dataset& ds);

/// Flat-stream CSV: the sequence format without the seq_id column.
struct Stream {
  std::vector<DataPoint> points;
  std::size_t arity = 0;
  std::vector<std::string> feature_names;
};
Stream load_stream(const std::string& path);
Stream parse_stream(const std::vector<std::string>& lines, const std::string& source = "<memory>");

struct SegmentResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

/// Cuts a labeled stream at every anomalous-to-normal transition so each
/// piece matches normal* anomalous*. Sequence ids are `<prefix><index>`.
SegmentResult segment_stream(const Stream& stream, const std::string& id_prefix = "seq");

/// Inverse of segment_stream: concatenates sequences in order.
Stream flatten(const Dataset& ds);

/// Permutes whole sequences; point order inside each sequence is untouched.
Dataset shuffle_sequences(const Dataset& ds, std::uint64_t seed);

struct SplitSpec {
  double train_fraction = 0.6;
  double test_fraction = 0.3;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  Dataset train;
  Dataset test;
  Dataset validation;
};

/// Shuffles with spec.seed and partitions whole sequences. Test and
/// validation take round(fraction * n); the remainder goes to train.
Split split_dataset(const Dataset& ds, const SplitSpec& spec);

/// Inserts `copies` duplicates after every anomalous point, then rewrites
/// each sequence's timestamps onto a 1-second grid starting at its
/// original first timestamp.
Dataset augment_replicate(const Dataset& ds, int copies = 3);

struct DownsampleRule {
  std::size_t period = 3;
  std::size_t drop_offset = 2;  // position within each period that is removed
};

struct DownsampleResult {
  Dataset dataset;
  std::vector<std::string> warnings;  // one per dropped (emptied) sequence
};

DownsampleResult downsample(const Dataset& ds, DownsampleRule rule = {});

}  // namespace seqlat::ingest
