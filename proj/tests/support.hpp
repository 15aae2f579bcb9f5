#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "seqlat/model.hpp"

namespace seqlat::testing {

/// One-feature sequence with timestamps 0..n-1 and feature value = index.
inline Sequence make_sequence(const std::string& id, std::initializer_list<int> labels,
                              const std::string& kind = "attack") {
  Sequence s{id, {}};
  int i = 0;
  for (int l : labels) {
    DataPoint p;
    p.timestamp = i;
    p.features = {static_cast<double>(i)};
    p.label = l ? Label::Anomalous : Label::Normal;
    if (l) p.kind = kind;
    s.points.push_back(p);
    ++i;
  }
  return s;
}

inline Sequence make_sequence(const std::string& id, const std::vector<int>& labels,
                              const std::string& kind = "attack") {
  Sequence s{id, {}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    DataPoint p;
    p.timestamp = static_cast<double>(i);
    p.features = {static_cast<double>(i)};
    p.label = labels[i] ? Label::Anomalous : Label::Normal;
    if (labels[i]) p.kind = kind;
    s.points.push_back(p);
  }
  return s;
}

inline Dataset make_dataset(std::vector<Sequence> seqs) {
  Dataset ds;
  ds.arity = seqs.empty() || seqs.front().points.empty() ? 1 : seqs.front().points.front().features.size();
  ds.sequences = std::move(seqs);
  return ds;
}

inline std::vector<int> label_ints(const Sequence& s) {
  std::vector<int> out;
  for (const auto& p : s.points) out.push_back(p.anomalous() ? 1 : 0);
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("seqlat_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Two sequences, two features, kinds "dos" and "scan".
inline constexpr const char* kTwoSequenceCsv =
    "seq_id,t,label,kind,cpu,mem\n"
    "a,0,0,,0.5,1.25\n"
    "a,1,0,,0.25,1\n"
    "a,2,1,dos,3,4.5\n"
    "a,3,1,dos,2.75,4\n"
    "a,4,1,dos,3.5,5\n"
    "a,5,1,dos,3,4\n"
    "b,10.5,0,,0.5,1\n"
    "b,11.5,0,,0.75,1.5\n"
    "b,12.5,1,scan,1,2\n";

}  // namespace seqlat::testing
