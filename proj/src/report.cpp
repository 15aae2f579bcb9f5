#include "seqlat/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "seqlat/error.hpp"
#include "seqlat/text.hpp"

namespace seqlat::report {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json real_json(double v) {
  if (std::isfinite(v)) return v;
  return text::format_real(v);
}

ordered_json metric_json(const Metric& m) { return m ? real_json(*m) : ordered_json("NaN"); }

double real_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InputError("report: expected a number, got " + j.dump());
}

Metric metric_from(const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "NaN")) return std::nullopt;
  return real_from(j);
}

Metric metric_at(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? std::nullopt : metric_from(*it);
}

ordered_json counts_json(const ConfusionCounts& c) {
  return ordered_json{{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

ConfusionCounts counts_from(const json& j) {
  return ConfusionCounts{j.value("tp", std::uint64_t{0}), j.value("tn", std::uint64_t{0}),
                         j.value("fp", std::uint64_t{0}), j.value("fn", std::uint64_t{0})};
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::optional<std::string> reproducible_timestamp() {
  const char* env = std::getenv("SOURCE_DATE_EPOCH");
  if (env == nullptr) return std::nullopt;
  auto secs = text::parse_integer(env);
  if (!secs) return std::nullopt;
  const std::chrono::sys_seconds tp{std::chrono::seconds(*secs)};
  const auto days = std::chrono::floor<std::chrono::days>(tp);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{tp - days};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()), long(hms.hours().count()), long(hms.minutes().count()),
                long(hms.seconds().count()));
  return std::string(buf);
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["parameters"] = ordered_json::object();
  for (const auto& [k, v] : m.parameters) j["parameters"][k] = v;
  j["seeds"] = ordered_json::object();
  for (const auto& [k, v] : m.seeds) j["seeds"][k] = v;
  j["input_digests"] = ordered_json::object();
  for (const auto& [k, v] : m.input_digests) j["input_digests"][k] = v;
  j["toolkit_version"] = m.toolkit_version;
  j["timestamp"] = m.timestamp ? ordered_json(*m.timestamp) : ordered_json(nullptr);
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.command = j.value("command", "");
  if (auto it = j.find("parameters"); it != j.end()) {
    for (auto& [k, v] : it->items()) m.parameters[k] = v.get<std::string>();
  }
  if (auto it = j.find("seeds"); it != j.end()) {
    for (auto& [k, v] : it->items()) m.seeds[k] = v.get<std::uint64_t>();
  }
  if (auto it = j.find("input_digests"); it != j.end()) {
    for (auto& [k, v] : it->items()) m.input_digests[k] = v.get<std::string>();
  }
  m.toolkit_version = j.value("toolkit_version", "");
  if (auto it = j.find("timestamp"); it != j.end() && it->is_string()) m.timestamp = it->get<std::string>();
  return m;
}

ordered_json report_json(const EvalReport& rep, const RunManifest& manifest) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["manifest"] = manifest_json(manifest);
  const auto& c = rep.calibration;
  j["calibration"] = ordered_json{{"threshold", real_json(c.threshold)},
                                  {"target_fpr", c.target_fpr},
                                  {"achieved_fpr", c.achieved_fpr},
                                  {"calibration_point_count", c.calibration_point_count},
                                  {"in_sample", c.in_sample}};
  j["counts"] = counts_json(rep.counts);
  const auto& m = rep.metrics;
  j["metrics"] = ordered_json{{"accuracy", metric_json(m.accuracy)}, {"precision", metric_json(m.precision)},
                              {"recall", metric_json(m.recall)},     {"f1", metric_json(m.f1)},
                              {"fpr", metric_json(m.fpr)},           {"fdr", metric_json(m.fdr)}};
  j["sdr"] = metric_json(rep.sdr);
  j["al_points"] = metric_json(rep.al_points);
  j["al_seconds"] = metric_json(rep.al_seconds);
  j["per_kind"] = ordered_json::object();
  for (const auto& [kind, k] : rep.per_kind) {
    j["per_kind"][kind] = ordered_json{{"sequences", k.sequences},          {"counts", counts_json(k.counts)},
                                       {"recall", metric_json(k.recall)},   {"f1", metric_json(k.f1)},
                                       {"sdr", metric_json(k.sdr)},         {"al_points", metric_json(k.al_points)},
                                       {"al_seconds", metric_json(k.al_seconds)}};
  }
  j["outcomes"] = ordered_json::array();
  for (const auto& o : rep.outcomes) {
    ordered_json row;
    row["sequence_id"] = o.sequence_id;
    row["detected"] = o.detected;
    row["detection_index"] = o.detection_index ? ordered_json(*o.detection_index) : ordered_json(nullptr);
    row["latency_points"] = o.latency_points ? ordered_json(*o.latency_points) : ordered_json(nullptr);
    row["latency_seconds"] = o.latency_seconds ? real_json(*o.latency_seconds) : ordered_json(nullptr);
    j["outcomes"].push_back(std::move(row));
  }
  return j;
}

std::string render_report(const EvalReport& rep, const RunManifest& manifest) {
  return report_json(rep, manifest).dump(2) + "\n";
}

ParsedReport parse_report(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("report is not valid JSON: ") + e.what());
  }
  ParsedReport out;
  out.schema_version = j.value("schema_version", "");
  if (out.schema_version.rfind("seqlat.report/", 0) != 0) throw InputError("unrecognized report schema");
  if (auto it = j.find("manifest"); it != j.end()) out.manifest = manifest_from_json(*it);
  auto& rep = out.report;
  if (auto it = j.find("calibration"); it != j.end()) {
    rep.calibration.threshold = real_from(it->at("threshold"));
    rep.calibration.target_fpr = real_from(it->at("target_fpr"));
    rep.calibration.achieved_fpr = real_from(it->at("achieved_fpr"));
    rep.calibration.calibration_point_count = it->value("calibration_point_count", std::uint64_t{0});
    rep.calibration.in_sample = it->value("in_sample", false);
  }
  if (auto it = j.find("counts"); it != j.end()) rep.counts = counts_from(*it);
  if (auto it = j.find("metrics"); it != j.end()) {
    rep.metrics = ClassicalMetrics{metric_at(*it, "accuracy"), metric_at(*it, "precision"), metric_at(*it, "recall"),
                                   metric_at(*it, "f1"),       metric_at(*it, "fpr"),       metric_at(*it, "fdr")};
  }
  rep.sdr = metric_at(j, "sdr");
  rep.al_points = metric_at(j, "al_points");
  rep.al_seconds = metric_at(j, "al_seconds");
  if (auto it = j.find("per_kind"); it != j.end()) {
    for (auto& [kind, k] : it->items()) {
      KindBreakdown b;
      b.sequences = k.value("sequences", std::uint64_t{0});
      if (auto c = k.find("counts"); c != k.end()) b.counts = counts_from(*c);
      b.recall = metric_at(k, "recall");
      b.f1 = metric_at(k, "f1");
      b.sdr = metric_at(k, "sdr");
      b.al_points = metric_at(k, "al_points");
      b.al_seconds = metric_at(k, "al_seconds");
      rep.per_kind[kind] = b;
    }
  }
  if (auto it = j.find("outcomes"); it != j.end()) {
    for (const auto& row : *it) {
      SequenceOutcome o;
      o.sequence_id = row.value("sequence_id", "");
      o.detected = row.value("detected", false);
      if (auto d = row.find("detection_index"); d != row.end() && !d->is_null()) o.detection_index = d->get<std::size_t>();
      if (auto d = row.find("latency_points"); d != row.end() && !d->is_null()) o.latency_points = d->get<std::uint64_t>();
      if (auto d = row.find("latency_seconds"); d != row.end() && !d->is_null()) o.latency_seconds = real_from(*d);
      rep.outcomes.push_back(std::move(o));
    }
  }
  return out;
}

std::string render_curve_csv(const TradeoffCurve& curve) {
  std::ostringstream out;
  out << "target_fpr,threshold,achieved_fpr,sdr,al_points,al_seconds,recall,precision\n";
  for (const auto& p : curve.points) {
    out << text::format_real(p.target_fpr) << ',' << text::format_real(p.threshold) << ','
        << text::format_real(p.achieved_fpr) << ',' << text::format_metric(p.sdr) << ','
        << text::format_metric(p.al_points) << ',' << text::format_metric(p.al_seconds) << ','
        << text::format_metric(p.recall) << ',' << text::format_metric(p.precision) << '\n';
  }
  return out.str();
}

TradeoffCurve parse_curve_csv(const std::vector<std::string>& lines) {
  if (lines.empty() || lines.front() != "target_fpr,threshold,achieved_fpr,sdr,al_points,al_seconds,recall,precision") {
    throw InputError("curve CSV: unexpected header");
  }
  auto real = [](std::string_view f, std::size_t line) {
    auto v = text::parse_real(f);
    if (!v) throw InputError("curve CSV: line " + std::to_string(line) + ": bad number");
    return *v;
  };
  auto metric = [&](std::string_view f, std::size_t line) -> Metric {
    if (f == "NaN") return std::nullopt;
    return real(f, line);
  };
  TradeoffCurve c;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = text::split_fields(lines[i]);
    if (f.size() != 8) throw InputError("curve CSV: line " + std::to_string(i + 1) + ": expected 8 fields");
    c.points.push_back(TradeoffPoint{real(f[0], i + 1), real(f[1], i + 1), real(f[2], i + 1), metric(f[3], i + 1),
                                     metric(f[4], i + 1), metric(f[5], i + 1), metric(f[6], i + 1),
                                     metric(f[7], i + 1)});
  }
  return c;
}

std::string render_tradeoff_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  constexpr double kWidth = 760, kHeight = 440;
  constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 80;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double fpr_lo = 1.0, fpr_hi = 0.0, al_hi = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s.curve.points) {
      fpr_lo = std::min(fpr_lo, p.target_fpr);
      fpr_hi = std::max(fpr_hi, p.target_fpr);
      if (p.al_points) al_hi = std::max(al_hi, *p.al_points);
    }
  }
  if (fpr_hi <= fpr_lo) {
    fpr_lo = fpr_lo >= 1.0 ? 1e-4 : fpr_lo / 10.0;
    fpr_hi = std::max(fpr_hi, fpr_lo * 10.0);
  }
  if (al_hi <= 0.0) al_hi = 1.0;
  const double lx0 = std::log10(fpr_lo), lx1 = std::log10(fpr_hi);
  auto px = [&](double fpr) { return kLeft + (std::log10(fpr) - lx0) / (lx1 - lx0) * plot_w; };
  auto py = [&](double al) { return kTop + plot_h - al / al_hi * plot_h; };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";

  for (int e = static_cast<int>(std::ceil(lx0 - 1e-9)); e <= static_cast<int>(std::floor(lx1 + 1e-9)); ++e) {
    const double x = px(std::pow(10.0, e));
    svg << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << fixed(x, 2) << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(x, 2) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double al = al_hi * k / 4.0;
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(py(al) + 4, 2)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(al, 2) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 30
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">target FPR (log scale)</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" transform=\"rotate(-90 18 " << kTop + plot_h / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">AL (points)</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    svg << "<g>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& p : series[s].curve.points) {
      if (!p.al_points) continue;
      svg << (first ? "" : " ") << fixed(px(p.target_fpr), 2) << ',' << fixed(py(*p.al_points), 2);
      first = false;
    }
    svg << "\"/>\n";
    for (const auto& p : series[s].curve.points) {
      if (!p.al_points) continue;
      svg << "<circle cx=\"" << fixed(px(p.target_fpr), 2) << "\" cy=\"" << fixed(py(*p.al_points), 2)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    for (const auto& p : series[s].curve.points) {
      svg << "<text x=\"" << fixed(px(p.target_fpr), 2) << "\" y=\"" << kTop + plot_h + 34 + 12.0 * double(s)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"8\" fill=\"" << color << "\">"
          << (p.sdr ? fixed(*p.sdr, 2) : std::string("NaN")) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w - 4 << "\" y=\"" << kTop + 14 + 14.0 * double(s)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
        << xml_escape(series[s].name) << "</text>\n</g>\n";
  }
  svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << kTop + plot_h + 34
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">SDR</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace seqlat::report
