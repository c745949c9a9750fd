#pragma once
// Config-driven benchmark campaigns: lossless bpss tables, lossy RD
// curves with BD-rates, and downstream classification on raw versus
// decoded images.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taccompress/analysis.h"
#include "taccompress/codec.h"
#include "taccompress/metrics.h"
#include "taccompress/simulator.h"

namespace taccompress {

inline constexpr const char* kVersion = "0.1.0";

struct DatasetConfig {
  enum class Kind { kSynthetic, kIngest };
  Kind kind = Kind::kSynthetic;
  // Synthetic: objects x poses x reps traces, rep r seeded by
  // mix_seed(seed, r).
  std::vector<std::string> objects{kObjectNames.begin(), kObjectNames.end()};
  std::vector<Pose> poses{std::begin(kAllPoses), std::end(kAllPoses)};
  int reps = 10;
  std::uint64_t seed = 1;
  double sample_rate_hz = 100.0;
  PhasePlan plan;
  // Ingest: every *.mptd file below this directory, in path order.
  std::filesystem::path directory;
};

// A decoded-data source for the downstream suite; codec empty means raw.
struct DataSource {
  std::string codec;
  std::optional<int> quality;
  std::string label() const;
  bool raw() const { return codec.empty(); }
};
DataSource parse_data_source(const std::string& text);  // "raw" or "codec@q"

struct BenchConfig {
  DatasetConfig dataset;
  std::size_t tile_height = kDefaultTileHeight;
  std::size_t jobs = 0;
  std::filesystem::path out_dir = "results";
  std::filesystem::path codec_spec_file;
  std::chrono::seconds timeout{300};

  std::vector<std::string> lossless_codecs{kTlcLosslessId};

  std::vector<std::string> lossy_codecs{kTlcLossyId};
  std::map<std::string, std::vector<int>> ladders;  // overrides per codec
  std::vector<std::pair<std::string, std::string>> bd_pairs;
  bool compute_ms_ssim = true;

  std::vector<ClassifierKind> classifiers{std::begin(kAllClassifiers),
                                          std::end(kAllClassifiers)};
  std::vector<DataSource> sources{DataSource{}, DataSource{kTlcLossyId, 8}};
  double train_fraction = 0.7;
  std::size_t feature_height = kDefaultFeatureHeight;
  std::uint64_t split_seed = 7;
  std::uint64_t model_seed = 11;

  // Every setting as "section.key" -> value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
  // Throws DataError for values outside their documented ranges.
  void validate() const;
};

// INI sections [dataset], [bench], [lossy], [ladders] and [downstream];
// see configs/ for annotated examples. Missing keys keep their defaults.
// Throws FormatError on syntax errors or unknown keys.
BenchConfig parse_bench_config(std::istream& in);
BenchConfig load_bench_config(const std::filesystem::path& path);

// Registry with the config's spec file loaded (if any) and its timeout.
CodecRegistry make_registry(const BenchConfig& config);

struct TraceJob {
  std::string object;
  Pose pose = Pose::kPinch;
  int rep = 0;
  std::filesystem::path file;  // ingest only
};

// Throws DataError for an unknown object or an empty ingest directory.
std::vector<TraceJob> enumerate_traces(const DatasetConfig& dataset);
GraspTrace load_trace_job(const DatasetConfig& dataset, const TraceJob& job);

// Codes every tile of `image` and stacks the reconstructions. `bits`
// receives the summed payload bits of all tiles.
TactileImage code_tiles(const ImageCodec& codec, const TactileImage& image,
                        std::optional<int> quality, std::size_t tile_height,
                        std::uint64_t& bits);

// ---------------------------------------------------------------- reports

struct SkippedCodec {
  std::string codec_id;
  std::string reason;
};

struct LosslessCell {
  std::string object;
  Pose pose = Pose::kPinch;
  std::string codec;
  std::size_t traces = 0;
  std::uint64_t bits = 0;
  std::uint64_t sub_samples = 0;
  double bpss = 0.0;  // mean over traces of per-trace bpss
  double cr = 0.0;    // 8 / bpss
};

struct LosslessReport {
  std::vector<std::string> codecs;
  std::vector<std::string> objects;
  std::vector<Pose> poses;
  std::vector<LosslessCell> cells;
  // Marginals: means of the cell values over the other factor.
  std::map<std::pair<std::string, std::string>, double> object_bpss;  // (object, codec)
  std::map<std::pair<Pose, std::string>, double> pose_bpss;          // (pose, codec)
  std::map<std::string, double> codec_bpss;
  std::vector<SkippedCodec> skipped;
  std::uint64_t total_bits = 0;

  const LosslessCell& cell(const std::string& object, Pose pose, const std::string& codec) const;
};

// Throws CodecError when no requested codec is usable.
LosslessReport run_lossless_suite(const BenchConfig& config, const CodecRegistry& registry);

struct RDSample {
  std::string codec;
  int quality = 0;
  std::string object;  // "all" for the average over every trace
  std::size_t traces = 0;
  double bpss = 0.0;
  double psnr_db = 0.0;
  double ms_ssim = 0.0;
};

struct BdEntry {
  std::string reference;
  std::string test;
  QualityMetric metric = QualityMetric::kPsnr;
  std::optional<double> percent;
  std::string error;
};

struct LossyReport {
  std::vector<RDSample> samples;  // per object, then "all"
  std::map<std::string, RDCurve> curves;  // averages over every trace
  std::vector<BdEntry> bd;
  std::vector<SkippedCodec> skipped;
  // Per trace, qualities where rate or PSNR rose with qp (codec, trace
  // index, quality).
  std::vector<std::string> non_monotone;
};

LossyReport run_lossy_suite(const BenchConfig& config, const CodecRegistry& registry);

struct DownstreamRow {
  DataSource source;
  double bpss = 8.0;
  std::map<ClassifierKind, double> accuracy;
};

struct DownstreamReport {
  std::vector<DownstreamRow> rows;  // raw first, then by descending bpss
  std::vector<ClassifierKind> classifiers;
  std::vector<SkippedCodec> skipped;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

DownstreamReport run_downstream_suite(const BenchConfig& config, const CodecRegistry& registry);

// Features for every trace of the dataset from one source; labels index
// the object names in dataset order. `bits` gets the total coded bits and
// `sub_samples` the raw sub-sample count.
FeatureMatrix build_features(const BenchConfig& config, const CodecRegistry& registry,
                             const DataSource& source, std::uint64_t* bits = nullptr,
                             std::uint64_t* sub_samples = nullptr,
                             std::vector<Pose>* poses = nullptr);

// Report files. Each starts with '#' lines naming the tool version, the
// report and the resolved config, and is written to a temporary name and
// renamed into place. Returns the paths written.
std::vector<std::filesystem::path> write_lossless_report(const LosslessReport& report,
                                                         const BenchConfig& config);
std::vector<std::filesystem::path> write_lossy_report(const LossyReport& report,
                                                      const BenchConfig& config);
std::vector<std::filesystem::path> write_downstream_report(const DownstreamReport& report,
                                                           const BenchConfig& config);

// Atomic write helper used by the reports and the CLI.
void write_text_atomically(const std::filesystem::path& path, const std::string& text);
std::string report_header(const std::string& report, const BenchConfig& config);

}  // namespace taccompress
