#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "taccompress/bench.h"
#include "taccompress/error.h"
#include "taccompress/parallel.h"
#include "taccompress/simd.h"

namespace taccompress {
namespace {

template <typename T>
std::size_t index_of(const std::vector<T>& v, const T& x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

template <typename T>
void add_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

// Objects and poses in config order (synthetic) or first-seen order.
void factors_of(const std::vector<TraceJob>& jobs, std::vector<std::string>& objects,
                std::vector<Pose>& poses) {
  for (const auto& j : jobs) {
    add_unique(objects, j.object);
    add_unique(poses, j.pose);
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string metric_name(QualityMetric m) { return m == QualityMetric::kPsnr ? "psnr" : "ms_ssim"; }

struct UsableCodec {
  std::string id;
  std::unique_ptr<ImageCodec> codec;
  std::vector<int> ladder;
};

std::vector<UsableCodec> usable_codecs(const std::vector<std::string>& ids,
                                       const CodecRegistry& registry, CodecKind wanted,
                                       const BenchConfig& config,
                                       std::vector<SkippedCodec>& skipped) {
  std::vector<UsableCodec> out;
  for (const auto& id : ids) {
    if (!registry.contains(id)) {
      skipped.push_back({id, "unknown codec id"});
      continue;
    }
    const ProbeReport probe = registry.probe(id);
    if (probe.status != Availability::kAvailable) {
      skipped.push_back({id, availability_name(probe.status) + ": " + probe.detail});
      continue;
    }
    auto codec = registry.make(id);
    if (codec->kind() != wanted) {
      skipped.push_back({id, wanted == CodecKind::kLossless ? "not a lossless codec"
                                                             : "not a lossy codec"});
      continue;
    }
    std::vector<int> ladder = codec->default_ladder();
    if (auto it = config.ladders.find(id); it != config.ladders.end()) ladder = it->second;
    if (wanted == CodecKind::kLossy && ladder.empty()) {
      skipped.push_back({id, "empty quality ladder"});
      continue;
    }
    out.push_back({id, std::move(codec), std::move(ladder)});
  }
  return out;
}

TactileImage rows_of(const TactileImage& image, const FrameRange& r) {
  const auto rows = image.samples().subspan(r.begin * image.row_stride(),
                                            r.size() * image.row_stride());
  return TactileImage(image.width(), r.size(), {rows.begin(), rows.end()});
}

}  // namespace

TactileImage code_tiles(const ImageCodec& codec, const TactileImage& image,
                        std::optional<int> quality, std::size_t tile_height,
                        std::uint64_t& bits) {
  bits = 0;
  std::vector<TactileImage> parts;
  for (const FrameRange& r : tile_ranges(image.height(), tile_height)) {
    CodedImage coded = codec.code(rows_of(image, r), quality);
    bits += coded.blob.payload_bits();
    parts.push_back(std::move(coded.reconstruction));
  }
  return parts.size() == 1 ? std::move(parts.front()) : concat_rows(parts);
}

const LosslessCell& LosslessReport::cell(const std::string& object, Pose pose,
                                         const std::string& codec) const {
  for (const auto& c : cells) {
    if (c.object == object && c.pose == pose && c.codec == codec) return c;
  }
  throw DataError("no lossless cell for " + object + "/" + std::string(pose_name(pose)) + "/" +
                  codec);
}

// ------------------------------------------------------------- lossless

LosslessReport run_lossless_suite(const BenchConfig& config, const CodecRegistry& registry) {
  config.validate();
  LosslessReport report;
  auto codecs = usable_codecs(config.lossless_codecs, registry, CodecKind::kLossless, config,
                              report.skipped);
  if (codecs.empty()) throw CodecError("no usable lossless codec among the requested ones");
  const std::vector<TraceJob> jobs = enumerate_traces(config.dataset);

  struct Outcome {
    std::uint64_t bits = 0;
    std::uint64_t sub_samples = 0;
    std::string failure;
  };
  std::vector<std::vector<Outcome>> outcomes(jobs.size(), std::vector<Outcome>(codecs.size()));
  parallel_for(jobs.size(), config.jobs, [&](std::size_t j) {
    const GraspTrace trace = load_trace_job(config.dataset, jobs[j]);
    const TactileImage image = trace_to_image(trace);
    for (std::size_t c = 0; c < codecs.size(); ++c) {
      Outcome& o = outcomes[j][c];
      o.sub_samples = trace.sub_sample_count();
      try {
        const TactileImage back =
            code_tiles(*codecs[c].codec, image, std::nullopt, config.tile_height, o.bits);
        if (!(back == image)) o.failure = "reconstruction differs from the source";
      } catch (const CodecError& e) {
        o.failure = e.what();
      }
    }
  });

  std::vector<bool> keep(codecs.size(), true);
  for (std::size_t c = 0; c < codecs.size(); ++c) {
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (!outcomes[j][c].failure.empty()) {
        report.skipped.push_back({codecs[c].id, "integrity failure on trace " + std::to_string(j) +
                                                    ": " + outcomes[j][c].failure});
        keep[c] = false;
        break;
      }
    }
    if (keep[c]) report.codecs.push_back(codecs[c].id);
  }
  if (report.codecs.empty()) throw CodecError("every lossless codec failed verification");
  factors_of(jobs, report.objects, report.poses);

  for (std::size_t c = 0; c < codecs.size(); ++c) {
    if (!keep[c]) continue;
    for (const auto& object : report.objects) {
      for (Pose pose : report.poses) {
        LosslessCell cell{object, pose, codecs[c].id};
        std::vector<double> per_trace;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
          if (jobs[j].object != object || jobs[j].pose != pose) continue;
          const Outcome& o = outcomes[j][c];
          ++cell.traces;
          cell.bits += o.bits;
          cell.sub_samples += o.sub_samples;
          per_trace.push_back(bpss(o.bits, o.sub_samples));
        }
        if (cell.traces == 0) continue;
        cell.bpss = mean(per_trace);
        cell.cr = compression_ratio(cell.bpss);
        report.total_bits += cell.bits;
        report.cells.push_back(cell);
      }
    }
  }
  for (const auto& codec : report.codecs) {
    std::vector<double> all;
    for (const auto& object : report.objects) {
      std::vector<double> v;
      for (const auto& cell : report.cells) {
        if (cell.codec == codec && cell.object == object) v.push_back(cell.bpss);
      }
      report.object_bpss[{object, codec}] = mean(v);
    }
    for (Pose pose : report.poses) {
      std::vector<double> v;
      for (const auto& cell : report.cells) {
        if (cell.codec == codec && cell.pose == pose) v.push_back(cell.bpss);
      }
      report.pose_bpss[{pose, codec}] = mean(v);
    }
    for (const auto& cell : report.cells) {
      if (cell.codec == codec) all.push_back(cell.bpss);
    }
    report.codec_bpss[codec] = mean(all);
  }
  return report;
}

// ---------------------------------------------------------------- lossy

LossyReport run_lossy_suite(const BenchConfig& config, const CodecRegistry& registry) {
  config.validate();
  LossyReport report;
  auto codecs =
      usable_codecs(config.lossy_codecs, registry, CodecKind::kLossy, config, report.skipped);
  const std::vector<TraceJob> jobs = enumerate_traces(config.dataset);

  struct Point {
    std::uint64_t bits = 0;
    std::uint64_t sub_samples = 0;
    double psnr = 0.0;
    double ms_ssim = 0.0;
    std::string failure;
  };
  // outcomes[job][codec][quality index]
  std::vector<std::vector<std::vector<Point>>> outcomes(jobs.size());
  parallel_for(jobs.size(), config.jobs, [&](std::size_t j) {
    const GraspTrace trace = load_trace_job(config.dataset, jobs[j]);
    const TactileImage image = trace_to_image(trace);
    const auto tiles = tile_ranges(image.height(), config.tile_height);
    outcomes[j].resize(codecs.size());
    for (std::size_t c = 0; c < codecs.size(); ++c) {
      for (int q : codecs[c].ladder) {
        Point p;
        p.sub_samples = trace.sub_sample_count();
        try {
          const TactileImage back =
              code_tiles(*codecs[c].codec, image, q, config.tile_height, p.bits);
          p.psnr = psnr(image, back);
          if (config.compute_ms_ssim) {
            // Tile-wise, weighted by tile size.
            double acc = 0.0;
            for (const auto& r : tiles) {
              acc += static_cast<double>(r.size()) *
                     ms_ssim(rows_of(image, r), rows_of(back, r));
            }
            p.ms_ssim = acc / static_cast<double>(image.height());
          }
        } catch (const CodecError& e) {
          p.failure = e.what();
        }
        outcomes[j][c].push_back(std::move(p));
      }
    }
  });

  std::vector<std::string> objects;
  std::vector<Pose> poses;
  factors_of(jobs, objects, poses);
  for (std::size_t c = 0; c < codecs.size(); ++c) {
    const auto& codec = codecs[c];
    bool failed = false;
    for (std::size_t j = 0; j < jobs.size() && !failed; ++j) {
      for (const Point& p : outcomes[j][c]) {
        if (!p.failure.empty()) {
          report.skipped.push_back({codec.id, "failed on trace " + std::to_string(j) + ": " + p.failure});
          failed = true;
          break;
        }
      }
    }
    if (failed) continue;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      const auto& pts = outcomes[j][c];
      for (std::size_t k = 1; k < pts.size(); ++k) {
        const bool rate_up = pts[k].bits > pts[k - 1].bits;
        const bool rate_down = pts[k].bits < pts[k - 1].bits;
        const bool quality_up = pts[k].psnr > pts[k - 1].psnr;
        const bool quality_down = pts[k].psnr < pts[k - 1].psnr;
        if ((rate_up && quality_down) || (rate_down && quality_up)) {
          report.non_monotone.push_back(codec.id + " trace " + std::to_string(j) + " quality " +
                                        std::to_string(codec.ladder[k]));
        }
      }
    }
    std::vector<std::string> groups = objects;
    groups.push_back("all");
    RDCurve curve{codec.id, {}};
    for (std::size_t k = 0; k < codec.ladder.size(); ++k) {
      for (const auto& group : groups) {
        std::vector<double> rates, psnrs, ssims;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
          if (group != "all" && jobs[j].object != group) continue;
          const Point& p = outcomes[j][c][k];
          rates.push_back(bpss(p.bits, p.sub_samples));
          psnrs.push_back(p.psnr);
          ssims.push_back(p.ms_ssim);
        }
        if (rates.empty()) continue;
        RDSample s{codec.id, codec.ladder[k], group, rates.size(), mean(rates), mean(psnrs),
                   config.compute_ms_ssim ? mean(ssims) : std::nan("")};
        report.samples.push_back(s);
        if (group == "all") curve.points.push_back({s.bpss, s.psnr_db, s.ms_ssim});
      }
    }
    report.curves[codec.id] = std::move(curve);
  }

  std::vector<QualityMetric> metrics = {QualityMetric::kPsnr};
  if (config.compute_ms_ssim) metrics.push_back(QualityMetric::kMsSsim);
  for (const auto& [ref, test] : config.bd_pairs) {
    for (QualityMetric m : metrics) {
      BdEntry e{ref, test, m, std::nullopt, ""};
      auto a = report.curves.find(ref), b = report.curves.find(test);
      if (a == report.curves.end() || b == report.curves.end()) {
        e.error = "codec not run: " + (a == report.curves.end() ? ref : test);
      } else {
        try {
          e.percent = bd_rate(a->second, b->second, m);
        } catch (const DataError& err) {
          e.error = err.what();
        }
      }
      report.bd.push_back(std::move(e));
    }
  }
  return report;
}

// ----------------------------------------------------------- downstream

namespace {

struct SourceFeatures {
  std::vector<std::vector<std::uint8_t>> rows;  // per job: resampled raster bytes
  std::uint64_t bits = 0;
  std::uint64_t sub_samples = 0;
};

std::vector<std::uint8_t> resampled_bytes(const TactileImage& image, std::size_t target) {
  std::vector<std::uint8_t> out;
  out.reserve(image.row_stride() * target);
  for (std::size_t r : resample_rows(image.height(), target)) {
    const auto row = image.row(r);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

// One pass over the dataset feeding every source, so each trace is
// generated or loaded once.
std::vector<SourceFeatures> collect_sources(const BenchConfig& config,
                                            const std::vector<TraceJob>& jobs,
                                            const std::vector<const ImageCodec*>& codecs,
                                            const std::vector<DataSource>& sources) {
  std::vector<SourceFeatures> out(sources.size());
  for (auto& s : out) s.rows.resize(jobs.size());
  std::vector<std::vector<std::uint64_t>> bits(jobs.size(), std::vector<std::uint64_t>(sources.size()));
  std::vector<std::uint64_t> subs(jobs.size());
  parallel_for(jobs.size(), config.jobs, [&](std::size_t j) {
    const GraspTrace trace = load_trace_job(config.dataset, jobs[j]);
    const TactileImage image = trace_to_image(trace);
    subs[j] = trace.sub_sample_count();
    for (std::size_t s = 0; s < sources.size(); ++s) {
      if (sources[s].raw()) {
        out[s].rows[j] = resampled_bytes(image, config.feature_height);
        bits[j][s] = 8 * subs[j];
      } else {
        const TactileImage back =
            code_tiles(*codecs[s], image, sources[s].quality, config.tile_height, bits[j][s]);
        out[s].rows[j] = resampled_bytes(back, config.feature_height);
      }
    }
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (std::size_t s = 0; s < sources.size(); ++s) {
      out[s].bits += bits[j][s];
      out[s].sub_samples += subs[j];
    }
  }
  return out;
}

FeatureMatrix to_matrix(const SourceFeatures& f, const std::vector<TraceJob>& jobs,
                        const std::vector<std::string>& classes, const std::string& label) {
  FeatureMatrix m;
  m.class_names = classes;
  m.dim = f.rows.empty() ? 0 : f.rows.front().size();
  m.values.reserve(m.dim * jobs.size());
  std::vector<float> row(m.dim);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& bytes = f.rows[j];
    for (std::size_t i = 0; i < bytes.size(); ++i) row[i] = static_cast<float>(bytes[i]) / 255.0f;
    m.append(row, static_cast<int>(index_of(classes, jobs[j].object)), label);
  }
  return m;
}

}  // namespace

FeatureMatrix build_features(const BenchConfig& config, const CodecRegistry& registry,
                             const DataSource& source, std::uint64_t* bits,
                             std::uint64_t* sub_samples, std::vector<Pose>* poses) {
  config.validate();
  const std::vector<TraceJob> jobs = enumerate_traces(config.dataset);
  std::unique_ptr<ImageCodec> codec;
  if (!source.raw()) {
    const ProbeReport probe = registry.probe(source.codec);
    if (probe.status != Availability::kAvailable) {
      throw CodecError("codec " + source.codec + " is " + availability_name(probe.status) +
                       ": " + probe.detail);
    }
    codec = registry.make(source.codec);
  }
  std::vector<std::string> classes;
  std::vector<Pose> pose_order;
  factors_of(jobs, classes, pose_order);
  const auto collected = collect_sources(config, jobs, {codec.get()}, {source});
  if (bits) *bits = collected[0].bits;
  if (sub_samples) *sub_samples = collected[0].sub_samples;
  if (poses) {
    poses->clear();
    for (const auto& j : jobs) poses->push_back(j.pose);
  }
  return to_matrix(collected[0], jobs, classes, source.label());
}

DownstreamReport run_downstream_suite(const BenchConfig& config, const CodecRegistry& registry) {
  config.validate();
  if (config.classifiers.empty()) throw DataError("downstream.classifiers is empty");
  DownstreamReport report;
  report.classifiers = config.classifiers;
  const std::vector<TraceJob> jobs = enumerate_traces(config.dataset);

  std::vector<DataSource> sources;
  std::vector<std::unique_ptr<ImageCodec>> owned;
  std::vector<const ImageCodec*> codecs;
  for (const auto& s : config.sources) {
    if (s.raw()) {
      sources.push_back(s);
      codecs.push_back(nullptr);
      continue;
    }
    if (!registry.contains(s.codec)) {
      report.skipped.push_back({s.label(), "unknown codec id"});
      continue;
    }
    const ProbeReport probe = registry.probe(s.codec);
    if (probe.status != Availability::kAvailable) {
      report.skipped.push_back({s.label(), availability_name(probe.status) + ": " + probe.detail});
      continue;
    }
    owned.push_back(registry.make(s.codec));
    if (owned.back()->kind() == CodecKind::kLossy && !s.quality) {
      throw DataError("source " + s.label() + " needs a quality (codec@q)");
    }
    sources.push_back(s);
    codecs.push_back(owned.back().get());
  }
  if (sources.empty()) throw CodecError("no usable data source");

  std::vector<std::string> classes;
  std::vector<Pose> poses;
  factors_of(jobs, classes, poses);
  const auto collected = collect_sources(config, jobs, codecs, sources);

  ClassifierParams params;
  params.seed = config.model_seed;
  params.jobs = config.jobs;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    DownstreamRow row;
    row.source = sources[s];
    row.bpss = sources[s].raw() ? 8.0 : bpss(collected[s].bits, collected[s].sub_samples);
    const FeatureMatrix features = to_matrix(collected[s], jobs, classes, sources[s].label());
    const Split split = stratified_split(features, config.train_fraction, config.split_seed);
    report.train_rows = split.train.rows();
    report.test_rows = split.test.rows();
    for (ClassifierKind k : config.classifiers) {
      const auto model = train_classifier(k, split.train, params);
      row.accuracy[k] = accuracy(model->predict(split.test), split.test.labels);
    }
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const DownstreamRow& a, const DownstreamRow& b) {
                     if (a.source.raw() != b.source.raw()) return a.source.raw();
                     return a.bpss > b.bpss;
                   });
  return report;
}

// -------------------------------------------------------------- writers

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp =
      path.string() + ".tmp." + std::to_string(static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw DataError("cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string report_header(const std::string& report, const BenchConfig& config) {
  std::ostringstream out;
  out << "# taccompress " << kVersion << "\n";
  out << "# report " << report << "\n";
  for (const auto& [key, value] : config.resolved()) out << "# config " << key << " = " << value << "\n";
  return out.str();
}

std::vector<std::filesystem::path> write_lossless_report(const LosslessReport& r,
                                                         const BenchConfig& config) {
  std::ostringstream skipped;
  for (const auto& s : r.skipped) skipped << "# skipped " << s.codec_id << ": " << s.reason << "\n";
  const std::string note =
      "# bpss per trace = coded bits summed over tiles / sub-samples; cells average traces, "
      "marginals average cells\n";

  std::ostringstream cells;
  cells << report_header("lossless_cells", config) << note << skipped.str();
  cells << "object,pose,codec,traces,bits,sub_samples,bpss,cr\n";
  for (const auto& c : r.cells) {
    cells << csv_field(c.object) << ',' << pose_name(c.pose) << ',' << csv_field(c.codec) << ','
          << c.traces << ',' << c.bits << ',' << c.sub_samples << ',' << format_metric(c.bpss)
          << ',' << format_metric(c.cr) << "\n";
  }

  std::ostringstream table;
  table << report_header("lossless_table", config) << note << skipped.str();
  table << "group,setting";
  for (const auto& codec : r.codecs) table << ',' << csv_field(codec);
  table << "\n";
  for (const auto& object : r.objects) {
    table << "object," << csv_field(object);
    for (const auto& codec : r.codecs) table << ',' << format_metric(r.object_bpss.at({object, codec}));
    table << "\n";
  }
  for (Pose pose : r.poses) {
    table << "grasp," << pose_name(pose);
    for (const auto& codec : r.codecs) table << ',' << format_metric(r.pose_bpss.at({pose, codec}));
    table << "\n";
  }
  table << "summary,average_bpss";
  for (const auto& codec : r.codecs) table << ',' << format_metric(r.codec_bpss.at(codec));
  table << "\nsummary,cr";
  for (const auto& codec : r.codecs) {
    table << ',' << format_metric(compression_ratio(r.codec_bpss.at(codec)));
  }
  table << "\n";

  const auto a = config.out_dir / "lossless_cells.csv";
  const auto b = config.out_dir / "lossless_table.csv";
  write_text_atomically(a, cells.str());
  write_text_atomically(b, table.str());
  return {a, b};
}

std::vector<std::filesystem::path> write_lossy_report(const LossyReport& r,
                                                      const BenchConfig& config) {
  std::ostringstream skipped;
  for (const auto& s : r.skipped) skipped << "# skipped " << s.codec_id << ": " << s.reason << "\n";
  for (const auto& s : r.non_monotone) skipped << "# non-monotone " << s << "\n";
  const std::string note =
      "# per trace: bpss over all tiles, PSNR from the trace-wide MSE, MS-SSIM averaged over "
      "tiles by height; points average traces\n";
  auto rows = [&](const std::string& name, bool overall) {
    std::ostringstream out;
    out << report_header(name, config) << note << skipped.str();
    out << "codec,quality,object,traces,bpss,cr,psnr_db,ms_ssim\n";
    for (const auto& s : r.samples) {
      if ((s.object == "all") != overall) continue;
      out << csv_field(s.codec) << ',' << s.quality << ',' << csv_field(s.object) << ','
          << s.traces << ',' << format_metric(s.bpss) << ','
          << format_metric(compression_ratio(s.bpss)) << ',' << format_metric(s.psnr_db) << ','
          << (std::isnan(s.ms_ssim) ? std::string() : format_metric(s.ms_ssim)) << "\n";
    }
    return out.str();
  };
  std::ostringstream bd;
  bd << report_header("bdrate", config)
     << "# method: classic Bjontegaard, cubic least-squares fit of log10(bpss) against quality, "
        "integrated over the shared quality range; infinite PSNR points dropped\n"
     << skipped.str();
  bd << "reference,test,metric,bd_rate_percent,status\n";
  for (const auto& e : r.bd) {
    bd << csv_field(e.reference) << ',' << csv_field(e.test) << ',' << metric_name(e.metric) << ','
       << (e.percent ? format_metric(*e.percent) : std::string()) << ','
       << (e.percent ? std::string("ok") : csv_field(e.error)) << "\n";
  }
  const auto a = config.out_dir / "rd_points.csv";
  const auto b = config.out_dir / "rd_by_object.csv";
  const auto c = config.out_dir / "bdrate.csv";
  write_text_atomically(a, rows("rd_points", true));
  write_text_atomically(b, rows("rd_by_object", false));
  write_text_atomically(c, bd.str());
  return {a, b, c};
}

std::vector<std::filesystem::path> write_downstream_report(const DownstreamReport& r,
                                                           const BenchConfig& config) {
  std::ostringstream head;
  for (const auto& s : r.skipped) head << "# skipped " << s.codec_id << ": " << s.reason << "\n";
  head << "# split " << r.train_rows << " train / " << r.test_rows << " test rows\n";

  std::ostringstream table;
  table << report_header("downstream_table", config) << head.str();
  table << "data,bpss";
  for (auto k : r.classifiers) table << ',' << classifier_name(k);
  table << "\n";
  std::ostringstream long_form;
  long_form << report_header("downstream_long", config) << head.str();
  long_form << "codec,quality,bpss,classifier,accuracy\n";
  for (const auto& row : r.rows) {
    table << csv_field(row.source.label()) << ',' << format_metric(row.bpss);
    for (auto k : r.classifiers) {
      table << ',' << format_metric(row.accuracy.at(k));
      long_form << (row.source.raw() ? std::string("raw") : csv_field(row.source.codec)) << ','
                << (row.source.quality ? std::to_string(*row.source.quality) : std::string())
                << ',' << format_metric(row.bpss) << ',' << classifier_name(k) << ','
                << format_metric(row.accuracy.at(k)) << "\n";
    }
    table << "\n";
  }
  const auto a = config.out_dir / "downstream_table.csv";
  const auto b = config.out_dir / "downstream_long.csv";
  write_text_atomically(a, table.str());
  write_text_atomically(b, long_form.str());
  return {a, b};
}

}  // namespace taccompress
