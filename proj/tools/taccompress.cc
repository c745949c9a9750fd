// Command-line front end: simulation, conversion, coding, metrics and the
// benchmark campaigns.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "taccompress/analysis.h"
#include "taccompress/bench.h"
#include "taccompress/codec.h"
#include "taccompress/error.h"
#include "taccompress/layout.h"
#include "taccompress/metrics.h"
#include "taccompress/mptd.h"
#include "taccompress/ppm.h"
#include "taccompress/simulator.h"
#include "taccompress/tlc.h"

namespace fs = std::filesystem;
using namespace taccompress;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string config;
  std::string out;
  std::string codecs;
  std::string codec_spec;
};

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

BenchConfig load_config(const Globals& g) {
  BenchConfig c = g.config.empty() ? BenchConfig{} : load_bench_config(g.config);
  if (g.seed) c.dataset.seed = *g.seed;
  if (g.jobs) c.jobs = *g.jobs;
  if (!g.out.empty()) c.out_dir = g.out;
  if (!g.codec_spec.empty()) c.codec_spec_file = g.codec_spec;
  return c;
}

bool has_extension(const fs::path& p, const char* ext) { return p.extension() == ext; }

TactileImage read_image(const fs::path& p) {
  if (has_extension(p, ".mptd")) return trace_to_image(load_trace_file(p));
  return read_ppm_file(p);
}

std::vector<std::uint8_t> read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const fs::path& p, std::span<const std::uint8_t> bytes) {
  write_text_atomically(p, std::string(bytes.begin(), bytes.end()));
}

TraceMetadata metadata_from(const std::string& object, const std::string& pose, double rate_hz,
                            int rep) {
  TraceMetadata m;
  m.object_label = object;
  const auto parsed = parse_pose(pose);
  if (!parsed) throw DataError("unknown pose: " + pose);
  m.pose = *parsed;
  m.sample_rate = SampleRate::from_hz(rate_hz);
  m.repetition_id = static_cast<std::uint16_t>(rep);
  return m;
}

void print_paths(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << "\n";
}

void print_skipped(const std::vector<SkippedCodec>& skipped) {
  for (const auto& s : skipped) std::cerr << "skipped " << s.codec_id << ": " << s.reason << "\n";
}

// CSV with a header row; '#' lines ignored. Returns rows as column maps.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (header.empty()) {
      header = fields;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) row[header[i]] = fields[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_double(const std::string& s) {
  if (s == "inf") return INFINITY;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DataError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw DataError("bad number '" + s + "'");
  }
}

RDCurve curve_from_csv(const fs::path& p, const std::string& codec) {
  RDCurve curve{codec.empty() ? p.stem().string() : codec, {}};
  for (const auto& row : read_csv(p)) {
    if (!codec.empty() && row.count("codec") && row.at("codec") != codec) continue;
    if (row.count("object") && row.at("object") != "all") continue;
    if (!row.count("bpss") || !row.count("psnr_db")) {
      throw DataError(p.string() + ": needs bpss and psnr_db columns");
    }
    RDPoint pt;
    pt.bpss = to_double(row.at("bpss"));
    pt.psnr_db = to_double(row.at("psnr_db"));
    auto it = row.find("ms_ssim");
    pt.ms_ssim = it != row.end() && !it->second.empty() ? to_double(it->second) : NAN;
    curve.points.push_back(pt);
  }
  if (curve.points.empty()) throw DataError(p.string() + ": no RD points for '" + codec + "'");
  return curve;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile data compression benchmark toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Dataset seed (overrides the config)");
  app.add_option("--jobs", g.jobs, "Worker threads, 0 = all cores");
  app.add_option("--config", g.config, "Benchmark config file (INI)");
  app.add_option("--out", g.out, "Output directory or file");
  app.add_option("--codecs", g.codecs, "Comma-separated codec ids");
  app.add_option("--codec-spec", g.codec_spec, "External codec spec file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Write synthetic grasp traces as MPTD files");
  std::string sim_objects = "all", sim_poses = "all";
  std::optional<int> sim_reps;
  simulate->add_option("--objects", sim_objects, "Comma-separated object names or 'all'");
  simulate->add_option("--poses", sim_poses, "Comma-separated poses or 'all'");
  simulate->add_option("--reps", sim_reps, "Repetitions per object and pose")->check(CLI::PositiveNumber);

  // convert
  auto* convert = app.add_subcommand("convert", "Convert between .mptd and .ppm");
  std::string conv_in, conv_out, conv_object = "unknown", conv_pose = "pinch";
  double conv_rate = 100.0;
  int conv_rep = 0;
  convert->add_option("input", conv_in)->required();
  convert->add_option("output", conv_out)->required();
  convert->add_option("--object", conv_object, "Object label for .ppm -> .mptd");
  convert->add_option("--pose", conv_pose, "Pose for .ppm -> .mptd");
  convert->add_option("--rate-hz", conv_rate, "Sample rate for .ppm -> .mptd");
  convert->add_option("--rep", conv_rep, "Repetition id for .ppm -> .mptd");

  // compress / decompress
  auto* compress = app.add_subcommand("compress", "Encode a trace or image");
  std::string comp_in, comp_out, comp_codec = kTlcLosslessId;
  std::optional<int> comp_quality;
  compress->add_option("input", comp_in, ".mptd or .ppm")->required();
  compress->add_option("output", comp_out)->required();
  compress->add_option("--codec", comp_codec, "Codec id");
  compress->add_option("--quality", comp_quality, "Quality or qp for lossy codecs");

  auto* decompress = app.add_subcommand("decompress", "Decode a TLC1 stream");
  std::string dec_in, dec_out, dec_object = "unknown", dec_pose = "pinch";
  double dec_rate = 100.0;
  decompress->add_option("input", dec_in)->required();
  decompress->add_option("output", dec_out, ".ppm or .mptd")->required();
  decompress->add_option("--object", dec_object, "Object label for .mptd output");
  decompress->add_option("--pose", dec_pose, "Pose for .mptd output");
  decompress->add_option("--rate-hz", dec_rate, "Sample rate for .mptd output");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Quality and rate arithmetic");
  std::vector<std::string> met_files;
  std::optional<double> met_bpss;
  double met_rate = 100.0;
  std::uint64_t met_units = 0;
  std::uint64_t met_bits = 0;
  metrics->add_option("images", met_files, "Reference and test image (.ppm or .mptd)")->expected(0, 2);
  metrics->add_option("--bpss", met_bpss, "Report CR and bandwidth for this bpss");
  metrics->add_option("--bits", met_bits, "Report bpss of this many coded bits for the first image");
  metrics->add_option("--rate-hz", met_rate, "Frame rate for bandwidth");
  metrics->add_option("--units", met_units, "Tactile units for bandwidth (default: full hand)");

  // bdrate
  auto* bdrate = app.add_subcommand("bdrate", "BD-rate between two RD curves in CSV");
  std::string bd_ref_file, bd_test_file, bd_ref_codec, bd_test_codec, bd_metric = "psnr";
  bdrate->add_option("reference", bd_ref_file, "CSV with bpss,psnr_db[,ms_ssim]")->required();
  bdrate->add_option("test", bd_test_file, "CSV for the test curve (default: same file)");
  bdrate->add_option("--reference-codec", bd_ref_codec, "Filter rows by codec column");
  bdrate->add_option("--test-codec", bd_test_codec, "Filter rows by codec column");
  bdrate->add_option("--metric", bd_metric, "psnr or ms_ssim")
      ->check(CLI::IsMember({"psnr", "ms_ssim"}));

  auto* bench_lossless = app.add_subcommand("bench-lossless", "Lossless bpss tables");
  auto* bench_lossy = app.add_subcommand("bench-lossy", "Lossy RD curves and BD-rates");
  auto* bench_downstream = app.add_subcommand("bench-downstream", "Classification on decoded data");

  // classify
  auto* classify = app.add_subcommand("classify", "Train and test classifiers per data source");
  std::string cls_sources, cls_classifiers;
  classify->add_option("--sources", cls_sources, "raw and/or codec@quality, comma-separated");
  classify->add_option("--classifiers", cls_classifiers, "svm, rf, knn, lr");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "t-SNE embedding and k-means on features");
  std::string clu_source = "raw";
  std::optional<std::size_t> clu_k;
  double clu_perplexity = 30.0;
  cluster->add_option("--source", clu_source, "raw or codec@quality");
  cluster->add_option("--k", clu_k, "Clusters (default: number of objects)");
  cluster->add_option("--perplexity", clu_perplexity, "t-SNE perplexity");

  auto* probe_codecs = app.add_subcommand("probe-codecs", "Report codec availability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      BenchConfig c = load_config(g);
      if (sim_objects != "all") c.dataset.objects = split_commas(sim_objects);
      if (sim_poses != "all") {
        c.dataset.poses.clear();
        for (const auto& p : split_commas(sim_poses)) {
          const auto pose = parse_pose(p);
          if (!pose) throw DataError("unknown pose: " + p);
          c.dataset.poses.push_back(*pose);
        }
      }
      if (sim_reps) c.dataset.reps = *sim_reps;
      c.dataset.kind = DatasetConfig::Kind::kSynthetic;
      const fs::path dir = g.out.empty() ? fs::path("traces") : fs::path(g.out);
      fs::create_directories(dir);
      for (const auto& job : enumerate_traces(c.dataset)) {
        const GraspTrace t = load_trace_job(c.dataset, job);
        const fs::path p = dir / (job.object + "_" + std::string(pose_name(job.pose)) + "_" +
                                  std::to_string(job.rep) + ".mptd");
        std::ostringstream bytes;
        save_trace(t, bytes);
        write_text_atomically(p, bytes.str());
        std::cout << p.string() << "\n";
      }
    } else if (*convert) {
      const fs::path in = conv_in, out = conv_out;
      if (has_extension(in, ".mptd") && has_extension(out, ".ppm")) {
        std::ostringstream bytes;
        write_ppm(trace_to_image(load_trace_file(in)), bytes);
        write_text_atomically(out, bytes.str());
      } else if (has_extension(in, ".ppm") && has_extension(out, ".mptd")) {
        const GraspTrace t = image_to_trace(read_ppm_file(in), default_layout(),
                                            metadata_from(conv_object, conv_pose, conv_rate, conv_rep));
        std::ostringstream bytes;
        save_trace(t, bytes);
        write_text_atomically(out, bytes.str());
      } else {
        throw DataError("convert maps .mptd to .ppm or .ppm to .mptd");
      }
    } else if (*compress) {
      const BenchConfig c = load_config(g);
      const CodecRegistry registry = make_registry(c);
      const TactileImage image = read_image(comp_in);
      const auto codec = registry.make(comp_codec);
      const CodedImage coded = codec->code(image, comp_quality);
      write_all(comp_out, coded.blob.payload);
      const double rate = bpss(coded.blob.payload_bits(), image.sample_count());
      std::cout << "codec " << comp_codec << "\nbytes " << coded.blob.payload.size() << "\nbpss "
                << format_metric(rate) << "\ncr " << format_metric(compression_ratio(rate)) << "\n";
      if (codec->kind() == CodecKind::kLossy) {
        std::cout << "psnr_db " << format_metric(psnr(image, coded.reconstruction)) << "\n";
      }
    } else if (*decompress) {
      const TactileImage image = decode_tlc(read_all(dec_in));
      const fs::path out = dec_out;
      std::ostringstream bytes;
      if (has_extension(out, ".mptd")) {
        save_trace(image_to_trace(image, default_layout(),
                                  metadata_from(dec_object, dec_pose, dec_rate, 0)),
                   bytes);
      } else {
        write_ppm(image, bytes);
      }
      write_text_atomically(out, bytes.str());
    } else if (*metrics) {
      if (met_files.empty() && !met_bpss) throw DataError("metrics needs images or --bpss");
      std::optional<TactileImage> first;
      if (!met_files.empty()) first = read_image(met_files[0]);
      if (met_files.size() == 2) {
        const TactileImage second = read_image(met_files[1]);
        std::cout << "psnr_db " << format_metric(psnr(*first, second)) << "\n";
        std::cout << "ms_ssim " << format_metric(ms_ssim(*first, second)) << "\n";
      }
      std::optional<double> rate = met_bpss;
      if (first && met_bits > 0) rate = bpss(met_bits, first->sample_count());
      if (rate) {
        const std::uint64_t units = met_units ? met_units : default_layout().total_units();
        std::cout << "bpss " << format_metric(*rate) << "\n";
        std::cout << "cr " << format_metric(compression_ratio(*rate)) << "\n";
        std::cout << "bandwidth_bits_per_second "
                  << format_metric(bandwidth_bits_per_second(met_rate, units, 3, *rate)) << "\n";
      }
    } else if (*bdrate) {
      const std::string test_file = bd_test_file.empty() ? bd_ref_file : bd_test_file;
      const RDCurve ref = curve_from_csv(bd_ref_file, bd_ref_codec);
      const RDCurve test = curve_from_csv(test_file, bd_test_codec);
      const QualityMetric m = bd_metric == "psnr" ? QualityMetric::kPsnr : QualityMetric::kMsSsim;
      std::cout << "bd_rate_percent " << format_metric(bd_rate(ref, test, m)) << "\n";
    } else if (*bench_lossless) {
      BenchConfig c = load_config(g);
      if (!g.codecs.empty()) c.lossless_codecs = split_commas(g.codecs);
      const CodecRegistry registry = make_registry(c);
      const LosslessReport r = run_lossless_suite(c, registry);
      print_skipped(r.skipped);
      print_paths(write_lossless_report(r, c));
    } else if (*bench_lossy) {
      BenchConfig c = load_config(g);
      if (!g.codecs.empty()) c.lossy_codecs = split_commas(g.codecs);
      const CodecRegistry registry = make_registry(c);
      const LossyReport r = run_lossy_suite(c, registry);
      print_skipped(r.skipped);
      for (const auto& s : r.non_monotone) std::cerr << "non-monotone " << s << "\n";
      print_paths(write_lossy_report(r, c));
    } else if (*bench_downstream || *classify) {
      BenchConfig c = load_config(g);
      if (!cls_sources.empty()) {
        c.sources.clear();
        for (const auto& s : split_commas(cls_sources)) c.sources.push_back(parse_data_source(s));
      }
      if (!cls_classifiers.empty()) {
        c.classifiers.clear();
        for (const auto& k : split_commas(cls_classifiers)) c.classifiers.push_back(parse_classifier(k));
      }
      const CodecRegistry registry = make_registry(c);
      const DownstreamReport r = run_downstream_suite(c, registry);
      print_skipped(r.skipped);
      const auto paths = write_downstream_report(r, c);
      if (*classify) {
        for (const auto& row : r.rows) {
          for (auto k : r.classifiers) {
            std::cout << row.source.label() << " " << classifier_name(k) << " "
                      << format_metric(row.accuracy.at(k)) << "\n";
          }
        }
      }
      print_paths(paths);
    } else if (*cluster) {
      const BenchConfig c = load_config(g);
      const CodecRegistry registry = make_registry(c);
      std::vector<Pose> poses;
      const FeatureMatrix f =
          build_features(c, registry, parse_data_source(clu_source), nullptr, nullptr, &poses);
      TsneOptions topts;
      topts.perplexity = clu_perplexity;
      const std::vector<double> embedding = tsne_2d(f, c.model_seed, topts);
      const std::size_t k = clu_k ? *clu_k : f.class_names.size();
      const KMeansResult km = kmeans(embedding, 2, k, c.model_seed);
      const double ari = adjusted_rand_index(km.assignment, f.labels);

      std::ostringstream points;
      points << report_header("cluster_points", c) << "# source " << clu_source << "\n";
      points << "index,object,pose,x,y,cluster\n";
      for (std::size_t i = 0; i < f.rows(); ++i) {
        points << i << ',' << f.class_names[static_cast<std::size_t>(f.labels[i])] << ','
               << pose_name(poses[i]) << ',' << format_metric(embedding[2 * i]) << ','
               << format_metric(embedding[2 * i + 1]) << ',' << km.assignment[i] << "\n";
      }
      std::ostringstream summary;
      summary << report_header("cluster_summary", c);
      summary << "source,k,points,inertia,ari\n"
              << clu_source << ',' << k << ',' << f.rows() << ',' << format_metric(km.inertia)
              << ',' << format_metric(ari) << "\n";
      const fs::path a = c.out_dir / "cluster_points.csv", b = c.out_dir / "cluster_summary.csv";
      write_text_atomically(a, points.str());
      write_text_atomically(b, summary.str());
      std::cout << "ari " << format_metric(ari) << "\n";
      print_paths({a, b});
    } else if (*probe_codecs) {
      BenchConfig c = load_config(g);
      if (c.codec_spec_file.empty() && fs::exists("codecs/codecs.ini")) {
        c.codec_spec_file = "codecs/codecs.ini";
      }
      const CodecRegistry registry = make_registry(c);
      std::vector<std::string> ids = g.codecs.empty() ? registry.ids() : split_commas(g.codecs);
      for (const auto& id : ids) {
        const ProbeReport r = registry.probe(id);
        std::cout << id << "\t" << availability_name(r.status);
        if (!r.detail.empty()) std::cout << "\t" << r.detail.substr(0, r.detail.find('\n'));
        std::cout << "\n";
      }
    }
  } catch (const CodecError& e) {
    std::cerr << "codec error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
