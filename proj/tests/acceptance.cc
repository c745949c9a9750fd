// Acceptance run: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "taccompress/analysis.h"
#include "taccompress/bench.h"
#include "taccompress/codec.h"
#include "taccompress/error.h"
#include "taccompress/image.h"
#include "taccompress/metrics.h"
#include "taccompress/parallel.h"
#include "taccompress/simulator.h"
#include "taccompress/tlc.h"

using namespace taccompress;

namespace {

struct Outcome {
  enum Status { kPass, kFail, kSkip } status = kFail;
  std::string detail;
};

std::size_t g_jobs = 0;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool within(double value, double expected, double rel) {
  return std::abs(value - expected) <= rel * std::abs(expected);
}

// Full synthetic corpus: 8 objects x 4 poses x 10 repetitions.
DatasetConfig corpus(int reps = 10) {
  DatasetConfig d;
  d.reps = reps;
  d.seed = 1;
  return d;
}

TactileImage rows_of(const TactileImage& image, const FrameRange& r) {
  const auto rows = image.samples().subspan(r.begin * image.row_stride(), r.size() * image.row_stride());
  return TactileImage(image.width(), r.size(), {rows.begin(), rows.end()});
}

// ------------------------------------------------------------------ 1

Outcome bandwidth() {
  const double raw = bandwidth_bits_per_second(100, 1140, 3, 8.0);
  const double coded = bandwidth_bits_per_second(100, 1140, 3, 0.0364);
  const double cr = compression_ratio(0.0364);
  const bool ok = within(raw, 2'736'000, 1e-3) && within(coded, 12'448.8, 1e-3) &&
                  within(cr, 219.78, 1e-3) && std::round(cr) == 220;
  return {ok ? Outcome::kPass : Outcome::kFail,
          "raw " + fmt("%.0f", raw) + " bit/s, coded " + fmt("%.1f", coded) + " bit/s, CR " +
              fmt("%.2f", cr)};
}

// ------------------------------------------------------------- 2, 3, 4

struct LosslessSweep {
  std::size_t traces = 0;
  std::size_t mismatches = 0;
  std::map<std::string, std::vector<double>> by_object;
  std::map<Pose, std::vector<double>> by_pose;
  std::vector<double> all;
  double seconds = 0.0;
};

const LosslessSweep& lossless_sweep() {
  static const LosslessSweep sweep = [] {
    LosslessSweep s;
    const auto start = std::chrono::steady_clock::now();
    const DatasetConfig d = corpus();
    const auto jobs = enumerate_traces(d);
    std::vector<double> rate(jobs.size());
    std::vector<std::size_t> bad(jobs.size(), 0);
    parallel_for(jobs.size(), g_jobs, [&](std::size_t j) {
      const GraspTrace t = load_trace_job(d, jobs[j]);
      const TactileImage image = trace_to_image(t);
      std::uint64_t bits = 0;
      for (const auto& r : tile_ranges(image.height(), kDefaultTileHeight)) {
        const TactileImage tile = rows_of(image, r);
        const CompressedBlob blob = encode_lossless(tile);
        bits += blob.payload_bits();
        if (!(decode_lossless(blob) == tile)) ++bad[j];
      }
      rate[j] = bpss(bits, t.sub_sample_count());
    });
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      s.mismatches += bad[j];
      s.by_object[jobs[j].object].push_back(rate[j]);
      s.by_pose[jobs[j].pose].push_back(rate[j]);
      s.all.push_back(rate[j]);
    }
    s.traces = jobs.size();
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
  }();
  return sweep;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome lossless_round_trip() {
  const LosslessSweep& s = lossless_sweep();
  const bool ok = s.traces >= 320 && s.mismatches == 0 && s.seconds < 300.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          std::to_string(s.traces) + " traces, " + std::to_string(s.mismatches) +
              " mismatching tiles, " + fmt("%.1f", s.seconds) + " s"};
}

Outcome effectiveness() {
  const LosslessSweep& s = lossless_sweep();
  const double corpus_bpss = mean(s.all);

  const SensorLayout layout = default_layout();
  const PhaseFrames f = phase_frames(PhasePlan{}, SampleRate::from_hz(100));
  const GraspTrace rest(layout, TraceMetadata{},
                        std::vector<ForceSample>(f.total() * layout.total_units(), kRestSample));
  const TactileImage rest_image = trace_to_image(rest);
  std::uint64_t bits = 0;
  for (const auto& r : tile_ranges(rest_image.height(), kDefaultTileHeight)) {
    bits += encode_lossless(rows_of(rest_image, r)).payload_bits();
  }
  const double rest_bpss = bpss(bits, rest.sub_sample_count());

  std::mt19937_64 rng(2024);
  std::vector<std::uint8_t> noise(1140 * 256 * 3);
  for (auto& b : noise) b = static_cast<std::uint8_t>(rng());
  const TactileImage noise_image(1140, 256, std::move(noise));
  const double noise_bpss =
      bpss(encode_lossless(noise_image).payload_bits(), noise_image.sample_count());

  const bool ok = corpus_bpss <= 1.0 && rest_bpss <= 0.02 && noise_bpss >= 7.9;
  return {ok ? Outcome::kPass : Outcome::kFail,
          "corpus " + fmt("%.4f", corpus_bpss) + " bpss (CR " +
              fmt("%.1f", compression_ratio(corpus_bpss)) + "), rest trace " +
              fmt("%.5f", rest_bpss) + ", uniform noise " + fmt("%.4f", noise_bpss)};
}

Outcome difficulty() {
  const LosslessSweep& s = lossless_sweep();
  const double egg = mean(s.by_object.at("egg")), apple = mean(s.by_object.at("apple"));
  const double pinch = mean(s.by_pose.at(Pose::kPinch));
  const double cyl = mean(s.by_pose.at(Pose::kCylindrical));
  const bool ok = egg < apple && pinch <= cyl;
  return {ok ? Outcome::kPass : Outcome::kFail,
          "egg " + fmt("%.4f", egg) + " < apple " + fmt("%.4f", apple) + ", pinch " +
              fmt("%.4f", pinch) + " <= cylindrical " + fmt("%.4f", cyl) + " (10 seeds)"};
}

// ------------------------------------------------------------------ 5

RDCurve reference_curve() {
  RDCurve c{"ref", {}};
  for (auto [r, q] : std::vector<std::pair<double, double>>{
           {0.02, 31.0}, {0.05, 35.0}, {0.11, 38.5}, {0.25, 41.0}, {0.6, 44.0}}) {
    c.points.push_back({r, q, 0.95 + q / 2000.0});
  }
  return c;
}

Outcome metric_oracles() {
  std::mt19937_64 rng(5);
  std::vector<std::uint8_t> v(200 * 180 * 3);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng());
  const TactileImage a(200, 180, v);
  const TactileImage black(16, 16, std::vector<std::uint8_t>(16 * 16 * 3, 0));
  const TactileImage white(16, 16, std::vector<std::uint8_t>(16 * 16 * 3, 255));
  const RDCurve ref = reference_curve();
  auto scaled = [&](double k) {
    RDCurve c = ref;
    for (auto& p : c.points) p.bpss *= k;
    return c;
  };
  const double p_same = psnr(a, a), p_extreme = psnr(black, white), ssim = ms_ssim(a, a);
  const double bd0 = bd_rate(ref, ref, QualityMetric::kPsnr);
  const double bd2 = bd_rate(ref, scaled(2.0), QualityMetric::kPsnr);
  const double bdh = bd_rate(ref, scaled(0.5), QualityMetric::kPsnr);
  const bool ok = std::isinf(p_same) && p_same > 0 && p_extreme == 0.0 &&
                  std::abs(ssim - 1.0) <= 1e-9 && std::abs(bd0) <= 1e-9 &&
                  within(bd2, 100.0, 1e-3) && within(bdh, -50.0, 1e-3);
  return {ok ? Outcome::kPass : Outcome::kFail,
          "PSNR(a,a)=" + format_metric(p_same) + ", PSNR(0,255)=" + format_metric(p_extreme) +
              ", MS-SSIM(a,a)=" + fmt("%.12f", ssim) + ", BD identical/doubled/halved " +
              fmt("%.2e", bd0) + "/" + fmt("%.3f", bd2) + "/" + fmt("%.3f", bdh) + " %"};
}

// ------------------------------------------------------------------ 6

Outcome lossy_sanity() {
  // One repetition of every (object, pose), full length.
  const DatasetConfig d = corpus(1);
  const auto jobs = enumerate_traces(d);
  const std::vector<int> ladder = {2, 4, 8, 16, 32, 64};
  std::vector<int> exact(jobs.size(), 1), monotone(jobs.size(), 1);
  std::vector<double> psnr64(jobs.size());
  parallel_for(jobs.size(), g_jobs, [&](std::size_t j) {
    const TactileImage image = trace_to_image(load_trace_job(d, jobs[j]));
    const auto tiles = tile_ranges(image.height(), kDefaultTileHeight);
    double last_rate = INFINITY, last_psnr = INFINITY;
    for (int qp : std::vector<int>{1, 2, 4, 8, 16, 32, 64}) {
      std::uint64_t bits = 0;
      std::vector<TactileImage> parts;
      for (const auto& r : tiles) {
        const CompressedBlob b = encode_lossy(rows_of(image, r), qp);
        bits += b.payload_bits();
        parts.push_back(decode_lossy(b));
      }
      const TactileImage back = concat_rows(parts);
      if (qp == 1) {
        exact[j] = back == image;
        continue;
      }
      const double rate = bpss(bits, image.sample_count()), q = psnr(image, back);
      if (rate > last_rate || q > last_psnr) monotone[j] = 0;
      last_rate = rate;
      last_psnr = q;
      if (qp == 64) psnr64[j] = q;
    }
  });
  int n_exact = 0, n_mono = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    n_exact += exact[j];
    n_mono += monotone[j];
  }
  const int n = static_cast<int>(jobs.size());
  const bool ok = n_exact == n && n_mono == n;
  return {ok ? Outcome::kPass : Outcome::kFail,
          "qp=1 bit-exact on " + std::to_string(n_exact) + "/" + std::to_string(n) +
              " traces, RD monotone over qp 2..64 on " + std::to_string(n_mono) + "/" +
              std::to_string(n) + ", min PSNR at qp=64 " +
              fmt("%.2f", *std::min_element(psnr64.begin(), psnr64.end())) + " dB"};
}

// ------------------------------------------------------------------ 7

Outcome downstream() {
  const auto start = std::chrono::steady_clock::now();
  BenchConfig c;
  c.dataset = corpus();
  c.jobs = g_jobs;
  c.classifiers = {ClassifierKind::kKnn, ClassifierKind::kSoftmax};
  c.sources = {DataSource{}, DataSource{kTlcLossyId, 2}, DataSource{kTlcLossyId, 4},
               DataSource{kTlcLossyId, 8}, DataSource{kTlcLossyId, 64}};
  const CodecRegistry registry;
  const DownstreamReport r = run_downstream_suite(c, registry);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& raw = r.rows.front();
  if (!raw.source.raw()) return {Outcome::kFail, "raw row missing"};
  const double knn_raw = raw.accuracy.at(ClassifierKind::kKnn);
  double worst_gap = 0.0;
  bool ordering = true;
  std::ostringstream rows;
  for (const auto& row : r.rows) {
    const double knn = row.accuracy.at(ClassifierKind::kKnn);
    const double lr = row.accuracy.at(ClassifierKind::kSoftmax);
    rows << " " << row.source.label() << " knn=" << fmt("%.3f", knn) << " lr=" << fmt("%.3f", lr);
    if (row.source.raw()) continue;
    const double gap_knn = knn_raw - knn;
    const double gap_lr = raw.accuracy.at(ClassifierKind::kSoftmax) - lr;
    if (*row.source.quality <= 8) worst_gap = std::max({worst_gap, gap_knn, gap_lr});
    if (*row.source.quality == 64 && (gap_knn < 0 || gap_lr < 0)) ordering = false;
  }
  const bool ok = knn_raw >= 0.90 && worst_gap <= 0.05 && ordering && seconds < 600.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          "test rows " + std::to_string(r.test_rows) + ";" + rows.str() + "; worst gap qp<=8 " +
              fmt("%.1f", 100 * worst_gap) + " points, " + fmt("%.0f", seconds) + " s"};
}

// ------------------------------------------------------------------ 8

double brute_force_ari(const std::vector<int>& a, const std::vector<int>& b) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      n11 += sa && sb;
      n10 += sa && !sb;
      n01 += !sa && sb;
      n00 += !sa && !sb;
    }
  }
  return 2.0 * (n00 * n11 - n01 * n10) / ((n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11));
}

Outcome clustering() {
  BenchConfig c;
  c.dataset = corpus();
  c.jobs = g_jobs;
  const CodecRegistry registry;
  const FeatureMatrix f = build_features(c, registry, DataSource{});
  const auto y = tsne_2d(f, 11);
  const KMeansResult km = kmeans(y, 2, 8, 11);
  const double ari = adjusted_rand_index(km.assignment, f.labels);
  const double oracle = brute_force_ari(km.assignment, f.labels);
  const bool ok = ari >= 0.9 && std::abs(ari - oracle) < 1e-12;
  return {ok ? Outcome::kPass : Outcome::kFail,
          std::to_string(f.rows()) + " traces, ARI " + fmt("%.4f", ari) + " (brute force " +
              fmt("%.4f", oracle) + ")"};
}

// ------------------------------------------------------------------ 9

Outcome external_codecs() {
  CodecRegistry registry;
  registry.add_specs(load_codec_specs(TACCOMPRESS_SOURCE_DIR "/codecs/codecs.ini"));
  std::vector<std::string> parts;
  bool ok = true, any = false;

  for (const std::string id : {"gzip"}) {
    if (registry.probe(id).status != Availability::kAvailable) continue;
    any = true;
    const auto codec = registry.make(id);
    const DatasetConfig d = corpus(1);
    const auto jobs = enumerate_traces(d);
    std::size_t mismatches = 0;
    for (std::size_t j = 0; j < jobs.size(); j += 4) {
      const TactileImage image = trace_to_image(load_trace_job(d, jobs[j]));
      try {
        std::uint64_t bits = 0;
        if (!(code_tiles(*codec, image, std::nullopt, kDefaultTileHeight, bits) == image)) ++mismatches;
      } catch (const CodecError&) {
        ++mismatches;
      }
    }
    std::vector<std::uint8_t> flat;
    for (int i = 0; i < 1140 * 256; ++i) flat.insert(flat.end(), {128, 128, 0});
    const TactileImage constant(1140, 256, std::move(flat));
    const CodedImage coded = codec->code(constant, std::nullopt);
    const double rate = bpss(coded.blob.payload_bits(), constant.sample_count());
    ok = ok && mismatches == 0 && coded.reconstruction == constant && rate < 0.05;
    parts.push_back(id + ": " + std::to_string(mismatches) + " mismatches, constant image " +
                    fmt("%.5f", rate) + " bpss");
  }

  const std::vector<std::tuple<std::string, std::string, std::string>> pairs = {
      {"hm-intra", "hm-scc", "-56.42%"}, {"vtm-intra", "vtm-scc", "-30.67%"}};
  for (const auto& [intra, scc, reference] : pairs) {
    if (registry.probe(intra).status != Availability::kAvailable ||
        registry.probe(scc).status != Availability::kAvailable) {
      parts.push_back(intra + "/" + scc + " not installed");
      continue;
    }
    any = true;
    BenchConfig c;
    c.dataset = corpus(1);
    c.dataset.objects = {"apple", "egg"};
    c.jobs = g_jobs;
    c.compute_ms_ssim = false;
    c.lossy_codecs = {intra, scc};
    c.bd_pairs = {{intra, scc}};
    const LossyReport r = run_lossy_suite(c, registry);
    const auto& e = r.bd.front();
    parts.push_back(scc + " vs " + intra + " BD-rate " +
                    (e.percent ? fmt("%.2f", *e.percent) + "%" : "n/a (" + e.error + ")") +
                    " (real-data reference " + reference + ")");
  }
  std::string detail;
  for (const auto& p : parts) detail += (detail.empty() ? "" : "; ") + p;
  if (!any) return {Outcome::kSkip, "no external codec installed; " + detail};
  return {ok ? Outcome::kPass : Outcome::kFail, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::set<int> only;
  app.add_option("--jobs", g_jobs, "Worker threads, 0 = all cores");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"bandwidth arithmetic", bandwidth},
      {"lossless round trip", lossless_round_trip},
      {"compression effectiveness", effectiveness},
      {"difficulty ordering", difficulty},
      {"metric oracles", metric_oracles},
      {"lossy sanity", lossy_sanity},
      {"downstream robustness", downstream},
      {"clustering separability", clustering},
      {"external codecs", external_codecs},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("error: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kSkip ? "SKIP" : "FAIL";
    std::printf("[%s] criterion %d %s: %s [%.1f s]\n", tag, number, criteria[i].first,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += o.status == Outcome::kFail;
  }
  return failures == 0 ? 0 : 1;
}
