#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "taccompress/bench.h"
#include "taccompress/error.h"
#include "taccompress/mptd.h"

namespace taccompress {
namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts, out;
  boost::split(parts, text, boost::is_any_of(","));
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) { return boost::join(items, ", "); }

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) throw FormatError("config " + key + ": bad number '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw FormatError("config " + key + ": expected a boolean, got '" + text + "'");
}

std::string number_text(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::vector<int> parse_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split_list(text)) out.push_back(parse_number<int>(key, p));
  return out;
}

}  // namespace

std::string DataSource::label() const {
  if (raw()) return "raw";
  return quality ? codec + "@" + std::to_string(*quality) : codec;
}

DataSource parse_data_source(const std::string& text) {
  const std::string t = boost::trim_copy(text);
  if (t == "raw") return {};
  const auto at = t.find('@');
  if (at == std::string::npos) return {t, std::nullopt};
  return {t.substr(0, at), parse_number<int>("source " + t, t.substr(at + 1))};
}

std::vector<std::pair<std::string, std::string>> BenchConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  const bool synthetic = dataset.kind == DatasetConfig::Kind::kSynthetic;
  out.emplace_back("dataset.kind", synthetic ? "synthetic" : "ingest");
  if (synthetic) {
    out.emplace_back("dataset.objects", join(dataset.objects));
    std::vector<std::string> poses;
    for (Pose p : dataset.poses) poses.emplace_back(pose_name(p));
    out.emplace_back("dataset.poses", join(poses));
    out.emplace_back("dataset.reps", std::to_string(dataset.reps));
    out.emplace_back("dataset.seed", std::to_string(dataset.seed));
    out.emplace_back("dataset.sample_rate_hz", number_text(dataset.sample_rate_hz));
    out.emplace_back("dataset.pre_grasp_s", number_text(dataset.plan.pre_grasp_s));
    out.emplace_back("dataset.close_ramp_s", number_text(dataset.plan.close_ramp_s));
    out.emplace_back("dataset.lift_transient_s", number_text(dataset.plan.lift_transient_s));
    out.emplace_back("dataset.hold_s", number_text(dataset.plan.hold_s));
    out.emplace_back("dataset.release_decay_s", number_text(dataset.plan.release_decay_s));
  } else {
    out.emplace_back("dataset.directory", dataset.directory.string());
  }
  out.emplace_back("bench.tile_height", std::to_string(tile_height));
  out.emplace_back("bench.codec_spec", codec_spec_file.string());
  out.emplace_back("bench.timeout_s", std::to_string(timeout.count()));
  out.emplace_back("bench.codecs", join(lossless_codecs));
  out.emplace_back("lossy.codecs", join(lossy_codecs));
  out.emplace_back("lossy.ms_ssim", compute_ms_ssim ? "true" : "false");
  std::vector<std::string> pairs;
  for (const auto& [a, b] : bd_pairs) pairs.push_back(a + ":" + b);
  out.emplace_back("lossy.bdrate_pairs", join(pairs));
  for (const auto& [codec, ladder] : ladders) {
    std::vector<std::string> q;
    for (int v : ladder) q.push_back(std::to_string(v));
    out.emplace_back("ladders." + codec, join(q));
  }
  std::vector<std::string> cls, src;
  for (auto k : classifiers) cls.push_back(classifier_name(k));
  for (const auto& s : sources) src.push_back(s.label());
  out.emplace_back("downstream.classifiers", join(cls));
  out.emplace_back("downstream.sources", join(src));
  out.emplace_back("downstream.train_fraction", number_text(train_fraction));
  out.emplace_back("downstream.feature_height", std::to_string(feature_height));
  out.emplace_back("downstream.split_seed", std::to_string(split_seed));
  out.emplace_back("downstream.model_seed", std::to_string(model_seed));
  return out;
}

void BenchConfig::validate() const {
  if (dataset.kind == DatasetConfig::Kind::kSynthetic) {
    if (dataset.reps < 1) throw DataError("dataset.reps must be at least 1");
    if (dataset.objects.empty()) throw DataError("dataset.objects is empty");
    if (dataset.poses.empty()) throw DataError("dataset.poses is empty");
    if (!(dataset.sample_rate_hz > 0.0)) throw DataError("dataset.sample_rate_hz must be positive");
    dataset.plan.validate();
  } else if (dataset.directory.empty()) {
    throw DataError("dataset.directory is required for ingest");
  }
  if (lossless_codecs.empty() && lossy_codecs.empty()) throw DataError("no codecs configured");
  if (tile_height == 0) throw DataError("bench.tile_height must be positive");
  if (timeout.count() <= 0) throw DataError("bench.timeout_s must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("downstream.train_fraction must lie in (0, 1)");
  }
  if (feature_height == 0) throw DataError("downstream.feature_height must be positive");
}

BenchConfig parse_bench_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  BenchConfig c;
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string value = boost::trim_copy(node.get_value<std::string>());
      const std::string name = section + "." + key;
      if (section == "dataset") {
        if (key == "kind") {
          if (value == "synthetic") c.dataset.kind = DatasetConfig::Kind::kSynthetic;
          else if (value == "ingest") c.dataset.kind = DatasetConfig::Kind::kIngest;
          else throw FormatError("config dataset.kind must be synthetic or ingest");
        } else if (key == "objects") {
          c.dataset.objects = value == "all"
                                  ? std::vector<std::string>(kObjectNames.begin(), kObjectNames.end())
                                  : split_list(value);
        } else if (key == "poses") {
          c.dataset.poses.clear();
          if (value == "all") {
            c.dataset.poses.assign(std::begin(kAllPoses), std::end(kAllPoses));
          } else {
            for (const auto& p : split_list(value)) {
              const auto pose = parse_pose(p);
              if (!pose) throw FormatError("config dataset.poses: unknown pose '" + p + "'");
              c.dataset.poses.push_back(*pose);
            }
          }
        } else if (key == "reps") {
          c.dataset.reps = parse_number<int>(name, value);
        } else if (key == "seed") {
          c.dataset.seed = parse_number<std::uint64_t>(name, value);
        } else if (key == "sample_rate_hz") {
          c.dataset.sample_rate_hz = parse_number<double>(name, value);
        } else if (key == "pre_grasp_s") {
          c.dataset.plan.pre_grasp_s = parse_number<double>(name, value);
        } else if (key == "close_ramp_s") {
          c.dataset.plan.close_ramp_s = parse_number<double>(name, value);
        } else if (key == "lift_transient_s") {
          c.dataset.plan.lift_transient_s = parse_number<double>(name, value);
        } else if (key == "hold_s") {
          c.dataset.plan.hold_s = parse_number<double>(name, value);
        } else if (key == "release_decay_s") {
          c.dataset.plan.release_decay_s = parse_number<double>(name, value);
        } else if (key == "directory") {
          c.dataset.directory = value;
        } else {
          throw FormatError("config: unknown key " + name);
        }
      } else if (section == "bench") {
        if (key == "codecs") c.lossless_codecs = split_list(value);
        else if (key == "tile_height") c.tile_height = parse_number<std::size_t>(name, value);
        else if (key == "jobs") c.jobs = parse_number<std::size_t>(name, value);
        else if (key == "out") c.out_dir = value;
        else if (key == "codec_spec") c.codec_spec_file = value;
        else if (key == "timeout_s") c.timeout = std::chrono::seconds(parse_number<long>(name, value));
        else throw FormatError("config: unknown key " + name);
      } else if (section == "lossy") {
        if (key == "codecs") {
          c.lossy_codecs = split_list(value);
        } else if (key == "bdrate_pairs") {
          c.bd_pairs.clear();
          for (const auto& p : split_list(value)) {
            const auto colon = p.find(':');
            if (colon == std::string::npos) {
              throw FormatError("config lossy.bdrate_pairs: expected reference:test, got '" + p + "'");
            }
            c.bd_pairs.emplace_back(boost::trim_copy(p.substr(0, colon)),
                                    boost::trim_copy(p.substr(colon + 1)));
          }
        } else if (key == "ms_ssim") {
          c.compute_ms_ssim = parse_bool(name, value);
        } else {
          throw FormatError("config: unknown key " + name);
        }
      } else if (section == "ladders") {
        c.ladders[key] = parse_ints(name, value);
      } else if (section == "downstream") {
        if (key == "classifiers") {
          c.classifiers.clear();
          for (const auto& k : split_list(value)) c.classifiers.push_back(parse_classifier(k));
        } else if (key == "sources") {
          c.sources.clear();
          for (const auto& s : split_list(value)) c.sources.push_back(parse_data_source(s));
        } else if (key == "train_fraction") {
          c.train_fraction = parse_number<double>(name, value);
        } else if (key == "feature_height") {
          c.feature_height = parse_number<std::size_t>(name, value);
        } else if (key == "split_seed") {
          c.split_seed = parse_number<std::uint64_t>(name, value);
        } else if (key == "model_seed") {
          c.model_seed = parse_number<std::uint64_t>(name, value);
        } else {
          throw FormatError("config: unknown key " + name);
        }
      } else {
        throw FormatError("config: unknown section [" + section + "]");
      }
    }
  }
  return c;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  BenchConfig c = parse_bench_config(in);
  // Relative paths inside a config are relative to the config file.
  const auto base = path.parent_path();
  if (!c.codec_spec_file.empty() && c.codec_spec_file.is_relative()) {
    c.codec_spec_file = base / c.codec_spec_file;
  }
  if (!c.dataset.directory.empty() && c.dataset.directory.is_relative()) {
    c.dataset.directory = base / c.dataset.directory;
  }
  return c;
}

CodecRegistry make_registry(const BenchConfig& config) {
  CodecRegistry registry;
  if (!config.codec_spec_file.empty()) registry.add_specs(load_codec_specs(config.codec_spec_file));
  RunOptions options;
  options.timeout = config.timeout;
  registry.set_run_options(options);
  return registry;
}

std::vector<TraceJob> enumerate_traces(const DatasetConfig& dataset) {
  std::vector<TraceJob> jobs;
  if (dataset.kind == DatasetConfig::Kind::kSynthetic) {
    for (const auto& object : dataset.objects) {
      if (std::find(kObjectNames.begin(), kObjectNames.end(), object) == kObjectNames.end()) {
        throw DataError("unknown object profile: " + object);
      }
      for (Pose pose : dataset.poses) {
        for (int rep = 0; rep < dataset.reps; ++rep) jobs.push_back({object, pose, rep, {}});
      }
    }
    return jobs;
  }
  if (!std::filesystem::is_directory(dataset.directory)) {
    throw DataError("ingest directory not found: " + dataset.directory.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dataset.directory)) {
    if (e.is_regular_file() && e.path().extension() == ".mptd") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("ingest directory has no .mptd files: " + dataset.directory.string());
  for (const auto& f : files) {
    const GraspTrace t = load_trace_file(f);
    jobs.push_back({t.metadata().object_label, t.metadata().pose,
                    static_cast<int>(t.metadata().repetition_id), f});
  }
  return jobs;
}

GraspTrace load_trace_job(const DatasetConfig& dataset, const TraceJob& job) {
  if (!job.file.empty()) return load_trace_file(job.file);
  static const std::vector<ObjectProfile> profiles = default_profiles();
  const auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const ObjectProfile& p) { return p.name == job.object; });
  if (it == profiles.end()) throw DataError("unknown object profile: " + job.object);
  return generate_trace(*it, job.pose, dataset.plan, SampleRate::from_hz(dataset.sample_rate_hz),
                        mix_seed(dataset.seed, static_cast<std::uint64_t>(job.rep)),
                        static_cast<std::uint16_t>(job.rep));
}

}  // namespace taccompress
