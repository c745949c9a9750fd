#include <doctest.h>
#include <stdlib.h>
#include <sys/stat.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "taccompress/codec.h"
#include "taccompress/error.h"
#include "taccompress/metrics.h"

using namespace taccompress;
namespace fs = std::filesystem;

namespace {

CodecSpec spec_of(const std::string& text) {
  std::istringstream in(text);
  const auto specs = parse_codec_specs(in);
  REQUIRE(specs.size() == 1);
  return specs.front();
}

TactileImage rest_image(std::size_t w, std::size_t h) {
  std::vector<std::uint8_t> v;
  for (std::size_t i = 0; i < w * h; ++i) v.insert(v.end(), {128, 128, 0});
  return TactileImage(w, h, std::move(v));
}

TactileImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> v(w * h * 3);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng() % 200);
  return TactileImage(w, h, std::move(v));
}

const char* kGzip = R"([gzip]
kind = lossless
io_format = raw
encode = gzip -9 -n -c {input} > {output}
decode = gzip -d -c {input} > {output}
extension = gz
)";

bool gzip_installed() { return probe(spec_of(kGzip)).status == Availability::kAvailable; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("taccompress-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("spec file parsing") {
  std::istringstream in(R"(
; comment
[a]
kind = lossy
io_format = ppm
encode = enc -q {quality} {input} {output}
decode = dec {input} {output}
ladder = 10, 20 30
extension = xyz
note = hello

[b]
encode = cp {input} {output}
decode = cp {input} {output}
)");
  const auto specs = parse_codec_specs(in);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].codec_id == "a");
  CHECK(specs[0].kind == CodecKind::kLossy);
  CHECK(specs[0].quality_ladder == std::vector<int>{10, 20, 30});
  CHECK(specs[0].encoded_extension == "xyz");
  CHECK(specs[0].problems().empty());
  CHECK(specs[1].kind == CodecKind::kLossless);
  CHECK(specs[1].io_format == IoFormat::kPpm);

  std::istringstream unknown("[c]\nencoder = x\n");
  CHECK_THROWS_AS(parse_codec_specs(unknown), FormatError);
  std::istringstream bad_kind("[c]\nkind = maybe\n");
  CHECK_THROWS_AS(parse_codec_specs(bad_kind), FormatError);
  std::istringstream bad_ladder("[c]\nladder = 1, two\n");
  CHECK_THROWS_AS(parse_codec_specs(bad_ladder), FormatError);
}

TEST_CASE("template problems make a spec invalid") {
  const CodecSpec no_input = spec_of("[x]\nencode = cp a {output}\ndecode = cp {input} {output}\n");
  CHECK_FALSE(no_input.problems().empty());
  CHECK(probe(no_input).status == Availability::kSpecInvalid);

  const CodecSpec lossy_no_quality =
      spec_of("[x]\nkind = lossy\nladder = 1\nencode = cp {input} {output}\ndecode = cp {input} {output}\n");
  CHECK(probe(lossy_no_quality).status == Availability::kSpecInvalid);

  const CodecSpec lossy_no_ladder =
      spec_of("[x]\nkind = lossy\nencode = e {quality} {input} {output}\ndecode = cp {input} {output}\n");
  CHECK(probe(lossy_no_ladder).status == Availability::kSpecInvalid);

  const CodecSpec odd_placeholder =
      spec_of("[x]\nencode = cp {input} {output} {depth}\ndecode = cp {input} {output}\n");
  CHECK(probe(odd_placeholder).status == Availability::kSpecInvalid);
  CHECK_THROWS_AS(run_external(odd_placeholder, rest_image(2, 2), std::nullopt), CodecError);
}

TEST_CASE("missing executable is unavailable and skipped by the registry") {
  const CodecSpec s = spec_of(
      "[ghost]\nencode = no-such-codec-binary {input} {output}\ndecode = cp {input} {output}\n");
  CHECK(probe(s).status == Availability::kUnavailable);
  CHECK_THROWS_AS(run_external(s, rest_image(2, 2), std::nullopt), CodecError);
  CodecRegistry r;
  r.add_specs({s});
  CHECK(r.contains("ghost"));
  CHECK(r.probe("ghost").status == Availability::kUnavailable);
  CHECK(r.probe("tlc1").status == Availability::kAvailable);
  CHECK(r.probe("nothing").status == Availability::kUnavailable);
  CHECK_THROWS_AS(r.make("nothing"), DataError);
}

TEST_CASE("copy codec through ppm and raw") {
  for (const char* format : {"ppm", "raw"}) {
    const CodecSpec s = spec_of(std::string("[copy]\nio_format = ") + format +
                                "\nencode = cp {input} {output}\ndecode = cp {input} {output}\n");
    CHECK(probe(s).status == Availability::kAvailable);
    const TactileImage img = random_image(7, 5, 1);
    const CodedImage c = run_external(s, img, std::nullopt);
    CHECK(c.reconstruction == img);
    const std::size_t header = std::string(format) == "ppm" ? 3 + 4 + 4 : 0;  // "P6\n" "7 5\n" "255\n"
    CHECK(c.blob.payload.size() == img.sample_count() + header);
  }
}

TEST_CASE("placeholders are substituted and paths quoted") {
  const fs::path root = scratch("quote dir");
  RunOptions o;
  o.scratch_root = root;
  const CodecSpec s = spec_of(
      "[dims]\nkind = lossy\nladder = 7\nio_format = raw\n"
      "encode = printf '%s %s %s ' {width} {height} {quality} > {output}; cat {input} >> {output}\n"
      "decode = tail -c +7 {input} > {output}\n");
  const TactileImage img = random_image(3, 2, 4);
  const CodedImage c = run_external(s, img, 7, o);
  CHECK(std::string(c.blob.payload.begin(), c.blob.payload.begin() + 6) == "3 2 7 ");
  CHECK(c.reconstruction == img);
  CHECK(c.blob.quality == 7);
  CHECK(fs::is_empty(root));
  fs::remove_all(root);
}

TEST_CASE("lossless codec that alters data raises an integrity error") {
  const CodecSpec s = spec_of(
      "[liar]\nio_format = raw\nencode = cp {input} {output}\n"
      "decode = tr '\\000-\\377' '\\001-\\377\\000' < {input} > {output}\n");
  try {
    run_external(s, random_image(4, 4, 2), std::nullopt);
    FAIL("expected an integrity error");
  } catch (const CodecError& e) {
    CHECK(std::string(e.what()).find("integrity") != std::string::npos);
  }
}

TEST_CASE("tool present but failing decode is degraded") {
  const CodecSpec s = spec_of(
      "[broken]\nio_format = raw\nencode = cp {input} {output}\ndecode = false {input} {output}\n");
  const ProbeReport r = probe(s);
  CHECK(r.status == Availability::kDegraded);
  CHECK(r.detail.find("decode") != std::string::npos);
}

TEST_CASE("wrong-size raw output is rejected") {
  const CodecSpec s = spec_of(
      "[short]\nio_format = raw\nencode = cp {input} {output}\ndecode = head -c 5 {input} > {output}\n");
  CHECK_THROWS_AS(run_external(s, random_image(4, 4, 3), std::nullopt), CodecError);
}

TEST_CASE("slow codecs time out and leave no scratch behind") {
  const fs::path root = scratch("timeout");
  RunOptions o;
  o.timeout = std::chrono::seconds(1);
  o.scratch_root = root;
  const CodecSpec s =
      spec_of("[slow]\nencode = sleep 30; cp {input} {output}\ndecode = cp {input} {output}\n");
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(run_external(s, rest_image(2, 2), std::nullopt, o), CodecError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
  CHECK(fs::is_empty(root));
  fs::remove_all(root);
}

TEST_CASE("TACCOMPRESS_CODEC_PATH is searched first") {
  const fs::path dir = scratch("bin");
  const fs::path tool = dir / "copycodec";
  {
    std::ofstream out(tool);
    out << "#!/bin/sh\ncp \"$1\" \"$2\"\n";
  }
  fs::permissions(tool, fs::perms::owner_all);
  const CodecSpec s = spec_of("[mine]\nencode = copycodec {input} {output}\ndecode = copycodec {input} {output}\n");
  CHECK(probe(s).status == Availability::kUnavailable);
  setenv("TACCOMPRESS_CODEC_PATH", dir.c_str(), 1);
  CHECK(codec_search_path().rfind(dir.string() + ":", 0) == 0);
  CHECK(probe(s).status == Availability::kAvailable);
  const TactileImage img = random_image(5, 3, 8);
  CHECK(run_external(s, img, std::nullopt).reconstruction == img);
  unsetenv("TACCOMPRESS_CODEC_PATH");
  fs::remove_all(dir);
}

TEST_CASE("gzip round trip and constant-image rate") {
  if (!gzip_installed()) {
    MESSAGE("gzip not installed; skipped");
    return;
  }
  const CodecSpec s = spec_of(kGzip);
  const TactileImage flat = rest_image(1140, 256);
  const CodedImage c = run_external(s, flat, std::nullopt);
  CHECK(c.reconstruction == flat);
  CHECK(bpss(c.blob.payload_bits(), flat.sample_count()) < 0.05);
  const TactileImage noise = random_image(64, 16, 5);
  CHECK(run_external(s, noise, std::nullopt).reconstruction == noise);

  CodecRegistry r;
  r.add_specs({s});
  const auto codec = r.make("gzip");
  CHECK(codec->kind() == CodecKind::kLossless);
  CHECK(codec->code(noise, std::nullopt).reconstruction == noise);
}

TEST_CASE("built-in codecs through the registry") {
  CodecRegistry r;
  const TactileImage img = random_image(9, 9, 6);
  CHECK(r.make("tlc1")->code(img, std::nullopt).reconstruction == img);
  const auto lossy = r.make("tlc1-lossy");
  CHECK(lossy->default_ladder() == std::vector<int>{2, 4, 8, 16, 32, 64});
  CHECK_THROWS_AS(lossy->code(img, std::nullopt), DataError);
  CHECK(lossy->code(img, 1).reconstruction == img);
  // Specs cannot shadow built-ins.
  r.add_specs({spec_of("[tlc1]\nencode = cp {input} {output}\ndecode = cp {input} {output}\n")});
  CHECK(r.spec("tlc1") == nullptr);
}

TEST_CASE("shipped codec spec file parses cleanly") {
  const auto specs = load_codec_specs(TACCOMPRESS_SOURCE_DIR "/codecs/codecs.ini");
  CHECK(specs.size() >= 10);
  for (const auto& s : specs) {
    CAPTURE(s.codec_id);
    CHECK(s.problems().empty());
  }
}
