#pragma once
// Uniform access to the built-in TLC1 codecs and to external codec
// executables driven through command templates.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "taccompress/image.h"
#include "taccompress/tlc.h"

namespace taccompress {

enum class CodecKind { kLossless, kLossy };
enum class IoFormat { kPpm, kRaw };

// One external codec. Templates are run by /bin/sh inside a scratch
// directory after placeholder substitution:
//   {input} {output}  quoted file paths (encode: image -> bitstream,
//                     decode: bitstream -> image)
//   {quality}         ladder value (lossy specs)
//   {width} {height}  image size, for raw interchange
struct CodecSpec {
  std::string codec_id;
  CodecKind kind = CodecKind::kLossless;
  IoFormat io_format = IoFormat::kPpm;
  std::string encode_template;
  std::string decode_template;
  std::vector<int> quality_ladder;
  std::string encoded_extension = "bin";
  std::string note;

  // Human-readable reasons this codec entry is unusable; empty when valid.
  std::vector<std::string> problems() const;
};

// Spec file grammar: INI sections, one per codec_id, with keys
//   kind = lossless | lossy
//   io_format = ppm | raw          (default ppm)
//   encode = <template>
//   decode = <template>
//   ladder = <int>, <int>, ...     (lossy)
//   extension = <suffix>           (default bin)
//   note = <free text>
// '#' and ';' start comment lines. Throws FormatError on syntax errors or
// unknown keys; semantic problems are left to CodecSpec::problems().
std::vector<CodecSpec> parse_codec_specs(std::istream& in);
std::vector<CodecSpec> load_codec_specs(const std::filesystem::path& path);

enum class Availability { kAvailable, kUnavailable, kDegraded, kSpecInvalid };
std::string availability_name(Availability a);

struct ProbeReport {
  std::string codec_id;
  Availability status = Availability::kUnavailable;
  std::string detail;
};

struct RunOptions {
  std::chrono::seconds timeout{300};
  // Parent of the per-run scratch directories; empty uses the system
  // temporary directory.
  std::filesystem::path scratch_root;
  bool keep_scratch = false;
};

// Directories searched before PATH: TACCOMPRESS_CODEC_PATH entries.
std::string codec_search_path();

// Resolves the executables named by both templates and runs a 2x2 smoke
// image through encode and decode.
ProbeReport probe(const CodecSpec& spec, const RunOptions& options = {});

struct CodedImage {
  CompressedBlob blob;
  TactileImage reconstruction;
};

// Encodes `image` with the external codec, measures the encoded file and
// decodes it back. Lossless specs must reproduce the input exactly.
// Throws CodecError for a missing tool, a nonzero exit status (with the
// captured output), a timeout, an unreadable decode or a lossless
// mismatch; DataError for a bad quality argument.
CodedImage run_external(const CodecSpec& spec, const TactileImage& image,
                        std::optional<int> quality, const RunOptions& options = {});

class ImageCodec {
 public:
  virtual ~ImageCodec() = default;
  virtual const std::string& id() const = 0;
  virtual CodecKind kind() const = 0;
  virtual std::vector<int> default_ladder() const = 0;
  // quality must be set exactly for lossy codecs.
  virtual CodedImage code(const TactileImage& image, std::optional<int> quality) const = 0;
};

std::unique_ptr<ImageCodec> make_external_codec(CodecSpec spec, RunOptions options = {});

inline constexpr int kTlcDefaultLadder[] = {2, 4, 8, 16, 32, 64};

// Built-in codecs plus every spec loaded from a file. Built-in ids win
// over specs with the same name.
class CodecRegistry {
 public:
  CodecRegistry();
  void add_specs(std::vector<CodecSpec> specs);
  void set_run_options(RunOptions options) { options_ = std::move(options); }

  bool is_builtin(const std::string& id) const;
  bool contains(const std::string& id) const;
  const CodecSpec* spec(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Built-ins always report available.
  ProbeReport probe(const std::string& id) const;
  // Throws DataError for unknown ids.
  std::unique_ptr<ImageCodec> make(const std::string& id) const;

 private:
  std::map<std::string, CodecSpec> specs_;
  RunOptions options_;
};

}  // namespace taccompress
