#include "taccompress/codec.h"
#include "taccompress/error.h"

namespace taccompress {
namespace {

class TlcLossless final : public ImageCodec {
 public:
  const std::string& id() const override { return id_; }
  CodecKind kind() const override { return CodecKind::kLossless; }
  std::vector<int> default_ladder() const override { return {}; }
  CodedImage code(const TactileImage& image, std::optional<int> quality) const override {
    if (quality) throw DataError("tlc1 takes no quality");
    CodedImage out;
    out.blob = encode_lossless(image);
    out.reconstruction = decode_lossless(out.blob);
    return out;
  }

 private:
  std::string id_ = kTlcLosslessId;
};

class TlcLossy final : public ImageCodec {
 public:
  const std::string& id() const override { return id_; }
  CodecKind kind() const override { return CodecKind::kLossy; }
  std::vector<int> default_ladder() const override {
    return {std::begin(kTlcDefaultLadder), std::end(kTlcDefaultLadder)};
  }
  CodedImage code(const TactileImage& image, std::optional<int> quality) const override {
    if (!quality) throw DataError("tlc1-lossy needs a qp");
    CodedImage out;
    out.blob = encode_lossy(image, *quality);
    out.reconstruction = decode_lossy(out.blob);
    return out;
  }

 private:
  std::string id_ = kTlcLossyId;
};

class External final : public ImageCodec {
 public:
  External(CodecSpec spec, RunOptions options)
      : spec_(std::move(spec)), options_(std::move(options)) {}
  const std::string& id() const override { return spec_.codec_id; }
  CodecKind kind() const override { return spec_.kind; }
  std::vector<int> default_ladder() const override { return spec_.quality_ladder; }
  CodedImage code(const TactileImage& image, std::optional<int> quality) const override {
    return run_external(spec_, image, quality, options_);
  }

 private:
  CodecSpec spec_;
  RunOptions options_;
};

}  // namespace

std::unique_ptr<ImageCodec> make_external_codec(CodecSpec spec, RunOptions options) {
  return std::make_unique<External>(std::move(spec), std::move(options));
}

CodecRegistry::CodecRegistry() = default;

void CodecRegistry::add_specs(std::vector<CodecSpec> specs) {
  for (auto& s : specs) {
    if (is_builtin(s.codec_id)) continue;
    specs_[s.codec_id] = std::move(s);
  }
}

bool CodecRegistry::is_builtin(const std::string& id) const {
  return id == kTlcLosslessId || id == kTlcLossyId;
}

bool CodecRegistry::contains(const std::string& id) const {
  return is_builtin(id) || specs_.count(id) > 0;
}

const CodecSpec* CodecRegistry::spec(const std::string& id) const {
  auto it = specs_.find(id);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> CodecRegistry::ids() const {
  std::vector<std::string> out = {kTlcLosslessId, kTlcLossyId};
  for (const auto& [id, s] : specs_) out.push_back(id);
  return out;
}

ProbeReport CodecRegistry::probe(const std::string& id) const {
  if (is_builtin(id)) return {id, Availability::kAvailable, "built-in"};
  const CodecSpec* s = spec(id);
  if (!s) return {id, Availability::kUnavailable, "no such codec"};
  return taccompress::probe(*s, options_);
}

std::unique_ptr<ImageCodec> CodecRegistry::make(const std::string& id) const {
  if (id == kTlcLosslessId) return std::make_unique<TlcLossless>();
  if (id == kTlcLossyId) return std::make_unique<TlcLossy>();
  const CodecSpec* s = spec(id);
  if (!s) throw DataError("unknown codec: " + id);
  return make_external_codec(*s, options_);
}

}  // namespace taccompress
