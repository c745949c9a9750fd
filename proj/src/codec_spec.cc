#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <regex>
#include <set>

#include "taccompress/codec.h"
#include "taccompress/error.h"

namespace taccompress {
namespace {

const std::set<std::string> kPlaceholders = {"input", "output", "quality", "width", "height"};

std::vector<int> parse_ladder(const std::string& codec, const std::string& text) {
  std::vector<int> out;
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw FormatError("codec " + codec + ": bad ladder entry '" + p + "'");
    }
  }
  return out;
}

void check_template(const std::string& what, const std::string& tpl, bool needs_quality,
                    std::vector<std::string>& problems) {
  if (tpl.empty()) {
    problems.push_back(what + " template is empty");
    return;
  }
  std::set<std::string> seen;
  static const std::regex token(R"(\{([A-Za-z_]*)\})");
  for (auto it = std::sregex_iterator(tpl.begin(), tpl.end(), token); it != std::sregex_iterator();
       ++it) {
    const std::string name = (*it)[1].str();
    if (!kPlaceholders.count(name)) problems.push_back(what + " template has unknown {" + name + "}");
    seen.insert(name);
  }
  if (!seen.count("input")) problems.push_back(what + " template lacks {input}");
  if (!seen.count("output")) problems.push_back(what + " template lacks {output}");
  if (needs_quality && !seen.count("quality")) {
    problems.push_back(what + " template lacks {quality}");
  }
}

}  // namespace

std::vector<std::string> CodecSpec::problems() const {
  std::vector<std::string> out;
  if (codec_id.empty()) out.push_back("codec id is empty");
  const bool lossy = kind == CodecKind::kLossy;
  check_template("encode", encode_template, lossy, out);
  check_template("decode", decode_template, false, out);
  if (lossy && quality_ladder.empty()) out.push_back("lossy codec has an empty quality ladder");
  if (encoded_extension.find('/') != std::string::npos) {
    out.push_back("extension must not contain '/'");
  }
  return out;
}

std::vector<CodecSpec> parse_codec_specs(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw FormatError(std::string("codec spec file: ") + e.what());
  }
  std::vector<CodecSpec> specs;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw FormatError("codec spec file: entry '" + section + "' is empty or outside a section");
    CodecSpec spec;
    spec.codec_id = section;
    for (const auto& [key, node] : body) {
      const std::string value = boost::trim_copy(node.get_value<std::string>());
      if (key == "kind") {
        if (value == "lossless") spec.kind = CodecKind::kLossless;
        else if (value == "lossy") spec.kind = CodecKind::kLossy;
        else throw FormatError("codec " + section + ": kind must be lossless or lossy");
      } else if (key == "io_format") {
        if (value == "ppm") spec.io_format = IoFormat::kPpm;
        else if (value == "raw") spec.io_format = IoFormat::kRaw;
        else throw FormatError("codec " + section + ": io_format must be ppm or raw");
      } else if (key == "encode") {
        spec.encode_template = value;
      } else if (key == "decode") {
        spec.decode_template = value;
      } else if (key == "ladder") {
        spec.quality_ladder = parse_ladder(section, value);
      } else if (key == "extension") {
        spec.encoded_extension = value;
      } else if (key == "note") {
        spec.note = value;
      } else {
        throw FormatError("codec " + section + ": unknown key '" + key + "'");
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<CodecSpec> load_codec_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open codec spec file " + path.string());
  return parse_codec_specs(in);
}

std::string availability_name(Availability a) {
  switch (a) {
    case Availability::kAvailable: return "available";
    case Availability::kUnavailable: return "unavailable";
    case Availability::kDegraded: return "degraded";
    case Availability::kSpecInvalid: return "spec-invalid";
  }
  return "?";
}

}  // namespace taccompress
