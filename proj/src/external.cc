#include <fcntl.h>
#include <signal.h>
#include <stdlib.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "taccompress/codec.h"
#include "taccompress/error.h"
#include "taccompress/ppm.h"

extern char** environ;

namespace taccompress {
namespace {

namespace fs = std::filesystem;

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string substitute(const std::string& tpl, const std::map<std::string, std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '{') {
      const std::size_t close = tpl.find('}', i);
      if (close != std::string::npos) {
        auto it = values.find(tpl.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out += tpl[i];
  }
  return out;
}

class ScratchDir {
 public:
  ScratchDir(const fs::path& root, bool keep) : keep_(keep) {
    const fs::path base = root.empty() ? fs::temp_directory_path() : root;
    fs::create_directories(base);
    std::string pattern = (base / "taccompress-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) {
      throw CodecError("cannot create scratch directory under " + base.string() + ": " +
                       std::strerror(errno));
    }
    path_ = pattern;
  }
  ~ScratchDir() {
    if (!keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  bool keep_;
};

std::string tail_of_file(const fs::path& p, std::size_t limit = 2000) {
  std::ifstream in(p, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.size() > limit) text = "..." + text.substr(text.size() - limit);
  return text;
}

// Runs `command` with /bin/sh in `dir`, stdout and stderr to `log`.
// Returns the exit status; throws CodecError on timeout.
int run_shell(const std::string& command, const fs::path& dir, const fs::path& log,
              std::chrono::seconds timeout) {
  // Everything the child needs is prepared before fork.
  const std::string path_entry = "PATH=" + codec_search_path();
  std::vector<std::string> env_storage;
  for (char** e = environ; *e != nullptr; ++e) {
    if (std::strncmp(*e, "PATH=", 5) != 0) env_storage.emplace_back(*e);
  }
  env_storage.push_back(path_entry);
  std::vector<char*> envp;
  for (auto& s : env_storage) envp.push_back(s.data());
  envp.push_back(nullptr);
  const std::string dir_s = dir.string(), log_s = log.string();
  std::string sh = "sh", dash_c = "-c", cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};

  const pid_t pid = fork();
  if (pid < 0) throw CodecError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    if (chdir(dir_s.c_str()) != 0) _exit(126);
    const int out = open(log_s.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    const int in = open("/dev/null", O_RDONLY);
    if (out < 0 || in < 0) _exit(126);
    dup2(in, 0);
    dup2(out, 1);
    dup2(out, 2);
    execve("/bin/sh", argv, envp.data());
    _exit(127);
  }
  setpgid(pid, pid);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto pause = std::chrono::microseconds(200);
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw CodecError(std::string("waitpid: ") + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw CodecError("command timed out after " + std::to_string(timeout.count()) +
                       " s: " + command);
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(20000));
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CodecError("codec produced no file " + p.filename().string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, std::span<const std::uint8_t> bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CodecError("cannot write " + p.string());
}

bool is_executable(const fs::path& p) {
  return access(p.c_str(), X_OK) == 0 && fs::is_regular_file(p);
}

// First word of a template, the program the shell will run.
std::string program_of(const std::string& tpl) {
  std::istringstream in(tpl);
  std::string word;
  in >> word;
  return word;
}

std::optional<fs::path> find_program(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    return is_executable(name) ? std::optional<fs::path>(name) : std::nullopt;
  }
  std::istringstream dirs(codec_search_path());
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    const fs::path candidate = fs::path(dir) / name;
    if (is_executable(candidate)) return candidate;
  }
  return std::nullopt;
}

void run_step(const char* what, const CodecSpec& spec, const std::string& command,
              const fs::path& dir, const RunOptions& options) {
  const fs::path log = dir / (std::string(what) + ".log");
  const int status = run_shell(command, dir, log, options.timeout);
  if (status != 0) {
    throw CodecError(spec.codec_id + " " + what + " exited with status " +
                     std::to_string(status) + "\ncommand: " + command + "\n" + tail_of_file(log));
  }
}

}  // namespace

std::string codec_search_path() {
  std::string out;
  if (const char* extra = std::getenv("TACCOMPRESS_CODEC_PATH"); extra && *extra) out = extra;
  const char* path = std::getenv("PATH");
  const std::string base = path && *path ? path : "/usr/local/bin:/usr/bin:/bin";
  return out.empty() ? base : out + ":" + base;
}

CodedImage run_external(const CodecSpec& spec, const TactileImage& image,
                        std::optional<int> quality, const RunOptions& options) {
  if (const auto problems = spec.problems(); !problems.empty()) {
    throw CodecError("codec " + spec.codec_id + " has an invalid spec: " + problems.front());
  }
  const bool lossy = spec.kind == CodecKind::kLossy;
  if (lossy && !quality) throw DataError("lossy codec " + spec.codec_id + " needs a quality");
  const bool wants_quality = spec.encode_template.find("{quality}") != std::string::npos ||
                             spec.decode_template.find("{quality}") != std::string::npos;
  if (wants_quality && !quality) {
    throw DataError("codec " + spec.codec_id + " template uses {quality} but none was given");
  }
  for (const std::string* tpl : {&spec.encode_template, &spec.decode_template}) {
    if (!find_program(program_of(*tpl))) {
      throw CodecError("codec " + spec.codec_id + ": executable '" + program_of(*tpl) +
                       "' not found");
    }
  }

  ScratchDir scratch(options.scratch_root, options.keep_scratch);
  const fs::path dir = scratch.path();
  const bool ppm = spec.io_format == IoFormat::kPpm;
  const fs::path source = dir / (ppm ? "source.ppm" : "source.raw");
  const fs::path encoded = dir / ("encoded." + spec.encoded_extension);
  const fs::path decoded = dir / (ppm ? "decoded.ppm" : "decoded.raw");
  if (ppm) {
    write_ppm_file(image, source);
  } else {
    write_bytes(source, image.samples());
  }

  std::map<std::string, std::string> values = {
      {"width", std::to_string(image.width())},
      {"height", std::to_string(image.height())},
      {"quality", quality ? std::to_string(*quality) : std::string()}};
  values["input"] = shell_quote(source.string());
  values["output"] = shell_quote(encoded.string());
  run_step("encode", spec, substitute(spec.encode_template, values), dir, options);

  CodedImage result;
  result.blob.codec_id = spec.codec_id;
  result.blob.width = image.width();
  result.blob.height = image.height();
  result.blob.quality = lossy ? quality : std::nullopt;
  result.blob.payload = read_bytes(encoded);
  if (result.blob.payload.empty()) throw CodecError(spec.codec_id + " wrote an empty file");

  values["input"] = shell_quote(encoded.string());
  values["output"] = shell_quote(decoded.string());
  run_step("decode", spec, substitute(spec.decode_template, values), dir, options);

  if (ppm) {
    try {
      result.reconstruction = read_ppm_file(decoded);
    } catch (const Error& e) {
      throw CodecError(spec.codec_id + " decode output is not a valid PPM: " + e.what());
    }
  } else {
    std::vector<std::uint8_t> raw = read_bytes(decoded);
    if (raw.size() != image.sample_count()) {
      throw CodecError(spec.codec_id + " decode output has " + std::to_string(raw.size()) +
                       " bytes, expected " + std::to_string(image.sample_count()));
    }
    result.reconstruction = TactileImage(image.width(), image.height(), std::move(raw));
  }
  if (result.reconstruction.width() != image.width() ||
      result.reconstruction.height() != image.height()) {
    throw CodecError(spec.codec_id + " decoded to the wrong size");
  }
  if (!lossy && !(result.reconstruction == image)) {
    throw CodecError("codec integrity error: lossless codec " + spec.codec_id +
                     " did not reproduce its input");
  }
  return result;
}

ProbeReport probe(const CodecSpec& spec, const RunOptions& options) {
  ProbeReport report{spec.codec_id, Availability::kSpecInvalid, ""};
  if (const auto problems = spec.problems(); !problems.empty()) {
    report.detail = problems.front();
    return report;
  }
  for (const std::string* tpl : {&spec.encode_template, &spec.decode_template}) {
    if (!find_program(program_of(*tpl))) {
      report.status = Availability::kUnavailable;
      report.detail = "executable '" + program_of(*tpl) + "' not found";
      return report;
    }
  }
  TactileImage smoke(2, 2, {128, 128, 0, 130, 126, 40, 128, 128, 0, 131, 125, 42});
  std::optional<int> quality;
  if (!spec.quality_ladder.empty()) quality = spec.quality_ladder.front();
  try {
    run_external(spec, smoke, quality, options);
    report.status = Availability::kAvailable;
  } catch (const Error& e) {
    report.status = Availability::kDegraded;
    report.detail = e.what();
  }
  return report;
}

}  // namespace taccompress
