#pragma once

// Runs the holoscope binary in a shell and captures its streams.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <vector>
#include <string>
#include <sys/wait.h>

namespace proc {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

/// Fresh scratch directory under the system temp path.
inline fs::path scratch(const std::string& tag) {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("holoscope-" + tag + "-" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

template <class Args>
inline Result run_args(const fs::path& dir, const Args& args) {
  std::string cmd = quote(HOLOSCOPE_BIN);
  for (const auto& a : args) cmd += " " + quote(a);
  const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
  cmd += " > " + quote(o.string()) + " 2> " + quote(e.string());
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

inline Result run(const fs::path& dir, std::initializer_list<std::string> args) { return run_args(dir, args); }

inline std::string map_file(const std::string& name) { return std::string(HOLOSCOPE_MAPS) + "/" + name; }

}  // namespace proc
