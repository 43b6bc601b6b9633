#pragma once

// Minimal subprocess capture for the command-line tests: run a shell
// command, collect exit status and both streams via temp files.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace run {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string& workdir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/bwc-test-XXXXXX";
    if (!mkdtemp(tmpl)) throw std::runtime_error("mkdtemp failed");
    return std::string(tmpl);
  }();
  return dir;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline Result cmd(const std::string& command) {
  std::string so = workdir() + "/stdout", se = workdir() + "/stderr";
  int rc = std::system((command + " >" + so + " 2>" + se).c_str());
  Result r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

}  // namespace run
