#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "newsxlt/types.hpp"

namespace testing_util {

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("newsxlt_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Space-separated random words "w<k>" drawn from a vocabulary of `vocab`.
inline std::string random_words(std::mt19937_64& rng, std::size_t count, std::size_t vocab = 5000) {
  std::uniform_int_distribution<std::size_t> pick(0, vocab - 1);
  std::string s;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) s += ' ';
    s += "w" + std::to_string(pick(rng));
  }
  return s;
}

inline newsxlt::NewsText news(const std::string& id, const std::string& text, const std::string& lang = "eng",
                              const std::string& script = "Latn", const std::string& source = "wmt") {
  return newsxlt::NewsText::make(id, text, newsxlt::LanguageKey(lang, script), source);
}

}  // namespace testing_util
