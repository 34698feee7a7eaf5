#include "srg/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srg {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_dir(const std::string& path) { std::filesystem::create_directories(path); }

std::string manifest_json(const std::string& config_hash, double wall_seconds,
                          const std::string& subcommand) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"config_hash\":\"" << config_hash << "\",\"subcommand\":\"" << subcommand
     << "\",\"version\":\"0.1.0\",\"wall_seconds\":" << wall_seconds << "}";
  return os.str();
}

}  // namespace srg
