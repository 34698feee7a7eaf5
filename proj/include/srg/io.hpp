#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace srg {

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_dir(const std::string& path);

// manifest: config hash, tool version, wall time; kept separate from the
// deterministic CSV/JSON artifacts
std::string manifest_json(const std::string& config_hash, double wall_seconds,
                          const std::string& subcommand);

}  // namespace srg
