#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toricnn/network.hpp"

namespace toricnn {

std::string base64_encode(const uint8_t* data, size_t len);
std::vector<uint8_t> base64_decode(const std::string& text);

uint64_t fnv1a64(const uint8_t* data, size_t len, uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(uint64_t x);

// Shortest round-trip decimal form; CSV bodies built from this are
// byte-identical across reruns.
std::string format_double(double x);

// Versioned JSON checkpoint: metadata + per-layer kernel/bias blobs as
// base64 little-endian doubles, with an FNV-1a content checksum.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);
// Checksum as stored in (or computed for) the checkpoint of `net`.
std::string checkpoint_checksum(const Network& net);
// Metadata JSON (no parameter blobs) for inspection.
std::string checkpoint_summary(const std::string& path);

void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

} // namespace toricnn
