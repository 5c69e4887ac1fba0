#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "memlb/instance.hpp"
#include "memlb/optimizer.hpp"

namespace memlb {

/// Binary instance container: magic "MTIN1", little-endian fixed-width params,
/// then A packed one bit per entry row-major, then the Nemirovski sign bits.
/// Bit order is LSB-first within each byte; a set bit means +1.
std::vector<std::uint8_t> encode_instance(const HardInstance& inst);
/// Throws FormatError on a bad magic, truncation, trailing bytes or invalid params.
HardInstance decode_instance(std::span<const std::uint8_t> bytes);

void save_instance(const HardInstance& inst, const std::filesystem::path& path);
HardInstance load_instance(const std::filesystem::path& path);

/// Human-readable JSON export (params, A as ±1 rows, V as sign rows).
std::string instance_to_text(const HardInstance& inst);

/// Params as a JSON object string, fields in declaration order.
std::string params_to_json(const Params& params);

/// Transcript as JSONL: a header line with the instance params, seeds and
/// algorithm, then one line per round {t, x, value, provenance, state_bits}.
std::string transcript_to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(const std::string& text);

/// Shortest decimal that parses back to the same bits.
std::string format_double(double x);

}  // namespace memlb
