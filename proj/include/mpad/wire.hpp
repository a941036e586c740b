#pragma once

#include <mpad/cipher.hpp>
#include <mpad/key.hpp>
#include <mpad/matrix.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpad {

/// On-disk and on-air records. Every record opens with "MPAD", version 0x01 and a record type;
/// all integers are little-endian.
///
///   matrix (0x01): k u64, n u64, bias f64, ceil(k*n/8) packed bytes
///   key    (0x02): low u32, high u32, slot u16, n u64, k u64, k x u64 components
///   frame  (0x03): low u32, high u32, slot u16, eta u64, m u64, ceil(m/8) payload bytes,
///                  CRC-32 of everything before it as u32
namespace wire {

inline constexpr std::array<std::uint8_t, 4> magic = {'M', 'P', 'A', 'D'};
inline constexpr std::uint8_t version = 0x01;

enum class RecordType : std::uint8_t { matrix = 0x01, key = 0x02, frame = 0x03 };

inline constexpr std::size_t preamble_size = 6;
inline constexpr std::size_t frame_header_size = preamble_size + 4 + 4 + 2 + 8 + 8;

}  // namespace wire

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// CRC-32 over the serialized header and payload of `ct`, ignoring ct.checksum.
std::uint32_t frame_checksum(const Ciphertext& ct);

std::vector<std::uint8_t> serialize(const RandomMatrix& matrix);
std::vector<std::uint8_t> serialize(const PairwiseKey& key);
/// Writes ct.checksum as stored; frames from encrypt() carry a valid one.
std::vector<std::uint8_t> serialize(const Ciphertext& ct);

RandomMatrix parse_matrix(std::span<const std::uint8_t> bytes);
PairwiseKey parse_key(std::span<const std::uint8_t> bytes);
/// Parses exactly one frame. The stored CRC is kept as-is; decrypt() verifies it.
Ciphertext parse_frame(std::span<const std::uint8_t> bytes);

/// Byte length of the frame at the start of `bytes`, read from its header.
std::size_t frame_length(std::span<const std::uint8_t> bytes);
/// Splits a concatenation of frames (a transcript dump).
std::vector<Ciphertext> parse_frames(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace mpad
