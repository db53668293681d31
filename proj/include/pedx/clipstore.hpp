#pragma once

#include <filesystem>

#include "pedx/cropper.hpp"

namespace pedx {

// Clip file layout (all integers little-endian):
//   bytes 0..7   magic "PEDXCLIP"
//   u32          format version (1)
//   u32          header length H
//   H bytes      UTF-8 JSON header:
//                {"track_id":..,"mode":"static"|"dynamic","frame_indices":[..],
//                 "S":..,"channels":3,"dtype":"u8"}
//   payload      frames * S * S * channels bytes, frame-major then row-major
//                (frame, y, x, channel)
inline constexpr std::uint32_t kClipFormatVersion = 1;

std::vector<std::uint8_t> encode_clip(const CropClip& clip);
CropClip decode_clip(const std::vector<std::uint8_t>& bytes);

void write_clip(const CropClip& clip, const std::filesystem::path& path);
CropClip read_clip(const std::filesystem::path& path);

// File name used inside a clip store directory for a sample id.
std::string clip_file_name(const std::string& sample_id);

}  // namespace pedx
