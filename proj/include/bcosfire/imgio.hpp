#pragma once

#include <filesystem>
#include <string_view>

#include "bcosfire/image.hpp"

namespace bcosfire {

/// How an RGB input is reduced to a single scalar channel.
enum class ChannelPolicy { Green, Luma, Red, Blue };

ChannelPolicy parse_channel_policy(std::string_view name);

/// Reads a PGM (P2/P5, maxval 1..65535) or an 8-bit gray/RGB PNG. Values are
/// divided by the format's max value so the result lies in [0, 1].
GrayImage load_image(const std::filesystem::path& path,
                     ChannelPolicy channel = ChannelPolicy::Green);

/// Writes an 8-bit binary PGM. Values are clamped to [0, 1] and quantized
/// with round-half-up on v * 255.
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// pixel > 0.5 after normalization by maxval.
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes a 0/255 binary PGM.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

GrayImage invert(const GrayImage& img);

/// Byte value written for a pixel by save_image.
std::uint8_t quantize(double v);

/// In-memory PGM codec, used by the file functions above.
GrayImage decode_pgm(std::string_view bytes);
std::string encode_pgm(const GrayImage& img);

}  // namespace bcosfire
