#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "reconbound/logreg.hpp"

namespace reconbound::idx {

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;

struct Images {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols, row-major
};

Images parse_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_images(const Images& images);
std::vector<std::uint8_t> encode_labels(std::span<const std::uint8_t> labels);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

/// Keeps the two digits, maps digits.first to -1 and digits.second to +1,
/// scales pixels to [0, 1] and rescales each row to L2 norm at most 1.
/// Throws digit_absent if either digit has no image.
LogRegProblem load_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path,
                       std::pair<int, int> digits);

}  // namespace reconbound::idx
