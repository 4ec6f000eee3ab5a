#include "reconbound/idx.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "reconbound/error.hpp"

namespace reconbound::idx {

namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    require(bytes_.size() - pos_ >= n, ErrorCode::bad_format,
            "IDX data is truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint32_t checked_u32(std::size_t v) {
  require(v <= 0xffffffffu, ErrorCode::invalid_argument,
          "IDX dimension exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

Images parse_images(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const std::uint32_t magic = in.u32();
  require(magic == kImageMagic, ErrorCode::bad_format,
          "not an IDX image file (magic " + std::to_string(magic) + ")");
  Images images;
  images.count = in.u32();
  images.rows = in.u32();
  images.cols = in.u32();
  const auto px = in.take(images.count * images.rows * images.cols);
  images.pixels.assign(px.begin(), px.end());
  return images;
}

std::vector<std::uint8_t> parse_labels(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const std::uint32_t magic = in.u32();
  require(magic == kLabelMagic, ErrorCode::bad_format,
          "not an IDX label file (magic " + std::to_string(magic) + ")");
  const auto labels = in.take(in.u32());
  return {labels.begin(), labels.end()};
}

std::vector<std::uint8_t> encode_images(const Images& images) {
  require(images.pixels.size() == images.count * images.rows * images.cols,
          ErrorCode::invalid_argument, "pixel count does not match the shape");
  std::vector<std::uint8_t> out;
  put_u32(out, kImageMagic);
  put_u32(out, checked_u32(images.count));
  put_u32(out, checked_u32(images.rows));
  put_u32(out, checked_u32(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  put_u32(out, kLabelMagic);
  put_u32(out, checked_u32(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorCode::io, "write failed for " + path.string());
}

LogRegProblem load_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path,
                       std::pair<int, int> digits) {
  require(digits.first != digits.second, ErrorCode::invalid_argument,
          "the two digits must differ");
  Images images;
  std::vector<std::uint8_t> labels;
  try {
    images = parse_images(read_file(images_path));
    labels = parse_labels(read_file(labels_path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::bad_format) throw;
    fail(ErrorCode::bad_format, std::string(e.what()) + " (" +
                                    images_path.string() + ", " +
                                    labels_path.string() + ")");
  }
  require(images.count == labels.size(), ErrorCode::bad_format,
          "image and label counts differ");

  const std::size_t dim = images.rows * images.cols;
  LogRegProblem problem;
  problem.data.dim = dim;
  bool seen_first = false, seen_second = false;
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < images.count; ++i) {
    const int digit = labels[i];
    if (digit != digits.first && digit != digits.second) continue;
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      row[j] = images.pixels[i * dim + j] / 255.0;
      sq += row[j] * row[j];
    }
    const double scale = 1.0 / std::max(1.0, std::sqrt(sq));
    for (double& v : row) v *= scale;
    const bool first = digit == digits.first;
    (first ? seen_first : seen_second) = true;
    problem.data.push_back(row, first ? -1 : 1);
  }
  require(seen_first, ErrorCode::digit_absent,
          "digit " + std::to_string(digits.first) + " does not occur");
  require(seen_second, ErrorCode::digit_absent,
          "digit " + std::to_string(digits.second) + " does not occur");
  return problem;
}

}  // namespace reconbound::idx
