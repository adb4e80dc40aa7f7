#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "fingerlab/error.hpp"

namespace fingerlab::dataset {

struct ImageInfo {
    int width = 0;
    int height = 0;
};

class ImageError : public Error {
public:
    using Error::Error;
};

// Decodes the file (tif, bmp, png, ...); nullopt when unreadable.
std::optional<ImageInfo> read_image_info(const std::filesystem::path& path);

// Lossless PNG of the 8-bit grayscale image. Throws ImageError.
std::vector<std::uint8_t> transcode_to_png(const std::filesystem::path& path, ImageInfo* info = nullptr);

// Writes row-major 8-bit grayscale pixels; format from the extension.
void write_grayscale_image(const std::filesystem::path& path, int width, int height,
                           std::span<const std::uint8_t> pixels);

}  // namespace fingerlab::dataset
