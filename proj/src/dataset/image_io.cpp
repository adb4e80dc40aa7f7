#include "fingerlab/dataset/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace fingerlab::dataset {

namespace {

cv::Mat load_gray(const std::filesystem::path& path) {
    try {
        return cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    } catch (const cv::Exception&) {
        return {};
    }
}

}  // namespace

std::optional<ImageInfo> read_image_info(const std::filesystem::path& path) {
    const cv::Mat img = load_gray(path);
    if (img.empty()) return std::nullopt;
    return ImageInfo{img.cols, img.rows};
}

std::vector<std::uint8_t> transcode_to_png(const std::filesystem::path& path, ImageInfo* info) {
    const cv::Mat img = load_gray(path);
    if (img.empty()) throw ImageError("cannot decode image " + path.string());
    std::vector<std::uint8_t> png;
    if (!cv::imencode(".png", img, png)) throw ImageError("PNG encoding failed for " + path.string());
    if (info) *info = {img.cols, img.rows};
    return png;
}

void write_grayscale_image(const std::filesystem::path& path, int width, int height,
                           std::span<const std::uint8_t> pixels) {
    if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width) * height) {
        throw ImageError("pixel buffer does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
    const cv::Mat img(height, width, CV_8UC1, const_cast<std::uint8_t*>(pixels.data()));
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), img);
    } catch (const cv::Exception& e) {
        throw ImageError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw ImageError("cannot write " + path.string());
}

}  // namespace fingerlab::dataset
