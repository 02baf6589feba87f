#include "texret/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace texret {

namespace {

double luminance(double r, double g, double b) {
    return std::round(0.299 * r + 0.587 * g + 0.114 * b);
}

// Reads one PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

GrayImage load_pgm(std::ifstream& in, const std::string& path) {
    std::string width_s = pgm_token(in);
    std::string height_s = pgm_token(in);
    std::string maxval_s = pgm_token(in);
    std::size_t width = 0, height = 0;
    long maxval = -1;
    try {
        width = std::stoul(width_s);
        height = std::stoul(height_s);
        maxval = std::stol(maxval_s);
    } catch (const std::exception&) {
        throw Error(Error::Kind::format, path + ": malformed PGM header");
    }
    if (width == 0 || height == 0) {
        throw Error(Error::Kind::format, path + ": empty PGM image");
    }
    if (maxval <= 0 || maxval > 255) {
        throw Error(Error::Kind::format,
                    path + ": only 8-bit PGM supported (maxval " +
                        std::to_string(maxval) + ")");
    }
    in.get();  // single whitespace byte after maxval
    std::vector<unsigned char> raw(width * height);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw Error(Error::Kind::format, path + ": truncated PGM pixel data");
    }
    GrayImage img(height, width);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        img.data[i] = static_cast<double>(raw[i]);
    }
    return img;
}

GrayImage load_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) {
        throw Error(Error::Kind::io, path + ": cannot open file");
    }
    auto closer = std::unique_ptr<std::FILE, int (*)(std::FILE*)>(fp, &std::fclose);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Error::Kind::format, path + ": libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Error::Kind::format, path + ": corrupt PNG");
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth != 8 ||
        (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Error::Kind::format,
                    path + ": only 8-bit grayscale or RGB PNG supported");
    }
    const std::size_t channels = (color_type == PNG_COLOR_TYPE_RGB) ? 3 : 1;
    pixels.resize(static_cast<std::size_t>(width) * height * channels);
    row_ptrs.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) {
        row_ptrs[r] = pixels.data() + static_cast<std::size_t>(r) * width * channels;
    }
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);

    GrayImage img(height, width);
    if (channels == 1) {
        for (std::size_t i = 0; i < img.size(); ++i) {
            img.data[i] = static_cast<double>(pixels[i]);
        }
    } else {
        for (std::size_t i = 0; i < img.size(); ++i) {
            img.data[i] = luminance(pixels[3 * i], pixels[3 * i + 1],
                                    pixels[3 * i + 2]);
        }
    }
    return img;
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Error::Kind::io, path + ": cannot open file");
    }
    unsigned char magic[2] = {0, 0};
    in.read(reinterpret_cast<char*>(magic), 2);
    if (in.gcount() != 2) {
        throw Error(Error::Kind::format, path + ": file too short");
    }
    if (magic[0] == 'P' && magic[1] == '5') {
        return load_pgm(in, path);
    }
    if (magic[0] == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png(path);
    }
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '6')) {
        throw Error(Error::Kind::format,
                    path + ": only binary PGM (P5) is supported");
    }
    throw Error(Error::Kind::format, path + ": unrecognized image format");
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Error::Kind::io, path + ": cannot open for writing");
    }
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        double v = std::round(img.data[i]);
        raw[i] = static_cast<unsigned char>(v < 0 ? 0 : (v > 255 ? 255 : v));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) {
        throw Error(Error::Kind::io, path + ": write failed");
    }
}

std::vector<GrayImage> tile_image(const GrayImage& img, std::size_t tile_size) {
    if (tile_size == 0 || img.rows % tile_size != 0 || img.cols % tile_size != 0) {
        throw Error(Error::Kind::dimension,
                    "tile size " + std::to_string(tile_size) +
                        " does not divide image dimensions " +
                        std::to_string(img.rows) + "x" + std::to_string(img.cols));
    }
    const std::size_t grid_rows = img.rows / tile_size;
    const std::size_t grid_cols = img.cols / tile_size;
    std::vector<GrayImage> tiles;
    tiles.reserve(grid_rows * grid_cols);
    for (std::size_t gr = 0; gr < grid_rows; ++gr) {
        for (std::size_t gc = 0; gc < grid_cols; ++gc) {
            GrayImage tile(tile_size, tile_size);
            for (std::size_t r = 0; r < tile_size; ++r) {
                const double* src = &img.data[(gr * tile_size + r) * img.cols +
                                              gc * tile_size];
                std::memcpy(&tile.data[r * tile_size], src,
                            tile_size * sizeof(double));
            }
            tiles.push_back(std::move(tile));
        }
    }
    return tiles;
}

}  // namespace texret
