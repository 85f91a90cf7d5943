#include "hazemix/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "hazemix/errors.hpp"

namespace hazemix {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw IoError("cannot read '" + path.string() + "': not a regular file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return bytes;
}

bool is_png(const std::vector<unsigned char>& b) {
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool is_jpeg(const std::vector<unsigned char>& b) {
    return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

struct PngReadState {
    const std::vector<unsigned char>* bytes;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->offset + len > st->bytes->size()) {
        png_error(png, "unexpected end of data");
    }
    std::memcpy(out, st->bytes->data() + st->offset, len);
    st->offset += len;
}

void png_silent_warning(png_structp, png_const_charp) {}

struct PngErrorSink {
    char message[256] = "decode error";
};

void png_record_error(png_structp png, png_const_charp msg) {
    auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
    png_longjmp(png, 1);
}

// Kept free of non-trivial locals: longjmp skips their destructors.
bool decode_png(const std::vector<unsigned char>& bytes, std::vector<Level>& pixels, int& width,
                int& height, PngErrorSink& sink) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, png_record_error, png_silent_warning);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    PngReadState state{&bytes, 0};
    png_bytep* rows = nullptr;
    if (setjmp(png_jmpbuf(png))) {
        png_free(png, rows);
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &state, png_read_from_memory);
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
        png_error(png, "unexpected row layout after conversion");
    }
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    rows = static_cast<png_bytep*>(png_malloc(png, sizeof(png_bytep) * height));
    for (int y = 0; y < height; ++y) {
        rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 3;
    }
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    png_free(png, rows);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_record_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void jpeg_silent_message(j_common_ptr, int) {}

bool decode_jpeg(const std::vector<unsigned char>& bytes, std::vector<Level>& pixels, int& width,
                 int& height, JpegErrorManager& err) {
    jpeg_decompress_struct cinfo;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_record_error;
    err.base.emit_message = jpeg_silent_message;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

bool encode_png(const RgbImage& img, std::vector<unsigned char>& out, PngErrorSink& sink) {
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, png_record_error, png_silent_warning);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    png_bytep* rows = nullptr;
    if (setjmp(png_jmpbuf(png))) {
        png_free(png, rows);
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    rows = static_cast<png_bytep*>(png_malloc(png, sizeof(png_bytep) * img.height()));
    auto* base = const_cast<Level*>(img.data().data());
    for (int y = 0; y < img.height(); ++y) {
        rows[y] = base + static_cast<std::size_t>(y) * img.width() * 3;
    }
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_free(png, rows);
    png_destroy_write_struct(&png, &info);
    return true;
}

void write_bytes(const fs::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

RgbImage load_image(const fs::path& path) {
    const auto bytes = read_bytes(path);
    std::vector<Level> pixels;
    int width = 0;
    int height = 0;
    if (is_png(bytes)) {
        PngErrorSink sink;
        if (!decode_png(bytes, pixels, width, height, sink)) {
            throw CorruptDataError("corrupt PNG '" + path.string() + "': " + sink.message);
        }
    } else if (is_jpeg(bytes)) {
        JpegErrorManager err{};
        if (!decode_jpeg(bytes, pixels, width, height, err)) {
            throw CorruptDataError("corrupt JPEG '" + path.string() + "': " + err.message);
        }
    } else {
        throw FormatError("unsupported image format in '" + path.string() +
                          "' (expected PNG or JPEG)");
    }
    if (width < 1 || height < 1) {
        throw CorruptDataError("image '" + path.string() + "' has no pixels");
    }
    return RgbImage(width, height, std::move(pixels));
}

void save_image(const RgbImage& img, const fs::path& path) {
    std::vector<unsigned char> encoded;
    PngErrorSink sink;
    if (!encode_png(img, encoded, sink)) {
        throw IoError("PNG encoding failed for '" + path.string() + "': " + sink.message);
    }
    write_bytes(path, encoded.data(), encoded.size());
}

void save_pfm(const RealGrid& grid, const fs::path& path) {
    std::ostringstream header;
    header << "Pf\n" << grid.width << ' ' << grid.height << "\n-1.0\n";
    std::string out = header.str();
    const std::size_t offset = out.size();
    out.resize(offset + grid.values.size() * sizeof(float));
    char* dst = out.data() + offset;
    for (int y = grid.height - 1; y >= 0; --y) {
        for (int x = 0; x < grid.width; ++x) {
            const float f = static_cast<float>(grid.at(x, y));
            std::uint32_t bits;
            std::memcpy(&bits, &f, sizeof bits);
            for (int k = 0; k < 4; ++k) *dst++ = static_cast<char>((bits >> (8 * k)) & 0xFF);
        }
    }
    write_bytes(path, out.data(), out.size());
}

RealGrid load_pfm(const fs::path& path) {
    const auto bytes = read_bytes(path);
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    std::string magic;
    int width = 0;
    int height = 0;
    double scale = 0.0;
    if (!(in >> magic >> width >> height >> scale) || magic != "Pf") {
        throw FormatError("'" + path.string() + "' is not a single-channel PFM file");
    }
    in.get();
    const auto offset = static_cast<std::size_t>(in.tellg());
    if (width < 1 || height < 1 ||
        bytes.size() < offset + static_cast<std::size_t>(width) * height * 4) {
        throw CorruptDataError("truncated PFM '" + path.string() + "'");
    }
    const bool little = scale < 0.0;
    RealGrid grid(width, height);
    const unsigned char* src = bytes.data() + offset;
    for (int y = height - 1; y >= 0; --y) {
        for (int x = 0; x < width; ++x) {
            std::uint32_t bits = 0;
            for (int k = 0; k < 4; ++k) {
                const int shift = little ? 8 * k : 8 * (3 - k);
                bits |= static_cast<std::uint32_t>(src[k]) << shift;
            }
            src += 4;
            float f;
            std::memcpy(&f, &bits, sizeof f);
            grid.at(x, y) = f;
        }
    }
    return grid;
}

}  // namespace hazemix
