#include "hazemix/sidecar.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hazemix/errors.hpp"

namespace hazemix {

namespace fs = std::filesystem;
using nlohmann::json;

json histogram_to_json(const DensityHistogram& h) {
    return json{{"version", kSidecarVersion},
                {"pixel_count", h.pixel_count()},
                {"bins", h.bins()}};
}

DensityHistogram histogram_from_json(const json& j) {
    try {
        if (j.at("version").get<int>() != kSidecarVersion) {
            throw ValidationError("unsupported histogram sidecar version");
        }
        const auto& arr = j.at("bins");
        if (!arr.is_array() || arr.size() != kLevels) {
            throw ValidationError("histogram sidecar must carry 256 bins");
        }
        DensityHistogram::Bins bins{};
        for (int v = 0; v < kLevels; ++v) bins[v] = arr[v].get<double>();
        return DensityHistogram(bins, j.at("pixel_count").get<std::uint64_t>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed histogram sidecar: ") + e.what());
    }
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' into place");
    }
}

void write_histogram_sidecar(const DensityHistogram& h, const fs::path& path) {
    write_file_atomic(path, histogram_to_json(h).dump(2) + "\n");
}

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

struct FileStamp {
    std::uintmax_t size;
    std::int64_t mtime_ns;
};

std::optional<FileStamp> stamp_of(const fs::path& p) {
    std::error_code ec;
    const auto size = fs::file_size(p, ec);
    if (ec) return std::nullopt;
    const auto mtime = fs::last_write_time(p, ec);
    if (ec) return std::nullopt;
    const auto ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(mtime.time_since_epoch()).count();
    return FileStamp{size, static_cast<std::int64_t>(ns)};
}

}  // namespace

DensityHistogram read_histogram_sidecar(const fs::path& path) {
    return histogram_from_json(read_json(path));
}

fs::path cache_path_for(const fs::path& image) {
    fs::path p = image;
    p += ".density.json";
    return p;
}

std::optional<DensityHistogram> read_cached_density(const fs::path& image) {
    const auto cache = cache_path_for(image);
    std::error_code ec;
    if (!fs::is_regular_file(cache, ec)) return std::nullopt;
    const auto stamp = stamp_of(image);
    if (!stamp) return std::nullopt;
    try {
        const json j = read_json(cache);
        const auto& src = j.at("source");
        if (src.at("size").get<std::uintmax_t>() != stamp->size ||
            src.at("mtime_ns").get<std::int64_t>() != stamp->mtime_ns) {
            return std::nullopt;
        }
        return histogram_from_json(j);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

bool write_cached_density(const fs::path& image, const DensityHistogram& h) {
    const auto stamp = stamp_of(image);
    if (!stamp) return false;
    json j = histogram_to_json(h);
    j["source"] = {{"size", stamp->size}, {"mtime_ns", stamp->mtime_ns}};
    try {
        write_file_atomic(cache_path_for(image), j.dump(2) + "\n");
        return true;
    } catch (const IoError&) {
        return false;
    }
}

}  // namespace hazemix
