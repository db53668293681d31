#include "pedx/clipstore.hpp"

#include <cstring>

#include "json.hpp"
#include "pedx/error.hpp"

namespace pedx {

namespace {

constexpr char kMagic[8] = {'P', 'E', 'D', 'X', 'C', 'L', 'I', 'P'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos + std::size_t(i)]) << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_clip(const CropClip& clip) {
    nlohmann::ordered_json h;
    h["track_id"] = clip.track_id;
    h["mode"] = to_string(clip.mode);
    h["frame_indices"] = clip.frame_indices;
    h["S"] = clip.size;
    h["channels"] = 3;
    h["dtype"] = "u8";
    const std::string header = h.dump();
    std::vector<std::uint8_t> out(kMagic, kMagic + 8);
    put_u32(out, kClipFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(header.size()));
    out.insert(out.end(), header.begin(), header.end());
    for (const auto& f : clip.frames) {
        if (f.width != clip.size || f.height != clip.size || f.channels != 3)
            throw RuntimeError("clip frame does not match S x S x 3");
        out.insert(out.end(), f.pixels.begin(), f.pixels.end());
    }
    return out;
}

CropClip decode_clip(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw DataError("not a clip file");
    if (get_u32(bytes, 8) != kClipFormatVersion)
        throw DataError("unsupported clip format version " + std::to_string(get_u32(bytes, 8)));
    const std::size_t hlen = get_u32(bytes, 12);
    if (16 + hlen > bytes.size()) throw DataError("truncated clip header");
    CropClip clip;
    try {
        const auto h = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + long(hlen));
        clip.track_id = h.at("track_id").get<std::string>();
        clip.mode = parse_crop_mode(h.at("mode").get<std::string>());
        clip.frame_indices = h.at("frame_indices").get<std::vector<std::int64_t>>();
        clip.size = h.at("S").get<std::size_t>();
        if (h.at("channels").get<int>() != 3 || h.at("dtype").get<std::string>() != "u8")
            throw DataError("unsupported clip pixel format");
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad clip header: ") + e.what());
    }
    const std::size_t frame_bytes = clip.size * clip.size * 3;
    if (bytes.size() != 16 + hlen + frame_bytes * clip.frame_indices.size())
        throw DataError("clip payload size mismatch");
    std::size_t pos = 16 + hlen;
    for (std::size_t i = 0; i < clip.frame_indices.size(); ++i, pos += frame_bytes) {
        Image f(clip.size, clip.size, 3);
        std::memcpy(f.pixels.data(), bytes.data() + pos, frame_bytes);
        clip.frames.push_back(std::move(f));
    }
    return clip;
}

void write_clip(const CropClip& clip, const std::filesystem::path& path) { write_file_atomic(path, encode_clip(clip)); }

CropClip read_clip(const std::filesystem::path& path) { return decode_clip(read_file(path)); }

std::string clip_file_name(const std::string& sample_id) {
    std::string name;
    for (char c : sample_id) name += (c == '/' || c == '\\' || c == '@') ? '_' : c;
    return name + ".clip";
}

}  // namespace pedx
