#include "nbnn/descriptor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace nbnn {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'C', '1'};

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32_le(std::vector<std::uint8_t>& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32_le(out, bits);
}

float get_f32_le(const std::uint8_t* p) {
    const std::uint32_t bits = get_u32_le(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

std::vector<std::uint8_t> encode_descriptor_file(const DescriptorSet& set) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + set.size() * set.dim() * 4);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32_le(out, kDescriptorFileVersion);
    put_u32_le(out, static_cast<std::uint32_t>(set.size()));
    put_u32_le(out, static_cast<std::uint32_t>(set.dim()));
    for (double v : set.flat()) {
        put_f32_le(out, static_cast<float>(v));
    }
    return out;
}

DescriptorSet decode_descriptor_file(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) {
        throw TruncatedPayload("descriptor file shorter than its 16-byte header");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw BadMagic("descriptor file does not start with DSC1");
    }
    const std::uint32_t version = get_u32_le(bytes.data() + 4);
    if (version != kDescriptorFileVersion) {
        throw UnsupportedVersion("descriptor file version " + std::to_string(version) +
                                 ", expected " + std::to_string(kDescriptorFileVersion));
    }
    const std::uint32_t count = get_u32_le(bytes.data() + 8);
    const std::uint32_t dim = get_u32_le(bytes.data() + 12);
    if (count == 0 || dim == 0) {
        throw InvalidArgument("descriptor file declares an empty set");
    }
    const std::uint64_t payload = static_cast<std::uint64_t>(count) * dim * 4;
    if (bytes.size() - 16 < payload) {
        throw TruncatedPayload("descriptor file payload is " +
                               std::to_string(bytes.size() - 16) + " bytes, header promises " +
                               std::to_string(payload));
    }
    if (bytes.size() - 16 > payload) {
        throw TruncatedPayload("descriptor file has " +
                               std::to_string(bytes.size() - 16 - payload) +
                               " trailing bytes past its payload");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(count) * dim);
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(count) * dim; ++i) {
        flat.push_back(static_cast<double>(get_f32_le(bytes.data() + 16 + i * 4)));
    }
    return DescriptorSet(dim, std::move(flat));
}

DescriptorSet read_descriptor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_descriptor_file(bytes);
}

void write_descriptor_file(const std::filesystem::path& path, const DescriptorSet& set) {
    const auto bytes = encode_descriptor_file(set);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

}  // namespace nbnn
