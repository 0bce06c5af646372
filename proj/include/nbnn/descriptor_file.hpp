#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nbnn/types.hpp"

namespace nbnn {

// Binary descriptor-set container, little-endian throughout:
//   bytes 0..3   magic "DSC1"
//   u32          format version (currently 1)
//   u32          descriptor count
//   u32          dimension
//   payload      count * dimension IEEE-754 binary32 values, row-major
// Values are stored as binary32 and promoted to double on decode; encode of
// a set whose components are binary32-representable round-trips bitwise.
inline constexpr std::uint32_t kDescriptorFileVersion = 1;

std::vector<std::uint8_t> encode_descriptor_file(const DescriptorSet& set);

// Throws BadMagic, UnsupportedVersion, TruncatedPayload, or the validation
// errors of descriptor ingest (NonFiniteComponent, ZeroNormDescriptor).
DescriptorSet decode_descriptor_file(const std::vector<std::uint8_t>& bytes);

DescriptorSet read_descriptor_file(const std::filesystem::path& path);
void write_descriptor_file(const std::filesystem::path& path, const DescriptorSet& set);

}  // namespace nbnn
