#ifndef GAMMAKIT_GFLD_HPP
#define GAMMAKIT_GFLD_HPP

#include <iosfwd>
#include <string>

#include "gammakit/field.hpp"

namespace gammakit {

/// Binary field container: "GFLD" magic, u32 version, u64 header length, a
/// UTF-8 JSON header describing grid/layout/space, then the samples as
/// little-endian complex128 pairs (component fastest, then axis 0 fastest).
void write_gfld(std::ostream& out, const Field& field);
void write_gfld_file(const std::string& path, const Field& field);

Field read_gfld(std::istream& in);
Field read_gfld_file(const std::string& path);

/// Raw u8 phase labels, axis 0 fastest, one byte per grid point.
std::vector<std::uint8_t> read_voxel_labels(const std::string& path, std::size_t expected);
void write_voxel_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

}  // namespace gammakit

#endif
