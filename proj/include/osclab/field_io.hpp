#pragma once

#include "osclab/field.hpp"

#include <iosfwd>
#include <memory>
#include <string>

namespace osclab {

/// OLF1 field file: the line "OLF1", one line of JSON header
/// {n, cells, h, origin, placement, components, dtype: "f64-le",
/// layout: "row-major"}, then the raw little-endian doubles.
void write_field(std::ostream& out, const Field& field);
void write_field(const std::string& path, const Field& field);

/// Reads an OLF1 stream. The grid is rebuilt from the header; when
/// `mask_grid` is given its mask and labels are used instead and the
/// header must agree with it. Throws FileFormatError on any mismatch.
Field read_field(std::istream& in, std::shared_ptr<const Grid> mask_grid = nullptr);
Field read_field(const std::string& path, std::shared_ptr<const Grid> mask_grid = nullptr);

/// OLM1 mask file: "OLM1", the same header shape with dtype "u8", then
/// one byte (0/1) per cell.
void write_mask(std::ostream& out, const Grid& grid);
void write_mask(const std::string& path, const Grid& grid);
std::shared_ptr<const Grid> read_mask(std::istream& in);
std::shared_ptr<const Grid> read_mask(const std::string& path);

}  // namespace osclab
