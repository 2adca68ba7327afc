#include "osclab/field_io.hpp"

#include "osclab/error.hpp"

#include <json.hpp>

#include <bit>
#include <set>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace osclab {

namespace {

using nlohmann::json;

json header_for(const Grid& grid, const std::string& placement, int components, const std::string& dtype) {
  json h;
  h["n"] = grid.dim();
  h["cells"] = json::array();
  h["origin"] = json::array();
  for (int a = 0; a < grid.dim(); ++a) {
    h["cells"].push_back(grid.cells()[a]);
    h["origin"].push_back(grid.origin()[a]);
  }
  h["h"] = grid.spacing();
  h["placement"] = placement;
  h["components"] = components;
  h["dtype"] = dtype;
  h["layout"] = "row-major";
  return h;
}

struct Header {
  int n = 0;
  Index3 cells{1, 1, 1};
  double h = 0.0;
  Point3 origin{0.0, 0.0, 0.0};
  std::string placement;
  int components = 0;
};

Header parse_header(std::istream& in, const std::string& magic, const std::string& dtype) {
  std::string line;
  if (!std::getline(in, line) || line != magic) throw FileFormatError("missing " + magic + " magic line");
  if (!std::getline(in, line)) throw FileFormatError("missing header line");
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FileFormatError(std::string("bad header JSON: ") + e.what());
  }
  Header hd;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      static const std::set<std::string> known{"n", "cells", "h", "origin", "placement", "components", "dtype", "layout"};
      if (!known.count(it.key())) throw FileFormatError("unknown header key '" + it.key() + "'");
    }
    hd.n = j.at("n").get<int>();
    if (hd.n != 2 && hd.n != 3) throw FileFormatError("header n must be 2 or 3");
    const auto cells = j.at("cells").get<std::vector<int>>();
    const auto origin = j.at("origin").get<std::vector<double>>();
    if (static_cast<int>(cells.size()) != hd.n || static_cast<int>(origin.size()) != hd.n)
      throw FileFormatError("cells/origin length must equal n");
    for (int a = 0; a < hd.n; ++a) {
      hd.cells[a] = cells[a];
      hd.origin[a] = origin[a];
    }
    hd.h = j.at("h").get<double>();
    hd.placement = j.at("placement").get<std::string>();
    hd.components = j.at("components").get<int>();
    if (j.at("dtype").get<std::string>() != dtype) throw FileFormatError("dtype must be " + dtype);
    if (j.at("layout").get<std::string>() != "row-major") throw FileFormatError("layout must be row-major");
  } catch (const json::exception& e) {
    throw FileFormatError(std::string("bad header: ") + e.what());
  }
  return hd;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FileFormatError("truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileFormatError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_field(std::ostream& out, const Field& field) {
  const std::string placement = field.placement() == Placement::Cell ? "cell" : "node";
  out << "OLF1\n" << header_for(field.grid(), placement, field.components(), "f64-le").dump() << '\n';
  for (double v : field.values()) put_f64(out, v);
}

void write_field(const std::string& path, const Field& field) {
  auto out = open_out(path);
  write_field(out, field);
}

Field read_field(std::istream& in, std::shared_ptr<const Grid> mask_grid) {
  const Header hd = parse_header(in, "OLF1", "f64-le");
  Placement placement;
  if (hd.placement == "cell") placement = Placement::Cell;
  else if (hd.placement == "node") placement = Placement::Node;
  else throw FileFormatError("placement must be 'cell' or 'node'");

  Shape shape;
  if (hd.components == 1) shape = Shape::Scalar;
  else if (hd.components == hd.n) shape = Shape::Vector;
  else if (hd.components == hd.n * hd.n) shape = Shape::Matrix;
  else throw FileFormatError("components must be 1, n or n*n");

  std::shared_ptr<const Grid> grid;
  try {
    if (mask_grid) {
      if (mask_grid->dim() != hd.n || mask_grid->cells() != Grid(hd.n, hd.cells, hd.h).cells())
        throw FileFormatError("mask grid does not match field header");
      grid = mask_grid;
    } else {
      grid = std::make_shared<const Grid>(hd.n, hd.cells, hd.h, hd.origin);
    }
  } catch (const ParameterError& e) {
    throw FileFormatError(std::string("invalid grid in header: ") + e.what());
  }
  const std::size_t sites = placement == Placement::Cell ? grid->cell_count() : grid->node_count();
  std::vector<double> values(sites * hd.components);
  for (auto& v : values) v = get_f64(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FileFormatError("trailing bytes after payload");
  try {
    return Field(grid, placement, shape, std::move(values));
  } catch (const ParameterError& e) {
    throw FileFormatError(e.what());
  }
}

Field read_field(const std::string& path, std::shared_ptr<const Grid> mask_grid) {
  auto in = open_in(path);
  return read_field(in, std::move(mask_grid));
}

void write_mask(std::ostream& out, const Grid& grid) {
  out << "OLM1\n" << header_for(grid, "cell", 1, "u8").dump() << '\n';
  for (auto b : grid.mask()) out.put(static_cast<char>(b ? 1 : 0));
}

void write_mask(const std::string& path, const Grid& grid) {
  auto out = open_out(path);
  write_mask(out, grid);
}

std::shared_ptr<const Grid> read_mask(std::istream& in) {
  const Header hd = parse_header(in, "OLM1", "u8");
  if (hd.placement != "cell" || hd.components != 1) throw FileFormatError("mask must be a one-component cell file");
  const std::size_t count = static_cast<std::size_t>(hd.cells[0]) * hd.cells[1] * (hd.n == 3 ? hd.cells[2] : 1);
  std::vector<std::uint8_t> mask(count);
  for (auto& m : mask) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw FileFormatError("truncated mask payload");
    if (c != 0 && c != 1) throw FileFormatError("mask bytes must be 0 or 1");
    m = static_cast<std::uint8_t>(c);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FileFormatError("trailing bytes after mask payload");
  try {
    return std::make_shared<const Grid>(hd.n, hd.cells, hd.h, hd.origin, std::move(mask));
  } catch (const ParameterError& e) {
    throw FileFormatError(std::string("invalid mask: ") + e.what());
  }
}

std::shared_ptr<const Grid> read_mask(const std::string& path) {
  auto in = open_in(path);
  return read_mask(in);
}

}  // namespace osclab
