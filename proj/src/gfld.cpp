#include "gammakit/gfld.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gammakit {

static_assert(std::endian::native == std::endian::little,
              "field container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'G', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json layout_to_json(const SupertensorLayout& layout) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : layout.blocks())
    blocks.push_back({{"kind", block_kind_name(b.kind)}, {"label", b.label}});
  return {{"blocks", blocks}};
}

SupertensorLayout layout_from_json(int dim, const nlohmann::json& j) {
  std::vector<Block> blocks;
  for (const auto& b : j.at("blocks"))
    blocks.push_back(Block{block_kind_from_name(b.at("kind").get<std::string>()),
                           b.value("label", std::string("f"))});
  return SupertensorLayout(dim, std::move(blocks));
}

}  // namespace

void write_gfld(std::ostream& out, const Field& field) {
  const Grid& g = field.grid();
  nlohmann::json header;
  header["grid"]["dim"] = g.dim();
  header["grid"]["samples"] = nlohmann::json::array();
  header["grid"]["lengths"] = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) {
    header["grid"]["samples"].push_back(g.samples(a));
    header["grid"]["lengths"].push_back(g.length(a));
  }
  header["layout"] = layout_to_json(field.layout());
  header["space"] = field.space() == Space::real ? "real" : "fourier";
  header["dtype"] = "c128le";
  header["order"] = "component index fastest, then axis 0 fastest";
  const std::string text = header.dump();

  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  const std::uint64_t header_len = text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof header_len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(field.values().data()),
            static_cast<std::streamsize>(field.values().size() * sizeof(Complex)));
  if (!out) throw std::runtime_error("field container write failed");
}

void write_gfld_file(const std::string& path, const Field& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_gfld(out, field);
}

Field read_gfld(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a GFLD container");
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (version != kVersion)
    throw std::runtime_error("unsupported GFLD version " + std::to_string(version));
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof header_len);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error("truncated GFLD header");

  nlohmann::json header = nlohmann::json::parse(text);
  const int dim = header.at("grid").at("dim").get<int>();
  std::array<int, 3> samples{1, 1, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    samples[a] = header.at("grid").at("samples").at(a).get<int>();
    lengths[a] = header.at("grid").at("lengths").at(a).get<double>();
  }
  Grid grid(dim, samples, lengths);
  SupertensorLayout layout = layout_from_json(dim, header.at("layout"));
  if (header.at("dtype").get<std::string>() != "c128le")
    throw std::runtime_error("unsupported GFLD dtype");
  const Space space =
      header.at("space").get<std::string>() == "real" ? Space::real : Space::fourier;

  std::vector<Complex> values(grid.point_count() * layout.components());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(Complex)));
  if (!in) throw std::runtime_error("truncated GFLD payload");
  return Field(grid, layout, space, std::move(values));
}

Field read_gfld_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_gfld(in);
}

std::vector<std::uint8_t> read_voxel_labels(const std::string& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> labels(expected);
  in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(expected));
  if (!in || in.gcount() != static_cast<std::streamsize>(expected))
    throw std::runtime_error("voxel file " + path + " has the wrong size");
  return labels;
}

void write_voxel_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw std::runtime_error("voxel write failed");
}

}  // namespace gammakit
