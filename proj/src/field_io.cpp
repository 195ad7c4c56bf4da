#include "hma/field_io.hpp"

#include "json.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace hma {

namespace {

constexpr size_t kMaxHeaderBytes = 1 << 20;

void payload_to_little_endian(const double* src, char* dst, long count) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, src, count * sizeof(double));
  } else {
    for (long i = 0; i < count; ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(src[i]);
      for (int b = 0; b < 8; ++b) dst[8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
}

void payload_from_little_endian(const char* src, double* dst, long count) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, src, count * sizeof(double));
  } else {
    for (long i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[8 * i + b]))
                << (8 * b);
      dst[i] = std::bit_cast<double>(bits);
    }
  }
}

}  // namespace

void write_field(const ScalarField& f, const std::string& field_name, const std::string& path) {
  nlohmann::ordered_json header;
  header["format_version"] = 1;
  header["n"] = f.spec.n;
  header["m"] = f.spec.m;
  header["lo"] = std::vector<double>(f.spec.lo.data(), f.spec.lo.data() + f.spec.lo.size());
  header["hi"] = std::vector<double>(f.spec.hi.data(), f.spec.hi.data() + f.spec.hi.size());
  header["field_name"] = field_name;
  header["dtype"] = "f64le";
  header["layout"] = "row-major";

  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw FieldIoError("write_field: cannot open '" + path + "' for writing");
  out << header.dump() << '\n';
  std::vector<char> payload(f.values.size() * sizeof(double));
  payload_to_little_endian(f.values.data(), payload.data(), f.values.size());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw FieldIoError("write_field: short write to '" + path + "'");
}

NamedField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldIoError("read_field: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || line.size() > kMaxHeaderBytes)
    throw FieldHeaderError("read_field: missing or oversized header line in '" + path + "'");

  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object())
    throw FieldHeaderError("read_field: header line is not a JSON object in '" + path + "'");
  for (const char* key :
       {"format_version", "n", "m", "lo", "hi", "field_name", "dtype", "layout"}) {
    if (!header.contains(key))
      throw FieldHeaderError(std::string("read_field: header missing key '") + key + "' in '" +
                             path + "'");
  }
  if (header.size() != 8)
    throw FieldHeaderError("read_field: header carries unknown keys in '" + path + "'");

  if (!header["format_version"].is_number_integer() ||
      header["format_version"].get<int>() != 1)
    throw FieldVersionError("read_field: unsupported format_version in '" + path +
                            "' (only 1 is supported)");
  if (!header["dtype"].is_string() || header["dtype"].get<std::string>() != "f64le")
    throw FieldDtypeError("read_field: unsupported dtype in '" + path +
                          "' (only \"f64le\" is supported)");
  if (!header["layout"].is_string() || header["layout"].get<std::string>() != "row-major")
    throw FieldDtypeError("read_field: unsupported layout in '" + path +
                          "' (only \"row-major\" is supported)");
  if (!header["n"].is_number_integer() || !header["m"].is_number_integer() ||
      !header["lo"].is_array() || !header["hi"].is_array() || !header["field_name"].is_string())
    throw FieldHeaderError("read_field: header field types are wrong in '" + path + "'");

  GridSpec spec;
  try {
    const auto lo = header["lo"].get<std::vector<double>>();
    const auto hi = header["hi"].get<std::vector<double>>();
    RVec lov = Eigen::Map<const RVec>(lo.data(), lo.size());
    RVec hiv = Eigen::Map<const RVec>(hi.data(), hi.size());
    spec = GridSpec::make(header["n"].get<int>(), header["m"].get<int>(), std::move(lov),
                          std::move(hiv));
  } catch (const std::exception& e) {
    throw FieldHeaderError("read_field: invalid grid header in '" + path + "': " + e.what());
  }

  NamedField out;
  out.name = header["field_name"].get<std::string>();
  out.field.spec = spec;
  out.field.values.resize(spec.total());
  std::vector<char> payload(spec.total() * sizeof(double));
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size()))
    throw FieldPayloadError("read_field: truncated payload in '" + path + "' (expected " +
                            std::to_string(payload.size()) + " bytes, got " +
                            std::to_string(in.gcount()) + ")");
  if (in.peek() != std::ifstream::traits_type::eof())
    throw FieldPayloadError("read_field: trailing bytes after payload in '" + path + "'");
  payload_from_little_endian(payload.data(), out.field.values.data(), spec.total());
  return out;
}

}  // namespace hma
