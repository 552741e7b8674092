#include "physattn/container_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "physattn/errors.hpp"

namespace physattn::io {

namespace {

using nlohmann::json;

ParseError structure_error(const std::string& what) { return ParseError(what, 0, 0, 0); }

std::uint32_t dimension(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw structure_error(std::string("container is missing key \"") + key + "\"");
  if (!it->is_number_unsigned()) {
    throw structure_error(std::string("container key \"") + key + "\" must be a nonnegative integer");
  }
  const auto value = it->get<std::uint64_t>();
  if (value > 0xFFFFFFFFull) throw structure_error(std::string("container key \"") + key + "\" too large");
  return static_cast<std::uint32_t>(value);
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::vector<std::byte>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xFFu));
}

std::uint64_t get_le(std::span<const std::byte> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

std::size_t element_count(const Container& c) {
  return static_cast<std::size_t>(c.frames) * c.height * c.width * c.channels;
}

void check_size(const Container& c) {
  if (c.data.size() != element_count(c)) {
    throw ShapeError(ShapeFault::element_count,
                     "header T*H*W*d = " + std::to_string(element_count(c)) + " but data has " +
                         std::to_string(c.data.size()) + " values");
  }
}

}  // namespace

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Container parse_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    const auto [line, column] = line_column(text, offset);
    throw ParseError("malformed JSON container", line, column, offset);
  }
  if (!doc.is_object()) throw structure_error("container must be a JSON object");

  static const std::set<std::string> known = {"T", "H", "W", "d", "data"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw structure_error("unknown container key \"" + key + "\"");
  }

  Container c;
  c.frames = dimension(doc, "T");
  c.height = dimension(doc, "H");
  c.width = dimension(doc, "W");
  c.channels = dimension(doc, "d");
  const auto data = doc.find("data");
  if (data == doc.end() || !data->is_array()) throw structure_error("container needs a \"data\" array");
  c.data.reserve(data->size());
  for (std::size_t i = 0; i < data->size(); ++i) {
    const auto& v = (*data)[i];
    if (!v.is_number()) {
      throw structure_error("container data element " + std::to_string(i) + " is not a number");
    }
    c.data.push_back(v.get<double>());
  }
  check_size(c);
  return c;
}

std::string to_json(const Container& c) {
  json doc;
  doc["T"] = c.frames;
  doc["H"] = c.height;
  doc["W"] = c.width;
  doc["d"] = c.channels;
  doc["data"] = c.data;
  return doc.dump() + "\n";
}

Container parse_binary(std::span<const std::byte> bytes) {
  if (bytes.size() < kBinaryHeaderBytes) {
    throw ParseError("binary container shorter than its 16-byte header", 1, bytes.size() + 1,
                     bytes.size());
  }
  Container c;
  c.frames = static_cast<std::uint32_t>(get_le(bytes, 0, 4));
  c.height = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  c.width = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
  c.channels = static_cast<std::uint32_t>(get_le(bytes, 12, 4));
  const std::size_t expected = kBinaryHeaderBytes + 8 * element_count(c);
  if (bytes.size() != expected) {
    const std::size_t at = std::min(bytes.size(), expected);
    throw ParseError("binary container holds " + std::to_string(bytes.size()) + " bytes, header implies " +
                         std::to_string(expected),
                     1, at + 1, at);
  }
  c.data.resize(element_count(c));
  for (std::size_t i = 0; i < c.data.size(); ++i) {
    c.data[i] = std::bit_cast<double>(get_le(bytes, kBinaryHeaderBytes + 8 * i, 8));
  }
  return c;
}

std::vector<std::byte> to_binary(const Container& c) {
  check_size(c);
  std::vector<std::byte> out;
  out.reserve(kBinaryHeaderBytes + 8 * c.data.size());
  put_u32(out, c.frames);
  put_u32(out, c.height);
  put_u32(out, c.width);
  put_u32(out, c.channels);
  for (const double v : c.data) put_f64(out, v);
  return out;
}

Format detect_format(std::span<const std::byte> bytes) noexcept {
  for (const std::byte b : bytes) {
    const auto ch = std::to_integer<char>(b);
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
    return ch == '{' ? Format::json : Format::binary;
  }
  return Format::binary;
}

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) bytes[i] = static_cast<std::byte>(raw[i]);
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::as_bytes(std::span<const char>(text.data(), text.size())));
}

Container read_container(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (detect_format(bytes) == Format::json) {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    return parse_json(text);
  }
  return parse_binary(bytes);
}

void write_container(const std::filesystem::path& path, const Container& c, Format format) {
  if (format == Format::json) {
    write_file_atomic(path, to_json(c));
  } else {
    write_file_atomic(path, to_binary(c));
  }
}

Container to_container(const FeatureSequence& f) {
  const auto v = f.values();
  return Container{static_cast<std::uint32_t>(f.frames()), static_cast<std::uint32_t>(f.height()),
                   static_cast<std::uint32_t>(f.width()), static_cast<std::uint32_t>(f.channels()),
                   std::vector<double>(v.begin(), v.end())};
}

Container to_container(const MaskSequence& m) {
  Container c{static_cast<std::uint32_t>(m.frames()), static_cast<std::uint32_t>(m.height()),
              static_cast<std::uint32_t>(m.width()), 1, {}};
  c.data.reserve(m.bits().size());
  for (const auto b : m.bits()) c.data.push_back(b ? 1.0 : 0.0);
  return c;
}

FeatureSequence to_features(const Container& c) {
  check_size(c);
  return FeatureSequence(c.frames, {c.height, c.width, c.channels}, c.data);
}

MaskSequence to_masks(const Container& c) {
  check_size(c);
  if (c.channels != 1) {
    throw ShapeError(ShapeFault::channels, "mask container must have d = 1, got " + std::to_string(c.channels));
  }
  return MaskSequence::from_values(c.frames, c.height, c.width, c.data);
}

void validate_pair(const Container& features, const Container& masks) {
  check_size(features);
  check_size(masks);
  if (features.frames != masks.frames) {
    throw ShapeError(ShapeFault::frame_count, "features have " + std::to_string(features.frames) +
                                                  " frames, masks have " + std::to_string(masks.frames));
  }
  if (features.height != masks.height) {
    throw ShapeError(ShapeFault::height, "features have height " + std::to_string(features.height) +
                                             ", masks have " + std::to_string(masks.height));
  }
  if (features.width != masks.width) {
    throw ShapeError(ShapeFault::width, "features have width " + std::to_string(features.width) +
                                            ", masks have " + std::to_string(masks.width));
  }
  if (masks.channels != 1) {
    throw ShapeError(ShapeFault::channels, "masks must have d = 1, got " + std::to_string(masks.channels));
  }
  for (std::size_t i = 0; i < masks.data.size(); ++i) {
    if (masks.data[i] != 0.0 && masks.data[i] != 1.0) {
      throw ShapeError(ShapeFault::non_binary,
                       "mask element " + std::to_string(i) + " = " + std::to_string(masks.data[i]));
    }
  }
  for (std::size_t i = 0; i < features.data.size(); ++i) {
    if (!std::isfinite(features.data[i])) {
      throw ShapeError(ShapeFault::non_finite, "feature element " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace physattn::io
