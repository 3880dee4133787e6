#include "psum/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "psum/error.hpp"
#include "psum/hash.hpp"

namespace psum {
namespace {

constexpr std::size_t kHeaderSize = sizeof(kModelMagic) + 3 * 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_doubles(std::vector<std::uint8_t>& out, std::span<const double> values) {
  for (double d : values) put_u64(out, std::bit_cast<std::uint64_t>(d));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes[offset + i]} << (8 * i);
  return v;
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t offset) : bytes_(bytes), offset_(offset) {}

  void doubles(std::span<double> out) {
    for (double& d : out) {
      d = std::bit_cast<double>(get_le(bytes_, offset_, 8));
      if (!std::isfinite(d)) throw CorruptModelError("model contains a non-finite parameter");
      offset_ += 8;
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t offset_;
};

std::uint32_t narrow_dim(std::size_t v, const char* name) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw ContractError(std::string(name) + " does not fit the model format");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const NetworkParams& params) {
  const auto& c = params.config;
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 8 * (params.w1.size() + params.b1.size() + params.w2.size() +
                                 params.b2.size() + 1));
  out.insert(out.end(), std::begin(kModelMagic), std::end(kModelMagic));
  put_u32(out, narrow_dim(c.page_len, "page_len"));
  put_u32(out, narrow_dim(c.embed_dim, "embed_dim"));
  put_u32(out, narrow_dim(c.hidden_size, "hidden_size"));
  put_doubles(out, params.w1.values);
  put_doubles(out, params.b1);
  put_doubles(out, params.w2.values);
  put_doubles(out, params.b2);
  put_u64(out, fnv1a64(std::span<const std::uint8_t>(out)));
  return out;
}

NetworkParams deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + 8 ||
      std::memcmp(bytes.data(), kModelMagic, sizeof(kModelMagic)) != 0)
    throw CorruptModelError("not a model file (bad magic)");

  const std::size_t body = bytes.size() - 8;
  if (fnv1a64(bytes.first(body)) != get_le(bytes, body, 8))
    throw CorruptModelError("model checksum mismatch");

  NetworkConfig config;
  config.page_len = get_le(bytes, 5, 4);
  config.embed_dim = get_le(bytes, 9, 4);
  config.hidden_size = get_le(bytes, 13, 4);
  if (config.page_len == 0 || config.embed_dim == 0 || config.hidden_size == 0)
    throw CorruptModelError("model header has a zero dimension");

  const std::uint64_t h = config.hidden_size;
  const std::uint64_t in = std::uint64_t{config.page_len} * config.embed_dim;
  const std::uint64_t limit = body / 8;
  if (in > limit || h > limit / in) throw CorruptModelError("model size does not match header");
  const std::uint64_t count = h * in + h + std::uint64_t{config.page_len} * h + config.page_len;
  if (count * 8 + kHeaderSize != body) throw CorruptModelError("model size does not match header");

  NetworkParams p;
  p.config = config;
  p.w1 = Matrix(config.hidden_size, config.input_size());
  p.b1.assign(config.hidden_size, 0.0);
  p.w2 = Matrix(config.page_len, config.hidden_size);
  p.b2.assign(config.page_len, 0.0);
  Reader reader(bytes, kHeaderSize);
  reader.doubles(p.w1.values);
  reader.doubles(p.b1);
  reader.doubles(p.w2.values);
  reader.doubles(p.b2);
  return p;
}

void save_model(const NetworkParams& params, const std::filesystem::path& path) {
  const auto bytes = serialize_model(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open model file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw OutputError("failed writing model file: " + path.string());
}

NetworkParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("failed reading model file: " + path.string());
  return deserialize_model(bytes);
}

}  // namespace psum
