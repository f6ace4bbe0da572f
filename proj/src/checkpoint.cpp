#include "adstitch/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace adstitch {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'S', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

void put_f32_array(std::string& out, const std::vector<float>& v) {
  for (float f : v) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
}

struct Reader {
  std::ifstream in;
  std::string path;

  void read(char* dst, std::size_t n, const char* section) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw std::runtime_error("checkpoint " + path + ": truncated in " + section);
    }
  }

  std::uint32_t u32(const char* section) {
    unsigned char b[4];
    read(reinterpret_cast<char*>(b), 4, section);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  std::uint64_t u64(const char* section) {
    std::uint64_t v = 0;
    unsigned char b[8];
    read(reinterpret_cast<char*>(b), 8, section);
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  double f64(const char* section) {
    std::uint64_t bits = u64(section);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  void f32_array(std::vector<float>& dst, const char* section) {
    for (float& f : dst) {
      std::uint32_t bits = u32(section);
      std::memcpy(&f, &bits, 4);
    }
  }
};

}  // namespace

void save_checkpoint(const ModelBank& bank, const std::string& path) {
  std::string buf;
  std::size_t table = std::size_t{1} << bank.hash_bits;
  buf.reserve(64 + kNumPositions * table * 8);
  buf.append(kMagic, sizeof(kMagic));
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(bank.hash_bits));
  put_u32(buf, static_cast<std::uint32_t>(kNumPositions));
  for (const auto& m : bank.positions) {
    put_u32(buf, static_cast<std::uint32_t>(m.position));
    put_u64(buf, m.updates_seen);
    put_f64(buf, m.bias);
  }
  for (const auto& m : bank.positions) {
    if (m.weights.size() != table || m.grad_sum.size() != table) {
      throw std::runtime_error("checkpoint " + path +
                               ": model tables do not match hash_bits");
    }
    put_f32_array(buf, m.weights);
    put_f32_array(buf, m.grad_sum);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

ModelBank load_checkpoint(const std::string& path) {
  Reader r;
  r.path = path;
  r.in.open(path, std::ios::binary);
  if (!r.in) throw std::runtime_error("cannot open checkpoint " + path);

  char magic[8];
  r.read(magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("checkpoint " + path + ": bad magic");
  }
  std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw std::runtime_error("checkpoint " + path + ": unsupported version " +
                             std::to_string(version));
  }
  std::uint32_t hash_bits = r.u32("hash_bits");
  if (hash_bits < 1 || hash_bits > 30) {
    throw std::runtime_error("checkpoint " + path + ": hash_bits out of range");
  }
  std::uint32_t n_positions = r.u32("position count");
  if (n_positions != static_cast<std::uint32_t>(kNumPositions)) {
    throw std::runtime_error("checkpoint " + path + ": expected " +
                             std::to_string(kNumPositions) + " positions, found " +
                             std::to_string(n_positions));
  }

  ModelBank bank = ModelBank::make(static_cast<int>(hash_bits));
  for (int i = 0; i < kNumPositions; ++i) {
    auto& m = bank.positions[static_cast<std::size_t>(i)];
    std::uint32_t pos = r.u32("position header");
    if (pos != static_cast<std::uint32_t>(i)) {
      throw std::runtime_error("checkpoint " + path + ": position header order");
    }
    m.updates_seen = r.u64("position header");
    m.bias = r.f64("position header");
  }
  for (int i = 0; i < kNumPositions; ++i) {
    auto& m = bank.positions[static_cast<std::size_t>(i)];
    std::string section = std::string("weights[") + kPositionNames[static_cast<std::size_t>(i)] + "]";
    r.f32_array(m.weights, section.c_str());
    section = std::string("grad_sum[") + kPositionNames[static_cast<std::size_t>(i)] + "]";
    r.f32_array(m.grad_sum, section.c_str());
  }
  char extra;
  if (r.in.read(&extra, 1), r.in.gcount() != 0) {
    throw std::runtime_error("checkpoint " + path + ": trailing bytes");
  }
  return bank;
}

}  // namespace adstitch
