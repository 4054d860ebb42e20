#include "wavepack/container.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace wp {

namespace {
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kTag = 0x01020304u;

template <class T>
void put(std::ofstream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, bool swap) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DomainError("load_field: truncated header");
  if (swap) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    std::reverse(p, p + sizeof(T));
  }
  return v;
}
}  // namespace

void save_field(const std::string& path, const SpacetimeField& f) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw std::runtime_error("save_field: cannot open " + path);
  o.write("WPKF", 4);
  put(o, kVersion);
  put(o, kTag);
  put(o, static_cast<std::int32_t>(f.grid.n));
  put(o, static_cast<std::int32_t>(f.grid.nt));
  put(o, f.grid.domain_len);
  put(o, f.grid.dt);
  put(o, f.grid.t0);
  o.write(reinterpret_cast<const char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
  if (!o) throw std::runtime_error("save_field: write failed for " + path);
}

SpacetimeField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_field: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WPKF", 4) != 0) throw DomainError("load_field: bad magic");
  std::uint32_t ver = get<std::uint32_t>(in, false);
  std::uint32_t tag = get<std::uint32_t>(in, false);
  bool swap = false;
  if (tag == 0x04030201u) {
    swap = true;
    std::reverse(reinterpret_cast<unsigned char*>(&ver), reinterpret_cast<unsigned char*>(&ver) + 4);
  } else if (tag != kTag) {
    throw DomainError("load_field: bad endianness tag");
  }
  if (ver != kVersion) throw DomainError("load_field: unsupported version");
  GridSpec g;
  g.n = get<std::int32_t>(in, swap);
  g.nt = get<std::int32_t>(in, swap);
  g.domain_len = get<double>(in, swap);
  g.dt = get<double>(in, swap);
  g.t0 = get<double>(in, swap);
  if (g.n <= 0 || g.nt <= 0 || g.n > (1 << 14)) throw DomainError("load_field: bad dimensions");
  SpacetimeField f(g);
  in.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(cplx)));
  if (!in) throw DomainError("load_field: truncated payload");
  if (swap) {
    auto* p = reinterpret_cast<unsigned char*>(f.data.data());
    for (std::size_t i = 0; i < f.data.size() * 2; ++i) std::reverse(p + 8 * i, p + 8 * i + 8);
  }
  return f;
}

}  // namespace wp
