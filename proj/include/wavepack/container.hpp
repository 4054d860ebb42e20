#ifndef WAVEPACK_CONTAINER_HPP
#define WAVEPACK_CONTAINER_HPP

#include <string>

#include "wavepack/spectral.hpp"

namespace wp {

// Binary field container.
//
//   bytes 0-3    magic "WPKF"
//   u32          format version (1)
//   u32          endianness tag 0x01020304 as written by the producer
//   i32 n, i32 nt
//   f64 domain_len, f64 dt, f64 t0
//   payload      nt*n*n complex values, row-major (slice, x1, x2), each as
//                two f64 (re, im)
//
// Readers byte-swap when the tag reads back as 0x04030201.
void save_field(const std::string& path, const SpacetimeField& f);
SpacetimeField load_field(const std::string& path);

}  // namespace wp

#endif
