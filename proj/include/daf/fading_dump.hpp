#pragma once

// Binary dump of a FadingProcess, all multi-byte fields little-endian:
//   u8  link id (0 = SD, 1 = SR, 2 = RD)
//   f64 variance, f64 first Doppler, f64 second Doppler
//   u64 length, u64 seed
//   length x (f64 re, f64 im)

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "daf/channel.hpp"
#include "daf/errors.hpp"

namespace daf {

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(bytes.data(), bytes.size());
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw ArgumentError("fading dump: truncated input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace detail

inline void write_fading_dump(std::ostream& os, const FadingProcess& p) {
  os.put(static_cast<char>(p.link.id));
  detail::put_f64(os, p.link.variance);
  detail::put_f64(os, p.link.dopplers.first);
  detail::put_f64(os, p.link.dopplers.second);
  detail::put_u64(os, p.samples.size());
  detail::put_u64(os, p.seed);
  for (const auto& h : p.samples) {
    detail::put_f64(os, h.real());
    detail::put_f64(os, h.imag());
  }
}

inline FadingProcess read_fading_dump(std::istream& is) {
  const int id = is.get();
  if (!is || id < 0 || id > 2) throw ArgumentError("fading dump: bad link id");
  FadingProcess p;
  p.link.id = static_cast<LinkId>(id);
  p.link.variance = detail::get_f64(is);
  p.link.dopplers.first = detail::get_f64(is);
  p.link.dopplers.second = detail::get_f64(is);
  const std::uint64_t length = detail::get_u64(is);
  p.seed = detail::get_u64(is);
  p.samples.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(length, 1u << 20)));
  for (std::uint64_t k = 0; k < length; ++k) {
    const double re = detail::get_f64(is);
    const double im = detail::get_f64(is);
    p.samples.emplace_back(re, im);
  }
  return p;
}

}  // namespace daf
