#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <type_traits>

#include "hwnroute/error.hpp"

namespace hwnroute::binio {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  static_assert(std::is_arithmetic_v<T>);
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw Error("truncated binary file");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

inline void put_f64s(std::ostream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

inline void get_f64s(std::istream& in, double* data, std::size_t n) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)))) {
    throw Error("truncated binary file");
  }
}

}  // namespace hwnroute::binio
