#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixest {

/// Invalid run configuration (bad schedule parameters, unresolvable specs,
/// malformed config files). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned bounding box for 2-D continuous domains.
struct DomainBox {
  double xmin = -5.0;
  double xmax = 5.0;
  double ymin = -5.0;
  double ymax = 5.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
};

/// One observation ζ: either a 2-D coordinate pair or a categorical symbol.
/// Exactly one representation is active; `symbol < 0` marks a continuous point.
struct SamplePoint {
  double x = 0.0;
  double y = 0.0;
  std::int64_t symbol = -1;

  static SamplePoint continuous(double x, double y) { return {x, y, -1}; }
  static SamplePoint categorical(std::int64_t j) { return {0.0, 0.0, j}; }
  bool is_categorical() const { return symbol >= 0; }
};

/// Positivity floor applied to NegativeEntropy iterates.
inline constexpr double kWeightFloor = 1e-12;

/// FNV-1a accumulator, used for sample-stream checksums in experiment records.
struct StreamChecksum {
  std::uint64_t state = 0xcbf29ce484222325ull;

  void update_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ull;
    }
  }
  void update(const SamplePoint& zeta) {
    if (zeta.is_categorical()) {
      update_bytes(&zeta.symbol, sizeof zeta.symbol);
    } else {
      update_bytes(&zeta.x, sizeof zeta.x);
      update_bytes(&zeta.y, sizeof zeta.y);
    }
  }
  std::uint64_t value() const { return state; }
};

}  // namespace mixest
