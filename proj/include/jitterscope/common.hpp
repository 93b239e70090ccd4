#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace jitterscope {

/// UTC epoch seconds.
using Timestamp = std::int64_t;

constexpr Timestamp kSecondsPerDay = 86400;
constexpr Timestamp kSecondsPerHour = 3600;

/// Unrecoverable input or numerical failure. Carries the pipeline stage
/// that raised it when known.
class FatalError : public std::runtime_error {
public:
  explicit FatalError(const std::string& what, std::string stage = {})
      : std::runtime_error(stage.empty() ? what : stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const LatLon&) const = default;
};

constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance in kilometres.
template <typename Scalar = double>
Scalar haversine_km(const LatLon& a, const LatLon& b) {
  constexpr Scalar deg = std::numbers::pi_v<Scalar> / Scalar(180);
  const Scalar dlat = (Scalar(b.lat) - Scalar(a.lat)) * deg;
  const Scalar dlon = (Scalar(b.lon) - Scalar(a.lon)) * deg;
  const Scalar s1 = std::sin(dlat / 2);
  const Scalar s2 = std::sin(dlon / 2);
  const Scalar h = s1 * s1 + std::cos(Scalar(a.lat) * deg) * std::cos(Scalar(b.lat) * deg) * s2 * s2;
  return 2 * Scalar(kEarthRadiusKm) * std::asin(std::min(Scalar(1), std::sqrt(h)));
}

}  // namespace jitterscope
