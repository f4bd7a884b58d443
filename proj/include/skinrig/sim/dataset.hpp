#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "skinrig/geometry/mesh.hpp"

namespace skinrig::sim {

/// Timestamped calibration stream: per frame the readings of every cell, the
/// normal force measured by the force-torque sensor and the contact position
/// in the link frame. Readings are stored frame-major.
struct CalibrationDataset {
  std::string skin_id;
  double frame_rate = 43.0;
  int cell_count = 0;
  std::uint64_t seed = 0;
  std::string plan_hash;

  std::vector<double> t;
  std::vector<double> readings;  // frames x cell_count
  std::vector<double> force;
  std::vector<Vec3> position;

  std::size_t frames() const { return t.size(); }
  const double* row(std::size_t frame) const {
    return readings.data() + frame * static_cast<std::size_t>(cell_count);
  }
  double reading(std::size_t frame, int cell) const { return row(frame)[cell]; }

  void append(double time, const std::vector<double>& cells, double f, const Vec3& p);
};

bool operator==(const CalibrationDataset& a, const CalibrationDataset& b);

inline constexpr const char* kDatasetFormat = "skinrig.dataset";
inline constexpr int kDatasetMajor = 1;
inline constexpr int kDatasetMinor = 0;

/// JSON header line, CSV column line, CSV body, then `#crc32 <hex>` over all
/// preceding bytes. Floats use shortest round-trip text, so a reload is
/// bit-exact.
std::string serialize_dataset(const CalibrationDataset& ds);
CalibrationDataset parse_dataset(const std::string& text);

/// CRC of the binary contents (header fields and every frame).
std::string dataset_hash(const CalibrationDataset& ds);

void save_dataset(const CalibrationDataset& ds, const std::filesystem::path& path);
/// Throws FormatVersionError on an unsupported major version, ChecksumError
/// when the trailer is missing or wrong, DatasetFormatError otherwise.
CalibrationDataset load_dataset(const std::filesystem::path& path);

}  // namespace skinrig::sim
