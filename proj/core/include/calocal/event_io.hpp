#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "calocal/aging.hpp"
#include "calocal/events.hpp"

namespace calocal {

/// Fixed 36-byte little-endian header of an event file, followed by
/// n_events * n_rows * n_cols float32 cell energies (row-major per event).
struct EventFileHeader {
  static constexpr std::array<char, 4> kMagic{'C', 'A', 'L', 'O'};
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kSize = 36;

  std::array<char, 4> magic = kMagic;
  std::uint32_t version = kVersion;
  std::uint64_t n_events = 0;
  std::uint32_t n_rows = 0;
  std::uint32_t n_cols = 0;
  float beam_energy_gev = 0.0f;
  std::uint64_t seed = 0;

  std::array<unsigned char, kSize> encode() const;
  static EventFileHeader decode(std::span<const unsigned char> bytes);
};

std::string encode_events(const EventSet& e);
EventSet decode_events(std::span<const unsigned char> bytes);

void write_events(const std::filesystem::path& path, const EventSet& e);
EventSet read_events(const std::filesystem::path& path);

/// One line per event: `event,row,col,energy` for every non-zero cell.
std::string events_to_csv(const EventSet& e);

/// `row,col,a,A` with 9 significant digits, one line per cell.
std::string coefficients_to_csv(const DetectorGeometry& geom, std::span<const double> a);
AgingProfile coefficients_from_csv(const std::string& text, const DetectorGeometry& geom);
AgingProfile read_coefficients(const std::filesystem::path& path, const DetectorGeometry& geom);

std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Collects several outputs and publishes them only when commit() is called.
/// Temporaries left by an abandoned transaction are removed on destruction.
class OutputTransaction {
 public:
  OutputTransaction() = default;
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;
  ~OutputTransaction();

  void stage(const std::filesystem::path& path, std::string content);
  void commit();

 private:
  struct Staged {
    std::filesystem::path target;
    std::filesystem::path temp;
  };
  std::vector<Staged> staged_;
  bool committed_ = false;
};

}  // namespace calocal
