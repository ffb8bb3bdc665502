#include "calocal/event_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

#include "calocal/errors.hpp"

namespace calocal {

namespace {

template <typename T>
void put_le(unsigned char* out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<unsigned char>(bits >> (8 * i));
}

template <typename T>
T get_le(const unsigned char* in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(in[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::array<unsigned char, EventFileHeader::kSize> EventFileHeader::encode() const {
  std::array<unsigned char, kSize> b{};
  std::memcpy(b.data(), magic.data(), 4);
  put_le(b.data() + 4, version);
  put_le(b.data() + 8, n_events);
  put_le(b.data() + 16, n_rows);
  put_le(b.data() + 20, n_cols);
  put_le(b.data() + 24, beam_energy_gev);
  put_le(b.data() + 28, seed);
  return b;
}

EventFileHeader EventFileHeader::decode(std::span<const unsigned char> bytes) {
  if (bytes.size() < kSize)
    throw FormatError("truncated header: expected " + std::to_string(kSize) + " bytes, got " +
                      std::to_string(bytes.size()));
  EventFileHeader h;
  std::memcpy(h.magic.data(), bytes.data(), 4);
  if (h.magic != kMagic)
    throw FormatError("bad magic '" + std::string(h.magic.begin(), h.magic.end()) +
                      "', expected 'CALO'");
  h.version = get_le<std::uint32_t>(bytes.data() + 4);
  if (h.version != kVersion)
    throw FormatError("unsupported event file version " + std::to_string(h.version));
  h.n_events = get_le<std::uint64_t>(bytes.data() + 8);
  h.n_rows = get_le<std::uint32_t>(bytes.data() + 16);
  h.n_cols = get_le<std::uint32_t>(bytes.data() + 20);
  h.beam_energy_gev = get_le<float>(bytes.data() + 24);
  h.seed = get_le<std::uint64_t>(bytes.data() + 28);
  if (h.n_events < 1 || h.n_rows < 1 || h.n_cols < 1)
    throw FormatError("event file dimensions must be at least 1");
  return h;
}

std::string encode_events(const EventSet& e) {
  EventFileHeader h;
  h.n_events = e.n_events();
  h.n_rows = static_cast<std::uint32_t>(e.geometry.n_rows);
  h.n_cols = static_cast<std::uint32_t>(e.geometry.n_cols);
  h.beam_energy_gev = static_cast<float>(e.beam_energy_gev);
  h.seed = e.seed;
  const auto head = h.encode();
  std::string out(EventFileHeader::kSize + 4 * e.energies.size(), '\0');
  std::memcpy(out.data(), head.data(), head.size());
  auto* p = reinterpret_cast<unsigned char*>(out.data()) + EventFileHeader::kSize;
  for (double v : e.energies) {
    put_le(p, static_cast<float>(v));
    p += 4;
  }
  return out;
}

EventSet decode_events(std::span<const unsigned char> bytes) {
  const auto h = EventFileHeader::decode(bytes);
  const std::uint64_t cells = std::uint64_t{h.n_rows} * h.n_cols;
  const std::uint64_t expected = EventFileHeader::kSize + 4 * h.n_events * cells;
  if (bytes.size() != expected)
    throw FormatError("payload size mismatch: expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(bytes.size()));
  EventSet e;
  e.geometry.n_rows = static_cast<int>(h.n_rows);
  e.geometry.n_cols = static_cast<int>(h.n_cols);
  e.beam_energy_gev = h.beam_energy_gev;
  e.seed = h.seed;
  e.energies.resize(h.n_events * cells);
  const unsigned char* p = bytes.data() + EventFileHeader::kSize;
  for (auto& v : e.energies) {
    v = get_le<float>(p);
    p += 4;
    if (!std::isfinite(v) || v < 0.0) throw FormatError("negative or non-finite cell energy");
  }
  return e;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return data;
}

void write_events(const std::filesystem::path& path, const EventSet& e) {
  write_file_atomic(path, encode_events(e));
}

EventSet read_events(const std::filesystem::path& path) {
  const auto data = read_file(path);
  try {
    return decode_events(
        {reinterpret_cast<const unsigned char*>(data.data()), data.size()});
  } catch (const FormatError& err) {
    throw FormatError(path.string() + ": " + err.what());
  }
}

std::string events_to_csv(const EventSet& e) {
  std::string out = "event,row,col,energy\n";
  char line[96];
  const auto cells = e.geometry.cells();
  for (std::size_t k = 0; k < e.n_events(); ++k) {
    const auto ev = e.event(k);
    for (std::size_t i = 0; i < cells; ++i) {
      if (ev[i] == 0.0) continue;
      std::snprintf(line, sizeof line, "%zu,%zu,%zu,%.9g\n", k, i / e.geometry.n_cols,
                    i % e.geometry.n_cols, ev[i]);
      out += line;
    }
  }
  return out;
}

std::string coefficients_to_csv(const DetectorGeometry& geom, std::span<const double> a) {
  if (a.size() != geom.cells())
    throw ArgumentError("coefficient count does not match the geometry");
  std::string out = "row,col,a,A\n";
  char line[96];
  for (int r = 0; r < geom.n_rows; ++r) {
    for (int c = 0; c < geom.n_cols; ++c) {
      const double v = a[geom.index(r, c)];
      std::snprintf(line, sizeof line, "%d,%d,%.9g,%.9g\n", r, c, v, 1.0 / v);
      out += line;
    }
  }
  return out;
}

AgingProfile coefficients_from_csv(const std::string& text, const DetectorGeometry& geom) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "row,col,a,A")
    throw FormatError("coefficient CSV must start with 'row,col,a,A'");
  AgingProfile p;
  p.a.assign(geom.cells(), 0.0);
  std::vector<bool> seen(geom.cells(), false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int r = -1;
    int c = -1;
    double a = 0.0;
    double big_a = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &r, &c, &a, &big_a) != 4)
      throw FormatError("coefficient CSV line " + std::to_string(lineno) + " is malformed");
    if (r < 0 || c < 0 || r >= geom.n_rows || c >= geom.n_cols)
      throw FormatError("coefficient CSV line " + std::to_string(lineno) + ": cell out of grid");
    if (!(a > 0.0) || !std::isfinite(a))
      throw FormatError("coefficient CSV line " + std::to_string(lineno) + ": a must be positive");
    const auto i = geom.index(r, c);
    if (seen[i]) throw FormatError("coefficient CSV lists cell " + std::to_string(r) + "," +
                                   std::to_string(c) + " twice");
    seen[i] = true;
    p.a[i] = a;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw FormatError("coefficient CSV is missing cell " + std::to_string(i));
  return p;
}

AgingProfile read_coefficients(const std::filesystem::path& path, const DetectorGeometry& geom) {
  try {
    return coefficients_from_csv(read_file(path), geom);
  } catch (const FormatError& err) {
    throw FormatError(path.string() + ": " + err.what());
  }
}

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  return tmp;
}

void write_raw(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  OutputTransaction tx;
  tx.stage(path, content);
  tx.commit();
}

OutputTransaction::~OutputTransaction() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& s : staged_) std::filesystem::remove(s.temp, ec);
}

void OutputTransaction::stage(const std::filesystem::path& path, std::string content) {
  const auto tmp = temp_sibling(path);
  staged_.push_back({path, tmp});
  write_raw(tmp, content);
}

void OutputTransaction::commit() {
  for (const auto& s : staged_) {
    std::error_code ec;
    std::filesystem::rename(s.temp, s.target, ec);
    if (ec) throw IoError("cannot rename " + s.temp.string() + " to " + s.target.string() + ": " +
                          ec.message());
  }
  committed_ = true;
}

}  // namespace calocal
