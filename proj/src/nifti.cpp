#include "rpci/nifti.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <zlib.h>

#include "rpci/fileio.hpp"

namespace rpci {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kDataOffset = 352;

constexpr std::int16_t kUint8 = 2;
constexpr std::int16_t kInt16 = 4;
constexpr std::int16_t kFloat32 = 16;
constexpr std::int16_t kUint16 = 512;

// Field offsets within the 348-byte header.
constexpr std::size_t kDim = 40;
constexpr std::size_t kDatatype = 70;
constexpr std::size_t kBitpix = 72;
constexpr std::size_t kPixdim = 76;
constexpr std::size_t kVoxOffset = 108;
constexpr std::size_t kSclSlope = 112;
constexpr std::size_t kSclInter = 116;
constexpr std::size_t kXyztUnits = 123;
constexpr std::size_t kQformCode = 252;
constexpr std::size_t kSformCode = 254;
constexpr std::size_t kQuaternB = 256;
constexpr std::size_t kQoffsetX = 268;
constexpr std::size_t kSrowX = 280;
constexpr std::size_t kMagic = 344;

template <typename T>
T byteswap_value(T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

class HeaderReader {
 public:
  HeaderReader(const unsigned char* bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    T v;
    std::memcpy(&v, bytes_ + offset, sizeof(T));
    return swap_ ? byteswap_value(v) : v;
  }

 private:
  const unsigned char* bytes_;
  bool swap_;
};

class HeaderWriter {
 public:
  HeaderWriter() : bytes_(kDataOffset, 0) {}

  template <typename T>
  void put(std::size_t offset, T v) {
    if constexpr (std::endian::native == std::endian::big) v = byteswap_value(v);
    std::memcpy(bytes_.data() + offset, &v, sizeof(T));
  }
  const std::vector<unsigned char>& bytes() const { return bytes_; }

 private:
  std::vector<unsigned char> bytes_;
};

std::vector<unsigned char> read_all(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  // gzread passes uncompressed files through unchanged.
  std::unique_ptr<gzFile_s, decltype(&gzclose)> file(gzopen(path.c_str(), "rb"), &gzclose);
  if (!file) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> out;
  std::vector<unsigned char> chunk(1 << 20);
  for (;;) {
    const int n = gzread(file.get(), chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int err = 0;
      throw IoError("decompression failed for " + path.string() + ": " + gzerror(file.get(), &err));
    }
    if (n == 0) break;
    out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  }
  return out;
}

struct Decoded {
  Grid grid;
  std::int16_t datatype = 0;
  float slope = 0.0f;
  float inter = 0.0f;
  bool swap = false;
  std::size_t data_offset = 0;
};

Eigen::Matrix3d quaternion_rotation(double b, double c, double d, double qfac) {
  double a = 1.0 - (b * b + c * c + d * d);
  if (a < 1e-7) {
    // b, c, d already unit length: 180 degree rotation.
    const double norm = std::sqrt(b * b + c * c + d * d);
    b /= norm;
    c /= norm;
    d /= norm;
    a = 0.0;
  } else {
    a = std::sqrt(a);
  }
  Eigen::Matrix3d r;
  r << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),  //
      2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b),   //
      2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b;
  r.col(2) *= qfac;
  return r;
}

Decoded decode_header(const std::vector<unsigned char>& file, const fs::path& path) {
  if (file.size() < kHeaderSize) throw ValidationError("malformed header: file too short: " + path.string());
  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, file.data(), 4);
  Decoded out;
  if (sizeof_hdr == static_cast<std::int32_t>(kHeaderSize)) {
    out.swap = false;
  } else if (byteswap_value(sizeof_hdr) == static_cast<std::int32_t>(kHeaderSize)) {
    out.swap = true;
  } else {
    throw ValidationError("malformed header: sizeof_hdr != 348 in " + path.string());
  }
  if (std::memcmp(file.data() + kMagic, "n+1\0", 4) != 0) {
    throw ValidationError("malformed header: magic is not \"n+1\" (single-file NIfTI-1 required): " + path.string());
  }
  const HeaderReader h(file.data(), out.swap);

  const auto ndim = h.get<std::int16_t>(kDim);
  if (ndim < 3 || ndim > 7) throw ValidationError("malformed header: dim[0] must be 3..7");
  Index3 dims;
  for (int a = 0; a < 3; ++a) dims[a] = h.get<std::int16_t>(kDim + 2 * (a + 1));
  for (int a = 3; a < ndim; ++a) {
    if (h.get<std::int16_t>(kDim + 2 * (a + 1)) > 1) throw ValidationError("unsupported: volumes beyond 3D");
  }
  if ((dims.array() <= 0).any()) throw ValidationError("malformed header: non-positive dims");

  out.datatype = h.get<std::int16_t>(kDatatype);
  const auto bitpix = h.get<std::int16_t>(kBitpix);
  int expected_bits = 0;
  switch (out.datatype) {
    case kUint8: expected_bits = 8; break;
    case kInt16:
    case kUint16: expected_bits = 16; break;
    case kFloat32: expected_bits = 32; break;
    default: throw ValidationError("unsupported datatype code " + std::to_string(out.datatype));
  }
  if (bitpix != expected_bits) throw ValidationError("malformed header: bitpix does not match datatype");

  std::array<double, 4> pixdim{};
  for (int a = 0; a < 4; ++a) pixdim[a] = h.get<float>(kPixdim + 4 * a);
  const auto vox_offset = h.get<float>(kVoxOffset);
  if (!(vox_offset >= static_cast<float>(kHeaderSize))) throw ValidationError("malformed header: vox_offset < 348");
  out.data_offset = static_cast<std::size_t>(vox_offset);
  out.slope = h.get<float>(kSclSlope);
  out.inter = h.get<float>(kSclInter);

  Grid grid;
  grid.dims = dims;
  const auto qform_code = h.get<std::int16_t>(kQformCode);
  const auto sform_code = h.get<std::int16_t>(kSformCode);
  Eigen::Vector3d spacing(std::abs(pixdim[1]), std::abs(pixdim[2]), std::abs(pixdim[3]));
  if (sform_code > 0) {
    Eigen::Matrix3d m;
    Eigen::Vector3d t;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) m(row, col) = h.get<float>(kSrowX + 16 * row + 4 * col);
      t[row] = h.get<float>(kSrowX + 16 * row + 12);
    }
    for (int col = 0; col < 3; ++col) {
      const double norm = m.col(col).norm();
      if (!(norm > 0.0)) throw ValidationError("malformed header: degenerate sform");
      // pixdim is authoritative when it agrees with the sform column length.
      if (std::abs(norm - spacing[col]) > 1e-4 * norm) spacing[col] = norm;
      m.col(col) /= spacing[col];
    }
    grid.spacing = Spacing(spacing);
    grid.transform.origin = t;
    grid.transform.direction = m;
  } else if (qform_code > 0) {
    const double qfac = pixdim[0] < 0 ? -1.0 : 1.0;
    grid.spacing = Spacing(spacing);
    grid.transform.direction =
        quaternion_rotation(h.get<float>(kQuaternB), h.get<float>(kQuaternB + 4), h.get<float>(kQuaternB + 8), qfac);
    grid.transform.origin =
        Eigen::Vector3d(h.get<float>(kQoffsetX), h.get<float>(kQoffsetX + 4), h.get<float>(kQoffsetX + 8));
  } else {
    for (int a = 0; a < 3; ++a) {
      if (!(spacing[a] > 0.0)) spacing[a] = 1.0;
    }
    grid.spacing = Spacing(spacing);
  }
  grid.transform.validate();
  out.grid = grid;

  const std::size_t need = out.data_offset + grid.voxel_count() * static_cast<std::size_t>(expected_bits / 8);
  if (file.size() < need) throw ValidationError("malformed file: voxel data truncated in " + path.string());
  return out;
}

template <typename Raw>
Raw raw_at(const unsigned char* base, std::size_t i, bool swap) {
  Raw v;
  std::memcpy(&v, base + i * sizeof(Raw), sizeof(Raw));
  return swap ? byteswap_value(v) : v;
}

template <typename Out, typename Convert>
std::vector<Out> decode_voxels(const std::vector<unsigned char>& file, const Decoded& d, Convert convert) {
  const std::size_t n = d.grid.voxel_count();
  const unsigned char* base = file.data() + d.data_offset;
  std::vector<Out> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (d.datatype) {
      case kUint8: out[i] = convert(static_cast<double>(base[i])); break;
      case kInt16: out[i] = convert(static_cast<double>(raw_at<std::int16_t>(base, i, d.swap))); break;
      case kUint16: out[i] = convert(static_cast<double>(raw_at<std::uint16_t>(base, i, d.swap))); break;
      case kFloat32: out[i] = convert(static_cast<double>(raw_at<float>(base, i, d.swap))); break;
      default: break;
    }
  }
  return out;
}

std::vector<unsigned char> encode_header(const Grid& grid, std::int16_t datatype, std::int16_t bitpix) {
  HeaderWriter h;
  h.put<std::int32_t>(0, static_cast<std::int32_t>(kHeaderSize));
  h.put<std::int16_t>(kDim, 3);
  for (int a = 0; a < 3; ++a) h.put<std::int16_t>(kDim + 2 * (a + 1), static_cast<std::int16_t>(grid.dims[a]));
  for (int a = 4; a < 8; ++a) h.put<std::int16_t>(kDim + 2 * a, 1);
  h.put<std::int16_t>(kDatatype, datatype);
  h.put<std::int16_t>(kBitpix, bitpix);

  const Eigen::Matrix3d& dir = grid.transform.direction;
  const double qfac = dir.determinant() < 0 ? -1.0 : 1.0;
  Eigen::Matrix3d rot = dir;
  rot.col(2) *= qfac;
  Eigen::Quaterniond q(rot);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;

  h.put<float>(kPixdim, static_cast<float>(qfac));
  for (int a = 0; a < 3; ++a) h.put<float>(kPixdim + 4 * (a + 1), static_cast<float>(grid.spacing[a]));
  for (int a = 4; a < 8; ++a) h.put<float>(kPixdim + 4 * a, 1.0f);
  h.put<float>(kVoxOffset, static_cast<float>(kDataOffset));
  h.put<float>(kSclSlope, 0.0f);
  h.put<float>(kSclInter, 0.0f);
  h.put<std::uint8_t>(kXyztUnits, 2);  // mm
  h.put<std::int16_t>(kQformCode, 1);
  h.put<std::int16_t>(kSformCode, 1);
  h.put<float>(kQuaternB, static_cast<float>(q.x()));
  h.put<float>(kQuaternB + 4, static_cast<float>(q.y()));
  h.put<float>(kQuaternB + 8, static_cast<float>(q.z()));
  for (int a = 0; a < 3; ++a) h.put<float>(kQoffsetX + 4 * a, static_cast<float>(grid.transform.origin[a]));
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      h.put<float>(kSrowX + 16 * row + 4 * col, static_cast<float>(dir(row, col) * grid.spacing[col]));
    }
    h.put<float>(kSrowX + 16 * row + 12, static_cast<float>(grid.transform.origin[row]));
  }
  std::vector<unsigned char> bytes = h.bytes();
  std::memcpy(bytes.data() + kMagic, "n+1\0", 4);
  return bytes;
}

bool wants_gzip(const fs::path& path) { return path.extension() == ".gz"; }

void write_bytes(const fs::path& path, const std::vector<unsigned char>& header, const void* data, std::size_t nbytes) {
  write_atomically(path, [&](const fs::path& tmp) {
    if (wants_gzip(path)) {
      std::unique_ptr<gzFile_s, decltype(&gzclose)> file(gzopen(tmp.c_str(), "wb6"), &gzclose);
      if (!file) throw IoError("cannot open " + tmp.string() + " for writing");
      const auto* p = static_cast<const unsigned char*>(data);
      if (gzwrite(file.get(), header.data(), static_cast<unsigned>(header.size())) != static_cast<int>(header.size())) {
        throw IoError("gzip write failed: " + tmp.string());
      }
      constexpr std::size_t kChunk = 1 << 24;
      for (std::size_t off = 0; off < nbytes; off += kChunk) {
        const auto n = static_cast<unsigned>(std::min(kChunk, nbytes - off));
        if (gzwrite(file.get(), p + off, n) != static_cast<int>(n)) throw IoError("gzip write failed: " + tmp.string());
      }
      if (gzclose(file.release()) != Z_OK) throw IoError("gzip close failed: " + tmp.string());
    } else {
      std::unique_ptr<std::FILE, decltype(&std::fclose)> file(std::fopen(tmp.c_str(), "wb"), &std::fclose);
      if (!file) throw IoError("cannot open " + tmp.string() + " for writing");
      if (std::fwrite(header.data(), 1, header.size(), file.get()) != header.size() ||
          std::fwrite(data, 1, nbytes, file.get()) != nbytes) {
        throw IoError("write failed: " + tmp.string());
      }
      if (std::fclose(file.release()) != 0) throw IoError("close failed: " + tmp.string());
    }
  });
}

template <typename T>
std::vector<T> to_little_endian(std::span<const T> values) {
  std::vector<T> out(values.begin(), values.end());
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : out) v = byteswap_value(v);
  }
  return out;
}

}  // namespace

ScalarVolume read_scalar_volume(const fs::path& path) {
  const auto file = read_all(path);
  const Decoded d = decode_header(file, path);
  const bool scaled = d.slope != 0.0f && std::isfinite(d.slope) && !(d.slope == 1.0f && d.inter == 0.0f);
  const double slope = d.slope;
  const double inter = d.inter;
  auto data = decode_voxels<float>(file, d, [&](double v) {
    return static_cast<float>(scaled ? v * slope + inter : v);
  });
  return ScalarVolume(d.grid, std::move(data));
}

LabelVolume read_label_volume(const fs::path& path) {
  const auto file = read_all(path);
  const Decoded d = decode_header(file, path);
  if (d.datatype == kFloat32) throw ValidationError("unsupported datatype for labels: float32");
  auto data = decode_voxels<Label>(file, d, [](double v) {
    if (v < 0 || v > kMaxStoredLabel) {
      throw ValidationError("label out of range: " + std::to_string(static_cast<long>(v)));
    }
    return static_cast<Label>(v);
  });
  return LabelVolume(d.grid, std::move(data));
}

void write_volume(const ScalarVolume& volume, const fs::path& path) {
  const auto header = encode_header(volume.grid(), kFloat32, 32);
  const auto data = to_little_endian(volume.data());
  write_bytes(path, header, data.data(), data.size() * sizeof(float));
}

void write_volume(const LabelVolume& volume, const fs::path& path) {
  validate_labels(volume);
  const auto header = encode_header(volume.grid(), kUint8, 8);
  write_bytes(path, header, volume.data().data(), volume.size());
}

}  // namespace rpci
