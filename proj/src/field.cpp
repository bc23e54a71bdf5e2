#include "msaw/field.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "msaw/stats.hpp"

static_assert(std::endian::native == std::endian::little,
              "field i/o assumes a little-endian host");

namespace msaw {

namespace {
constexpr char kMagic[8] = {'M', 'S', 'A', 'W', 'F', 'L', 'D', '1'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& x) {
  is.read(reinterpret_cast<char*>(&x), sizeof(T));
}
}  // namespace

double TorusField::mean() const {
  KahanSum s;
  for (double v : values) s.add(v);
  return s.value() / double(values.size());
}

void TorusField::re_center() {
  const double m = mean();
  for (double& v : values) v -= m;
}

void write_field_stream(const TorusField& f, std::ostream& os) {
  if (f.values.size() != size_t(f.torus.volume()))
    throw std::invalid_argument("write_field_stream: value count does not match torus");
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, uint32_t(f.torus.d));
  put(os, uint32_t(f.torus.L));
  put(os, uint32_t(f.tag));
  put(os, f.seed);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           std::streamsize(f.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_field_stream: write failed");
}

TorusField read_field_stream(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_field_stream: bad magic");
  uint32_t version = 0, d = 0, L = 0, tag = 0;
  uint64_t seed = 0;
  get(is, version);
  get(is, d);
  get(is, L);
  get(is, tag);
  get(is, seed);
  if (!is || version != kVersion) throw std::runtime_error("read_field_stream: unsupported version");
  if (tag < 1 || tag > 3) throw std::runtime_error("read_field_stream: bad tag");
  TorusField f(Torus(int(d), int(L)), FieldTag(tag), seed);
  is.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(f.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_field_stream: truncated payload");
  return f;
}

void save_field(const TorusField& f, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_field: cannot open " + tmp);
    try {
      write_field_stream(f, os);
    } catch (...) {
      os.close();
      std::remove(tmp.c_str());
      throw;
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("save_field: rename failed for " + path);
}

TorusField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  try {
    return read_field_stream(is);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(e.what()) + " in " + path);
  }
}

void save_field_csv(const TorusField& f, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("save_field_csv: cannot open " + tmp);
    for (int a = 0; a < f.torus.d; ++a) os << "x" << (a + 1) << ",";
    os << "value\n";
    int x[kMaxDim];
    char buf[64];
    for (int64_t i = 0; i < f.torus.volume(); ++i) {
      f.torus.coords(i, x);
      for (int a = 0; a < f.torus.d; ++a) os << x[a] << ",";
      std::snprintf(buf, sizeof(buf), "%.17g", f.values[size_t(i)]);
      os << buf << "\n";
    }
    if (!os) throw std::runtime_error("save_field_csv: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("save_field_csv: rename failed for " + path);
}

}  // namespace msaw
