#pragma once
// scalar field on the torus (local-time profiles and gradient-field samples).
// the physical object is the gradient; the height is pinned to spatial mean 0.
// binary format (little-endian): magic "MSAWFLD1", u32 version = 1, u32 d,
// u32 L, u32 tag, u64 seed, then L^d doubles row-major (last axis fastest).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "msaw/torus.hpp"

namespace msaw {

enum class FieldTag : uint32_t {
  exact_gaussian = 1,  // spectral sampler output
  mcmc = 2,            // heat-bath chain output
  dynamics = 3,        // walk environment (initial law or final local time)
};

struct TorusField {
  Torus torus;
  FieldTag tag = FieldTag::exact_gaussian;
  uint64_t seed = 0;
  std::vector<double> values;  // size torus.volume()

  TorusField() = default;
  TorusField(const Torus& t, FieldTag tg, uint64_t sd)
      : torus(t), tag(tg), seed(sd), values(size_t(t.volume()), 0.0) {}

  double mean() const;
  void re_center();  // subtract the spatial mean

  // gradient across directed edge j at site i: values[i] - values[nb_j(i)]
  double grad_edge(int64_t site, int j) const {
    return values[size_t(site)] - values[size_t(torus.neighbor_edge(site, j))];
  }
};

void save_field(const TorusField& f, const std::string& path);
TorusField load_field(const std::string& path);
void save_field_csv(const TorusField& f, const std::string& path);

// raw stream forms of the same binary layout, used by composite checkpoint
// files that embed a field after their own header
void write_field_stream(const TorusField& f, std::ostream& os);
TorusField read_field_stream(std::istream& is);

}  // namespace msaw
