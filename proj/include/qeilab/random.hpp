#ifndef QEILAB_RANDOM_HPP
#define QEILAB_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace qeilab {

// Seeded generator with a fixed Box-Muller transform. std::mt19937_64 is
// bit-exact across platforms; the distributions in <random> are not, so we
// roll the normal sampler ourselves to keep artifacts byte-reproducible.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0,1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  std::vector<std::complex<double>> complex_normal_vector(std::size_t n) {
    std::vector<std::complex<double>> v(n);
    for (auto& z : v) z = complex_normal();
    return v;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qeilab

#endif
