#include "spectral.hpp"

#include <cmath>
#include <numbers>

namespace swarmkin::spectral {

void transform_axis(std::vector<Complex>& data, int dims, int g, int axis, bool inverse) {
  const auto G = static_cast<std::size_t>(g);
  std::size_t stride = 1;
  for (int d = axis + 1; d < dims; ++d) stride *= G;
  const std::size_t block = stride * G;

  std::vector<Complex> twiddle(G);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t m = 0; m < G; ++m) {
    const double a = sign * 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(g);
    twiddle[m] = Complex(std::cos(a), std::sin(a));
  }
  const double scale = inverse ? 1.0 : 1.0 / static_cast<double>(g);

  std::vector<Complex> line(G), out(G);
  for (std::size_t base = 0; base < data.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (std::size_t m = 0; m < G; ++m) line[m] = data[base + off + m * stride];
      for (std::size_t k = 0; k < G; ++k) {
        Complex acc = 0.0;
        std::size_t idx = 0;
        for (std::size_t m = 0; m < G; ++m) {
          acc += line[m] * twiddle[idx];
          idx += k;
          if (idx >= G) idx -= G;
        }
        out[k] = acc * scale;
      }
      for (std::size_t k = 0; k < G; ++k) data[base + off + k * stride] = out[k];
    }
  }
}

void transform(std::vector<Complex>& data, int dims, int g, bool inverse) {
  for (int axis = 0; axis < dims; ++axis) transform_axis(data, dims, g, axis, inverse);
}

}  // namespace swarmkin::spectral
