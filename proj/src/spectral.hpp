// Direct DFTs on small periodic grids. Coefficients follow the dθ/(2π)
// convention: c_n = (1/G) Σ_m f_m e^{−inθ_m}, f_m = Σ_n c_n e^{inθ_m}.

#pragma once

#include <complex>
#include <vector>

namespace swarmkin::spectral {

using Complex = std::complex<double>;

/// Signed wavenumber of DFT index m on G points, in [−G/2, G/2).
inline int wavenumber(int m, int g) { return m < (g + 1) / 2 ? m : m - g; }

/// Wavenumber used for derivatives: the Nyquist mode of an even grid maps to 0.
inline int derivative_wavenumber(int m, int g) {
  if (g % 2 == 0 && m == g / 2) return 0;
  return wavenumber(m, g);
}

/// In-place transform along `axis` of a dims-dimensional G^dims array
/// (row-major, last axis fastest).
void transform_axis(std::vector<Complex>& data, int dims, int g, int axis, bool inverse);

/// Transform along every axis.
void transform(std::vector<Complex>& data, int dims, int g, bool inverse);

}  // namespace swarmkin::spectral
