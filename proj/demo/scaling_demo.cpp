// Draws f_n^[2] along the scaling subsequence and prints how the measured
// chord ratio and aspect ratio approach their closed forms.

#include <cstdio>
#include <numbers>

#include "fibfrac/fibfrac.hpp"

int main() {
  using namespace fibfrac;
  const double alpha = std::numbers::pi / 3;
  std::printf("alpha = pi/3   r+ = %.12f   aspect limit = %.12f\n", characteristic_roots(alpha).plus,
              aspect_limit(alpha));
  double prev = 0;
  for (int k = 0; k <= 4; ++k) {
    const int n = scaling_order(2, k);
    const CurveStats s = curve_stats(draw_fibonacci(2, n, alpha));
    std::printf("n = %2d  width = %14.6f  ratio = %.12f  aspect = %.9f\n", n, s.width, prev > 0 ? s.width / prev : 0.0,
                s.aspect);
    prev = s.width;
  }
  const Ifs f = derive_ifs(2, alpha);
  std::printf("derived contraction %.15f vs R = %.15f\n", f.ratio, scaling_ratio(alpha));
}
