// Reads "v1_re v1_im v2_re v2_im" lines and answers with the inverter table
// current on the positive sequence, nothing on the negative sequence.
// With the argument "garbage" it answers every request with an unparsable line.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <numbers>
#include <string>

namespace {

struct Row {
  double v, i, a;
};

constexpr Row kRows[] = {{1.00, 0.90, 0.00},   {0.90, 1.04, -16.70}, {0.80, 1.20, -30.00}, {0.70, 1.20, -48.59},
                         {0.60, 1.20, -90.00}, {0.50, 1.20, -90.00}, {0.40, 1.20, -90.00}, {0.30, 1.20, -90.00},
                         {0.20, 1.20, -90.00}, {0.10, 1.20, -90.00}};
constexpr int kCount = sizeof kRows / sizeof kRows[0];

std::complex<double> current(std::complex<double> v) {
  const double r = std::abs(v);
  double m = kRows[kCount - 1].i, a = kRows[kCount - 1].a;
  if (r >= kRows[0].v) {
    m = kRows[0].i;
    a = kRows[0].a;
  } else {
    for (int k = 0; k + 1 < kCount; ++k)
      if (r <= kRows[k].v && r > kRows[k + 1].v) {
        const double w = (r - kRows[k + 1].v) / (kRows[k].v - kRows[k + 1].v);
        m = kRows[k + 1].i + w * (kRows[k].i - kRows[k + 1].i);
        a = kRows[k + 1].a + w * (kRows[k].a - kRows[k + 1].a);
        break;
      }
  }
  const double base = r > 0 ? std::arg(v) : 0.0;
  return std::polar(m, base + a * std::numbers::pi / 180.0);
}

}  // namespace

int main(int argc, char** argv) {
  const bool garbage = argc > 1 && std::strcmp(argv[1], "garbage") == 0;
  double a, b, c, d;
  while (std::cin >> a >> b >> c >> d) {
    if (garbage) {
      std::cout << "not a number" << std::endl;
      continue;
    }
    const std::complex<double> i = current({a, b});
    std::printf("%.17g %.17g 0 0\n", i.real(), i.imag());
    std::fflush(stdout);
  }
  return 0;
}
