#include <cmath>
#include <cstdio>
#include <vector>

// y = a*x + y on the host threads.
static void saxpy(int n, float a, const float *x, float *y) {
#pragma omp parallel for simd
  for (int i = 0; i < n; ++i)
    y[i] = a * x[i] + y[i];
}

int main() {
  const int n = 1 << 18;
  const float a = 2.0f;
  std::vector<float> x(n), y(n), expect(n);
  for (int i = 0; i < n; ++i) {
    x[i] = static_cast<float>(i % 17);
    y[i] = static_cast<float>(i % 5);
    expect[i] = a * x[i] + y[i];
  }
  saxpy(n, a, x.data(), y.data());
  int bad = 0;
  for (int i = 0; i < n; ++i)
    if (std::fabs(y[i] - expect[i]) > 1e-5f) ++bad;
  if (bad == 0) printf("PASS\n");
  else printf("FAIL: %d mismatches\n", bad);
  return bad == 0 ? 0 : 1;
}
