#include <cmath>
#include <cstdio>
#include <vector>

/* Dense matrix multiply, offloaded when a device is present. */
void matmul(const float *a, const float *b, float *c, int n) {
#pragma omp target teams distribute parallel for collapse(2) map(to : a[0 : n * n], b[0 : n * n]) map(from : c[0 : n * n])
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      float acc = 0.0f;
      for (int k = 0; k < n; k++) acc += a[i * n + k] * b[k * n + j];
      c[i * n + j] = acc;
    }
}

int main() {
  const int n = 128;
  std::vector<float> a(n * n), b(n * n), c(n * n);
  for (int i = 0; i < n * n; i++) {
    a[i] = (i % 7) * 0.25f;
    b[i] = (i % 5) * 0.5f;
  }
  matmul(a.data(), b.data(), c.data(), n);
  int bad = 0;
  for (int i = 0; i < n; i += 9)
    for (int j = 0; j < n; j += 11) {
      float acc = 0.0f;
      for (int k = 0; k < n; k++) acc += a[i * n + k] * b[k * n + j];
      if (std::fabs(acc - c[i * n + j]) > 1e-3f) bad++;
    }
  printf("%s\n", bad == 0 ? "PASS" : "FAIL");
  return bad == 0 ? 0 : 1;
}
