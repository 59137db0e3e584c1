#include <cmath>
#include <cstdio>
#include <vector>

// 1-D three-point stencil, repeated for a few sweeps.
#define N 4096
#define SWEEPS 8

void stencil(const double *in, double *out, int n) {
#pragma omp parallel for \
    schedule(static)
  for (int i = 1; i < n - 1; i++) {
    out[i] = 0.25 * in[i - 1] + 0.5 * in[i] + 0.25 * in[i + 1];
  }
  out[0] = in[0];         /* fixed boundary */
  out[n - 1] = in[n - 1]; /* fixed boundary */
}

int main() {
  std::vector<double> a(N), b(N), ref(N), tmp(N);
  for (int i = 0; i < N; i++) a[i] = ref[i] = std::sin(i * 0.01);
  for (int s = 0; s < SWEEPS; s++) {
    stencil(a.data(), b.data(), N);
    a.swap(b);
    // host reference
    for (int i = 1; i < N - 1; i++)
      tmp[i] = 0.25 * ref[i - 1] + 0.5 * ref[i] + 0.25 * ref[i + 1];
    tmp[0] = ref[0];
    tmp[N - 1] = ref[N - 1];
    ref.swap(tmp);
  }
  double diff = 0.0;
  for (int i = 0; i < N; i++) diff = std::fmax(diff, std::fabs(a[i] - ref[i]));
  printf("max diff %g\n", diff);
  printf("%s\n", diff < 1e-12 ? "PASS" : "FAIL");
  return diff < 1e-12 ? 0 : 1;
}
