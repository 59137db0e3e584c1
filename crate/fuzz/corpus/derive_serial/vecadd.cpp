// Element-wise vector addition.
#include <cstdio>
#include <cstdlib>
#include <vector>
#include <omp.h>

/* Problem size; small enough for a quick self-check. */
#define N 100000

void vecadd(const float *a, const float *b, float *c, int n) {
  #pragma omp parallel for
  for (int i = 0; i < n; i++) {
    c[i] = a[i] + b[i]; // one add per element
  }
}

int main() {
  std::vector<float> a(N), b(N), c(N);
  for (int i = 0; i < N; i++) {
    a[i] = i * 0.5f;
    b[i] = /* mirrored */ (N - i) * 0.5f;
  }
  vecadd(a.data(), b.data(), c.data(), N);
  /*
   * Every element should equal N / 2.
   */
  bool ok = true;
  for (int i = 0; i < N; i++) {
    if (c[i] != N * 0.5f) { ok = false; break; }
  }
  printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
