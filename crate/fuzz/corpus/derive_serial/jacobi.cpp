#include <cmath>
#include <cstdio>
#include <vector>
#ifdef _OPENMP
#include <omp.h>
#endif

// Jacobi relaxation on a 2-D grid with fixed boundary values.
const int NX = 128, NY = 128, ITERS = 50;

double sweep(const std::vector<double> &u, std::vector<double> &v) {
  double delta = 0.0;
#pragma omp parallel for reduction(max : delta)
  for (int j = 1; j < NY - 1; j++)
    for (int i = 1; i < NX - 1; i++) {
      double nv = 0.25 * (u[j * NX + i - 1] + u[j * NX + i + 1] + u[(j - 1) * NX + i] + u[(j + 1) * NX + i]);
      delta = std::fmax(delta, std::fabs(nv - u[j * NX + i]));
      v[j * NX + i] = nv;
    }
  return delta;
}

int main() {
#ifdef _OPENMP
  printf("threads: %d\n", omp_get_max_threads());
#endif
  std::vector<double> u(NX * NY, 0.0), v(NX * NY, 0.0), r(NX * NY, 0.0), s(NX * NY, 0.0);
  for (int i = 0; i < NX; i++) u[i] = v[i] = r[i] = s[i] = 1.0; /* hot top edge */
  double delta = 0.0;
  for (int it = 0; it < ITERS; it++) {
    delta = sweep(u, v);
    u.swap(v);
  }
  for (int it = 0; it < ITERS; it++) {
    for (int j = 1; j < NY - 1; j++)
      for (int i = 1; i < NX - 1; i++)
        s[j * NX + i] = 0.25 * (r[j * NX + i - 1] + r[j * NX + i + 1] + r[(j - 1) * NX + i] + r[(j + 1) * NX + i]);
    r.swap(s);
  }
  double diff = 0.0;
  for (int k = 0; k < NX * NY; k++) diff = std::fmax(diff, std::fabs(u[k] - r[k]));
  printf("last delta %g, diff %g\n", delta, diff);
  printf("%s\n", diff < 1e-12 ? "PASS" : "FAIL");
  return diff < 1e-12 ? 0 : 1;
}
