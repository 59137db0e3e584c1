#include <cstdio>
#ifdef _OPENMP
#include <omp.h>
#endif
#define BLOCK_OPEN {
#define SQR(x) ((x) * (x))

void work(double *a, int n) {
#pragma omp parallel for
  for (int i = 0; i < n; i++) a[i] = SQR(i);
}

@@MAIN@@int main() {
  double a[8];
#ifdef _OPENMP
  printf("threads %d\n", omp_get_max_threads());
#endif
  work(a, 8);
#if 0
  printf("never\n");
#endif
  printf("%f\n", a[7]);
  return 0;
}@@END@@
