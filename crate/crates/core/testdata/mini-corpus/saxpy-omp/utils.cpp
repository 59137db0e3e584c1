// Helpers shared by the host driver; not the benchmark's primary logic.
#include <cstdio>

void print_vector(const float *v, int n) {
  for (int i = 0; i < n; ++i) printf("%f\n", v[i]);
}
