#include <cstdio>
#include <vector>
#include <omp.h>

#define BINS 64

void histogram(const unsigned *data, int n, unsigned *hist) {
#pragma omp parallel for
  for (int i = 0; i < n; i++) {
#pragma omp atomic
    hist[data[i] % BINS]++;
  }
}

int main() {
  const int n = 1 << 20;
  std::vector<unsigned> data(n);
  unsigned seed = 12345u;
  for (int i = 0; i < n; i++) {
    seed = seed * 1103515245u + 12345u; // LCG
    data[i] = seed >> 8;
  }
  std::vector<unsigned> hist(BINS, 0), ref(BINS, 0);
  histogram(data.data(), n, hist.data());
  for (int i = 0; i < n; i++) ref[data[i] % BINS]++;
  bool ok = hist == ref;
  printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
