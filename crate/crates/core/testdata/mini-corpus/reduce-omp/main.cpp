#include <cstdio>
#include <cstdint>
#include <vector>
#include <omp.h>

/* Sum reduction over integers; exact, so the check is an equality. */
int64_t reduce_sum(const std::vector<int> &v) {
  int64_t sum = 0;
#pragma omp parallel for reduction(+ : sum)
  for (size_t i = 0; i < v.size(); i++) sum += v[i];
  return sum;
}

int main() {
  const int n = 1 << 20;
  std::vector<int> v(n);
  int64_t expect = 0;
  for (int i = 0; i < n; i++) {
    v[i] = (i * 7) % 13 - 6;
    expect += v[i];
  }
  int64_t got = reduce_sum(v);
  printf("sum = %lld (expected %lld)\n", (long long)got, (long long)expect);
  printf("%s\n", got == expect ? "PASS" : "FAIL");
  return got == expect ? 0 : 1;
}
