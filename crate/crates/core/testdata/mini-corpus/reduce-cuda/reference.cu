#include <cstdint>
#include <vector>

// Host reference used by the original benchmark's optional check.
int64_t reference_sum(const std::vector<int> &v) {
  int64_t s = 0;
  for (int x : v) s += x;
  return s;
}
