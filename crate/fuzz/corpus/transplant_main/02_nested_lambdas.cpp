#include <algorithm>
#include <cstdio>
#include <functional>
#include <vector>

static double scale(double x) { return 2.0 * x; }

@@MAIN@@int main() {
  std::vector<int> v{3, 1, 2};
  auto outer = [&](int k) {
    auto inner = [k](int x) { return x * k; };
    std::function<int(int)> twice = [&inner](int x) { return inner(inner(x)); };
    return twice(k);
  };
  std::sort(v.begin(), v.end(), [](int a, int b) { return a > b; });
  struct Local { int f() { return 1; } } loc;
  int total = 0;
  for (int x : v) { if (x > 1) { total += outer(x); } else { total += loc.f(); } }
  printf("%d %f\n", total, scale(1.0));
  return 0;
}@@END@@

//----
#include <cstdio>

void fill(int *a, int n) {
  for (int i = 0; i < n; i++) a[i] = i;
}

@@MAIN@@int main() {
  int a[4];
  fill(a, 4);
  printf("%d\n", a[3]);
  return 0;
}@@END@@
