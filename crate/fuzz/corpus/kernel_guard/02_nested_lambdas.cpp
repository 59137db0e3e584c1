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
