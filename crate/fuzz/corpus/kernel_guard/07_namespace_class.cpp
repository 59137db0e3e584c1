#include <cstdio>

namespace kernels {
int add(int a, int b) { return a + b; }
namespace detail {
int twice(int a) { return add(a, a); }
}
}

struct Runner {
  int main() { return kernels::detail::twice(3); }
};

class Other {
 public:
  int run() const { return 5; }
};

@@MAIN@@int main() {
  Runner r;
  Other o;
  printf("%d %d\n", r.main(), o.run());
  return 0;
}@@END@@

//----
#include <cstdio>

namespace kernels {
int add(int a, int b) { return a + b; }
namespace detail {
int twice(int a) { return add(a, a); }
}
}

struct Runner {
  int main() { return kernels::detail::twice(3); }
};

class Other {
 public:
  int run() const { return 5; }
};

@@MAIN@@int main() {
  Runner r;
  Other o;
  printf("%d %d\n", r.main(), o.run());
  return 0;
}@@END@@
