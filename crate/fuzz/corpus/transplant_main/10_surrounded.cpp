#include <cstdio>

extern "C" {
int c_api(int x) { return x * 3; }
}

struct Vec2 {
  float x, y;
};

Vec2 operator+(Vec2 a, Vec2 b) { return Vec2{a.x + b.x, a.y + b.y}; }

static inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

@@MAIN@@int main(int argc, char **argv) {
  (void)argv;
  Vec2 s = Vec2{1, 2} + Vec2{3, 4};
  if (argc > 5) {
    return clampi(c_api(argc), 0, 9);
  }
  printf("%f %f\n", s.x, s.y);
  return 0;
}@@END@@

enum class Mode { Fast, Slow };

int trailing(Mode m) { return m == Mode::Fast ? 1 : 0; }

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
