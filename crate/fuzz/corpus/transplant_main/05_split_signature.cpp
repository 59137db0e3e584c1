#include <cstdio>

template <typename T>
T square(T v) {
  return v * v;
}

@@MAIN@@int
main /* entry */ (void)
{
  printf("%d\n", square(7));
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
