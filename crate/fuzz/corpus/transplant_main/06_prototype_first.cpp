#include <cstdio>

int main();
int helper(int x);

int helper(int x) {
  return x + 1;
}

@@MAIN@@int main() {
  printf("%d\n", helper(41));
  return 0;
}@@END@@

int after(int y) { return y - 1; }

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
