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
