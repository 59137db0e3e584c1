#include <cstdio>

/* int main() { return 1; } */
const char *decoy = "int main() { return 2; }";
int table[3] = {1, 2, 3};
int main_helper() { return table[2]; }

@@MAIN@@int main() {
  printf("%s %d\n", decoy, main_helper());
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
