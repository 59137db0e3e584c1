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

/* int main() { return 1; } */
const char *decoy = "int main() { return 2; }";
int table[3] = {1, 2, 3};
int main_helper() { return table[2]; }

@@MAIN@@int main() {
  printf("%s %d\n", decoy, main_helper());
  return 0;
}@@END@@
