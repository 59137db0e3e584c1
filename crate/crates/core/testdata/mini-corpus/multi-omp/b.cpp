#include <cstdio>
int part_a();
int main() { printf("%s\n", part_a() == 1 ? "PASS" : "FAIL"); return 0; }
