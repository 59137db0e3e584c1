#include <cstdio>
int part_a() { return 1; }
