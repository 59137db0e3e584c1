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
