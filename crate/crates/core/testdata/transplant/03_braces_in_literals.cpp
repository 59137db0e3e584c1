#include <cstdio>

const char *banner() { return "{ not a block }"; }

@@MAIN@@int main() {
  const char *open = "{{{";
  char close = '}';
  /* a stray } in a comment */
  // and another {
  const char *raw = R"x(}}})x";
  printf("%s %c %s %s\n", open, close, raw, banner());
  return 0;
}@@END@@
