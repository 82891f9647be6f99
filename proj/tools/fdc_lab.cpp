#include <cstdio>
int main() { std::fprintf(stderr, "unimplemented\n"); return 2; }
