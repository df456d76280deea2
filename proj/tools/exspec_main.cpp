#include <cstdio>
int main() { std::printf("exspec placeholder\n"); return 0; }
