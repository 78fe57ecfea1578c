#include <cstdio>
int main() { std::puts("reebcert"); return 0; }
