#include <cstdio>
int main() { std::puts("epod"); return 0; }
