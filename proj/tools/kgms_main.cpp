#include <cstdio>
int main(){ std::puts("kgms"); return 0; }
