#include <cstdio>
int main(){ printf("qest\n"); }
