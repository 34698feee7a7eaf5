#include <iostream>
int main() { std::cout << "srgflow\n"; return 0; }
