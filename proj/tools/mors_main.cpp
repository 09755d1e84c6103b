#include <cstdio>

#include "mors/mors.hpp"

int main() {
    std::puts("mors: cli not wired yet");
    return 1;
}
