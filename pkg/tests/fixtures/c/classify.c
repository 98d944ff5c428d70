#include <stdio.h>

const char *label(int value, int low, int high) {
    if (value < low && value > -100) {
        return "low";
    } else if (value < high) {
        return "mid";
    } else if (value == high) {
        return "edge";
    } else {
        return "high";
    }
}

int main(void) {
    int v;
    while (scanf("%d", &v) == 1) {
        printf("%s\n", label(v, 10, 50));
    }
    return 0;
}
