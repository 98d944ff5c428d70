#include <stdio.h>

int clip(int value, int lo, int hi) {
    if (value < lo) {
        return lo;
    }
    if (value > hi) {
        return hi;
    }
    return value;
}

int main(void) {
    int lo;
    int hi;
    if (scanf("%d %d", &lo, &hi) != 2) {
        return 1;
    }
    int acc = 0;
    int v;
    while (scanf("%d", &v) == 1) {
        int c = clip(v, lo, hi);
        acc += c;
        printf("%d\n", c);
    }
    printf("sum %d\n", acc);
    return 0;
}
