#include <stdio.h>

int cell(int i, int j, int base) {
    int value = i * j + base;
    if (value % 2 == 0 && value > 4) {
        value = value + 2;
    }
    return value;
}

int main(void) {
    int size;
    int base;
    if (scanf("%d %d", &size, &base) != 2) {
        return 1;
    }
    for (int i = 1; i <= size; i++) {
        int row = 0;
        for (int j = 1; j <= size; j++) {
            row += cell(i, j, base);
        }
        printf("%d\n", row);
    }
    return 0;
}
