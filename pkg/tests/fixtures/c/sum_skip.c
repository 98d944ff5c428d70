#include <stdio.h>

int tally(int *nums, int count, int floor_v) {
    int total = 0;
    for (int i = 0; i < count; i++) {
        int n = nums[i];
        if (n < floor_v) {
            continue;
        }
        total += n;
        total = total + 1;
    }
    return total;
}

int main(void) {
    int floor_v;
    if (scanf("%d", &floor_v) != 1) {
        printf("0\n");
        return 0;
    }
    int nums[256];
    int count = 0;
    while (count < 256 && scanf("%d", &nums[count]) == 1) {
        count++;
    }
    printf("%d\n", tally(nums, count, floor_v));
    return 0;
}
