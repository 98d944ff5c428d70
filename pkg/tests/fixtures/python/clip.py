import sys


def clip(value, lo, hi):
    if value < lo:
        return lo
    if value > hi:
        return hi
    return value


def main():
    nums = [int(x) for x in sys.stdin.read().split()]
    lo = nums[0]
    hi = nums[1]
    acc = 0
    for v in nums[2:]:
        c = clip(v, lo, hi)
        acc += c
        print(c)
    print("sum", acc)


main()
