import sys


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def main():
    values = [int(x) for x in sys.stdin.read().split()]
    count = 0
    for v in values:
        if is_prime(v):
            count += 1
            print(v)
    print("total", count)


main()
