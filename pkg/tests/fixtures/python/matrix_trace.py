import sys


def trace_sum(rows, size):
    acc = 0
    for i in range(size):
        for j in range(size):
            if i == j:
                acc += rows[i][j]
    return acc


def main():
    nums = [int(x) for x in sys.stdin.read().split()]
    size = nums[0]
    cells = nums[1:]
    rows = []
    for i in range(size):
        rows.append(cells[i * size:(i + 1) * size])
    print(trace_sum(rows, size))


main()
