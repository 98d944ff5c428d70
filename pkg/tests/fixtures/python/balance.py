import sys


def apply_ops(start, ops):
    balance = start
    for op in ops:
        kind = op[0]
        amount = int(op[1:])
        if kind == "+":
            balance += amount
        elif kind == "-":
            if amount > balance:
                continue
            balance -= amount
    return balance


def main():
    tokens = sys.stdin.read().split()
    start = int(tokens[0])
    print(apply_ops(start, tokens[1:]))


main()
