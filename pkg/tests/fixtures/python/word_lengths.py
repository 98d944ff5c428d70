import sys


def measure(words, cutoff):
    sizes = []
    for w in words:
        n = len(w)
        if n > cutoff and n < 30:
            sizes.append(n)
        else:
            sizes.append(0)
    return sizes


def main():
    words = sys.stdin.read().split()
    out = measure(words, 3)
    for n in out:
        print(n)


main()
