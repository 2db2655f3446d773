"""
Leibnizian strings and variety
==============================

Positions of a cyclic string are told apart by the neighborhoods around them.
"""
from leibniz_multiway.strcore import (
    conditional_entropy,
    fractal_word,
    indifference_profile,
    is_leibnizian,
    neighborhood,
    variety,
)

# every radius-2 view of AABABB is distinct, so the string is Leibnizian
word = "AABABB"
for i in range(1, len(word) + 1):
    print(i, "".join(neighborhood(word, i, 2)))
print("leibnizian:", is_leibnizian(word))

# the absolute indifference of each position, and their reciprocal sum
prof = indifference_profile(word)
print("a =", prof.a, "variety =", variety(word))

# AAABBB has two interchangeable halves
print("AAABBB leibnizian:", is_leibnizian("AAABBB"))

# the fractal family A B AA BB AAA BBB ... stays Leibnizian as it grows
for n in range(2, 6):
    w = fractal_word("AB", n)
    print(n, w, variety(w), round(conditional_entropy(w), 4))
